#include "uitrust/wire.hpp"

#include <doctest.h>

#include <vector>

using namespace uitrust::wire;

TEST_CASE("query field packs 4 + 16 bits MSB first") {
    const QueryField q{UidType::RadioTransceiver, 0xABCD};
    const auto b = q.encode();
    CHECK(b.size() == 3);
    CHECK(std::vector<unsigned>(b.begin(), b.end()) == std::vector<unsigned>{0x1A, 0xBC, 0xD0});
    CHECK(QueryField::decode(b) == q);
}

TEST_CASE("response field packs 4 + 48 + 16 bits") {
    const ResponseField r{UidType::SiliconSerial, 0x123456789ABCULL, 0xBEEF};
    const auto b = r.encode();
    CHECK(b.size() == 9);
    CHECK(std::vector<unsigned>(b.begin(), b.end()) ==
          std::vector<unsigned>{0x01, 0x23, 0x45, 0x67, 0x89, 0xAB, 0xCB, 0xEE, 0xF0});
    CHECK(ResponseField::decode(b) == r);
}

TEST_CASE("lto entry packs 48 + 16 + 16 bits") {
    const LtoEntry e{0x021122334455ULL, 0x0102, 0xFFFF};
    const auto b = e.encode();
    CHECK(std::vector<unsigned>(b.begin(), b.end()) ==
          std::vector<unsigned>{0x02, 0x11, 0x22, 0x33, 0x44, 0x55, 0x01, 0x02, 0xFF, 0xFF});
    CHECK(LtoEntry::decode(b) == e);

    const std::vector<LtoEntry> many{e, {7, 1, 2}, {kMacMask, 0, 0}};
    const auto bytes = encode_report(many);
    CHECK(bytes.size() == 3 * LtoEntry::kBytes);
    CHECK(decode_report(bytes) == many);
}

TEST_CASE("malformed fields are rejected") {
    const std::vector<std::uint8_t> short_q{0x00, 0x01};
    CHECK_THROWS_AS(QueryField::decode(short_q), WireError);
    const std::vector<std::uint8_t> bad_type{0xF0, 0x00, 0x00};
    CHECK_THROWS_AS(QueryField::decode(bad_type), WireError);
    const std::vector<std::uint8_t> ragged(LtoEntry::kBytes + 1, 0);
    CHECK_THROWS_AS(decode_report(ragged), WireError);
    // 16-bit type cannot carry a 48-bit value
    CHECK_THROWS_AS((ResponseField{UidType::RadioTransceiver, 0x10000, 0}.encode()), WireError);
}

TEST_CASE("uid type rotation order and widths") {
    CHECK(uid_bits(UidType::SiliconSerial) == 48);
    CHECK(uid_bits(UidType::RadioTransceiver) == 16);
    CHECK(uid_bits(UidType::PartNumber) == 20);
    CHECK(next_uid_type(UidType::SiliconSerial) == UidType::RadioTransceiver);
    CHECK(next_uid_type(UidType::RadioTransceiver) == UidType::PartNumber);
    CHECK_FALSE(next_uid_type(UidType::PartNumber).has_value());
}
