#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

// Identifier types and the bit-exact piggyback fields carried inside DIO and
// DAO frames. All fields are packed MSB-first; trailing bits of the last
// byte are zero.
namespace uitrust::wire {

using Mac = std::uint64_t;  // 48 significant bits
using UidValue = std::uint64_t;

inline constexpr Mac kMacMask = 0xFFFF'FFFF'FFFFULL;

// Hardware identifier sources, in query rotation order.
enum class UidType : std::uint8_t {
    SiliconSerial = 0,     // 48-bit silicon serial ID
    RadioTransceiver = 1,  // 16-bit transceiver number
    PartNumber = 2,        // 4-bit version + 16-bit part number
};

inline constexpr std::size_t kUidTypeCount = 3;

unsigned uid_bits(UidType t);
const char* to_string(UidType t);

// Next type in rotation order, nullopt when the rotation is exhausted.
std::optional<UidType> next_uid_type(UidType t);

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QueryField {
    UidType uid_type = UidType::SiliconSerial;
    std::uint16_t nonce = 0;

    static constexpr std::size_t kBits = 4 + 16;
    static constexpr std::size_t kBytes = (kBits + 7) / 8;

    std::array<std::uint8_t, kBytes> encode() const;
    static QueryField decode(std::span<const std::uint8_t> bytes);
    bool operator==(const QueryField&) const = default;
};

struct ResponseField {
    UidType uid_type = UidType::SiliconSerial;
    UidValue uid = 0;
    std::uint16_t nonce = 0;  // echoes the query nonce

    static constexpr std::size_t kBits = 4 + 48 + 16;
    static constexpr std::size_t kBytes = (kBits + 7) / 8;

    std::array<std::uint8_t, kBytes> encode() const;
    static ResponseField decode(std::span<const std::uint8_t> bytes);
    bool operator==(const ResponseField&) const = default;
};

// One local-trust-opinion report entry: the evidence tallies an observer holds
// about one claimed identity. Counts saturate at 0xFFFF on the wire.
struct LtoEntry {
    Mac mac = 0;
    std::uint16_t p = 0;
    std::uint16_t n = 0;

    static constexpr std::size_t kBits = 48 + 16 + 16;
    static constexpr std::size_t kBytes = kBits / 8;

    std::array<std::uint8_t, kBytes> encode() const;
    static LtoEntry decode(std::span<const std::uint8_t> bytes);
    bool operator==(const LtoEntry&) const = default;
};

std::vector<std::uint8_t> encode_report(std::span<const LtoEntry> entries);
std::vector<LtoEntry> decode_report(std::span<const std::uint8_t> bytes);

}  // namespace uitrust::wire
