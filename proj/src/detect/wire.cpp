#include "uitrust/wire.hpp"

#include <string>

namespace uitrust::wire {

namespace {

class BitWriter {
public:
    explicit BitWriter(std::span<std::uint8_t> out) : out_(out) {}

    void put(std::uint64_t value, unsigned bits) {
        for (unsigned i = bits; i-- > 0;) {
            if ((value >> i) & 1U) {
                out_[pos_ / 8] |= static_cast<std::uint8_t>(0x80U >> (pos_ % 8));
            }
            ++pos_;
        }
    }

private:
    std::span<std::uint8_t> out_;
    std::size_t pos_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint64_t get(unsigned bits) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < bits; ++i) {
            v = (v << 1) | ((in_[pos_ / 8] >> (7 - pos_ % 8)) & 1U);
            ++pos_;
        }
        return v;
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void require_size(std::span<const std::uint8_t> bytes, std::size_t n, const char* what) {
    if (bytes.size() != n) {
        throw WireError(std::string(what) + ": expected " + std::to_string(n) + " bytes, got " +
                        std::to_string(bytes.size()));
    }
}

UidType checked_uid_type(std::uint64_t raw) {
    if (raw >= kUidTypeCount) {
        throw WireError("unknown uid_type " + std::to_string(raw));
    }
    return static_cast<UidType>(raw);
}

}  // namespace

unsigned uid_bits(UidType t) {
    switch (t) {
        case UidType::SiliconSerial: return 48;
        case UidType::RadioTransceiver: return 16;
        case UidType::PartNumber: return 20;
    }
    return 0;
}

const char* to_string(UidType t) {
    switch (t) {
        case UidType::SiliconSerial: return "silicon_serial";
        case UidType::RadioTransceiver: return "radio_transceiver";
        case UidType::PartNumber: return "part_number";
    }
    return "?";
}

std::optional<UidType> next_uid_type(UidType t) {
    const auto i = static_cast<std::size_t>(t) + 1;
    if (i >= kUidTypeCount) {
        return std::nullopt;
    }
    return static_cast<UidType>(i);
}

std::array<std::uint8_t, QueryField::kBytes> QueryField::encode() const {
    std::array<std::uint8_t, kBytes> out{};
    BitWriter w(out);
    w.put(static_cast<std::uint64_t>(uid_type), 4);
    w.put(nonce, 16);
    return out;
}

QueryField QueryField::decode(std::span<const std::uint8_t> bytes) {
    require_size(bytes, kBytes, "QueryField");
    BitReader r(bytes);
    QueryField q;
    q.uid_type = checked_uid_type(r.get(4));
    q.nonce = static_cast<std::uint16_t>(r.get(16));
    return q;
}

std::array<std::uint8_t, ResponseField::kBytes> ResponseField::encode() const {
    if (uid >> uid_bits(uid_type) != 0) {
        throw WireError("uid does not fit the width of its uid_type");
    }
    std::array<std::uint8_t, kBytes> out{};
    BitWriter w(out);
    w.put(static_cast<std::uint64_t>(uid_type), 4);
    w.put(uid, 48);
    w.put(nonce, 16);
    return out;
}

ResponseField ResponseField::decode(std::span<const std::uint8_t> bytes) {
    require_size(bytes, kBytes, "ResponseField");
    BitReader r(bytes);
    ResponseField f;
    f.uid_type = checked_uid_type(r.get(4));
    f.uid = r.get(48);
    f.nonce = static_cast<std::uint16_t>(r.get(16));
    if (f.uid >> uid_bits(f.uid_type) != 0) {
        throw WireError("uid does not fit the width of its uid_type");
    }
    return f;
}

std::array<std::uint8_t, LtoEntry::kBytes> LtoEntry::encode() const {
    std::array<std::uint8_t, kBytes> out{};
    BitWriter w(out);
    w.put(mac & kMacMask, 48);
    w.put(p, 16);
    w.put(n, 16);
    return out;
}

LtoEntry LtoEntry::decode(std::span<const std::uint8_t> bytes) {
    require_size(bytes, kBytes, "LtoEntry");
    BitReader r(bytes);
    LtoEntry e;
    e.mac = r.get(48);
    e.p = static_cast<std::uint16_t>(r.get(16));
    e.n = static_cast<std::uint16_t>(r.get(16));
    return e;
}

std::vector<std::uint8_t> encode_report(std::span<const LtoEntry> entries) {
    std::vector<std::uint8_t> out;
    out.reserve(entries.size() * LtoEntry::kBytes);
    for (const auto& e : entries) {
        const auto b = e.encode();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

std::vector<LtoEntry> decode_report(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % LtoEntry::kBytes != 0) {
        throw WireError("LTO report length is not a multiple of the entry size");
    }
    std::vector<LtoEntry> out;
    for (std::size_t i = 0; i < bytes.size(); i += LtoEntry::kBytes) {
        out.push_back(LtoEntry::decode(bytes.subspan(i, LtoEntry::kBytes)));
    }
    return out;
}

}  // namespace uitrust::wire
