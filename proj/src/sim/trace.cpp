#include "uitrust/sim/trace.hpp"

#include <cstdio>

namespace uitrust::sim {

std::string format_mac(std::uint64_t mac) {
    if (mac == kBroadcast) {
        return "*";
    }
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", static_cast<unsigned>((mac >> 40) & 0xff),
                  static_cast<unsigned>((mac >> 32) & 0xff), static_cast<unsigned>((mac >> 24) & 0xff),
                  static_cast<unsigned>((mac >> 16) & 0xff), static_cast<unsigned>((mac >> 8) & 0xff),
                  static_cast<unsigned>(mac & 0xff));
    return buf;
}

namespace {

void put_mac(std::string& s, std::uint64_t mac) {
    if (mac == kBroadcast) {
        s += '*';
        return;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    for (int shift = 40; shift >= 0; shift -= 8) {
        const auto b = static_cast<unsigned>((mac >> shift) & 0xff);
        s += kHex[b >> 4];
        s += kHex[b & 0xf];
        if (shift > 0) {
            s += ':';
        }
    }
}

}  // namespace

std::string TraceSink::to_json(const TraceRecord& r) {
    std::string s;
    s.reserve(112);
    s += "{\"t\":";
    s += r.t.to_string();
    s += ",\"kind\":\"";
    s += r.kind;
    s += "\",\"src\":\"";
    put_mac(s, r.src);
    s += "\",\"dst\":\"";
    put_mac(s, r.dst);
    s += "\",\"bytes\":";
    s += std::to_string(r.bytes);
    s += ",\"outcome\":\"";
    s += r.outcome;
    s += "\"}";
    return s;
}

void TraceSink::mix(std::uint64_t v) {
    // FNV-1a over the eight bytes of v
    for (int i = 0; i < 8; ++i) {
        hash_ ^= (v >> (8 * i)) & 0xff;
        hash_ *= 0x100000001b3ULL;
    }
}

void TraceSink::mix_text(std::string_view text) {
    for (unsigned char c : text) {
        hash_ ^= c;
        hash_ *= 0x100000001b3ULL;
    }
    hash_ ^= 0xff;
    hash_ *= 0x100000001b3ULL;
}

void TraceSink::record(const TraceRecord& r) {
    mix(static_cast<std::uint64_t>(r.t.micros()));
    mix_text(r.kind);
    mix(r.src);
    mix(r.dst);
    mix(r.bytes);
    mix_text(r.outcome);
    ++count_;
    if (out_ != nullptr) {
        *out_ << to_json(r) << '\n';
    }
}

}  // namespace uitrust::sim
