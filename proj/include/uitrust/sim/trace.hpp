#pragma once

#include "uitrust/sim/time.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace uitrust::sim {

struct TraceRecord {
    SimTime t;
    std::string_view kind;     // DIS | DIO | DAO | DATA
    std::uint64_t src = 0;     // 48-bit MAC
    std::uint64_t dst = 0;     // 48-bit MAC, kBroadcast for multicast frames
    std::size_t bytes = 0;
    std::string_view outcome;  // delivered | loss | out_of_range | dropped
};

inline constexpr std::uint64_t kBroadcast = 0xFFFF'FFFF'FFFFULL;

std::string format_mac(std::uint64_t mac);

// Newline-delimited JSON event trace. Every record is folded into a running
// FNV-1a digest of its fields so determinism can be checked without keeping
// the text, which is written only when a stream is attached.
class TraceSink {
public:
    TraceSink() = default;
    explicit TraceSink(std::ostream* out) : out_(out) {}

    void record(const TraceRecord& r);

    std::uint64_t digest() const { return hash_; }
    std::uint64_t records() const { return count_; }

    static std::string to_json(const TraceRecord& r);

private:
    void mix(std::uint64_t v);
    void mix_text(std::string_view text);

    std::ostream* out_ = nullptr;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
    std::uint64_t count_ = 0;
};

}  // namespace uitrust::sim
