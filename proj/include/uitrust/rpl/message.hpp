#pragma once

#include "uitrust/wire.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace uitrust::rpl {

using wire::Mac;

enum class MessageKind : std::uint8_t { DIS, DIO, DAO };

std::string_view to_string(MessageKind k);

inline constexpr std::uint16_t kInfiniteRank = 0xFFFF;

// On-air sizes: 802.15.4 header + compressed IPv6/ICMPv6 + FCS, then the RPL
// body. Piggyback fields ride in the reserved bytes of DIO/DAO objects and
// add their packed size on top.
inline constexpr std::size_t kLinkOverheadBytes = 21;
inline constexpr std::size_t kDisBodyBytes = 6;
inline constexpr std::size_t kDioBodyBytes = 24;
inline constexpr std::size_t kDaoBodyBytes = 20;
inline constexpr std::size_t kDataPayloadBytes = 30;

using Piggyback = std::variant<std::monostate, wire::QueryField, wire::ResponseField>;

struct ControlMessage {
    MessageKind kind = MessageKind::DIS;
    Mac src_mac = 0;
    Mac dst_mac = 0;  // unicast DAO next hop; broadcast otherwise
    std::uint16_t rank = kInfiniteRank;  // DIO only
    std::uint8_t version = 0;            // DIO only
    std::uint8_t hops = 0;               // DIO only
    bool alarm = false;                  // DIO only
    Piggyback piggyback;
    std::vector<wire::LtoEntry> lto_report;  // DIO only

    // Non-storing DAO route record: `dao_target` reached via `dao_parent`.
    Mac dao_target = 0;
    Mac dao_parent = 0;

    bool has_query() const { return std::holds_alternative<wire::QueryField>(piggyback); }
    bool has_response() const { return std::holds_alternative<wire::ResponseField>(piggyback); }

    std::size_t bytes() const;

    // Bytes added by the detector fields alone.
    std::size_t piggyback_bytes() const;

    // Throws std::logic_error if a query rides on anything but a DIO, a
    // response on anything but a DAO, or a report on anything but a DIO.
    void validate() const;
};

ControlMessage make_dis(Mac src);
ControlMessage make_dio(Mac src, std::uint16_t rank, std::uint8_t version, std::uint8_t hops, bool alarm);
ControlMessage make_dao(Mac src, Mac dst, Mac target, Mac parent);

}  // namespace uitrust::rpl
