#include "uitrust/rpl/message.hpp"

#include "uitrust/sim/trace.hpp"

#include <stdexcept>

namespace uitrust::rpl {

std::string_view to_string(MessageKind k) {
    switch (k) {
        case MessageKind::DIS: return "DIS";
        case MessageKind::DIO: return "DIO";
        case MessageKind::DAO: return "DAO";
    }
    return "?";
}

std::size_t ControlMessage::piggyback_bytes() const {
    std::size_t b = lto_report.size() * wire::LtoEntry::kBytes;
    if (has_query()) {
        b += wire::QueryField::kBytes;
    } else if (has_response()) {
        b += wire::ResponseField::kBytes;
    }
    return b;
}

std::size_t ControlMessage::bytes() const {
    std::size_t body = 0;
    switch (kind) {
        case MessageKind::DIS: body = kDisBodyBytes; break;
        case MessageKind::DIO: body = kDioBodyBytes; break;
        case MessageKind::DAO: body = kDaoBodyBytes; break;
    }
    return kLinkOverheadBytes + body + piggyback_bytes();
}

void ControlMessage::validate() const {
    if (has_query() && kind != MessageKind::DIO) {
        throw std::logic_error("query field on a non-DIO message");
    }
    if (has_response() && kind != MessageKind::DAO) {
        throw std::logic_error("response field on a non-DAO message");
    }
    if (!lto_report.empty() && kind != MessageKind::DIO) {
        throw std::logic_error("LTO report on a non-DIO message");
    }
}

ControlMessage make_dis(Mac src) {
    ControlMessage m;
    m.kind = MessageKind::DIS;
    m.src_mac = src;
    m.dst_mac = sim::kBroadcast;
    return m;
}

ControlMessage make_dio(Mac src, std::uint16_t rank, std::uint8_t version, std::uint8_t hops, bool alarm) {
    ControlMessage m;
    m.kind = MessageKind::DIO;
    m.src_mac = src;
    m.dst_mac = sim::kBroadcast;
    m.rank = rank;
    m.version = version;
    m.hops = hops;
    m.alarm = alarm;
    return m;
}

ControlMessage make_dao(Mac src, Mac dst, Mac target, Mac parent) {
    ControlMessage m;
    m.kind = MessageKind::DAO;
    m.src_mac = src;
    m.dst_mac = dst;
    m.dao_target = target;
    m.dao_parent = parent;
    return m;
}

}  // namespace uitrust::rpl
