#include "uitrust/harness/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uitrust::harness {

void RssiProfileDetector::observe(std::size_t observer, Mac identity, double rssi_dbm, sim::SimTime t) {
    auto [it, fresh] = ids_.try_emplace(identity);
    auto& a = it->second;
    if (fresh) {
        a.first = t;
    }
    a.last = std::max(a.last, t);
    auto& p = a.at[observer];
    ++p.count;
    p.sum += rssi_dbm;
}

std::set<Mac> RssiProfileDetector::observed() const {
    std::set<Mac> out;
    for (const auto& [mac, a] : ids_) {
        for (const auto& [obs, p] : a.at) {
            if (p.count >= params_.min_samples) {
                out.insert(mac);
                break;
            }
        }
    }
    return out;
}

std::set<Mac> RssiProfileDetector::flagged() const {
    struct Entry {
        Mac mac;
        sim::SimTime first, last;
        std::vector<std::pair<std::size_t, double>> means;  // ascending observer
    };
    std::vector<Entry> entries;
    for (const auto& [mac, a] : ids_) {
        Entry e{mac, a.first, a.last, {}};
        for (const auto& [obs, p] : a.at) {
            if (p.count >= params_.min_samples) {
                e.means.emplace_back(obs, p.sum / p.count);
            }
        }
        if (!e.means.empty()) {
            entries.push_back(std::move(e));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return x.first != y.first ? x.first < y.first : x.mac < y.mac;
    });

    std::vector<std::size_t> parent(entries.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    // Handover pairs only: b first appears within `gap` of a's last frame,
    // which is how a rotating identity looks to a passive listener.
    const auto gap = sim::SimTime::from_seconds(params_.proximity_s);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& a = entries[i];
        const auto lo = std::lower_bound(entries.begin() + static_cast<std::ptrdiff_t>(i) + 1, entries.end(),
                                         a.last - gap, [](const Entry& e, sim::SimTime t) { return e.first < t; });
        for (auto jt = lo; jt != entries.end() && jt->first <= a.last + gap; ++jt) {
            const std::size_t j = static_cast<std::size_t>(jt - entries.begin());
            const auto& b = entries[j];
            std::uint32_t common = 0;
            bool close = true;
            auto ia = a.means.begin();
            auto ib = b.means.begin();
            while (close && ia != a.means.end() && ib != b.means.end()) {
                if (ia->first < ib->first) {
                    ++ia;
                } else if (ib->first < ia->first) {
                    ++ib;
                } else {
                    ++common;
                    close = std::fabs(ia->second - ib->second) < params_.epsilon_db;
                    ++ia;
                    ++ib;
                }
            }
            const auto observers = a.means.size() + b.means.size() - common;
            const bool same_audience = static_cast<double>(common) >= params_.min_observer_overlap * observers;
            if (close && common >= params_.min_common_observers && same_audience) {
                parent[find(i)] = find(j);
            }
        }
    }

    std::vector<std::size_t> size(entries.size(), 0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        ++size[find(i)];
    }
    std::set<Mac> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (size[find(i)] >= 2) {
            out.insert(entries[i].mac);
        }
    }
    return out;
}

double IdCountDetector::default_threshold(double factor, double i_min_s, double window_s) {
    return factor * window_s / i_min_s;
}

void IdCountDetector::observe(Mac identity, sim::SimTime t) {
    observed_.insert(identity);
    auto& q = recent_[identity];
    q.push_back(t);
    while (!q.empty() && q.front() <= t - window_) {
        q.pop_front();
    }
    if (static_cast<double>(q.size()) > threshold_) {
        flagged_.insert(identity);
    }
}

}  // namespace uitrust::harness
