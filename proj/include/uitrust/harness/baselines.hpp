#pragma once

#include "uitrust/sim/time.hpp"
#include "uitrust/wire.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

namespace uitrust::harness {

using wire::Mac;

struct RssiProfileParams {
    double epsilon_db = 3.0;
    double proximity_s = 3.0;  // max gap between one identity's end and the next one's start
    std::uint32_t min_samples = 3;
    std::uint32_t min_common_observers = 2;
    // Jaccard overlap of the two observer sets; one device is heard by the
    // same neighbours whatever identity it uses.
    double min_observer_overlap = 0.8;
};

// Passive RSSI-consistency detector. Two identities are taken for one device
// when one appears within proximity_s of the other's last frame and every
// observer that profiled both measured mean RSSI within epsilon. Both must
// also be profiled by largely the same observers. Groups of two or more
// merged identities are flagged.
class RssiProfileDetector {
public:
    explicit RssiProfileDetector(RssiProfileParams params = {}) : params_(params) {}

    void observe(std::size_t observer, Mac identity, double rssi_dbm, sim::SimTime t);

    // Identities with a usable profile at one or more observers.
    std::set<Mac> observed() const;
    std::set<Mac> flagged() const;

private:
    struct Profile {
        std::uint32_t count = 0;
        double sum = 0.0;
    };
    struct Activity {
        sim::SimTime first;
        sim::SimTime last;
        std::map<std::size_t, Profile> at;  // by observer
    };

    RssiProfileParams params_;
    std::unordered_map<Mac, Activity> ids_;
};

// Passive ID + message-count detector: an identity sending more than
// `threshold` DIS/DIO frames inside any sliding window is flagged (latched).
class IdCountDetector {
public:
    IdCountDetector(sim::SimTime window, double threshold) : window_(window), threshold_(threshold) {}

    // factor x the honest rate of one DIO per i_min, over the window.
    static double default_threshold(double factor, double i_min_s, double window_s);

    void observe(Mac identity, sim::SimTime t);

    const std::set<Mac>& observed() const { return observed_; }
    const std::set<Mac>& flagged() const { return flagged_; }
    double threshold() const { return threshold_; }

private:
    sim::SimTime window_;
    double threshold_;
    std::unordered_map<Mac, std::deque<sim::SimTime>> recent_;
    std::set<Mac> observed_;
    std::set<Mac> flagged_;
};

}  // namespace uitrust::harness
