#pragma once

#include <cstddef>

namespace uitrust::sim {

// CC2420-class constants (Tmote Sky).
struct EnergyModel {
    double tx_current_a = 0.0174;
    double rx_current_a = 0.0188;
    double idle_current_a = 0.0;
    double voltage_v = 3.0;
    double bitrate_bps = 250'000.0;
};

struct EnergyAccount {
    double tx_joules = 0.0;
    double rx_joules = 0.0;
    double idle_joules = 0.0;

    double total() const { return tx_joules + rx_joules + idle_joules; }
};

enum class EnergyAction { TxBytes, RxBytes, IdleSeconds };

// Adds current * voltage * airtime(amount) to the matching component.
// `amount` is bytes for Tx/Rx and seconds for Idle. Throws for amount < 0.
void account_energy(EnergyAccount& account, const EnergyModel& model, EnergyAction action, double amount);

}  // namespace uitrust::sim
