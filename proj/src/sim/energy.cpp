#include "uitrust/sim/energy.hpp"

#include <stdexcept>

namespace uitrust::sim {

void account_energy(EnergyAccount& account, const EnergyModel& model, EnergyAction action, double amount) {
    if (!(amount >= 0.0)) {
        throw std::invalid_argument("account_energy: negative amount");
    }
    switch (action) {
        case EnergyAction::TxBytes:
            account.tx_joules += model.tx_current_a * model.voltage_v * (amount * 8.0 / model.bitrate_bps);
            break;
        case EnergyAction::RxBytes:
            account.rx_joules += model.rx_current_a * model.voltage_v * (amount * 8.0 / model.bitrate_bps);
            break;
        case EnergyAction::IdleSeconds:
            account.idle_joules += model.idle_current_a * model.voltage_v * amount;
            break;
    }
}

}  // namespace uitrust::sim
