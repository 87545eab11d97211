#pragma once

// Time-varying aggregate-battery parameters of one microgrid in one
// scenario, derived from the individual itineraries. Arrays are 0-indexed
// by step (index 0 = first scheduling hour).

#include <ostream>
#include <vector>

#include "mgsched/common.hpp"
#include "mgsched/stochastic.hpp"

namespace mgsched {

struct FleetSpec {
    double E = 33.0;        // battery capacity, kWh
    double p_ev_max = 3.0;  // per-EV charge/discharge limit, kW
    double soc_min = 0.10;  // lower SOC bound
    double k_drive = 6.7;   // electric drive efficiency, km/kWh

    void validate() const {
        if (E <= 0) throw ConfigError("fleet: battery capacity must be positive");
        if (p_ev_max <= 0) throw ConfigError("fleet: p_ev_max must be positive");
        if (soc_min < 0 || soc_min >= 1) throw ConfigError("fleet: soc_min must be in [0,1)");
        if (k_drive <= 0) throw ConfigError("fleet: k_drive must be positive");
    }
};

struct AggregateBatteryProfile {
    std::vector<int> n;          // EVs connected per step
    std::vector<double> p_max;   // kW
    std::vector<double> p_min;   // kW (= -p_max)
    std::vector<double> b_max;   // kWh
    std::vector<double> b_min;   // kWh
    std::vector<double> delta_b; // kWh, arrival/departure energy jumps
    double b0 = 0.0;             // aggregate energy connected at the horizon start
    int clamped_soc_targets = 0; // EVs whose trip demand exceeded k*E

    int horizon() const { return static_cast<int>(n.size()); }

    bool feasible(double tol = 1e-9) const {
        for (size_t t = 0; t < n.size(); ++t)
            if (b_min[t] > b_max[t] + tol) return false;
        return true;
    }
};

/// SOC an EV must hold at departure to cover its trips, clamped to
/// [soc_min, 1]. Sets *clamped when the raw requirement exceeds 1.
inline double departure_soc(const EVItinerary& it, const FleetSpec& spec,
                            bool* clamped = nullptr) {
    double need = 0.0;
    for (double d : it.trips) need += d;
    double req = need / (spec.k_drive * spec.E);
    if (clamped) *clamped = req > 1.0;
    return std::min(1.0, std::max(spec.soc_min, req));
}

inline AggregateBatteryProfile build_profile(const std::vector<EVItinerary>& fleet,
                                             const FleetSpec& spec, int horizon) {
    spec.validate();
    AggregateBatteryProfile p;
    p.n.assign(static_cast<size_t>(horizon), 0);
    p.p_max.assign(static_cast<size_t>(horizon), 0.0);
    p.p_min.assign(static_cast<size_t>(horizon), 0.0);
    p.b_max.assign(static_cast<size_t>(horizon), 0.0);
    p.b_min.assign(static_cast<size_t>(horizon), 0.0);
    p.delta_b.assign(static_cast<size_t>(horizon), 0.0);

    // Events indexed 1..T+1; step t in the arrays is index t+1 here.
    std::vector<int> arrivals(static_cast<size_t>(horizon) + 2, 0);
    std::vector<int> departures(static_cast<size_t>(horizon) + 2, 0);
    std::vector<double> arr_energy(static_cast<size_t>(horizon) + 2, 0.0);
    std::vector<double> dep_energy(static_cast<size_t>(horizon) + 2, 0.0);

    int n0 = 0;
    for (const auto& it : fleet) {
        it.validate(horizon);
        bool clamped = false;
        const double soc0 = departure_soc(it, spec, &clamped);
        if (clamped) ++p.clamped_soc_targets;
        if (it.t_arr == 0) {
            ++n0;
            p.b0 += it.soc_ini * spec.E;
        } else {
            arrivals[static_cast<size_t>(it.t_arr)] += 1;
            arr_energy[static_cast<size_t>(it.t_arr)] += it.soc_ini * spec.E;
        }
        departures[static_cast<size_t>(it.t_dep)] += 1;
        dep_energy[static_cast<size_t>(it.t_dep)] += soc0 * spec.E;
    }

    int n_prev = n0;
    for (int t = 1; t <= horizon; ++t) {
        const size_t i = static_cast<size_t>(t - 1);
        const int n_t = n_prev + arrivals[static_cast<size_t>(t)] -
                        departures[static_cast<size_t>(t)];
        if (n_t < 0) throw InfeasibleError("build_profile: negative EV count (inconsistent fleet)");
        p.n[i] = n_t;
        p.delta_b[i] = arr_energy[static_cast<size_t>(t)] - dep_energy[static_cast<size_t>(t)];
        p.b_max[i] = n_t * spec.E;
        p.b_min[i] = dep_energy[static_cast<size_t>(t + 1)] + n_t * spec.soc_min * spec.E;
        p.p_max[i] = n_t * spec.p_ev_max;
        p.p_min[i] = -p.p_max[i];
        n_prev = n_t;
    }
    return p;
}

/// CSV export mirroring the battery-information table layout.
inline void write_profile_csv(std::ostream& os, const AggregateBatteryProfile& p) {
    os << "hour,n,p_max,b_min,b_max,delta_b\n";
    for (int t = 0; t < p.horizon(); ++t) {
        const size_t i = static_cast<size_t>(t);
        os << (t + 1) << ',' << p.n[i] << ',' << fmt_num(p.p_max[i]) << ','
           << fmt_num(p.b_min[i]) << ',' << fmt_num(p.b_max[i]) << ','
           << fmt_num(p.delta_b[i]) << '\n';
    }
}

}  // namespace mgsched
