#pragma once

// Monte Carlo scenario generation plus fast-forward reduction with
// probability redistribution. The reduction metric works on standardized
// features of what the stage-1 problem actually sees: wind series and the
// aggregate-battery series of each microgrid.

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "mgsched/aggregate_battery.hpp"
#include "mgsched/common.hpp"
#include "mgsched/stochastic.hpp"

namespace mgsched {

struct Scenario {
    int id = 0;
    std::vector<std::vector<double>> wind;        // [microgrid][step] kW
    std::vector<std::vector<EVItinerary>> fleet;  // [microgrid][ev]
    double probability = 0.0;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    int horizon = 24;
    double step_hours = 1.0;

    int microgrids() const {
        return scenarios.empty() ? 0 : static_cast<int>(scenarios.front().wind.size());
    }

    void validate() const {
        double mass = 0.0;
        for (const auto& s : scenarios) {
            if (s.probability < 0) throw InfeasibleError("scenario: negative probability");
            mass += s.probability;
            if (static_cast<int>(s.wind.size()) != microgrids() ||
                static_cast<int>(s.fleet.size()) != microgrids())
                throw InfeasibleError("scenario: microgrid count mismatch");
            for (const auto& w : s.wind)
                if (static_cast<int>(w.size()) != horizon)
                    throw InfeasibleError("scenario: wind series length mismatch");
        }
        if (!scenarios.empty() && std::abs(mass - 1.0) > 1e-9)
            throw InfeasibleError("scenario: probabilities must sum to 1");
    }
};

struct ScenarioModels {
    DrivingModel driving;
    TurbineParams turbine;
    std::vector<double> wind_forecast_kw;  // per step, shared by all microgrids
    double sigma_pct = 0.10;
    FleetSpec fleet_spec;
    int microgrids = 5;
    int evs_per_microgrid = 100;
    int horizon = 24;
    double step_hours = 1.0;
};

struct GenerationStats {
    int resampled_fleets = 0;  // fleets redrawn because b_min exceeded b_max
};

/// Draw n equally weighted scenarios. Fleets whose aggregate profile is
/// infeasible (b_min > b_max at some step) are redrawn; the count is
/// reported through `stats`.
inline ScenarioSet generate(std::uint64_t seed, const ScenarioModels& m, int n,
                            GenerationStats* stats = nullptr) {
    if (n < 1) throw ConfigError("generate: scenario count must be >= 1");
    if (static_cast<int>(m.wind_forecast_kw.size()) != m.horizon)
        throw ConfigError("generate: wind forecast length must equal horizon");
    ScenarioSet set;
    set.horizon = m.horizon;
    set.step_hours = m.step_hours;
    set.scenarios.resize(static_cast<size_t>(n));
    GenerationStats local;
    for (int s = 0; s < n; ++s) {
        Scenario& sc = set.scenarios[static_cast<size_t>(s)];
        sc.id = s;
        sc.probability = 1.0 / n;
        sc.wind.resize(static_cast<size_t>(m.microgrids));
        sc.fleet.resize(static_cast<size_t>(m.microgrids));
        for (int g = 0; g < m.microgrids; ++g) {
            const std::uint64_t cell = static_cast<std::uint64_t>(s) * 1000003ULL +
                                       static_cast<std::uint64_t>(g);
            Rng wrng = make_stream(seed, "wind", cell);
            sc.wind[static_cast<size_t>(g)] =
                sample_wind_series(wrng, m.wind_forecast_kw, m.sigma_pct, m.turbine);
            for (int attempt = 0;; ++attempt) {
                if (attempt >= 1000)
                    throw SolverError("generate: cannot draw feasible fleet for microgrid");
                Rng frng = make_stream(seed, "fleet",
                                       cell * 1009ULL + static_cast<std::uint64_t>(attempt));
                std::vector<EVItinerary> fleet(static_cast<size_t>(m.evs_per_microgrid));
                for (auto& ev : fleet) ev = m.driving.sample_itinerary(frng, m.horizon);
                auto profile = build_profile(fleet, m.fleet_spec, m.horizon);
                if (profile.feasible()) {
                    sc.fleet[static_cast<size_t>(g)] = std::move(fleet);
                    break;
                }
                ++local.resampled_fleets;
            }
        }
    }
    if (stats) *stats = local;
    return set;
}

/// Distance metric over standardized scenario features. Standardization
/// scales each coordinate by its population std dev across the set.
class ScenarioDistance {
public:
    ScenarioDistance(const ScenarioSet& set, const FleetSpec& spec)
        : spec_(spec), horizon_(set.horizon), microgrids_(set.microgrids()) {
        const int S = static_cast<int>(set.scenarios.size());
        dim_ = microgrids_ * horizon_ * 5;  // wind + n + b_max + b_min + delta_b
        features_.reserve(static_cast<size_t>(S));
        for (const auto& sc : set.scenarios) features_.push_back(feature_row(sc));
        scale_.assign(static_cast<size_t>(dim_), 1.0);
        if (S > 1) {
            for (int d = 0; d < dim_; ++d) {
                double mean = 0.0;
                for (int s = 0; s < S; ++s) mean += features_[static_cast<size_t>(s)][static_cast<size_t>(d)];
                mean /= S;
                double var = 0.0;
                for (int s = 0; s < S; ++s) {
                    double e = features_[static_cast<size_t>(s)][static_cast<size_t>(d)] - mean;
                    var += e * e;
                }
                double sd = std::sqrt(var / S);
                scale_[static_cast<size_t>(d)] = sd > 1e-12 ? sd : 1.0;
            }
        }
    }

    int dimension() const { return dim_; }

    double operator()(int i, int j) const {
        return dist(features_[static_cast<size_t>(i)], features_[static_cast<size_t>(j)]);
    }

    /// Distance between two scenarios under this set's standardization.
    double between(const Scenario& a, const Scenario& b) const {
        if (static_cast<int>(a.wind.size()) != microgrids_ ||
            static_cast<int>(b.wind.size()) != microgrids_)
            throw InfeasibleError("scenario_distance: microgrid count mismatch");
        for (const auto& w : a.wind)
            if (static_cast<int>(w.size()) != horizon_)
                throw InfeasibleError("scenario_distance: horizon mismatch");
        for (const auto& w : b.wind)
            if (static_cast<int>(w.size()) != horizon_)
                throw InfeasibleError("scenario_distance: horizon mismatch");
        return dist(feature_row(a), feature_row(b));
    }

private:
    std::vector<double> feature_row(const Scenario& sc) const {
        std::vector<double> f(static_cast<size_t>(dim_));
        size_t k = 0;
        for (int g = 0; g < microgrids_; ++g) {
            auto prof = build_profile(sc.fleet[static_cast<size_t>(g)], spec_, horizon_);
            for (int t = 0; t < horizon_; ++t) f[k++] = sc.wind[static_cast<size_t>(g)][static_cast<size_t>(t)];
            for (int t = 0; t < horizon_; ++t) f[k++] = prof.n[static_cast<size_t>(t)];
            for (int t = 0; t < horizon_; ++t) f[k++] = prof.b_max[static_cast<size_t>(t)];
            for (int t = 0; t < horizon_; ++t) f[k++] = prof.b_min[static_cast<size_t>(t)];
            for (int t = 0; t < horizon_; ++t) f[k++] = prof.delta_b[static_cast<size_t>(t)];
        }
        return f;
    }

    double dist(const std::vector<double>& a, const std::vector<double>& b) const {
        double acc = 0.0;
        for (int d = 0; d < dim_; ++d) {
            double e = (a[static_cast<size_t>(d)] - b[static_cast<size_t>(d)]) / scale_[static_cast<size_t>(d)];
            acc += e * e;
        }
        return std::sqrt(acc);
    }

    FleetSpec spec_;
    int horizon_ = 0;
    int microgrids_ = 0;
    int dim_ = 0;
    std::vector<std::vector<double>> features_;
    std::vector<double> scale_;
};

/// Distance between two scenarios using a reference set's standardization.
inline double scenario_distance(const Scenario& a, const Scenario& b, const ScenarioSet& context,
                                const FleetSpec& spec) {
    return ScenarioDistance(context, spec).between(a, b);
}

struct ReductionResult {
    ScenarioSet set;           // kept scenarios, probabilities redistributed
    std::vector<int> kept;     // indices into the input set, ascending
    double objective = 0.0;    // sum over deleted of tau * distance to kept
};

/// Greedy fast-forward selection of k scenarios; deleted probability mass
/// moves to the nearest kept scenario. Ties break on the lowest scenario id.
inline ReductionResult fast_forward_reduce(const ScenarioSet& set, int k,
                                           const FleetSpec& spec) {
    const int S = static_cast<int>(set.scenarios.size());
    if (k < 1 || k > S) throw ConfigError("fast_forward_reduce: k must be in [1, |set|]");
    ReductionResult res;
    if (k == S) {  // identity, probabilities untouched
        res.set = set;
        res.kept.resize(static_cast<size_t>(S));
        for (int i = 0; i < S; ++i) res.kept[static_cast<size_t>(i)] = i;
        res.objective = 0.0;
        return res;
    }

    ScenarioDistance metric(set, spec);
    std::vector<std::vector<double>> D(static_cast<size_t>(S),
                                       std::vector<double>(static_cast<size_t>(S), 0.0));
    for (int i = 0; i < S; ++i)
        for (int j = i + 1; j < S; ++j) D[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            D[static_cast<size_t>(j)][static_cast<size_t>(i)] = metric(i, j);

    std::vector<bool> kept_mask(static_cast<size_t>(S), false);
    std::vector<double> min_d(static_cast<size_t>(S), std::numeric_limits<double>::infinity());
    std::vector<int> kept;
    double objective = 0.0;
    for (int pick = 0; pick < k; ++pick) {
        int best = -1;
        double best_obj = std::numeric_limits<double>::infinity();
        for (int c = 0; c < S; ++c) {
            if (kept_mask[static_cast<size_t>(c)]) continue;
            double obj = 0.0;
            for (int s = 0; s < S; ++s) {
                if (kept_mask[static_cast<size_t>(s)] || s == c) continue;
                obj += set.scenarios[static_cast<size_t>(s)].probability *
                       std::min(min_d[static_cast<size_t>(s)], D[static_cast<size_t>(s)][static_cast<size_t>(c)]);
            }
            if (obj < best_obj - 1e-15 || (std::abs(obj - best_obj) <= 1e-15 && best != -1 &&
                                           set.scenarios[static_cast<size_t>(c)].id <
                                               set.scenarios[static_cast<size_t>(best)].id)) {
                best_obj = obj;
                best = c;
            }
        }
        kept_mask[static_cast<size_t>(best)] = true;
        kept.push_back(best);
        objective = best_obj;
        for (int s = 0; s < S; ++s)
            min_d[static_cast<size_t>(s)] =
                std::min(min_d[static_cast<size_t>(s)], D[static_cast<size_t>(s)][static_cast<size_t>(best)]);
    }
    std::sort(kept.begin(), kept.end());

    // Redistribute deleted mass to the nearest kept scenario.
    std::vector<double> prob(static_cast<size_t>(S), 0.0);
    for (int i : kept) prob[static_cast<size_t>(i)] = set.scenarios[static_cast<size_t>(i)].probability;
    for (int s = 0; s < S; ++s) {
        if (kept_mask[static_cast<size_t>(s)]) continue;
        int nearest = -1;
        double nd = std::numeric_limits<double>::infinity();
        for (int r : kept) {
            double d = D[static_cast<size_t>(s)][static_cast<size_t>(r)];
            if (d < nd - 1e-15 ||
                (std::abs(d - nd) <= 1e-15 && nearest != -1 &&
                 set.scenarios[static_cast<size_t>(r)].id < set.scenarios[static_cast<size_t>(nearest)].id)) {
                nd = d;
                nearest = r;
            }
        }
        prob[static_cast<size_t>(nearest)] += set.scenarios[static_cast<size_t>(s)].probability;
    }

    res.set.horizon = set.horizon;
    res.set.step_hours = set.step_hours;
    for (int i : kept) {
        Scenario sc = set.scenarios[static_cast<size_t>(i)];
        sc.probability = prob[static_cast<size_t>(i)];
        res.set.scenarios.push_back(std::move(sc));
    }
    res.kept = kept;
    res.objective = objective;
    return res;
}

/// Transport objective of an explicit kept subset (test oracle hook).
inline double reduction_objective(const ScenarioSet& set, const std::vector<int>& kept,
                                  const FleetSpec& spec) {
    ScenarioDistance metric(set, spec);
    double obj = 0.0;
    for (int s = 0; s < static_cast<int>(set.scenarios.size()); ++s) {
        if (std::find(kept.begin(), kept.end(), s) != kept.end()) continue;
        double nd = std::numeric_limits<double>::infinity();
        for (int r : kept) nd = std::min(nd, metric(s, r));
        obj += set.scenarios[static_cast<size_t>(s)].probability * nd;
    }
    return obj;
}

// --- JSON serialization -----------------------------------------------------

inline nlohmann::json to_json(const ScenarioSet& set) {
    nlohmann::json j;
    j["horizon"] = set.horizon;
    j["step_hours"] = set.step_hours;
    j["scenarios"] = nlohmann::json::array();
    for (const auto& s : set.scenarios) {
        nlohmann::json js;
        js["id"] = s.id;
        js["probability"] = s.probability;
        js["wind"] = s.wind;
        nlohmann::json fleets = nlohmann::json::array();
        for (const auto& mg : s.fleet) {
            nlohmann::json evs = nlohmann::json::array();
            for (const auto& ev : mg)
                evs.push_back({{"t_dep", ev.t_dep},
                               {"t_arr", ev.t_arr},
                               {"trips", ev.trips},
                               {"soc_ini", ev.soc_ini}});
            fleets.push_back(std::move(evs));
        }
        js["fleet"] = std::move(fleets);
        j["scenarios"].push_back(std::move(js));
    }
    return j;
}

inline ScenarioSet scenario_set_from_json(const nlohmann::json& j) {
    ScenarioSet set;
    try {
        set.horizon = j.at("horizon").get<int>();
        set.step_hours = j.at("step_hours").get<double>();
        for (const auto& js : j.at("scenarios")) {
            Scenario s;
            s.id = js.at("id").get<int>();
            s.probability = js.at("probability").get<double>();
            s.wind = js.at("wind").get<std::vector<std::vector<double>>>();
            for (const auto& mg : js.at("fleet")) {
                std::vector<EVItinerary> evs;
                for (const auto& je : mg) {
                    EVItinerary ev;
                    ev.t_dep = je.at("t_dep").get<int>();
                    ev.t_arr = je.at("t_arr").get<int>();
                    ev.trips = je.at("trips").get<std::vector<double>>();
                    ev.soc_ini = je.at("soc_ini").get<double>();
                    evs.push_back(std::move(ev));
                }
                s.fleet.push_back(std::move(evs));
            }
            set.scenarios.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenarios.json: ") + e.what());
    }
    set.validate();
    return set;
}

inline void write_scenarios(std::ostream& os, const ScenarioSet& set) {
    os << to_json(set).dump(2) << '\n';
}

inline ScenarioSet read_scenarios(std::istream& is) {
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenarios.json parse: ") + e.what());
    }
    return scenario_set_from_json(j);
}

}  // namespace mgsched
