#pragma once

// Statistical models for EV driving behaviour and wind power. The density
// functions double as oracles for the samplers; all sampling is driven by
// caller-owned RNG streams so results are reproducible bit-for-bit.
//
// Time conventions: the scheduling horizon has T hourly steps starting at
// `horizon_start_hour` (noon by default), step 1 covering 12:00-13:00.
// Itineraries store step indices: the vehicle is connected on [t_arr, t_dep)
// and away on the wrap-around complement. A departure drawn at or after the
// horizon-start hour falls outside the schedule window, so the vehicle simply
// stays connected to the end (t_dep = T+1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mgsched/common.hpp"

namespace mgsched {

struct ArrivalWindow {
    double mu = 18.0;     // mean arrival clock hour
    double sigma = 1.5;   // std dev, hours
};

struct DrivingPatternParams {
    double v = 9.0;            // chi-square degrees of freedom for departures
    double window_size = 1.0;  // departure window width, hours
    std::vector<ArrivalWindow> arrival;  // one per departure window
    double beta = 1.25;        // trip-distance exponent
    double d0 = 1.8;           // distance offset, km
    double alpha = 20.0;       // exponential cutoff, km
    double d_max = 200.0;      // numeric support for the trip-distance density
    std::vector<double> trip_count_pmf{0.40, 0.40, 0.15, 0.05};  // P(m trips), m=1..
    double soc_ini_lo = 0.10;  // arrival SOC drawn uniformly from this range
    double soc_ini_hi = 0.50;
    int horizon_start_hour = 12;

    int windows() const { return static_cast<int>(std::lround(24.0 / window_size)); }

    void validate() const {
        if (v <= 0) throw ConfigError("driving: chi-square dof v must be positive");
        if (window_size <= 0) throw ConfigError("driving: window_size must be positive");
        if (beta <= 0 || d0 <= 0 || alpha <= 0 || d_max <= 0)
            throw ConfigError("driving: trip-distance parameters must be positive");
        if (!arrival.empty() && static_cast<int>(arrival.size()) != windows())
            throw ConfigError("driving: arrival window count must match 24h/window_size");
        for (const auto& w : arrival)
            if (w.sigma <= 0) throw ConfigError("driving: arrival sigma must be positive");
        double mass = std::accumulate(trip_count_pmf.begin(), trip_count_pmf.end(), 0.0);
        if (trip_count_pmf.empty() || std::abs(mass - 1.0) > 1e-9)
            throw ConfigError("driving: trip_count_pmf must sum to 1");
        for (double p : trip_count_pmf)
            if (p < 0) throw ConfigError("driving: trip_count_pmf entries must be nonnegative");
        if (soc_ini_lo < 0 || soc_ini_hi > 1 || soc_ini_lo > soc_ini_hi)
            throw ConfigError("driving: soc_ini range must satisfy 0 <= lo <= hi <= 1");
        if (horizon_start_hour < 0 || horizon_start_hour > 23)
            throw ConfigError("driving: horizon_start_hour must be in [0,23]");
    }
};

/// Evening-arrival defaults: the mean return hour rises with the departure
/// window. The paper cites survey fits without printing them; these are
/// synthetic stand-ins (see the shipped config files).
inline std::vector<ArrivalWindow> default_arrival_windows(int n, double mu0 = 14.0,
                                                          double slope = 0.5,
                                                          double sigma = 1.5,
                                                          double mu_cap = 23.0) {
    std::vector<ArrivalWindow> w(n);
    for (int i = 0; i < n; ++i) w[i] = {std::min(mu0 + slope * i, mu_cap), sigma};
    return w;
}

struct TurbineParams {
    double v_ci = 3.0;   // cut-in, m/s
    double v_r = 10.0;   // nominal, m/s
    double v_co = 20.0;  // cut-out, m/s
    double p_r = 500.0;  // nominal power, kW

    void validate() const {
        if (!(0 < v_ci && v_ci < v_r && v_r < v_co))
            throw ConfigError("turbine: require 0 < v_ci < v_r < v_co");
        if (p_r <= 0) throw ConfigError("turbine: p_r must be positive");
    }
};

struct EVItinerary {
    int t_arr = 0;              // step the EV plugs in (0 = connected from start)
    int t_dep = 0;              // step the EV leaves (T+1 = stays to the end)
    std::vector<double> trips;  // next-day trip distances, km
    double soc_ini = 0.0;       // SOC on arrival

    bool home_at(int step) const { return step >= t_arr && step < t_dep; }

    void validate(int horizon) const {
        if (t_arr < 0 || t_arr > horizon)
            throw InfeasibleError("itinerary: arrival step outside horizon");
        if (t_dep < 1 || t_dep > horizon + 1)
            throw InfeasibleError("itinerary: departure step outside horizon");
        if (t_arr >= t_dep) throw InfeasibleError("itinerary: arrival must precede departure");
        for (double d : trips)
            if (d <= 0) throw InfeasibleError("itinerary: trip distances must be positive");
        if (soc_ini < 0 || soc_ini > 1) throw InfeasibleError("itinerary: soc_ini outside [0,1]");
    }
};

/// Chi-square departure-time density over the normalized departure time.
inline double departure_density(double t_norm, double v) {
    if (v <= 0) throw std::domain_error("departure_density: v must be positive");
    if (t_norm < 0) throw std::domain_error("departure_density: t_norm must be nonnegative");
    if (t_norm == 0) {
        if (v > 2) return 0.0;
        if (v == 2) return 0.5;
        return std::numeric_limits<double>::infinity();
    }
    double lp = 0.5 * (v - 2.0) * std::log(t_norm) - 0.5 * t_norm - 0.5 * v * std::log(2.0) -
                std::lgamma(0.5 * v);
    return std::exp(lp);
}

/// Conditional arrival-time density: Gaussian around the window mean.
inline double arrival_density(double t_arr, double mu, double sigma) {
    if (sigma <= 0) throw std::domain_error("arrival_density: sigma must be positive");
    const double z = (t_arr - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

/// Unnormalized truncated power-law kernel for trip distance.
inline double trip_distance_kernel(double d, const DrivingPatternParams& p) {
    if (d < 0) throw std::domain_error("trip_distance_kernel: d must be nonnegative");
    return std::pow(p.d0 + d, -p.beta) * std::exp(-d / p.alpha);
}

/// Trip-distance model with a numerically normalized density and an
/// inverse-CDF sampler tabulated on a 1000-point grid.
class TripDistanceModel {
public:
    explicit TripDistanceModel(const DrivingPatternParams& p) : params_(p) {
        normalizer_ = simpson([&](double d) { return trip_distance_kernel(d, p); }, 0.0,
                              p.d_max, 100000);
        const int n = 1000;
        grid_.resize(n + 1);
        cdf_.resize(n + 1);
        const double h = p.d_max / n;
        double acc = 0.0;
        double prev = trip_distance_kernel(0.0, p);
        grid_[0] = 0.0;
        cdf_[0] = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double x = i * h;
            const double cur = trip_distance_kernel(x, p);
            acc += 0.5 * (prev + cur) * h;
            grid_[i] = x;
            cdf_[i] = acc;
            prev = cur;
        }
        for (auto& c : cdf_) c /= acc;  // table self-normalized for sampling
    }

    double normalizer() const { return normalizer_; }

    double density(double d) const {
        if (d > params_.d_max) return 0.0;
        return trip_distance_kernel(d, params_) / normalizer_;
    }

    /// CDF by interpolation of the tabulated grid (used for binning too).
    double cdf(double d) const {
        if (d <= 0) return 0.0;
        if (d >= params_.d_max) return 1.0;
        auto it = std::upper_bound(grid_.begin(), grid_.end(), d);
        size_t i = static_cast<size_t>(it - grid_.begin()) - 1;
        double f = (d - grid_[i]) / (grid_[i + 1] - grid_[i]);
        return cdf_[i] + f * (cdf_[i + 1] - cdf_[i]);
    }

    double sample(Rng& rng) const {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin()) return grid_.front();
        size_t i = static_cast<size_t>(it - cdf_.begin());
        double lo = cdf_[i - 1], hi = cdf_[i];
        double f = hi > lo ? (u - lo) / (hi - lo) : 0.0;
        return grid_[i - 1] + f * (grid_[i] - grid_[i - 1]);
    }

private:
    DrivingPatternParams params_;
    double normalizer_ = 1.0;
    std::vector<double> grid_, cdf_;
};

/// Precomputed driving model: departure-window pmf, arrival windows, trip
/// distance tables. Build once, sample many.
class DrivingModel {
public:
    explicit DrivingModel(DrivingPatternParams p) : params_(std::move(p)), trips_(params_) {
        params_.validate();
        if (params_.arrival.empty())
            params_.arrival = default_arrival_windows(params_.windows());
        const int w = params_.windows();
        window_pmf_.resize(w);
        double mass = 0.0;
        for (int i = 0; i < w; ++i) {
            // Window i covers normalized departure times [i, i+1); discretize
            // the density at the midpoint.
            window_pmf_[i] = departure_density(i + 0.5, params_.v);
            mass += window_pmf_[i];
        }
        if (mass <= 0) throw ConfigError("driving: departure pmf has no mass");
        for (auto& q : window_pmf_) q /= mass;
    }

    const DrivingPatternParams& params() const { return params_; }
    const std::vector<double>& departure_window_pmf() const { return window_pmf_; }
    const TripDistanceModel& trip_model() const { return trips_; }

    int sample_departure_window(Rng& rng) const {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double acc = 0.0;
        for (size_t i = 0; i < window_pmf_.size(); ++i) {
            acc += window_pmf_[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(window_pmf_.size()) - 1;
    }

    /// Step index (1-based) of the scheduling step containing the given
    /// clock hour; the horizon's T steps span 24 hours.
    int step_of_clock(double clock_hour, int horizon) const {
        double h = std::fmod(clock_hour, 24.0);
        if (h < 0) h += 24.0;
        double rel = h - params_.horizon_start_hour;
        if (rel < 0) rel += 24.0;
        const double step_hours = 24.0 / horizon;
        int step = static_cast<int>(rel / step_hours) + 1;
        return std::min(step, horizon);
    }

    EVItinerary sample_itinerary(Rng& rng, int horizon) const {
        for (int attempt = 0; attempt < 10000; ++attempt) {
            const int w = sample_departure_window(rng);
            const double dep_clock = w * params_.window_size;
            const auto& aw = params_.arrival[static_cast<size_t>(w)];
            const double arr_clock = std::normal_distribution<double>(aw.mu, aw.sigma)(rng);
            int m = 0;
            {
                double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                double acc = 0.0;
                for (size_t i = 0; i < params_.trip_count_pmf.size(); ++i) {
                    acc += params_.trip_count_pmf[i];
                    if (u < acc) {
                        m = static_cast<int>(i) + 1;
                        break;
                    }
                }
                if (m == 0) m = static_cast<int>(params_.trip_count_pmf.size());
            }
            EVItinerary it;
            it.soc_ini = std::uniform_real_distribution<double>(params_.soc_ini_lo,
                                                               params_.soc_ini_hi)(rng);
            it.trips.reserve(static_cast<size_t>(m));
            for (int k = 0; k < m; ++k) {
                double d = trips_.sample(rng);
                if (d <= 0) d = 1e-3;  // grid origin; keep distances strictly positive
                it.trips.push_back(d);
            }
            // Departures at/after the horizon-start hour happen beyond the
            // schedule window: the vehicle stays connected to the end.
            double start = params_.horizon_start_hour;
            it.t_dep = dep_clock < start ? step_of_clock(dep_clock, horizon) : horizon + 1;
            it.t_arr = step_of_clock(arr_clock, horizon);
            if (it.t_arr >= 1 && it.t_arr <= horizon && it.t_arr < it.t_dep && it.t_dep >= 2)
                return it;
        }
        throw SolverError("sample_itinerary: 10000 rejections, params inconsistent with horizon");
    }

private:
    DrivingPatternParams params_;
    TripDistanceModel trips_;
    std::vector<double> window_pmf_;
};

/// Turbine power curve.
inline double wind_power(double v_f, const TurbineParams& t) {
    if (v_f < 0) throw std::domain_error("wind_power: v_f must be nonnegative");
    if (v_f < t.v_ci || v_f > t.v_co) return 0.0;
    if (v_f >= t.v_r) return t.p_r;
    const double c = v_f * v_f * v_f - t.v_ci * t.v_ci * t.v_ci;
    return c / (t.v_r * t.v_r * t.v_r - t.v_ci * t.v_ci * t.v_ci) * t.p_r;
}

/// Per-step Gaussian perturbation around the forecast, clamped to [0, p_r].
inline std::vector<double> sample_wind_series(Rng& rng, const std::vector<double>& forecast,
                                              double sigma_pct, const TurbineParams& t) {
    std::vector<double> out(forecast.size());
    for (size_t i = 0; i < forecast.size(); ++i) {
        const double mu = forecast[i];
        if (mu < -1e-12 || mu > t.p_r + 1e-9)
            throw InfeasibleError("sample_wind_series: forecast outside [0, p_r]");
        double x = mu;
        if (sigma_pct > 0 && mu > 0) x = std::normal_distribution<double>(mu, sigma_pct * mu)(rng);
        out[i] = std::clamp(x, 0.0, t.p_r);
    }
    return out;
}

}  // namespace mgsched
