#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mgsched/stochastic.hpp"
#include "oracles.hpp"

using namespace mgsched;
using Catch::Approx;

TEST_CASE("departure density matches the chi-square form") {
    CHECK(departure_density(0.0, 4.0) == 0.0);
    CHECK(departure_density(2.0, 4.0) == Approx(2.0 * std::exp(-1.0) / 4.0).epsilon(1e-12));
    CHECK(departure_density(2.0, 4.0) == Approx(0.18394).margin(1e-5));
    CHECK(departure_density(2.0, 2.0) == Approx(std::exp(-1.0) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(departure_density(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(departure_density(1.0, -3.0), std::domain_error);
    CHECK_THROWS_AS(departure_density(-0.5, 4.0), std::domain_error);
    for (double v : {2.0, 4.0, 9.0})
        for (double t = 0.0; t <= 50.0; t += 0.25) CHECK(departure_density(t, v) >= 0.0);
}

TEST_CASE("departure density integrates to one") {
    for (double v : {2.0, 4.0, 9.0}) {
        double mass = oracle::romberg([v](double t) { return departure_density(t, v); }, 1e-12,
                                      400.0);
        CHECK(mass == Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("arrival density is the conditional Gaussian") {
    CHECK(arrival_density(18.0, 18.0, 2.0) == Approx(1.0 / std::sqrt(8.0 * M_PI)).epsilon(1e-12));
    const double peak = arrival_density(18.0, 18.0, 2.0);
    CHECK(arrival_density(16.0, 18.0, 2.0) == Approx(peak * std::exp(-0.5)).epsilon(1e-12));
    CHECK(arrival_density(20.0, 18.0, 2.0) == Approx(arrival_density(16.0, 18.0, 2.0)).epsilon(1e-12));
    const double mass = oracle::romberg(
        [](double t) { return arrival_density(t, 18.0, 2.0); }, 18.0 - 16.0, 18.0 + 16.0);
    CHECK(mass == Approx(1.0).margin(1e-6));
    CHECK_THROWS_AS(arrival_density(0.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(arrival_density(0.0, 0.0, -1.0), std::domain_error);
}

TEST_CASE("trip distance density: kernel values and normalization") {
    DrivingPatternParams p;  // paper parameters by default
    CHECK(trip_distance_kernel(0.0, p) == Approx(std::pow(1.8, -1.25)).epsilon(1e-12));
    CHECK(trip_distance_kernel(0.0, p) == Approx(0.4796).margin(1e-4));
    CHECK_THROWS_AS(trip_distance_kernel(-1.0, p), std::domain_error);

    TripDistanceModel model(p);
    // Z cancels in ratios.
    const double r_density = model.density(3.0) / model.density(11.0);
    const double r_kernel = trip_distance_kernel(3.0, p) / trip_distance_kernel(11.0, p);
    CHECK(r_density == Approx(r_kernel).epsilon(1e-12));

    const double mass =
        oracle::romberg([&](double d) { return model.density(d); }, 0.0, p.d_max);
    CHECK(mass == Approx(1.0).margin(1e-6));

    for (double d = 0.0; d <= p.d_max; d += 0.5) CHECK(model.density(d) >= 0.0);
}

TEST_CASE("itinerary sampling: degenerate parameters give a deterministic itinerary") {
    DrivingPatternParams p;
    p.window_size = 24.0;  // a single departure window
    p.arrival = {{18.0, 1e-9}};
    p.trip_count_pmf = {1.0};
    p.d_max = 1e-6;
    p.soc_ini_lo = p.soc_ini_hi = 0.30;
    DrivingModel model(p);

    Rng r1 = make_stream(7, "a");
    Rng r2 = make_stream(99, "b");
    EVItinerary a = model.sample_itinerary(r1, 24);
    EVItinerary b = model.sample_itinerary(r2, 24);
    CHECK(a.t_arr == b.t_arr);
    CHECK(a.t_dep == b.t_dep);
    CHECK(a.t_arr == 7);   // 18:00 on a noon-anchored horizon
    CHECK(a.t_dep == 13);  // midnight departure window start
    CHECK(a.trips.size() == 1);
    CHECK(a.soc_ini == 0.30);
    CHECK(std::abs(a.trips[0] - b.trips[0]) < 1e-6);
}

TEST_CASE("itinerary sampling is a pure function of the seed") {
    DrivingModel model{DrivingPatternParams{}};
    Rng r1 = make_stream(42, "fleet", 3);
    Rng r2 = make_stream(42, "fleet", 3);
    for (int i = 0; i < 50; ++i) {
        EVItinerary a = model.sample_itinerary(r1, 24);
        EVItinerary b = model.sample_itinerary(r2, 24);
        CHECK(a.t_arr == b.t_arr);
        CHECK(a.t_dep == b.t_dep);
        REQUIRE(a.trips == b.trips);
        CHECK(a.soc_ini == b.soc_ini);
    }
}

TEST_CASE("sampled itineraries satisfy their invariants") {
    DrivingModel model{DrivingPatternParams{}};
    Rng rng = make_stream(11, "fleet");
    for (int i = 0; i < 1000; ++i) {
        EVItinerary it = model.sample_itinerary(rng, 24);
        REQUIRE_NOTHROW(it.validate(24));
        CHECK(it.t_arr >= 1);
        CHECK(it.t_arr <= 24);
        for (double d : it.trips) CHECK(d > 0.0);
    }
}

TEST_CASE("departure window histogram passes a chi-square test against the pmf") {
    DrivingModel model{DrivingPatternParams{}};
    const auto& pmf = model.departure_window_pmf();
    const int n = 10000;
    Rng rng = make_stream(5, "chi2");
    std::vector<double> observed(pmf.size(), 0.0);
    for (int i = 0; i < n; ++i) observed[static_cast<size_t>(model.sample_departure_window(rng))] += 1.0;
    std::vector<double> expected(pmf.size());
    for (size_t w = 0; w < pmf.size(); ++w) expected[w] = pmf[w] * n;
    auto [stat, dof] = oracle::chi2_gof(observed, expected);
    CHECK(oracle::chi2_pvalue(stat, dof) > 0.01);
}

TEST_CASE("trip distances pass a chi-square test against the density") {
    DrivingPatternParams p;
    TripDistanceModel model(p);
    const int n = 10000;
    const int bins = 20;
    Rng rng = make_stream(17, "chi2");
    // Equal-probability bin edges from an oracle-integrated CDF.
    std::vector<double> edges{0.0};
    const double total = oracle::romberg(
        [&](double d) { return trip_distance_kernel(d, p); }, 0.0, p.d_max);
    double lo = 0.0;
    for (int b = 1; b < bins; ++b) {
        const double target = total * b / bins;
        double a = lo, c = p.d_max;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (a + c);
            const double m = oracle::romberg(
                [&](double d) { return trip_distance_kernel(d, p); }, 0.0, mid);
            (m < target ? a : c) = mid;
        }
        edges.push_back(0.5 * (a + c));
        lo = edges.back();
    }
    edges.push_back(p.d_max);
    std::vector<double> observed(static_cast<size_t>(bins), 0.0);
    for (int i = 0; i < n; ++i) {
        const double d = model.sample(rng);
        const auto it = std::upper_bound(edges.begin(), edges.end(), d);
        size_t b = static_cast<size_t>(it - edges.begin());
        b = b == 0 ? 0 : b - 1;
        if (b >= static_cast<size_t>(bins)) b = static_cast<size_t>(bins) - 1;
        observed[b] += 1.0;
    }
    std::vector<double> expected(static_cast<size_t>(bins), static_cast<double>(n) / bins);
    auto [stat, dof] = oracle::chi2_gof(observed, expected);
    CHECK(oracle::chi2_pvalue(stat, dof) > 0.01);
}

TEST_CASE("wind power curve") {
    TurbineParams t;  // 3 / 10 / 20 m/s, 500 kW
    CHECK(wind_power(2.0, t) == 0.0);
    CHECK(wind_power(10.0, t) == 500.0);
    CHECK(wind_power(7.0, t) == Approx((343.0 - 27.0) / (1000.0 - 27.0) * 500.0).epsilon(1e-12));
    CHECK(wind_power(7.0, t) == Approx(162.38).margin(0.01));
    CHECK(wind_power(25.0, t) == 0.0);
    CHECK(wind_power(20.0, t) == 500.0);
    // Continuity at the cut-in and nominal speeds.
    CHECK(wind_power(3.0, t) == Approx(0.0).margin(1e-12));
    CHECK(wind_power(3.0 + 1e-9, t) == Approx(0.0).margin(1e-5));
    CHECK(wind_power(10.0 - 1e-9, t) == Approx(500.0).margin(1e-5));
    // Monotone nondecreasing on [0, v_co].
    double prev = 0.0;
    for (double v = 0.0; v <= 20.0; v += 0.01) {
        const double w = wind_power(v, t);
        CHECK(w >= prev - 1e-12);
        prev = w;
    }
    CHECK_THROWS_AS(wind_power(-1.0, t), std::domain_error);
}

TEST_CASE("wind series sampling") {
    TurbineParams t;
    std::vector<double> forecast{0.0, 120.0, 480.0, 250.0};

    Rng rng = make_stream(3, "wind");
    auto s0 = sample_wind_series(rng, forecast, 0.0, t);
    CHECK(s0 == forecast);

    auto s1 = sample_wind_series(rng, forecast, 0.10, t);
    CHECK(s1[0] == 0.0);
    for (double x : s1) {
        CHECK(x >= 0.0);
        CHECK(x <= t.p_r);
    }

    // Pre-clamp mean check at a mid-range point where clamping cannot bite.
    const int n = 10000;
    std::vector<double> one{250.0};
    Rng mr = make_stream(9, "wind-mean");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += sample_wind_series(mr, one, 0.10, t)[0];
    const double sigma = 0.10 * 250.0;
    CHECK(std::abs(acc / n - 250.0) <= 3.0 * sigma / std::sqrt(n));

    // Determinism.
    Rng a = make_stream(12, "w"), b = make_stream(12, "w");
    CHECK(sample_wind_series(a, forecast, 0.10, t) == sample_wind_series(b, forecast, 0.10, t));
}
