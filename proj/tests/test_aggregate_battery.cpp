#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mgsched/aggregate_battery.hpp"

using namespace mgsched;
using Catch::Approx;

namespace {

EVItinerary ev(int t_arr, int t_dep, std::vector<double> trips, double soc_ini) {
    EVItinerary it;
    it.t_arr = t_arr;
    it.t_dep = t_dep;
    it.trips = std::move(trips);
    it.soc_ini = soc_ini;
    return it;
}

}  // namespace

TEST_CASE("departure SOC covers the driving demand") {
    FleetSpec spec;  // E=33, k=6.7, soc_min=0.10
    CHECK(departure_soc(ev(1, 10, {33.5}, 0.3), spec) == Approx(33.5 / (6.7 * 33.0)).epsilon(1e-12));
    CHECK(departure_soc(ev(1, 10, {33.5}, 0.3), spec) == Approx(0.1515).margin(1e-4));
    CHECK(departure_soc(ev(1, 10, {}, 0.3), spec) == spec.soc_min);
    bool clamped = false;
    CHECK(departure_soc(ev(1, 10, {300.0}, 0.3), spec, &clamped) == 1.0);
    CHECK(clamped);
}

TEST_CASE("profile matches the battery-information table arithmetic") {
    FleetSpec spec;
    SECTION("100 EVs at home") {
        std::vector<EVItinerary> fleet(100, ev(0, 25, {10.0}, 0.3));
        auto p = build_profile(fleet, spec, 24);
        for (int t = 0; t < 24; ++t) {
            CHECK(p.n[t] == 100);
            CHECK(p.b_max[t] == 3300.0);
            CHECK(p.p_max[t] == 300.0);
            CHECK(p.p_min[t] == -300.0);
        }
        CHECK(p.b0 == Approx(100 * 0.3 * 33.0));
    }
    SECTION("2 EVs at home") {
        std::vector<EVItinerary> fleet(2, ev(0, 25, {10.0}, 0.3));
        auto p = build_profile(fleet, spec, 24);
        CHECK(p.b_max[5] == 66.0);
        CHECK(p.p_max[5] == 6.0);
    }
    SECTION("empty steps have all-zero bounds") {
        std::vector<EVItinerary> fleet{ev(5, 10, {8.0}, 0.3)};
        auto p = build_profile(fleet, spec, 24);
        for (int t = 0; t < 24; ++t) {
            if (t + 1 < 5 || t + 1 >= 10) {
                CHECK(p.n[t] == 0);
                CHECK(p.b_max[t] == 0.0);
                CHECK(p.b_min[t] == 0.0);
                CHECK(p.p_max[t] == 0.0);
                if (t + 1 != 5 && t + 1 != 10) CHECK(p.delta_b[t] == 0.0);
            }
        }
    }
}

TEST_CASE("arrival and departure energy jumps") {
    FleetSpec spec;
    auto it = ev(3, 20, {20.1}, 0.4);  // soc0 = 20.1/221.1 < soc_min -> clamped to 0.10
    auto p = build_profile({it}, spec, 24);
    CHECK(p.delta_b[2] == Approx(0.4 * 33.0));
    CHECK(p.delta_b[19] == Approx(-0.10 * 33.0));
    // b_min the step before departure carries the departure SOC plus the
    // still-connected floor (both terms, as printed in the model).
    CHECK(p.b_min[18] == Approx((0.10 + 0.10) * 33.0));
    CHECK(p.b_min[10] == Approx(0.10 * 33.0));
    CHECK(p.b0 == 0.0);
}

TEST_CASE("per-EV conservation of the energy jumps") {
    FleetSpec spec;
    Rng rng = make_stream(21, "fleet");
    std::uniform_int_distribution<int> arr(1, 10), stay(2, 12);
    std::uniform_real_distribution<double> soc(0.12, 0.5), dist(1.0, 60.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<EVItinerary> fleet;
        double expected = 0.0;
        for (int j = 0; j < 8; ++j) {
            int a = arr(rng);
            int d = std::min(24, a + stay(rng));  // departs within the horizon
            auto it = ev(a, d, {dist(rng)}, soc(rng));
            expected += (it.soc_ini - departure_soc(it, spec)) * spec.E;
            fleet.push_back(it);
        }
        auto p = build_profile(fleet, spec, 24);
        double total = 0.0;
        for (double x : p.delta_b) total += x;
        CHECK(total == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("EV count matches direct presence counting") {
    FleetSpec spec;
    Rng rng = make_stream(33, "fleet");
    std::uniform_int_distribution<int> arr(0, 12), dep(13, 25);
    std::uniform_real_distribution<double> soc(0.12, 0.5);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<EVItinerary> fleet;
        for (int j = 0; j < 20; ++j) fleet.push_back(ev(arr(rng), dep(rng), {9.0}, soc(rng)));
        auto p = build_profile(fleet, spec, 24);
        for (int t = 1; t <= 24; ++t) {
            int count = 0;
            for (const auto& e : fleet) count += e.home_at(t) ? 1 : 0;
            REQUIRE(p.n[t - 1] == count);
        }
    }
}

TEST_CASE("adding an always-home EV shifts both bounds uniformly") {
    FleetSpec spec;
    std::vector<EVItinerary> fleet{ev(2, 18, {12.0}, 0.3), ev(4, 22, {25.0}, 0.2)};
    auto base = build_profile(fleet, spec, 24);
    fleet.push_back(ev(0, 25, {}, 0.5));
    auto more = build_profile(fleet, spec, 24);
    for (int t = 0; t < 24; ++t) {
        CHECK(more.b_max[t] == Approx(base.b_max[t] + spec.E));
        CHECK(more.p_max[t] == Approx(base.p_max[t] + spec.p_ev_max));
    }
}

TEST_CASE("inconsistent fleets are rejected") {
    FleetSpec spec;
    CHECK_THROWS_AS(build_profile({ev(10, 5, {3.0}, 0.3)}, spec, 24), InfeasibleError);
    CHECK_THROWS_AS(build_profile({ev(1, 30, {3.0}, 0.3)}, spec, 24), InfeasibleError);
    CHECK_THROWS_AS(build_profile({ev(1, 10, {-3.0}, 0.3)}, spec, 24), InfeasibleError);
}

TEST_CASE("over-committed fleets are flagged infeasible") {
    FleetSpec spec;
    // Maximal driving demand leaving at once: the departure term of b_min
    // exceeds the n*E ceiling the step before.
    std::vector<EVItinerary> fleet;
    for (int j = 0; j < 5; ++j) fleet.push_back(ev(1, 10, {400.0}, 0.9));
    auto p = build_profile(fleet, spec, 24);
    CHECK_FALSE(p.feasible());
    CHECK(p.clamped_soc_targets == 5);
}

TEST_CASE("profile CSV layout") {
    FleetSpec spec;
    auto p = build_profile({ev(1, 3, {10.0}, 0.25)}, spec, 2);
    std::ostringstream os;
    write_profile_csv(os, p);
    const std::string floor1 = fmt_num(0.10 * 33.0);
    const std::string floor2 = fmt_num(0.10 * 33.0 + 0.10 * 33.0);
    CHECK(os.str() == "hour,n,p_max,b_min,b_max,delta_b\n"
                          "1,1,3," + floor1 + ",33,8.25\n"
                          "2,1,3," + floor2 + ",33,0\n");
}
