#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

using namespace nemdv;

namespace {

// Two full months (Jan + Feb 2021) with a synthetic consumer.
Scenario two_month_scenario() {
    return synth::scenario(synth::ConsumerKind::Mdp, 31 + 28, CivilDate{2021, 1, 1},
                           NemPolicy::nem2());
}

} // namespace

TEST_CASE("multi-month horizons decompose into independent monthly solves") {
    Scenario s = two_month_scenario();
    s.bes = BesSpec::sized(100.0, 2.0, 0.88, BesScheme::GridChargeNoBesExport);
    ScenarioSolveOptions opt;
    ScenarioSolveResult whole = solve_scenario(s, opt);
    REQUIRE(whole.status == SolveStatus::Optimal);
    REQUIRE(whole.months.size() == 2);

    Scenario jan = s.slice(0, 31 * 24);
    Scenario feb = s.slice(31 * 24, s.horizon());
    ScenarioSolveResult a = solve_scenario(jan, opt);
    ScenarioSolveResult b = solve_scenario(feb, opt);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK(whole.bill.net_bill ==
          Catch::Approx(a.bill.net_bill + b.bill.net_bill).margin(1e-6));
    CHECK(whole.bill.demand_charge_total ==
          Catch::Approx(a.bill.demand_charge_total + b.bill.demand_charge_total).margin(1e-6));

    SECTION("battery restarts each month at its initial state of charge") {
        // First-hour SOC satisfies the t=0 balance from J_init in both months.
        const double eta = s.bes->round_trip_efficiency;
        const double j0 = s.bes->soc_init_kwh;
        for (std::size_t start : {std::size_t{0}, std::size_t{31 * 24}}) {
            const double expect = j0 + eta * whole.dispatch.bes_charge[start] -
                                  whole.dispatch.bes_discharge_btm[start] -
                                  whole.dispatch.bes_discharge_exp[start];
            CHECK(whole.dispatch.soc[start] == Catch::Approx(expect).margin(1e-6));
        }
    }
}

TEST_CASE("bill identity: solver objective equals the recomputed bill") {
    Scenario s = two_month_scenario();
    ScenarioSolveOptions opt;
    opt.run_audit = true;
    ScenarioSolveResult r = solve_scenario(s, opt);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(std::abs(r.solver_objective - r.bill.net_bill) <=
          1e-9 * (1.0 + std::abs(r.bill.net_bill)));
    CHECK(r.audit_violations.empty());
    CHECK(r.bill.net_bill == Catch::Approx(r.bill.demand_charge_total +
                                           r.bill.energy_charge_total -
                                           r.bill.export_revenue));
}

TEST_CASE("validation failures throw with the findings") {
    Scenario s = two_month_scenario();
    s.pv_cf[5] = 2.0;
    CHECK_THROWS_AS(solve_scenario(s), std::invalid_argument);
}

TEST_CASE("external dispatch audit round trip across a month boundary") {
    // Jul 26 .. Aug 4: the nem3 solve decomposes into two monthly MILPs and
    // the avoided-cost averaging buckets differ between the months.
    Scenario s = synth::scenario(synth::ConsumerKind::Mep, 10, CivilDate{2021, 7, 26},
                                 NemPolicy::nem3({}));
    s.bes = BesSpec::sized(200.0, 2.0, 0.86, BesScheme::GridChargeWithExport);
    ScenarioSolveResult r = solve_scenario(s);
    REQUIRE(r.status == SolveStatus::Optimal);
    REQUIRE(r.months.size() == 2);
    CHECK(audit_scenario_dispatch(s, r.dispatch).clean());
    CHECK(std::abs(r.solver_objective - r.bill.net_bill) <=
          1e-9 * (1.0 + std::abs(r.bill.net_bill)));

    SECTION("tampering is caught") {
        DispatchSolution bad = r.dispatch;
        bad.soc[10] = -5.0;
        CHECK_FALSE(audit_scenario_dispatch(s, bad).clean());
    }
    SECTION("exports happen only against a zero net demand") {
        bool exported = false;
        for (int sh : r.rules.s_set) {
            const double ex = r.dispatch.pv_export[sh] + r.dispatch.bes_discharge_exp[sh];
            if (ex > 1e-6) {
                exported = true;
                CHECK(r.dispatch.net_demand[sh] <= 1e-6);
            }
        }
        CHECK(exported);
    }
}
