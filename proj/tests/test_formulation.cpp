#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support/helpers.hpp"

using namespace nemdv;
using testsupport::flat_scenario;
using testsupport::manual_export_rules;
using testsupport::no_export_rules;

namespace {

// 24 h, PV + BES + flex, 3 demand periods; export prices exceed the energy
// price at exactly 5 hours.
Scenario full_scenario() {
    Scenario s = flat_scenario(24, 100.0, 0.20);
    s.pv = PvSpec{50.0, 0.96};
    for (int t = 8; t < 18; ++t) s.pv_cf[t] = 0.8;
    s.bes = BesSpec::sized(40.0, 2.0, 0.86, BesScheme::GridChargeWithExport);
    s.flex = FlexSpec{0.1, 4};
    for (int n = 0; n < 3; ++n) {
        DemandChargePeriod p;
        p.name = "p" + std::to_string(n);
        p.price = 5.0 + n;
        p.mask.assign(24, 0);
        for (int t = n * 8; t < (n + 1) * 8; ++t) p.mask[t] = 1;
        s.tariff.demand_periods.push_back(p);
    }
    return s;
}

ExportRules five_hour_rules(const Scenario& s) {
    std::vector<double> exp(24, 0.0);
    for (int t = 17; t < 22; ++t) exp[t] = 0.50; // 5 hours above 0.20
    return manual_export_rules(s, std::move(exp));
}

} // namespace

TEST_CASE("variable count: 9 per hour plus periods plus export flags") {
    Scenario s = full_scenario();
    ExportRules rules = five_hour_rules(s);
    REQUIRE(rules.s_set.size() == 5);
    MilpModel m = build_milp(s, rules);
    CHECK(m.num_vars() == 9 * 24 + 3 + 5);
    CHECK(m.binary_ids.size() == 5);

    SECTION("rolling window rows: horizon - recovery + 1") {
        int windows = 0;
        for (const auto& row : m.rows)
            if (row.id.kind == RowKind::FlexWindow) ++windows;
        CHECK(windows == 24 - 4 + 1);
    }
    SECTION("strict mode adds one mode binary per hour") {
        MilpModel ms = build_milp(s, rules, {.strict_bes = true});
        CHECK(ms.num_vars() == 9 * 24 + 3 + 5 + 24);
        CHECK(ms.binary_ids.size() == 5 + 24);
    }
}

TEST_CASE("absent assets are fixed to zero; no-nem fixes exports") {
    Scenario s = flat_scenario(24);
    MilpModel m = build_milp(s, no_export_rules(s));
    CHECK(m.binary_ids.empty());
    for (int t = 0; t < 24; ++t) {
        for (VarRole r : {VarRole::PvExport, VarRole::BesCharge, VarRole::BesDischargeBtm,
                          VarRole::BesDischargeExp, VarRole::FlexUp, VarRole::FlexDown,
                          VarRole::Soc}) {
            const Variable& v = m.vars[m.index.at(r, t)];
            CHECK(v.lower == 0.0);
            CHECK(v.upper == 0.0);
        }
    }
}

TEST_CASE("nem2 policy yields a pure LP regardless of assets") {
    Scenario s = full_scenario();
    s.policy = NemPolicy::nem2();
    ExportRules r = build_export_rules(s.policy, s.tariff, s.calendar, s.bes_scheme());
    MilpModel m = build_milp(s, r);
    CHECK(m.binary_ids.empty());
}

TEST_CASE("big-M is demand plus battery power plus upward flex headroom") {
    Scenario s = flat_scenario(1, 100.0);
    s.bes = BesSpec::sized(50.0, 2.0, 0.9, BesScheme::GridChargeNoBesExport);
    s.flex = FlexSpec{0.1, 1};
    CHECK(big_m(0, s) == Catch::Approx(100.0 + 50.0 + 10.0));

    Scenario bare = flat_scenario(1, 358.0);
    CHECK(big_m(0, bare) == Catch::Approx(358.0));

    Scenario zero = flat_scenario(1, 0.0);
    CHECK(big_m(0, zero) == 0.0);
}

TEST_CASE("pv-charge-only rows appear only under that scheme") {
    Scenario s = full_scenario();
    auto count_kind = [](const MilpModel& m, RowKind k) {
        int c = 0;
        for (const auto& row : m.rows)
            if (row.id.kind == k) ++c;
        return c;
    };
    MilpModel grid = build_milp(s, five_hour_rules(s));
    CHECK(count_kind(grid, RowKind::PvChargeOnly) == 0);
    s.bes->scheme = BesScheme::PvChargeWithExport;
    MilpModel pvonly = build_milp(s, five_hour_rules(s));
    CHECK(count_kind(pvonly, RowKind::PvChargeOnly) == 24);
}

TEST_CASE("extract_dispatch round trip and errors") {
    Scenario s = full_scenario();
    ExportRules rules = five_hour_rules(s);
    MilpModel m = build_milp(s, rules);

    std::vector<double> raw(m.num_vars());
    for (int j = 0; j < m.num_vars(); ++j) raw[j] = 0.5 * j;
    DispatchSolution d = extract_dispatch(m, SolveStatus::Optimal, raw, 12.5);
    CHECK(d.objective == 12.5);
    CHECK(d.to_assignment(m.index) == raw);

    DispatchSolution inf = extract_dispatch(m, SolveStatus::Infeasible, {});
    CHECK(inf.status == SolveStatus::Infeasible);
    CHECK_FALSE(inf.has_values());

    CHECK_THROWS_AS(extract_dispatch(m, SolveStatus::Optimal, std::vector<double>(3)),
                    std::invalid_argument);
}

TEST_CASE("compute_bill re-prices from the dispatch") {
    SECTION("all-zero dispatch, zero demand") {
        Scenario s = flat_scenario(4, 0.0);
        MilpModel m = build_milp(s, no_export_rules(s));
        DispatchSolution d =
            extract_dispatch(m, SolveStatus::Optimal, std::vector<double>(m.num_vars(), 0.0));
        BillBreakdown bill = compute_bill(d, s, no_export_rules(s));
        CHECK(bill.net_bill == 0.0);
    }
    SECTION("one step, net 10 kW at 0.2 $/kWh") {
        Scenario s = flat_scenario(1, 10.0, 0.2);
        MilpModel m = build_milp(s, no_export_rules(s));
        std::vector<double> raw(m.num_vars(), 0.0);
        raw[m.index.at(VarRole::NetDemand, 0)] = 10.0;
        DispatchSolution d = extract_dispatch(m, SolveStatus::Optimal, raw);
        BillBreakdown bill = compute_bill(d, s, no_export_rules(s));
        CHECK(bill.energy_charge_total == Catch::Approx(2.0));
        CHECK(bill.net_bill == Catch::Approx(2.0));
    }
    SECTION("demand charge: price 20 $/kW on a 5 kW peak") {
        Scenario s = flat_scenario(2, 5.0, 0.0);
        DemandChargePeriod p{"all", 20.0, {1, 1}};
        s.tariff.demand_periods.push_back(p);
        MilpModel m = build_milp(s, no_export_rules(s));
        std::vector<double> raw(m.num_vars(), 0.0);
        raw[m.index.at(VarRole::NetDemand, 0)] = 5.0;
        raw[m.index.at(VarRole::NetDemand, 1)] = 5.0;
        raw[m.index.at(VarRole::MaxDemand, 0)] = 5.0;
        DispatchSolution d = extract_dispatch(m, SolveStatus::Optimal, raw);
        BillBreakdown bill = compute_bill(d, s, no_export_rules(s));
        CHECK(bill.demand_charge_total == Catch::Approx(100.0));
        CHECK(bill.net_bill ==
              Catch::Approx(bill.demand_charge_total + bill.energy_charge_total -
                            bill.export_revenue));
    }
}

TEST_CASE("audit flags hand-tampered dispatches") {
    Scenario s = flat_scenario(4, 100.0);
    s.bes = BesSpec::sized(10.0, 2.0, 1.0, BesScheme::GridChargeNoBesExport);
    s.bes->soc_min_kwh = 5.0;
    s.bes->soc_init_kwh = 10.0;
    ExportRules rules = no_export_rules(s);
    MilpModel m = build_milp(s, rules);

    // A consistent do-nothing dispatch.
    std::vector<double> raw(m.num_vars(), 0.0);
    for (int t = 0; t < 4; ++t) {
        raw[m.index.at(VarRole::NetDemand, t)] = 100.0;
        raw[m.index.at(VarRole::Soc, t)] = 10.0;
    }
    DispatchSolution ok = extract_dispatch(m, SolveStatus::Optimal, raw);
    CHECK(audit_feasibility(ok, m).clean());

    SECTION("soc below its floor names the soc bound") {
        auto bad = raw;
        bad[m.index.at(VarRole::Soc, 2)] = 2.0; // below 5 kWh floor
        DispatchSolution d = extract_dispatch(m, SolveStatus::Optimal, bad);
        AuditReport rep = audit_feasibility(d, m);
        REQUIRE_FALSE(rep.clean());
        bool found = false;
        for (const auto& v : rep.violations)
            if (v.where.find("soc[2]") != std::string::npos) found = true;
        CHECK(found);
    }
    SECTION("exports while net demand is positive violate the gate") {
        Scenario se = flat_scenario(2, 10.0, 0.2);
        se.pv = PvSpec{20.0, 1.0};
        se.pv_cf = TimeSeries({1.0, 1.0});
        ExportRules r = manual_export_rules(se, {0.5, 0.5});
        REQUIRE(r.s_set.size() == 2);
        MilpModel me = build_milp(se, r);
        std::vector<double> x(me.num_vars(), 0.0);
        x[me.index.at(VarRole::NetDemand, 0)] = 10.0; // still importing...
        x[me.index.at(VarRole::PvExport, 0)] = 5.0;   // ...while exporting
        x[me.index.at(VarRole::ExportFlag, 0)] = 1.0;
        x[me.index.at(VarRole::NetDemand, 1)] = 10.0;
        DispatchSolution d = extract_dispatch(me, SolveStatus::Optimal, x);
        AuditReport rep = audit_feasibility(d, me);
        bool found = false;
        for (const auto& v : rep.violations)
            if (v.where.find("net_zero_on_export") != std::string::npos) found = true;
        CHECK(found);
    }
    SECTION("simultaneous charge and discharge is a warning, not a violation") {
        auto wash = raw;
        wash[m.index.at(VarRole::BesCharge, 1)] = 1.0;
        wash[m.index.at(VarRole::BesDischargeBtm, 1)] = 1.0;
        wash[m.index.at(VarRole::NetDemand, 1)] = 100.0; // charge and discharge cancel
        DispatchSolution d = extract_dispatch(m, SolveStatus::Optimal, wash);
        AuditReport rep = audit_feasibility(d, m);
        CHECK(rep.clean());
        REQUIRE_FALSE(rep.warnings.empty());
        CHECK(rep.warnings[0].find("t=1") != std::string::npos);
    }
}

TEST_CASE("model dump lists one constraint per line") {
    Scenario s = flat_scenario(2, 10.0);
    MilpModel m = build_milp(s, no_export_rules(s));
    std::ostringstream os;
    dump_lp(m, os);
    const std::string text = os.str();
    CHECK(text.find("net_def[t=0]") != std::string::npos);
    CHECK(text.find("min:") != std::string::npos);
}
