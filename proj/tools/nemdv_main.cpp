// nemdv command line: solve one scenario, run a sweep grid, print export
// price series, audit a dispatch dump, or generate synthetic fixtures.
//
// Exit codes: 0 success, 1 validation/configuration error, 2 solve failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nemdv/nemdv.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolve = 2;

struct CommonOpts {
    std::string scenario_path;
    double gap_tol = 1e-6;
    bool strict_bes = false;
};

nemdv::ScenarioSolveOptions make_solve_options(const CommonOpts& c) {
    nemdv::ScenarioSolveOptions opt;
    opt.solver.gap_tol = c.gap_tol;
    opt.formulation.strict_bes = c.strict_bes;
    return opt;
}

void print_bill(const nemdv::BillBreakdown& bill) {
    std::printf("  demand charges   $ %12.2f\n", bill.demand_charge_total);
    std::printf("  energy charges   $ %12.2f\n", bill.energy_charge_total);
    std::printf("  export revenue   $ %12.2f\n", bill.export_revenue);
    std::printf("  net bill         $ %12.2f\n", bill.net_bill);
}

int run_solve(const CommonOpts& common, const std::string& out_path,
              const std::string& dump_path) {
    nemdv::ScenarioBundle bundle = nemdv::load_scenario(common.scenario_path);
    auto violations = nemdv::validate_scenario(bundle.scenario);
    if (!violations.empty()) {
        std::fprintf(stderr, "scenario invalid:\n");
        for (const auto& v : violations) std::fprintf(stderr, "  - %s\n", v.c_str());
        return kExitValidation;
    }
    if (!dump_path.empty()) {
        const nemdv::ExportRules rules =
            nemdv::build_export_rules(bundle.scenario.policy, bundle.scenario.tariff,
                                      bundle.scenario.calendar, bundle.scenario.bes_scheme());
        nemdv::MilpModel model = nemdv::build_milp(bundle.scenario, rules,
                                                   {.strict_bes = common.strict_bes});
        std::ofstream out(dump_path, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "cannot write %s\n", dump_path.c_str());
            return kExitValidation;
        }
        nemdv::dump_lp(model, out);
        std::printf("model listing written to %s\n", dump_path.c_str());
    }
    nemdv::ScenarioSolveResult r =
        nemdv::solve_scenario(bundle.scenario, make_solve_options(common));
    std::printf("status: %s\n", nemdv::to_string(r.status));
    if (r.status != nemdv::SolveStatus::Optimal && r.status != nemdv::SolveStatus::GapLimit) {
        return kExitSolve;
    }
    std::printf("scenario: %s (%zu hours, %zu billing months)\n", bundle.scenario.name.c_str(),
                bundle.scenario.horizon(), r.months.size());
    print_bill(r.bill);
    if (!out_path.empty()) {
        nemdv::write_dispatch(r.dispatch, bundle.scenario, out_path);
        std::printf("dispatch written to %s\n", out_path.c_str());
    }
    return kExitOk;
}

int run_sweep_cmd(const CommonOpts& common, const std::string& out_path, int jobs,
                  bool timing) {
    nemdv::ScenarioBundle bundle = nemdv::load_scenario(common.scenario_path);
    auto violations = nemdv::validate_scenario(bundle.scenario);
    if (!violations.empty()) {
        std::fprintf(stderr, "scenario invalid:\n");
        for (const auto& v : violations) std::fprintf(stderr, "  - %s\n", v.c_str());
        return kExitValidation;
    }
    if (!bundle.sweep.has_value()) {
        std::fprintf(stderr, "%s has no 'sweep' block\n", common.scenario_path.c_str());
        return kExitValidation;
    }
    std::vector<nemdv::ResultRow> rows =
        nemdv::run_sweep(bundle.scenario, *bundle.sweep, make_solve_options(common), jobs);
    if (!timing) {
        // Keep the CSV byte-reproducible across runs and job counts; timings
        // go to the log instead.
        double total_ms = 0.0;
        for (auto& row : rows) {
            total_ms += row.wall_ms;
            row.wall_ms = 0.0;
        }
        nemdv::log_info("sweep solved " + std::to_string(rows.size()) + " points in " +
                        std::to_string(total_ms) + " ms of solver time");
    }
    nemdv::write_results(rows, out_path);
    std::printf("%zu rows written to %s\n", rows.size(), out_path.c_str());
    int failures = 0;
    for (const auto& row : rows)
        if (row.status != nemdv::SolveStatus::Optimal &&
            row.status != nemdv::SolveStatus::GapLimit)
            ++failures;
    if (failures > 0) {
        std::fprintf(stderr, "%d of %zu points failed to solve\n", failures, rows.size());
        return kExitSolve;
    }
    return kExitOk;
}

int run_prices(const CommonOpts& common, const std::string& out_path) {
    nemdv::ScenarioBundle bundle = nemdv::load_scenario(common.scenario_path);
    const nemdv::Scenario& s = bundle.scenario;
    std::optional<nemdv::TimeSeries> acc = bundle.acc;
    if (!acc.has_value() && s.policy.variant == nemdv::NemVariant::Nem3)
        acc = s.policy.acc_hourly;
    const double nbc = s.policy.variant == nemdv::NemVariant::Nem2
                           ? s.policy.nbc
                           : nemdv::kDefaultNonBypassableCharge;
    if (out_path.empty()) {
        nemdv::write_price_series(s.tariff, s.calendar, acc, nbc, std::cout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
            return kExitValidation;
        }
        nemdv::write_price_series(s.tariff, s.calendar, acc, nbc, out);
        std::printf("price series written to %s\n", out_path.c_str());
    }
    return kExitOk;
}

int run_audit(const CommonOpts& common, const std::string& dispatch_path, double tol) {
    nemdv::ScenarioBundle bundle = nemdv::load_scenario(common.scenario_path);
    nemdv::DispatchSolution d = nemdv::read_dispatch(dispatch_path);
    nemdv::AuditReport report = nemdv::audit_scenario_dispatch(
        bundle.scenario, d, {.strict_bes = common.strict_bes}, tol);
    for (const auto& w : report.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (report.clean()) {
        std::printf("audit clean: %zu hours checked at tol %g\n", d.horizon(), tol);
        return kExitOk;
    }
    std::printf("audit found %zu violation(s):\n", report.violations.size());
    for (const auto& v : report.violations)
        std::printf("  %-40s residual %.6g\n", v.where.c_str(), v.residual);
    return kExitSolve;
}

int run_fixture(const std::string& consumer, int days, const std::string& start,
                const std::string& out_dir) {
    nemdv::synth::ConsumerKind kind;
    if (consumer == "mep")
        kind = nemdv::synth::ConsumerKind::Mep;
    else if (consumer == "mdp")
        kind = nemdv::synth::ConsumerKind::Mdp;
    else {
        std::fprintf(stderr, "unknown consumer '%s' (mep or mdp)\n", consumer.c_str());
        return kExitValidation;
    }
    const nemdv::CivilDate d = nemdv::parse_civil_date(start);
    const std::string path = nemdv::synth::write_fixture(out_dir, kind, days, d);
    std::printf("synthetic fixture written; scenario file: %s\n", path.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"behind-the-meter DER valuation: bill-minimizing dispatch under "
                 "net-energy-metering policies"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string out_path, dump_path, dispatch_path;
    int jobs = 1;
    bool timing = false;
    double audit_tol = 1e-6;
    std::string consumer = "mep", start_date = "2021-01-01", fixture_dir = "fixture";
    int fixture_days = 7;

    auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
        auto* opt = cmd->add_option("--scenario", common.scenario_path, "scenario JSON file");
        if (needs_scenario) opt->required();
        cmd->add_option("--gap-tol", common.gap_tol, "relative MIP gap tolerance");
        cmd->add_flag("--strict-bes", common.strict_bes,
                      "forbid simultaneous battery charge and discharge");
    };

    auto* solve_cmd = app.add_subcommand("solve", "solve one scenario and price the dispatch");
    add_common(solve_cmd);
    solve_cmd->add_option("--out", out_path, "dispatch CSV output path");
    solve_cmd->add_option("--dump-lp", dump_path, "write a plain-text model listing");

    auto* sweep_cmd = app.add_subcommand("sweep", "run the scenario's sweep grid");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--out", out_path, "results CSV output path")->required();
    sweep_cmd->add_option("--jobs", jobs, "parallel solves")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--timing", timing, "record wall times in the CSV (not reproducible)");

    auto* prices_cmd = app.add_subcommand("prices", "emit export price series per policy");
    add_common(prices_cmd);
    prices_cmd->add_option("--out", out_path, "CSV output path (default stdout)");

    auto* audit_cmd = app.add_subcommand("audit", "re-check a dispatch CSV against a scenario");
    add_common(audit_cmd);
    audit_cmd->add_option("--dispatch", dispatch_path, "dispatch CSV to audit")->required();
    audit_cmd->add_option("--tol", audit_tol, "feasibility tolerance");

    auto* fixture_cmd =
        app.add_subcommand("fixture", "write a synthetic consumer fixture directory");
    fixture_cmd->add_option("--consumer", consumer, "mep or mdp");
    fixture_cmd->add_option("--days", fixture_days, "horizon length in days")
        ->check(CLI::PositiveNumber);
    fixture_cmd->add_option("--start", start_date, "first day (YYYY-MM-DD)");
    fixture_cmd->add_option("--out", fixture_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message and usage hint
        return kExitValidation;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(common, out_path, dump_path);
        if (sweep_cmd->parsed()) return run_sweep_cmd(common, out_path, jobs, timing);
        if (prices_cmd->parsed()) return run_prices(common, out_path);
        if (audit_cmd->parsed()) return run_audit(common, dispatch_path, audit_tol);
        if (fixture_cmd->parsed())
            return run_fixture(consumer, fixture_days, start_date, fixture_dir);
    } catch (const nemdv::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolve;
    }
    return kExitValidation;
}
