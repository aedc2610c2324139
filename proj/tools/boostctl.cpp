// Command-line front end: simulate, compare, sweep, bench, verify-ussf.
//
// Exit codes: 0 success, 1 validation error, 2 runtime fault,
// 3 acceptance regression (compare --ci).

#include "boostctl/errors.hpp"
#include "boostctl/harness.hpp"
#include "boostctl/scenario.hpp"
#include "boostctl/ussf.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace boostctl;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitFault = 2;
constexpr int kExitRegression = 3;

Scenario scenario_or_default(const std::string& path) { return path.empty() ? Scenario::standard() : load_scenario(path); }

void write_json(const std::string& path, const json& doc) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("'" + item + "' is not a number");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixed-time boost converter voltage regulation: simulation and USSF certification"};
    app.require_subcommand(1);

    std::string config;
    std::string out_path;
    std::string summary_path;

    auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its trace and summary");
    simulate->add_option("--config", config, "Scenario JSON (standard load-step scenario when omitted)");
    simulate->add_option("--out", out_path, "Trace CSV path");
    simulate->add_option("--summary", summary_path, "Summary JSON path ('-' for stdout)");
    std::string controller_override;
    simulate->add_option("--controller", controller_override, "Override controller type")
        ->check(CLI::IsMember({"ftc", "pid", "baseline"}));
    bool enable_dob = false;
    simulate->add_flag("--dob", enable_dob, "Enable the disturbance observer and feed it to the controller");
    double t_skip = -1.0;
    simulate->add_option("--t-skip", t_skip, "Exclude [0, t_skip) from the error metrics");
    int decimation = 0;
    simulate->add_option("--decimation", decimation, "Record every n-th step");

    auto* cmp = app.add_subcommand("compare", "Run ftc, baseline and pid on one scenario");
    cmp->add_option("--config", config, "Scenario JSON (standard load-step scenario when omitted)");
    cmp->add_option("--out", out_path, "Report JSON path ('-' for stdout)");
    bool ci_mode = false;
    cmp->add_flag("--ci", ci_mode, "Exit 3 when mse_ftc < mse_baseline < mse_pid does not hold");

    auto* verify = app.add_subcommand("verify-ussf", "Certify a saturating function");
    std::string kind = "alg";
    double span = 1e3;
    double tol = 1e-6;
    verify->add_option("--kind", kind, "tanh, atan, alg or erf")->check(CLI::IsMember({"tanh", "atan", "alg", "erf"}));
    verify->add_option("--span", span, "Half-width of the search grid");
    verify->add_option("--tol", tol, "Certification tolerance");

    auto* sweep = app.add_subcommand("sweep", "Settling time after start-up for several initial voltages");
    sweep->add_option("--config", config, "Scenario JSON (standard load-step scenario when omitted)");
    std::string v0_csv = "2,6,10";
    sweep->add_option("--v0", v0_csv, "Comma-separated initial output voltages");
    sweep->add_option("--out", out_path, "Table JSON path ('-' for stdout)");
    double sweep_t_end = 0.0;
    sweep->add_option("--t-end", sweep_t_end, "Override the horizon");

    auto* bench = app.add_subcommand("bench", "Per-step latency of observer + controller + plant");
    bench->add_option("--config", config, "Scenario JSON (standard load-step scenario when omitted)");
    std::int64_t iters = 100'000;
    bench->add_option("--iters", iters, "Timed steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitValidation;
    }

    try {
        if (*simulate) {
            Scenario sc = scenario_or_default(config);
            if (!controller_override.empty()) sc.controller.type = controller_type_from_string(controller_override);
            if (enable_dob) sc.dob.enabled = sc.controller.use_dob = true;
            if (t_skip >= 0.0) sc.sim.t_skip = t_skip;
            if (decimation > 0) sc.sim.decimation = decimation;
            const auto result = run_scenario(sc);
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                if (!out) throw ValidationError("cannot write '" + out_path + "'");
                write_trace_csv(out, result.trace);
            }
            write_json(summary_path, summary_json(result));
            return result.faulted() ? kExitFault : 0;
        }
        if (*cmp) {
            const auto report = compare(comparison_runs(scenario_or_default(config)));
            write_json(out_path, comparison_json(report));
            const bool faulted = std::any_of(report.entries.begin(), report.entries.end(),
                                             [](const auto& e) { return e.faulted; });
            if (faulted) return kExitFault;
            return ci_mode && !report.ordering_holds ? kExitRegression : 0;
        }
        if (*verify) {
            const Ussf f = Ussf::from_name(kind);
            const auto cert = certify_epsilon(f, span, tol);
            const auto axioms = verify_axioms(f, 10'000, span, &cert);
            json doc{{"kind", kind},
                     {"epsilon", cert.epsilon},
                     {"m_bound", cert.m_bound},
                     {"grid_span", cert.grid_span},
                     {"tolerance", cert.tolerance},
                     {"axioms",
                      {{"oddness", axioms.oddness},
                       {"monotonicity", axioms.monotonicity},
                       {"range", axioms.range},
                       {"saturation", axioms.saturation},
                       {"slope_limit", axioms.slope_limit}}}};
            write_json("", doc);
            return axioms.all() ? 0 : kExitRegression;
        }
        if (*sweep) {
            Scenario sc = scenario_or_default(config);
            if (sweep_t_end > 0.0) sc.sim.t_end = sweep_t_end;
            const auto v0s = parse_list(v0_csv);
            const auto rows = sweep_initial_conditions(sc, v0s);
            json table = json::array();
            double worst = 0.0;
            bool all_recovered = true;
            for (const auto& r : rows) {
                table.push_back({{"v0", r.v0},
                                 {"settling_time", r.recovered ? json(r.settling_time) : json(nullptr)},
                                 {"recovered", r.recovered}});
                if (r.recovered) worst = std::max(worst, r.settling_time);
                all_recovered = all_recovered && r.recovered;
            }
            write_json(out_path, {{"band", kSettlingBand}, {"rows", table}, {"max_settling_time", worst}});
            return all_recovered ? 0 : kExitFault;
        }
        if (*bench) {
            const auto stats = benchmark_step_latency(scenario_or_default(config), iters);
            write_json("", {{"iterations", stats.iterations}, {"mean", stats.mean}, {"p99", stats.p99}});
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime fault: " << e.what() << "\n";
        return kExitFault;
    }
    return 0;
}
