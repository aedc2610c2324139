#include "boostctl/errors.hpp"
#include "boostctl/harness.hpp"
#include "boostctl/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

using namespace boostctl;
using Catch::Approx;

namespace {

Scenario short_standard(double t_end) {
    auto sc = Scenario::standard();
    sc.sim.t_end = t_end;
    return sc;
}

std::string csv_of(const ScenarioResult& r) {
    std::ostringstream os;
    write_trace_csv(os, r.trace);
    return os.str();
}

}  // namespace

TEST_CASE("metric examples", "[metrics]") {
    const std::vector<double> flat(7, 12.0);
    auto m = compute_metrics(flat, 12.0);
    CHECK(m.mse == 0.0);
    CHECK(m.rmse == 0.0);
    CHECK(m.mae == 0.0);

    const std::vector<double> off(5, 12.5);
    m = compute_metrics(off, 12.0);
    CHECK(m.mse == Approx(0.25));
    CHECK(m.rmse == Approx(0.5));
    CHECK(m.mae == Approx(0.5));

    const std::vector<double> pair{11.0, 13.0};
    m = compute_metrics(pair, 12.0);
    CHECK(m.mse == 1.0);
    CHECK(m.rmse == 1.0);
    CHECK(m.mae == 1.0);

    CHECK_THROWS_AS(compute_metrics(std::vector<double>{}, 12.0), ValidationError);
}

TEST_CASE("metric identities", "[metrics][property]") {
    std::vector<double> v;
    for (int k = 0; k < 500; ++k) v.push_back(12.0 + std::sin(0.37 * k) * (1.0 + 0.01 * k));
    const auto m = compute_metrics(v, 12.0);
    CHECK(std::abs(m.rmse * m.rmse - m.mse) <= 1e-12 * m.mse);
    CHECK(m.mae <= m.rmse);
}

TEST_CASE("trace length and header", "[run]") {
    auto sc = short_standard(0.01);
    sc.sim.decimation = 10;
    const auto r = run_scenario(sc);
    CHECK(r.trace.size() == 1001);
    CHECK(r.trace.front().t == 0.0);
    CHECK(r.trace.back().t == Approx(0.01));
    const auto csv = csv_of(r);
    CHECK(csv.rfind("t,v0,iL,u,R,R_hat,x1,x2,e1,e2,d1,d2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1002);

    sc.sim.decimation = 7;
    CHECK(run_scenario(sc).trace.size() == 10000 / 7 + 1);
}

TEST_CASE("CSV fields use ten significant digits", "[run]") {
    const std::vector<double> values{0.0, 1e-6, 12.000000001, -7.2288e-3, 123456789.987, 1e-300, -3.5e21, 0.1};
    std::vector<TraceRecord> trace;
    for (double v : values) trace.push_back({v, v, v, v, v, v, v, v, v, v, v, v, v});
    std::ostringstream os;
    write_trace_csv(os, trace);
    std::string expected = "t,v0,iL,u,R,R_hat,x1,x2,e1,e2,d1,d2\n";
    for (double v : values) {
        char f[64];
        std::snprintf(f, sizeof f, "%.10g", v);
        for (int i = 0; i < 12; ++i) expected += std::string(f) + (i == 11 ? "\n" : ",");
    }
    CHECK(os.str() == expected);
}

TEST_CASE("zero horizon is rejected", "[run]") {
    auto sc = short_standard(0.0);
    CHECK_THROWS_AS(run_scenario(sc), ValidationError);
    sc.sim.t_end = 1e-7;  // below one step
    CHECK_THROWS_AS(run_scenario(sc), ValidationError);
}

TEST_CASE("same seed gives identical traces", "[run][determinism]") {
    auto sc = short_standard(0.02);
    sc.sim.noise_sigma_v = 0.01;
    sc.sim.noise_sigma_i = 0.01;
    sc.sim.seed = 42;
    const auto a = csv_of(run_scenario(sc));
    const auto b = csv_of(run_scenario(sc));
    CHECK(a == b);
    sc.sim.seed = 43;
    CHECK(csv_of(run_scenario(sc)) != a);
}

TEST_CASE("standard scenario with the fixed-time controller", "[run][closed-loop]") {
    const auto r = run_scenario(Scenario::standard());
    REQUIRE_FALSE(r.faulted());
    REQUIRE(r.settling_events.size() == 3);
    for (const auto& ev : r.settling_events) {
        INFO("event at " << ev.t_event);
        CHECK(ev.recovered);
        CHECK(ev.recovery_time < 0.05);
    }
    CHECK(r.settling_events[1].t_event == Approx(0.2));
    CHECK(r.settling_events[2].t_event == Approx(0.6));
    // No sign-function chattering in steady state.
    CHECK(r.max_steady_duty_step < 1e-3);
    CHECK(std::abs(r.metrics.rmse * r.metrics.rmse - r.metrics.mse) <= 1e-12 * r.metrics.mse);
    CHECK(r.metrics.mae <= r.metrics.rmse);
    REQUIRE(r.audit.has_value());
    CHECK(r.audit->violations == 0);
    for (const auto& rec : r.trace) {
        REQUIRE(rec.x1 >= 0.0);
        REQUIRE(rec.u >= kDutyMin);
        REQUIRE(rec.u <= kDutyMax);
    }
}

TEST_CASE("observer faults end the run with a partial result", "[run]") {
    auto sc = short_standard(0.01);
    sc.dob.enabled = true;
    sc.dob.gains.kappa = {1e300, 1e300, 1e300, 1e300, 1e300, 1e300};
    sc.initial.v0 = 8.0;
    const auto r = run_scenario(sc);
    REQUIRE(r.faulted());
    CHECK(r.faults.front().kind == "observer");
    CHECK_FALSE(r.trace.empty());
    const auto j = summary_json(r);
    CHECK(j["faults"].size() == 1);
}

TEST_CASE("compare is order-invariant", "[compare]") {
    const auto base = short_standard(0.05);
    auto runs = comparison_runs(base);
    const auto a = compare(runs);
    std::reverse(runs.begin(), runs.end());
    const auto b = compare(runs);
    REQUIRE(a.entries.size() == 3);
    CHECK(a.entries[0].method == "ftc");
    CHECK(a.entries[1].method == "baseline");
    CHECK(a.entries[2].method == "pid");
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.entries[i].method == b.entries[i].method);
        CHECK(a.entries[i].metrics.mse == b.entries[i].metrics.mse);
    }
    CHECK(a.ordering_holds == b.ordering_holds);
    CHECK(comparison_json(a)["methods"].size() == 3);
}

TEST_CASE("compare reports a tie for identical controllers", "[compare]") {
    const auto base = short_standard(0.02);
    const auto r = compare({{"ftc", base}, {"baseline", base}, {"pid", base}});
    CHECK(r.tie);
    CHECK_FALSE(r.ordering_holds);
    CHECK(r.entries[0].metrics.mse == r.entries[1].metrics.mse);
    CHECK(r.entries[1].metrics.mse == r.entries[2].metrics.mse);
}

TEST_CASE("compare rejects mismatched or incomplete inputs", "[compare]") {
    const auto base = short_standard(0.02);
    auto other = base;
    other.schedule = LoadSchedule::constant(10.0);
    CHECK_THROWS_AS(compare({{"ftc", base}, {"baseline", other}, {"pid", base}}), ValidationError);
    CHECK_THROWS_AS(compare({{"ftc", base}, {"ftc", base}, {"pid", base}}), ValidationError);
    CHECK_THROWS_AS(compare({{"ftc", base}, {"baseline", base}}), ValidationError);
}

TEST_CASE("degenerate fixed-time gains approach the baseline", "[compare]") {
    // k1 = k2 = 0 with k3 = c1 reduces the first stage to the baseline's.
    auto base = short_standard(0.3);
    base.controller.ftc.k1 = base.controller.ftc.k2 = 0.0;
    base.controller.ftc.k3 = base.controller.c1;
    const auto report = compare(comparison_runs(base));
    const auto full = run_scenario(short_standard(0.3));
    const double deg = report.entries[0].metrics.mse;
    const double baseline = report.entries[1].metrics.mse;
    INFO("degenerate " << deg << ", baseline " << baseline << ", full " << full.metrics.mse);
    CHECK(std::abs(deg - baseline) < std::abs(full.metrics.mse - baseline));
}

TEST_CASE("step latency benchmark", "[bench]") {
    const auto sc = Scenario::standard();
    CHECK_THROWS_AS(benchmark_step_latency(sc, 0), ValidationError);
    CHECK_THROWS_AS(benchmark_step_latency(sc, 9999), ValidationError);
    const auto ftc = benchmark_step_latency(sc, 10'000);
    CHECK(ftc.iterations == 10'000);
    CHECK(ftc.mean > 0.0);
    CHECK(ftc.p99 >= 0.0);
    auto pid_sc = sc;
    pid_sc.controller.type = ControllerType::Pid;
    const auto pid = benchmark_step_latency(pid_sc, 10'000);
    // Timing comparisons are reported, not asserted.
    WARN("FTC mean " << ftc.mean * 1e9 << " ns, PID mean " << pid.mean * 1e9 << " ns");
}

TEST_CASE("initial-condition sweep", "[sweep]") {
    auto sc = short_standard(0.05);
    CHECK_THROWS_AS(sweep_initial_conditions(sc, std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(sweep_initial_conditions(sc, std::vector<double>{0.0}), ValidationError);
    CHECK_THROWS_AS(sweep_initial_conditions(sc, std::vector<double>{24.5}), ValidationError);

    sc.initial.iL = 2.4;
    sc.observer.G0 = 0.1;
    const auto at_ref = sweep_initial_conditions(sc, std::vector<double>{12.0});
    REQUIRE(at_ref.size() == 1);
    CHECK(at_ref[0].recovered);
    CHECK(at_ref[0].settling_time == 0.0);

    const auto rows = sweep_initial_conditions(short_standard(0.05), std::vector<double>{2.0, 6.0, 10.0});
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) CHECK(row.recovered);
}

TEST_CASE("scenario JSON", "[scenario]") {
    const auto doc = nlohmann::json::parse(R"({
        "plant": {"L": 2e-5, "C": 1e-4, "Vi": 5, "vr": 10, "fs": 50000},
        "load_schedule": [[0, 8], [0.1, 16]],
        "initial_state": {"v0": 5, "iL": 0.5},
        "sim": {"t_end": 0.3, "step": 2e-6, "model": "switched", "noise_sigma": {"v0": 0.01, "iL": 0.02},
                "decimation": 5, "seed": 9},
        "observer": {"K1": 100, "K2": 200, "kappa": 50, "G0": 0.125},
        "dob": {"enabled": true, "theta": 3.5, "kappa1": 1, "kappa6": 6, "ussf": "tanh"},
        "controller": {"type": "ftc", "ussf": "erf", "iota": 2.5, "cross_term": "e2", "use_dob": true,
                       "gains": {"k1": 1, "k2": 2, "k3": 3, "k4": 4, "k5": 5, "k6": 6}}
    })");
    const auto sc = scenario_from_json(doc);
    CHECK(sc.plant.inductance == 2e-5);
    CHECK(sc.plant.v_ref == 10.0);
    CHECK(sc.schedule.resistance_at(0.2) == 16.0);
    CHECK(sc.initial.iL == 0.5);
    CHECK(sc.sim.model == PlantModel::Switched);
    CHECK(sc.sim.noise_sigma_i == 0.02);
    CHECK(sc.sim.decimation == 5);
    CHECK(sc.observer.gains.K2 == 200.0);
    CHECK(sc.observer.G0 == 0.125);
    CHECK(sc.dob.enabled);
    CHECK(sc.dob.gains.kappa[0] == 1.0);
    CHECK(sc.dob.gains.kappa[5] == 6.0);
    CHECK(sc.dob.gains.r.kind() == UssfKind::Tanh);
    CHECK(sc.controller.ftc.f.kind() == UssfKind::ErrorFunction);
    CHECK(sc.controller.ftc.iota == 2.5);
    CHECK(sc.controller.ftc.cross_term == CrossTerm::E2);
    CHECK(sc.controller.ftc.k6 == 6.0);
    CHECK(sc.controller.use_dob);

    const auto defaults = scenario_from_json(nlohmann::json::object());
    CHECK(defaults.sim.t_end == 1.0);
    CHECK(defaults.controller.ftc.k4 == 9e4);

    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"plant": {"L": "x"}})")), ValidationError);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"controller": {"type": "lqr"}})")),
                    ValidationError);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"controller": {"gains": {"k3": 0.2}}})")),
                    ValidationError);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"load_schedule": [[0, -1]]})")),
                    ValidationError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ValidationError);
}

TEST_CASE("summary JSON layout", "[report]") {
    const auto r = run_scenario(short_standard(0.01));
    const auto j = summary_json(r);
    CHECK(j["controller"] == "ftc");
    CHECK(j["metrics"]["mse"].get<double>() == r.metrics.mse);
    CHECK(j["settling_events"].is_array());
    CHECK(j["faults"].empty());
    CHECK(j["implied_C"].is_number());

    auto pid = short_standard(0.01);
    pid.controller.type = ControllerType::Pid;
    CHECK(summary_json(run_scenario(pid))["implied_C"].is_null());
}
