#include "boostctl/harness.hpp"

#include "boostctl/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <string>

namespace boostctl {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void MetricsAccumulator::add(double v0, double vr) noexcept {
    const double err = v0 - vr;
    sum_sq_ += err * err;
    sum_abs_ += std::abs(err);
    ++count_;
}

ErrorMetrics MetricsAccumulator::result() const {
    if (count_ == 0) throw ValidationError("metrics are undefined for an empty series");
    ErrorMetrics m;
    m.mse = sum_sq_ / static_cast<double>(count_);
    m.rmse = std::sqrt(m.mse);
    m.mae = sum_abs_ / static_cast<double>(count_);
    return m;
}

ErrorMetrics compute_metrics(std::span<const double> v0, double vr) {
    MetricsAccumulator acc;
    for (const double v : v0) acc.add(v, vr);
    return acc.result();
}

// --------------------------------------------------------------------------
// Simulation
// --------------------------------------------------------------------------

Simulation::Simulation(const Scenario& sc)
    : sc_(sc), state_(sc.initial), reference_(sc.plant, sc.sim.step), rng_(sc.sim.seed) {
    sc_.validate();
    state_.t = 0.0;
    observer_.iL_hat = sc.initial.iL;
    observer_.v0_hat = sc.initial.v0;
    observer_.G_hat = sc.observer.G0;
    const auto x = to_transformed(state_, sc.schedule.resistance_at(0.0), observer_.r_hat(), sc.plant);
    dob_.x1_hat = x.x1;
    dob_.x2_hat = x.x2;
}

Measurement Simulation::measure() {
    Measurement m{state_.v0, state_.iL};
    if (sc_.sim.noise_sigma_v > 0.0) m.v0 += sc_.sim.noise_sigma_v * noise_(rng_);
    if (sc_.sim.noise_sigma_i > 0.0) m.iL += sc_.sim.noise_sigma_i * noise_(rng_);
    return m;
}

const TraceRecord& Simulation::evaluate() {
    const auto& p = sc_.plant;
    meas_ = measure();

    const double resistance = sc_.schedule.resistance_at(state_.t);
    const double g_hat = observer_.G_hat;
    const double r_hat = 1.0 / g_hat;
    const double r_hat_rate = -conductance_rate(observer_, sc_.observer.gains, meas_) / (g_hat * g_hat);
    const PlantState measured{meas_.v0, meas_.iL, state_.t};
    const auto x = to_transformed(measured, resistance, r_hat, p);
    const auto truth = to_transformed(state_, resistance, r_hat, p);
    const auto ref = reference_.update(r_hat, r_hat_rate);
    x1_meas_ = x.x1;
    x2_meas_ = x.x2;

    std::optional<DisturbanceEstimate> d_hat;
    if (sc_.dob.enabled && sc_.controller.use_dob) d_hat = disturbance_estimate(dob_, sc_.dob.gains, x.x1, x.x2);

    double e1 = 0.0;
    double e2 = 0.0;
    singular_ = false;
    switch (sc_.controller.type) {
        case ControllerType::Ftc: {
            const auto out = ftc_step(sc_.controller.ftc, ftc_, x.x1, x.x2, ref, d_hat, sc_.sim.step);
            const auto cmd = nu_to_duty(out.nu, measured, r_hat, p, duty_);
            duty_ = cmd.duty;
            clamped_ = cmd.clamped;
            singular_ = cmd.singular;
            e1 = out.e1;
            e2 = out.e2;
            break;
        }
        case ControllerType::Baseline: {
            const auto out = baseline_step(sc_.controller.c1, sc_.controller.c2, x.x1, x.x2, ref);
            if (!std::isfinite(out.nu)) throw ControllerFault("nu", "baseline controller output is non-finite");
            const auto cmd = nu_to_duty(out.nu, measured, r_hat, p, duty_);
            duty_ = cmd.duty;
            clamped_ = cmd.clamped;
            singular_ = cmd.singular;
            e1 = out.e1;
            e2 = out.e2;
            break;
        }
        case ControllerType::Pid: {
            duty_ = pid_step(sc_.controller.pid, pid_, meas_, p.v_ref, sc_.sim.step);
            clamped_ = duty_ == kDutyMin || duty_ == kDutyMax;
            e1 = pid_.voltage_error;
            e2 = pid_.current_error;
            break;
        }
    }
    nu_applied_ = duty_to_nu(duty_, measured, r_hat, p);

    record_ = {state_.t, state_.v0, state_.iL, duty_, resistance, r_hat, truth.x1, truth.x2,
               e1,       e2,        truth.d1,  truth.d2, lyapunov_value(e1, e2)};
    evaluated_ = true;
    return record_;
}

void Simulation::advance() {
    if (!evaluated_) evaluate();
    const auto& p = sc_.plant;
    const double h = sc_.sim.step;
    const PlantState before = state_;
    double applied = duty_;
    if (sc_.sim.model == PlantModel::Averaged) {
        state_ = step_rk4(state_, duty_, sc_.schedule, p, h);
    } else {
        // Regular-sampled PWM: the duty is latched once per carrier period.
        if (!pwm_started_ || carrier_phase_ < pwm_prev_phase_) pwm_duty_ = duty_;
        pwm_started_ = true;
        pwm_prev_phase_ = carrier_phase_;
        applied = pwm_duty_;
        const auto next = step_switched(state_, pwm_duty_, sc_.schedule, p, h, carrier_phase_);
        state_ = next.state;
        carrier_phase_ = next.carrier_phase;
    }
    observer_ = adaptive_observer_step(observer_, sc_.observer.gains, meas_, applied, p, h);
    if (sc_.dob.enabled) dob_ = disturbance_observer_step(dob_, sc_.dob.gains, x1_meas_, x2_meas_, nu_applied_, h);
    // Time is carried as an exact multiple of the step to keep event sampling stable.
    state_.t = std::round(before.t / h + 1.0) * h;
    evaluated_ = false;
}

std::int64_t step_count(const Scenario& sc) { return std::llround(sc.sim.t_end / sc.sim.step); }

// --------------------------------------------------------------------------
// run_scenario
// --------------------------------------------------------------------------

namespace {

double certified_epsilon(const FtcGains& g) {
    double eps = certify_epsilon(g.f, 1e3, 1e-6).epsilon;
    if (g.g.kind() != g.f.kind() || g.g.kind() == UssfKind::Custom) {
        eps = std::max(eps, certify_epsilon(g.g, 1e3, 1e-6).epsilon);
    }
    return eps;
}

LyapunovAudit audit_lyapunov(const FtcGains& g, std::span<const double> V, double max_d1, double max_d2, double h) {
    LyapunovAudit audit;
    audit.kappa1 = 2.0 * std::min(g.k1, g.k4);
    audit.kappa2 = 2.0 * std::min(g.k2, g.k5);
    audit.epsilon = certified_epsilon(g);
    audit.max_abs_d1 = max_d1;
    audit.max_abs_d2 = max_d2;
    audit.implied_C = 0.5 * (max_d1 * max_d1 + max_d2 * max_d2) + (g.k1 + g.k2 + g.k4 + g.k5) * audit.epsilon;
    const double residual = 10.0 * audit.implied_C;
    for (std::size_t k = 0; k + 1 < V.size(); ++k) {
        if (!(V[k] > residual)) continue;
        ++audit.audited_steps;
        const double rate = (V[k + 1] - V[k]) / h;
        const double bound = -audit.kappa1 * std::sqrt(V[k]) - audit.kappa2 * std::pow(V[k], 0.5 * g.iota) +
                             audit.implied_C + 1e-6;
        if (rate > bound) ++audit.violations;
    }
    return audit;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& sc) {
    sc.validate();
    ScenarioResult result;
    result.controller = sc.controller.type;

    const double h = sc.sim.step;
    const double vr = sc.plant.v_ref;
    const double band = kSettlingBand * vr;
    const std::int64_t n = step_count(sc);
    const auto decimation = static_cast<std::int64_t>(sc.sim.decimation);
    if (n < 1) throw ValidationError("horizon shorter than one step; metrics undefined");

    std::vector<double> events;
    for (const auto& seg : sc.schedule.segments()) {
        if (seg.t_start < sc.sim.t_end) events.push_back(seg.t_start);
    }
    std::vector<double> last_out(events.size(), kNaN);
    std::vector<bool> out_at_end(events.size(), false);
    std::vector<bool> reached(events.size(), false);

    const bool is_ftc = sc.controller.type == ControllerType::Ftc;
    std::vector<double> lyapunov;
    if (is_ftc) lyapunov.reserve(static_cast<std::size_t>(n + 1));
    double max_d1 = 0.0;
    double max_d2 = 0.0;

    result.trace.reserve(static_cast<std::size_t>(n / decimation + 1));
    MetricsAccumulator metrics;
    Simulation sim(sc);
    double prev_u = kNaN;
    std::size_t window = 0;

    for (std::int64_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * h;
        try {
            const TraceRecord& rec = sim.evaluate();
            if (k % decimation == 0) result.trace.push_back(rec);
            if (t >= sc.sim.t_skip) metrics.add(rec.v0, vr);

            while (window + 1 < events.size() && t >= events[window + 1] - 0.5 * h) ++window;
            reached[window] = true;
            const bool outside = std::abs(rec.v0 - vr) > band;
            if (outside) last_out[window] = t;
            out_at_end[window] = outside;

            if (k > 0 && t >= events[window] + kSteadyStateDelay) {
                result.max_steady_duty_step = std::max(result.max_steady_duty_step, std::abs(rec.u - prev_u));
            }
            prev_u = rec.u;
            if (sim.duty_clamped()) ++result.duty_clamped_steps;
            if (sim.duty_singular()) ++result.singular_steps;
            if (sim.observer_state().projected) ++result.projected_steps;
            if (is_ftc) lyapunov.push_back(rec.V);
            max_d1 = std::max(max_d1, std::abs(rec.d1));
            max_d2 = std::max(max_d2, std::abs(rec.d2));

            if (k < n) sim.advance();
        } catch (const IntegrationFault& e) {
            result.faults.push_back({t, "integration", e.what()});
            break;
        } catch (const ControllerFault& e) {
            result.faults.push_back({t, "controller", e.what()});
            break;
        } catch (const ObserverFault& e) {
            result.faults.push_back({t, "observer", e.what()});
            break;
        }
    }

    if (metrics.count() > 0) result.metrics = metrics.result();
    for (std::size_t j = 0; j < events.size(); ++j) {
        if (!reached[j]) break;
        SettlingEvent ev;
        ev.t_event = events[j];
        if (out_at_end[j]) {
            ev.recovered = false;
            ev.recovery_time = kNaN;
        } else {
            ev.recovered = true;
            ev.recovery_time = std::isnan(last_out[j]) ? 0.0 : last_out[j] + h - events[j];
        }
        result.settling_events.push_back(ev);
    }
    if (is_ftc) result.audit = audit_lyapunov(sc.controller.ftc, lyapunov, max_d1, max_d2, h);
    return result;
}

// --------------------------------------------------------------------------
// compare / bench / sweep
// --------------------------------------------------------------------------

namespace {

int method_rank(const std::string& m) {
    if (m == "ftc") return 0;
    if (m == "baseline") return 1;
    if (m == "pid") return 2;
    throw ValidationError("comparison slot must be 'ftc', 'baseline' or 'pid', got '" + m + "'");
}

bool same_setup(const Scenario& a, const Scenario& b) {
    const auto& pa = a.plant;
    const auto& pb = b.plant;
    if (pa.inductance != pb.inductance || pa.capacitance != pb.capacitance || pa.input_voltage != pb.input_voltage ||
        pa.v_ref != pb.v_ref || pa.switching_frequency != pb.switching_frequency) {
        return false;
    }
    const auto& sa = a.schedule.segments();
    const auto& sb = b.schedule.segments();
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (sa[i].t_start != sb[i].t_start || sa[i].resistance != sb[i].resistance) return false;
    }
    return a.sim.t_end == b.sim.t_end && a.sim.step == b.sim.step;
}

}  // namespace

ComparisonReport compare(const std::vector<std::pair<std::string, Scenario>>& runs) {
    if (runs.size() != 3) throw ValidationError("compare needs exactly three runs (ftc, baseline, pid)");
    std::vector<std::pair<std::string, Scenario>> ordered = runs;
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return method_rank(a.first) < method_rank(b.first); });
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (method_rank(ordered[i].first) != static_cast<int>(i)) throw ValidationError("compare slots must be distinct");
        if (!same_setup(ordered[0].second, ordered[i].second)) {
            throw ValidationError("compared scenarios must share plant, load schedule and horizon");
        }
    }

    std::vector<std::future<ScenarioResult>> jobs;
    for (const auto& [name, sc] : ordered) {
        jobs.push_back(std::async(std::launch::async, [sc = sc] { return run_scenario(sc); }));
    }

    ComparisonReport report;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto res = jobs[i].get();
        report.entries.push_back({ordered[i].first, res.metrics, res.settling_events, res.faulted()});
    }
    const double ftc = report.entries[0].metrics.mse;
    const double base = report.entries[1].metrics.mse;
    const double pid = report.entries[2].metrics.mse;
    report.tie = ftc == base || base == pid || ftc == pid;
    const bool any_fault = std::any_of(report.entries.begin(), report.entries.end(), [](const auto& e) { return e.faulted; });
    report.ordering_holds = !any_fault && ftc < base && base < pid;
    return report;
}

std::vector<std::pair<std::string, Scenario>> comparison_runs(const Scenario& base) {
    std::vector<std::pair<std::string, Scenario>> runs;
    for (const auto type : {ControllerType::Ftc, ControllerType::Baseline, ControllerType::Pid}) {
        Scenario sc = base;
        sc.controller.type = type;
        if (type != ControllerType::Ftc) sc.controller.use_dob = false;
        runs.emplace_back(to_string(type), sc);
    }
    return runs;
}

LatencyStats benchmark_step_latency(const Scenario& sc, std::int64_t iterations) {
    if (iterations < 10'000) throw ValidationError("benchmark needs at least 10^4 iterations");
    Simulation sim(sc);
    std::vector<double> samples(static_cast<std::size_t>(iterations));
    using clock = std::chrono::steady_clock;
    for (auto& s : samples) {
        const auto t0 = clock::now();
        sim.step();
        const auto t1 = clock::now();
        s = std::chrono::duration<double>(t1 - t0).count();
    }
    LatencyStats stats;
    stats.iterations = iterations;
    double sum = 0.0;
    for (const double s : samples) sum += s;
    stats.mean = sum / static_cast<double>(samples.size());
    const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(samples.size()))) - 1;
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(idx), samples.end());
    stats.p99 = samples[idx];
    return stats;
}

std::vector<SweepRow> sweep_initial_conditions(const Scenario& sc, std::span<const double> v0_list) {
    if (v0_list.empty()) throw ValidationError("sweep needs at least one initial voltage");
    for (const double v : v0_list) {
        if (!(v > 0.0 && v <= 2.0 * sc.plant.v_ref)) throw ValidationError("sweep voltages must lie in (0, 2 v_ref]");
    }
    std::vector<std::future<ScenarioResult>> jobs;
    for (const double v : v0_list) {
        Scenario run = sc;
        run.initial.v0 = v;
        jobs.push_back(std::async(std::launch::async, [run] { return run_scenario(run); }));
    }
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < v0_list.size(); ++i) {
        const auto res = jobs[i].get();
        SweepRow row;
        row.v0 = v0_list[i];
        if (!res.faulted() && !res.settling_events.empty() && res.settling_events.front().recovered) {
            row.settling_time = res.settling_events.front().recovery_time;
            row.recovered = true;
        } else {
            row.settling_time = kNaN;
        }
        rows.push_back(row);
    }
    return rows;
}

// --------------------------------------------------------------------------
// Serialization
// --------------------------------------------------------------------------

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
    out << "t,v0,iL,u,R,R_hat,x1,x2,e1,e2,d1,d2\n";
    // Same text as printf "%.10g", without the locale and format parsing cost.
    std::string buf;
    buf.reserve(trace.size() * 160);
    char field[32];
    auto put = [&](double v, char sep) {
        const auto res = std::to_chars(field, field + sizeof field, v, std::chars_format::general, 10);
        buf.append(field, res.ptr);
        buf.push_back(sep);
    };
    for (const auto& r : trace) {
        put(r.t, ',');
        put(r.v0, ',');
        put(r.iL, ',');
        put(r.u, ',');
        put(r.R, ',');
        put(r.R_hat, ',');
        put(r.x1, ',');
        put(r.x2, ',');
        put(r.e1, ',');
        put(r.e2, ',');
        put(r.d1, ',');
        put(r.d2, '\n');
    }
    out << buf;
}

namespace {

json metrics_json(const ErrorMetrics& m) { return {{"mse", m.mse}, {"rmse", m.rmse}, {"mae", m.mae}}; }

json events_json(const std::vector<SettlingEvent>& events) {
    json arr = json::array();
    for (const auto& e : events) {
        arr.push_back({{"t_event", e.t_event},
                       {"recovery_time", e.recovered ? json(e.recovery_time) : json(nullptr)},
                       {"recovered", e.recovered}});
    }
    return arr;
}

}  // namespace

json summary_json(const ScenarioResult& result) {
    json doc;
    doc["controller"] = to_string(result.controller);
    doc["metrics"] = metrics_json(result.metrics);
    doc["settling_events"] = events_json(result.settling_events);
    json faults = json::array();
    for (const auto& f : result.faults) faults.push_back({{"t", f.t}, {"kind", f.kind}, {"message", f.message}});
    doc["faults"] = faults;
    if (result.audit) {
        const auto& a = *result.audit;
        doc["implied_C"] = a.implied_C;
        doc["lyapunov_audit"] = {{"kappa1", a.kappa1},
                                 {"kappa2", a.kappa2},
                                 {"epsilon", a.epsilon},
                                 {"max_abs_d1", a.max_abs_d1},
                                 {"max_abs_d2", a.max_abs_d2},
                                 {"audited_steps", a.audited_steps},
                                 {"violations", a.violations}};
    } else {
        doc["implied_C"] = nullptr;
    }
    doc["max_steady_duty_step"] = result.max_steady_duty_step;
    doc["duty_clamped_steps"] = result.duty_clamped_steps;
    doc["singular_steps"] = result.singular_steps;
    doc["projected_steps"] = result.projected_steps;
    return doc;
}

json comparison_json(const ComparisonReport& report) {
    json methods = json::array();
    for (const auto& e : report.entries) {
        methods.push_back({{"method", e.method},
                           {"metrics", metrics_json(e.metrics)},
                           {"settling_events", events_json(e.settling_events)},
                           {"faulted", e.faulted}});
    }
    return {{"methods", methods},
            {"ordering", "mse_ftc < mse_baseline < mse_pid"},
            {"ordering_holds", report.ordering_holds},
            {"tie", report.tie}};
}

}  // namespace boostctl
