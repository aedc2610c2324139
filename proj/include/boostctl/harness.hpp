#pragma once

#include "boostctl/controllers.hpp"
#include "boostctl/estimators.hpp"
#include "boostctl/plant.hpp"
#include "boostctl/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace boostctl {

struct TraceRecord {
    double t = 0.0;
    double v0 = 0.0;
    double iL = 0.0;
    double u = 0.0;
    double R = 0.0;
    double R_hat = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double V = 0.0;
};

struct ErrorMetrics {
    double mse = 0.0;   // V^2
    double rmse = 0.0;  // V
    double mae = 0.0;   // V
};

class MetricsAccumulator {
public:
    void add(double v0, double vr) noexcept;
    std::size_t count() const noexcept { return count_; }
    /// Throws ValidationError when no samples were added.
    ErrorMetrics result() const;

private:
    double sum_sq_ = 0.0;
    double sum_abs_ = 0.0;
    std::size_t count_ = 0;
};

ErrorMetrics compute_metrics(std::span<const double> v0, double vr);

struct SettlingEvent {
    double t_event = 0.0;
    /// Time from the event until v0 last re-entered the band; NaN if it never did.
    double recovery_time = 0.0;
    bool recovered = true;
};

struct FaultRecord {
    double t = 0.0;
    std::string kind;
    std::string message;
};

/// Discrete audit of dV/dt <= -kappa1 V^(1/2) - kappa2 V^(iota/2) + C on steps
/// outside the residual set V > 10 C. C is built from the measured disturbance
/// bounds and the certified slope-limit constant.
struct LyapunovAudit {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double epsilon = 0.0;
    double max_abs_d1 = 0.0;
    double max_abs_d2 = 0.0;
    double implied_C = 0.0;
    std::int64_t audited_steps = 0;
    std::int64_t violations = 0;
};

struct LatencyStats {
    double mean = 0.0;  // s
    double p99 = 0.0;   // s
    std::int64_t iterations = 0;
};

struct ScenarioResult {
    ControllerType controller = ControllerType::Ftc;
    std::vector<TraceRecord> trace;
    ErrorMetrics metrics;
    std::vector<SettlingEvent> settling_events;
    std::vector<FaultRecord> faults;
    std::optional<LyapunovAudit> audit;  // fixed-time controller only
    double max_steady_duty_step = 0.0;   // max |u_k - u_{k-1}| at least 50 ms after each event
    std::int64_t duty_clamped_steps = 0;
    std::int64_t singular_steps = 0;
    std::int64_t projected_steps = 0;

    bool faulted() const noexcept { return !faults.empty(); }
};

inline constexpr double kSettlingBand = 0.02;  // fraction of v_ref
inline constexpr double kSteadyStateDelay = 0.05;  // s after an event

/// Observer, controller and plant advanced in lockstep. `evaluate()` computes
/// the control for the current state; `advance()` integrates one step with it.
class Simulation {
public:
    explicit Simulation(const Scenario& sc);

    /// Control evaluation at the current time; fills the pending record.
    const TraceRecord& evaluate();
    /// Integrates plant and observers over one step using the last evaluation.
    void advance();
    void step() {
        evaluate();
        advance();
    }

    const PlantState& plant_state() const noexcept { return state_; }
    const AdaptiveObserverState& observer_state() const noexcept { return observer_; }
    const DisturbanceObserverState& dob_state() const noexcept { return dob_; }
    const TraceRecord& record() const noexcept { return record_; }
    bool duty_clamped() const noexcept { return clamped_; }
    bool duty_singular() const noexcept { return singular_; }

private:
    Measurement measure();

    Scenario sc_;
    PlantState state_;
    double carrier_phase_ = 0.0;
    double pwm_prev_phase_ = 0.0;
    double pwm_duty_ = 0.5;
    bool pwm_started_ = false;
    AdaptiveObserverState observer_;
    DisturbanceObserverState dob_;
    ReferenceGenerator reference_;
    FtcState ftc_;
    PidState pid_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_{0.0, 1.0};

    Measurement meas_;
    TraceRecord record_;
    double duty_ = 0.5;
    double nu_applied_ = 0.0;
    double x1_meas_ = 0.0;
    double x2_meas_ = 0.0;
    bool clamped_ = false;
    bool singular_ = false;
    bool evaluated_ = false;
};

/// Runs the full horizon. Faults end the run early and are recorded; the
/// partial trace and metrics up to the fault are kept.
ScenarioResult run_scenario(const Scenario& sc);

/// Number of integration steps for the horizon.
std::int64_t step_count(const Scenario& sc);

struct ComparisonEntry {
    std::string method;  // "ftc", "baseline" or "pid"
    ErrorMetrics metrics;
    std::vector<SettlingEvent> settling_events;
    bool faulted = false;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;  // canonical order: ftc, baseline, pid
    bool ordering_holds = false;           // mse_ftc < mse_baseline < mse_pid
    bool tie = false;
};

/// Runs one scenario per method slot (each label exactly once) in parallel.
/// Scenarios must share plant parameters, load schedule and horizon.
ComparisonReport compare(const std::vector<std::pair<std::string, Scenario>>& runs);

/// The three method slots for `base`: its plant, schedule and observers with
/// each controller type in turn, keeping base's gains for every type.
std::vector<std::pair<std::string, Scenario>> comparison_runs(const Scenario& base);

/// Times one evaluate+advance per iteration. Requires iterations >= 10^4.
LatencyStats benchmark_step_latency(const Scenario& sc, std::int64_t iterations);

struct SweepRow {
    double v0 = 0.0;
    double settling_time = 0.0;  // NaN when the run never settled
    bool recovered = false;
};

/// Settling time after start-up for each initial output voltage in (0, 2 v_ref].
std::vector<SweepRow> sweep_initial_conditions(const Scenario& sc, std::span<const double> v0_list);

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
nlohmann::json summary_json(const ScenarioResult& result);
nlohmann::json comparison_json(const ComparisonReport& report);

}  // namespace boostctl
