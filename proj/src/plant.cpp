#include "boostctl/plant.hpp"

#include "boostctl/errors.hpp"
#include "boostctl/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace boostctl {

void PlantParams::validate(double step) const {
    if (!(inductance > 0.0 && capacitance > 0.0 && input_voltage > 0.0 && v_ref > 0.0 && switching_frequency > 0.0)) {
        throw ValidationError("plant parameters must be strictly positive");
    }
    if (!(step > 0.0)) throw ValidationError("integration step must be positive");
    if (switching_frequency * step > 1.0 + 1e-12) {
        throw ValidationError("integration step exceeds one switching period");
    }
}

LoadSchedule::LoadSchedule(std::vector<LoadSegment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw ValidationError("load schedule is empty");
    if (segments_.front().t_start != 0.0) throw ValidationError("load schedule must start at t = 0");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (!(segments_[i].resistance > 0.0)) throw ValidationError("load resistance must be positive");
        if (i > 0 && !(segments_[i].t_start > segments_[i - 1].t_start)) {
            throw ValidationError("load schedule start times must be strictly increasing");
        }
    }
}

LoadSchedule LoadSchedule::constant(double resistance) { return LoadSchedule({{0.0, resistance}}); }

LoadSchedule LoadSchedule::standard_steps() { return LoadSchedule({{0.0, 10.0}, {0.2, 20.0}, {0.6, 10.0}}); }

double LoadSchedule::resistance_at(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double time, const LoadSegment& seg) { return time < seg.t_start; });
    if (it == segments_.begin()) return segments_.front().resistance;
    return std::prev(it)->resistance;
}

PlantDerivative plant_deriv(const PlantState& state, double u, double resistance, const PlantParams& p) {
    const double on = 1.0 - u;
    return {on / p.capacitance * state.iL - state.v0 / (resistance * p.capacitance),
            -on / p.inductance * state.v0 + p.input_voltage / p.inductance};
}

namespace {

PlantState integrate_segment(const PlantState& state, double u, double resistance, const PlantParams& p, double h) {
    const auto y = rk4_advance<2>({state.v0, state.iL}, h, [&](const std::array<double, 2>& s) {
        const auto d = plant_deriv({s[0], s[1], 0.0}, u, resistance, p);
        return std::array<double, 2>{d.dv0, d.diL};
    });
    return {y[0], y[1], state.t + h};
}

void check_finite(const PlantState& next, const PlantState& last_good) {
    if (!std::isfinite(next.v0) || !std::isfinite(next.iL)) {
        throw IntegrationFault(last_good, "plant state became non-finite");
    }
}

}  // namespace

PlantState step_rk4(const PlantState& state, double u, const LoadSchedule& schedule, const PlantParams& p, double h) {
    const PlantState next = integrate_segment(state, u, schedule.resistance_at(state.t), p, h);
    check_finite(next, state);
    return next;
}

SwitchedStep step_switched(const PlantState& state, double u, const LoadSchedule& schedule, const PlantParams& p,
                           double h, double carrier_phase) {
    const double resistance = schedule.resistance_at(state.t);
    const double fs = p.switching_frequency;
    u = std::clamp(u, 0.0, 1.0);

    PlantState cur = state;
    double phase = carrier_phase;
    double remaining = h;
    // A step spans at most one carrier period, so at most three segments occur.
    for (int seg = 0; seg < 8 && remaining > 0.0; ++seg) {
        const bool on = phase < u;
        const double to_edge = ((on ? u : 1.0) - phase) / fs;
        if (to_edge >= remaining) {
            cur = integrate_segment(cur, on ? 1.0 : 0.0, resistance, p, remaining);
            break;
        }
        if (to_edge > 0.0) cur = integrate_segment(cur, on ? 1.0 : 0.0, resistance, p, to_edge);
        remaining -= to_edge;
        phase = on ? u : 0.0;
    }
    cur.t = state.t + h;
    check_finite(cur, state);
    double next_phase = std::fmod(carrier_phase + h * fs, 1.0);
    if (next_phase < 0.0) next_phase += 1.0;
    return {cur, next_phase};
}

TransformedState to_transformed(const PlantState& state, double resistance, double r_hat, const PlantParams& p) {
    const double v2 = state.v0 * state.v0;
    TransformedState out;
    out.x1 = 0.5 * (p.capacitance * v2 + p.inductance * state.iL * state.iL);
    out.x2 = p.input_voltage * state.iL - v2 / r_hat;
    out.d1 = v2 / r_hat - v2 / resistance;
    out.d2 = 2.0 / (r_hat * p.capacitance) * (v2 / resistance - v2 / r_hat);
    return out;
}

namespace {

struct DutyMap {
    double offset;  // nu at (1 - u) = 0
    double slope;   // d nu / d(1 - u), negated
};

DutyMap duty_map(const PlantState& s, double r_hat, const PlantParams& p) {
    const double vi = p.input_voltage;
    return {vi * vi / p.inductance + 2.0 * s.v0 * s.v0 / (r_hat * r_hat * p.capacitance),
            vi * s.v0 / p.inductance + 2.0 * s.iL * s.v0 / (r_hat * p.capacitance)};
}

}  // namespace

double duty_to_nu(double u, const PlantState& state, double r_hat, const PlantParams& p) {
    const auto m = duty_map(state, r_hat, p);
    return m.offset - m.slope * (1.0 - u);
}

DutyCommand nu_to_duty(double nu, const PlantState& state, double r_hat, const PlantParams& p, double previous_duty) {
    const auto m = duty_map(state, r_hat, p);
    if (!(std::abs(m.slope) >= kDenominatorGuard)) return {previous_duty, true, false};
    const double u = 1.0 - (m.offset - nu) / m.slope;
    const double clamped = std::clamp(u, kDutyMin, kDutyMax);
    return {clamped, false, clamped != u};
}

double reference_energy(double vr, double r_hat, const PlantParams& p) {
    const double vi = p.input_voltage;
    const double power = vr * vr / r_hat;
    return p.inductance / (2.0 * vi * vi) * power * power + 0.5 * p.capacitance * vr * vr;
}

}  // namespace boostctl
