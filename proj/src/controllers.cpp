#include "boostctl/controllers.hpp"

#include "boostctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace boostctl {

void FtcGains::validate() const {
    if (!(k3 > 0.5) || !(k6 > 0.5)) throw ValidationError("fixed-time gains require k3 > 1/2 and k6 > 1/2");
    if (!(iota > 2.0)) throw ValidationError("fixed-time exponent iota must exceed 2");
    if (!(k1 >= 0.0 && k2 >= 0.0 && k4 >= 0.0 && k5 >= 0.0)) {
        throw ValidationError("fixed-time gains k1, k2, k4, k5 must be nonnegative");
    }
}

namespace {

double checked(double value, const char* term) {
    if (!std::isfinite(value)) throw ControllerFault(term, std::string("controller term '") + term + "' is non-finite");
    return value;
}

}  // namespace

FtcOutput ftc_step(const FtcGains& gains, FtcState& state, double x1, double x2, const ReferenceSignal& ref,
                   const std::optional<DisturbanceEstimate>& d_hat, double h) {
    const double iota = gains.iota;
    FtcOutput out;

    // First stage. |e|^(iota-1) paired with f(sgn(e)|e|^iota) keeps the product odd
    // for any real iota > 2 and equals e^(iota-1) f(e^iota) for iota = 3.
    out.e1 = checked(x1 - ref.xr, "e1");
    const double e1_pow = checked(signed_power(out.e1, iota), "e1^iota");
    const double f1 = gains.f.eval(out.e1);
    const double f2 = gains.f.eval(e1_pow);
    const double e1_mag = std::abs(out.e1);
    const double shaped1 = checked(std::pow(e1_mag, iota - 1.0) * f2, "e1^(iota-1) f2");
    out.alpha = -gains.k1 * f1 - gains.k2 * shaped1 - gains.k3 * out.e1 + ref.xr_dot;
    if (d_hat) out.alpha -= d_hat->d1;
    checked(out.alpha, "alpha");

    const double dalpha_de1 = -gains.k1 * gains.f.deriv(out.e1) -
                              gains.k2 * (iota - 1.0) * signed_power(out.e1, iota - 2.0) * f2 -
                              gains.k2 * iota * std::pow(e1_mag, 2.0 * iota - 2.0) * gains.f.deriv(e1_pow) -
                              gains.k3;
    out.alpha_dot_hat = checked((x2 - ref.xr_dot) * checked(dalpha_de1, "d alpha / d e1") + ref.xr_ddot,
                                "alpha_dot_hat");

    // Second stage.
    out.e2 = checked(x2 - out.alpha, "e2");
    const double e2_pow = checked(signed_power(out.e2, iota), "e2^iota");
    const double g1 = gains.g.eval(out.e2);
    const double shaped2 = checked(std::pow(std::abs(out.e2), iota - 1.0) * gains.g.eval(e2_pow), "e2^(iota-1) g2");
    const double cross = gains.cross_term == CrossTerm::E1 ? out.e1 : out.e2;
    out.nu = -gains.k4 * g1 - gains.k5 * shaped2 - gains.k6 * cross + out.alpha_dot_hat;
    if (d_hat) out.nu -= d_hat->d2;
    checked(out.nu, "nu");

    if (state.has_prev && h > 0.0) state.alpha_dot_fd = (out.alpha - state.alpha_prev) / h;
    state.alpha_prev = out.alpha;
    state.has_prev = true;
    return out;
}

double reference_energy_sensitivity(double vr, double r_hat, const PlantParams& p) {
    const double vr2 = vr * vr;
    return -p.inductance * vr2 * vr2 / (p.input_voltage * p.input_voltage * r_hat * r_hat * r_hat);
}

ReferenceGenerator::ReferenceGenerator(const PlantParams& p, double h) : params_(p), h_(h) {
    if (!(h > 0.0)) throw ValidationError("reference generator step must be positive");
}

ReferenceSignal ReferenceGenerator::update(double r_hat, double r_hat_rate) {
    ReferenceSignal out;
    out.xr = reference_energy(params_.v_ref, r_hat, params_);
    out.xr_dot = reference_energy_sensitivity(params_.v_ref, r_hat, params_) * r_hat_rate;
    if (samples_ > 0) {
        const double raw = (out.xr_dot - prev_dot_) / h_;
        constexpr double kSmoothing = 0.1;  // h / (10 h)
        ddot_ += kSmoothing * (raw - ddot_);
    }
    out.xr_ddot = ddot_;
    prev_dot_ = out.xr_dot;
    ++samples_;
    return out;
}

std::vector<ReferenceSignal> reference_derivatives(std::span<const double> r_hat, const PlantParams& p, double h) {
    if (r_hat.size() < 3) throw ValidationError("reference_derivatives needs at least 3 samples");
    ReferenceGenerator gen(p, h);
    std::vector<ReferenceSignal> out;
    out.reserve(r_hat.size());
    for (std::size_t k = 0; k < r_hat.size(); ++k) {
        const double rate = k == 0 ? 0.0 : (r_hat[k] - r_hat[k - 1]) / h;
        out.push_back(gen.update(r_hat[k], rate));
    }
    return out;
}

BaselineOutput baseline_step(double c1, double c2, double x1, double x2, const ReferenceSignal& ref) {
    BaselineOutput out;
    out.e1 = x1 - ref.xr;
    out.alpha = -c1 * out.e1 + ref.xr_dot;
    out.e2 = x2 - out.alpha;
    out.nu = -c2 * out.e2 + ref.xr_ddot;
    return out;
}

void PidGains::validate() const {
    if (!(kv_p >= 0.0 && kv_i >= 0.0 && kv_d >= 0.0 && ki_p >= 0.0 && ki_i >= 0.0 && ki_d >= 0.0)) {
        throw ValidationError("PID gains must be nonnegative");
    }
    if (!(voltage_integral_limit > 0.0 && current_integral_limit > 0.0)) {
        throw ValidationError("PID integral clamps must be positive");
    }
}

double pid_step(const PidGains& gains, PidState& state, Measurement meas, double vr, double h) {
    // Derivative filter time constant is 10 h.
    constexpr double kSmoothing = 0.1;

    const double ev = vr - meas.v0;
    if (state.has_prev) state.voltage_derivative += kSmoothing * ((ev - state.voltage_error_prev) / h - state.voltage_derivative);
    const double iv = std::clamp(state.voltage_integral + ev * h, -gains.voltage_integral_limit,
                                 gains.voltage_integral_limit);
    double iref = gains.kv_p * ev + gains.kv_i * iv + gains.kv_d * state.voltage_derivative;

    double ei = iref - meas.iL;
    if (state.has_prev) state.current_derivative += kSmoothing * ((ei - state.current_error_prev) / h - state.current_derivative);
    double ii = std::clamp(state.current_integral + ei * h, -gains.current_integral_limit,
                           gains.current_integral_limit);
    double u_raw = gains.ki_p * ei + gains.ki_i * ii + gains.ki_d * state.current_derivative;

    const bool high = u_raw > kDutyMax;
    const bool low = u_raw < kDutyMin;
    if ((high && ei > 0.0) || (low && ei < 0.0)) {
        ii = state.current_integral;
        u_raw = gains.ki_p * ei + gains.ki_i * ii + gains.ki_d * state.current_derivative;
    }
    if ((high && ev > 0.0) || (low && ev < 0.0)) {
        // Outer integrator frozen too; the current reference changes only via P/D terms.
        state.current_reference = gains.kv_p * ev + gains.kv_i * state.voltage_integral + gains.kv_d * state.voltage_derivative;
    } else {
        state.voltage_integral = iv;
        state.current_reference = iref;
    }
    state.current_integral = ii;

    state.voltage_error_prev = ev;
    state.current_error_prev = ei;
    state.voltage_error = ev;
    state.current_error = ei;
    state.has_prev = true;
    return std::clamp(u_raw, kDutyMin, kDutyMax);
}

double lyapunov_value(double e1, double e2) { return 0.5 * (e1 * e1 + e2 * e2); }

}  // namespace boostctl
