#include "boostctl/ussf.hpp"

#include "boostctl/errors.hpp"
#include "boostctl/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace boostctl {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
constexpr double kTwoOverSqrtPi = 2.0 / 1.7724538509055160273;  // 2/sqrt(pi)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_finite(double x, const char* op) {
    if (!std::isfinite(x)) throw DomainError(std::string(op) + ": non-finite argument");
}

// log(erfc(x)) for x >= 0, switching to the asymptotic series once erfc underflows.
double log_erfc(double x) {
    const double direct = std::erfc(x);
    if (direct > 1e-300) return std::log(direct);
    const double inv2 = 1.0 / (x * x);
    return -x * x - std::log(x * std::sqrt(std::numbers::pi)) + std::log1p(-0.5 * inv2 + 0.75 * inv2 * inv2);
}

}  // namespace

Ussf::Ussf(UssfKind kind) : kind_(kind) {
    if (kind == UssfKind::Custom) throw DomainError("Ussf: use Ussf::custom for user-supplied functions");
}

Ussf Ussf::custom(std::string name, ScalarFn value, ScalarFn derivative, ScalarFn log_tail, ScalarFn log_deriv) {
    if (!value || !derivative) throw DomainError("Ussf::custom: value and derivative are required");
    Ussf out;
    out.kind_ = UssfKind::Custom;
    out.custom_ = std::make_shared<const CustomFns>(CustomFns{std::move(name), std::move(value), std::move(derivative),
                                                              std::move(log_tail), std::move(log_deriv)});
    return out;
}

Ussf Ussf::from_name(std::string_view name) {
    if (name == "tanh") return Ussf(UssfKind::Tanh);
    if (name == "atan") return Ussf(UssfKind::ScaledArctan);
    if (name == "alg") return Ussf(UssfKind::AlgebraicSigmoid);
    if (name == "erf") return Ussf(UssfKind::ErrorFunction);
    throw ValidationError("unknown USSF '" + std::string(name) + "' (expected tanh, atan, alg or erf)");
}

std::string Ussf::name() const {
    switch (kind_) {
        case UssfKind::Tanh: return "tanh";
        case UssfKind::ScaledArctan: return "atan";
        case UssfKind::AlgebraicSigmoid: return "alg";
        case UssfKind::ErrorFunction: return "erf";
        case UssfKind::Custom: return custom_->name;
    }
    return {};
}

double Ussf::eval(double x) const {
    require_finite(x, "ussf_eval");
    switch (kind_) {
        case UssfKind::Tanh: return std::tanh(x);
        case UssfKind::ScaledArctan: return kTwoOverPi * std::atan(x);
        case UssfKind::AlgebraicSigmoid: return x / std::hypot(1.0, x);
        case UssfKind::ErrorFunction: return std::erf(x);
        case UssfKind::Custom: return custom_->value(x);
    }
    return 0.0;
}

double Ussf::deriv(double x) const {
    require_finite(x, "ussf_deriv");
    switch (kind_) {
        case UssfKind::Tanh: {
            const double q = std::exp(-2.0 * std::abs(x));
            return 4.0 * q / ((1.0 + q) * (1.0 + q));
        }
        case UssfKind::ScaledArctan: return kTwoOverPi / (1.0 + x * x);
        case UssfKind::AlgebraicSigmoid: {
            const double s = std::hypot(1.0, x);
            return 1.0 / (s * s * s);
        }
        case UssfKind::ErrorFunction: return kTwoOverSqrtPi * std::exp(-x * x);
        case UssfKind::Custom: return custom_->derivative(x);
    }
    return 0.0;
}

double Ussf::tail(double x) const {
    switch (kind_) {
        case UssfKind::Tanh: return 2.0 / (std::exp(2.0 * x) + 1.0);
        case UssfKind::ScaledArctan: return x > 0.0 ? kTwoOverPi * std::atan(1.0 / x) : 1.0 - eval(x);
        case UssfKind::AlgebraicSigmoid: {
            const double s = std::hypot(1.0, x);
            return 1.0 / (s * (s + x));
        }
        case UssfKind::ErrorFunction: return std::erfc(x);
        case UssfKind::Custom: return custom_->log_tail ? std::exp(custom_->log_tail(x)) : 1.0 - eval(x);
    }
    return 0.0;
}

double Ussf::log_tail(double x) const {
    switch (kind_) {
        case UssfKind::Tanh: return std::log(2.0) - 2.0 * x - std::log1p(std::exp(-2.0 * x));
        case UssfKind::ScaledArctan: return std::log(tail(x));
        case UssfKind::AlgebraicSigmoid: {
            const double s = std::hypot(1.0, x);
            return -std::log(s) - std::log(s + x);
        }
        case UssfKind::ErrorFunction: return log_erfc(x);
        case UssfKind::Custom: {
            if (custom_->log_tail) return custom_->log_tail(x);
            const double t = tail(x);
            return t > 0.0 ? std::log(t) : kNegInf;
        }
    }
    return 0.0;
}

double Ussf::log_deriv(double x) const {
    const double a = std::abs(x);
    switch (kind_) {
        case UssfKind::Tanh: return std::log(4.0) - 2.0 * a - 2.0 * std::log1p(std::exp(-2.0 * a));
        case UssfKind::ScaledArctan: return std::log(kTwoOverPi) - std::log1p(x * x);
        case UssfKind::AlgebraicSigmoid: return -1.5 * std::log1p(x * x);
        case UssfKind::ErrorFunction: return std::log(kTwoOverSqrtPi) - x * x;
        case UssfKind::Custom: {
            if (custom_->log_deriv) return custom_->log_deriv(x);
            const double d = deriv(x);
            return d > 0.0 ? std::log(d) : kNegInf;
        }
    }
    return 0.0;
}

double ussf_eval(const Ussf& f, double x) { return f.eval(x); }
double ussf_deriv(const Ussf& f, double x) { return f.deriv(x); }

double signed_power(double x, double a) {
    if (!(a > 0.0)) throw DomainError("signed_power: exponent must be positive");
    if (x >= 0.0) return std::pow(x, a);
    return -std::pow(-x, a);
}

namespace {

// Supremum over x > 0 of an even, nonnegative profile on a log grid.
double certified_supremum(const std::function<double(double)>& profile, const std::vector<double>& grid,
                          const char* what) {
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = profile(grid[i]);
        if (!std::isfinite(v)) throw CertificationError(std::string(what) + ": non-finite profile value");
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }

    if (best == 0) throw CertificationError(std::string(what) + ": maximum not bracketed at the inner grid edge");

    if (best + 1 < grid.size()) {
        const auto refined = golden_section_maximize(profile, grid[best - 1], grid[best + 1], 1e-10);
        return std::max(best_value, refined.value);
    }

    // Maximum on the outer edge: accept only a converging tail and extrapolate.
    const double span = grid.back();
    const double a = profile(0.25 * span);
    const double b = profile(0.5 * span);
    const double c = profile(span);
    const double d1 = b - a;
    const double d2 = c - b;
    if (d2 <= 0.0) return std::max(best_value, c);
    if (d1 <= 0.0) throw CertificationError(std::string(what) + ": irregular tail");
    const double ratio = d2 / d1;
    if (ratio > 0.5 + 1e-3) {
        throw CertificationError(std::string(what) + ": supremum not attained and tail does not converge");
    }
    return c + d2 * ratio / (1.0 - ratio);
}

}  // namespace

UssfCertificate certify_epsilon(const Ussf& f, double grid_span, double tolerance) {
    if (!(grid_span >= 100.0)) throw DomainError("certify_epsilon: grid_span must be >= 100");
    if (!(tolerance > 0.0 && tolerance < 1e-3)) throw DomainError("certify_epsilon: tolerance must lie in (0, 1e-3)");

    const auto grid = log_space(1e-6, grid_span, 10'000);
    UssfCertificate cert;
    cert.kind = f.kind();
    cert.name = f.name();
    cert.grid_span = grid_span;
    cert.tolerance = tolerance;
    cert.epsilon = certified_supremum([&f](double x) { return x * x * f.deriv(x); }, grid, "slope limit");
    cert.m_bound = certified_supremum([&f](double x) { return x * f.tail(x); }, grid, "residual bound");

    if (!(cert.epsilon > 0.0)) throw CertificationError("slope limit: epsilon is not positive");
    if (cert.m_bound > cert.epsilon + tolerance) {
        throw CertificationError("residual bound exceeds slope limit; not a USSF");
    }
    return cert;
}

AxiomReport verify_axioms(const Ussf& f, int sample_count, double span, const UssfCertificate* certificate) {
    if (sample_count < 1000) throw DomainError("verify_axioms: sample_count must be >= 1000");
    if (!(span > 0.0) || !std::isfinite(span)) throw DomainError("verify_axioms: span must be positive");

    double epsilon = std::numeric_limits<double>::quiet_NaN();
    double tol = 0.0;
    if (certificate != nullptr) {
        epsilon = certificate->epsilon;
        tol = certificate->tolerance;
    } else {
        try {
            const auto cert = certify_epsilon(f, std::max(span, 100.0), 1e-6);
            epsilon = cert.epsilon;
            tol = cert.tolerance;
        } catch (const CertificationError&) {
        }
    }

    AxiomReport report;
    report.oddness = std::abs(f.eval(0.0)) < 1e-12;
    report.monotonicity = std::isfinite(f.log_deriv(0.0));
    report.range = true;
    report.slope_limit = std::isfinite(epsilon);

    const auto positive = log_space(std::min(1e-6, span / 10.0), span, sample_count / 2);
    for (const double x : positive) {
        const double fp = f.eval(x);
        const double fm = f.eval(-x);
        if (!(std::abs(fp + fm) < 1e-12)) report.oddness = false;

        const double ld_p = f.log_deriv(x);
        const double ld_m = f.log_deriv(-x);
        if (!std::isfinite(ld_p) || !std::isfinite(ld_m)) report.monotonicity = false;

        if (!(std::abs(fp) <= 1.0 && std::abs(fm) <= 1.0 && std::isfinite(f.log_tail(x)))) report.range = false;

        if (report.slope_limit) {
            const double slope = std::isfinite(ld_p) ? std::exp(2.0 * std::log(x) + ld_p) : x * x * f.deriv(x);
            if (!(slope <= epsilon + tol)) report.slope_limit = false;
        }
    }

    const double far = std::max(span, 1e3);
    report.saturation = std::abs(f.tail(far)) < 1e-3 && std::abs(f.eval(-far) + f.eval(far)) < 1e-12;
    return report;
}

Ussf admit_custom_ussf(Ussf f) {
    const auto report = verify_axioms(f, 10'000, 1e3);
    if (report.all()) return f;
    std::string failed;
    auto note = [&failed](bool ok, const char* axiom) {
        if (!ok) failed += failed.empty() ? axiom : std::string(", ") + axiom;
    };
    note(report.oddness, "oddness");
    note(report.monotonicity, "monotonicity");
    note(report.range, "range");
    note(report.saturation, "saturation");
    note(report.slope_limit, "slope limit");
    throw ValidationError("custom USSF '" + f.name() + "' rejected: " + failed);
}

}  // namespace boostctl
