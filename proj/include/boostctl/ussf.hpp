#pragma once

// Unit-safe saturating functions: smooth, odd, strictly increasing maps
// R -> (-1, 1) with lim f(x) = +-1 and sup x^2 f'(x) = epsilon < inf.

#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace boostctl {

enum class UssfKind { Tanh, ScaledArctan, AlgebraicSigmoid, ErrorFunction, Custom };

/// A saturating function together with the auxiliary evaluations the
/// certification code needs to stay accurate in the far tail.
///
/// Built-in kinds dispatch through a switch; custom functions are wrapped
/// std::function objects and should be admitted with `admit_custom_ussf`.
class Ussf {
public:
    using ScalarFn = std::function<double(double)>;

    /// Defaults to x / sqrt(1 + x^2).
    Ussf() = default;
    explicit Ussf(UssfKind kind);

    /// `log_tail` (log(1 - f(x)), x >= 0) and `log_deriv` (log f'(x)) are
    /// optional; without them the far-tail checks see float-rounded values and
    /// fast-saturating functions fail the range and monotonicity axioms.
    static Ussf custom(std::string name, ScalarFn value, ScalarFn derivative, ScalarFn log_tail = {},
                       ScalarFn log_deriv = {});

    /// Parses "tanh", "atan", "alg" or "erf".
    static Ussf from_name(std::string_view name);

    UssfKind kind() const noexcept { return kind_; }
    std::string name() const;

    /// f(x). Throws DomainError for non-finite x.
    double eval(double x) const;
    /// f'(x). Throws DomainError for non-finite x.
    double deriv(double x) const;

    /// 1 - f(x) for x >= 0, computed without cancellation for built-ins.
    double tail(double x) const;
    /// log(1 - f(x)) for x >= 0; finite exactly when f(x) < 1 analytically.
    double log_tail(double x) const;
    /// log f'(x); finite exactly when f'(x) > 0 analytically.
    double log_deriv(double x) const;

private:
    struct CustomFns {
        std::string name;
        ScalarFn value;
        ScalarFn derivative;
        ScalarFn log_tail;
        ScalarFn log_deriv;
    };

    UssfKind kind_ = UssfKind::AlgebraicSigmoid;
    std::shared_ptr<const CustomFns> custom_;
};

double ussf_eval(const Ussf& f, double x);
double ussf_deriv(const Ussf& f, double x);

/// sign(x) * |x|^a. Equals pow(x, a) for x >= 0. Throws DomainError if a <= 0.
double signed_power(double x, double a);

struct UssfCertificate {
    UssfKind kind = UssfKind::AlgebraicSigmoid;
    std::string name;
    double epsilon = 0.0;  // sup x^2 f'(x)
    double m_bound = 0.0;  // sup |x| - x f(x)
    double grid_span = 0.0;
    double tolerance = 0.0;
};

/// Maximizes x^2 f'(x) and |x| - x f(x) by a log-spaced grid scan followed by
/// golden-section refinement. When the grid maximum sits on the outer edge the
/// supremum is extrapolated from the tail (Aitken) and accepted only if the
/// tail is converging; otherwise CertificationError.
///
/// Requires grid_span >= 100 and tolerance in (0, 1e-3).
UssfCertificate certify_epsilon(const Ussf& f, double grid_span, double tolerance);

struct AxiomReport {
    bool oddness = false;
    bool monotonicity = false;
    bool range = false;
    bool saturation = false;
    bool slope_limit = false;

    bool all() const noexcept { return oddness && monotonicity && range && saturation && slope_limit; }
};

/// Samples a symmetric log-spaced grid over [-span, span] and checks the
/// axioms. The slope-limit check is against `certificate` when given,
/// otherwise against a fresh certification; a function whose certification
/// fails has slope_limit = false.
AxiomReport verify_axioms(const Ussf& f, int sample_count, double span,
                          const UssfCertificate* certificate = nullptr);

/// Returns `f` if it passes verify_axioms(f, 10^4, 10^3), otherwise throws
/// ValidationError listing the failed axioms.
Ussf admit_custom_ussf(Ussf f);

}  // namespace boostctl
