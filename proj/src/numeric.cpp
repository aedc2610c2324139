#include "boostctl/numeric.hpp"

#include "boostctl/errors.hpp"


namespace boostctl {

ScalarMaximum golden_section_maximize(const std::function<double(double)>& fn, double lo, double hi,
                                      double bracket_width) {
    if (!(hi > lo)) throw DomainError("golden_section_maximize: empty bracket");
    constexpr double inv_phi = 0.6180339887498949;

    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = fn(c);
    double fd = fn(d);
    // 200 iterations shrink any double-precision bracket below one ulp.
    for (int iter = 0; iter < 200 && (hi - lo) > bracket_width; ++iter) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = fn(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = fn(d);
        }
    }
    return fc > fd ? ScalarMaximum{c, fc} : ScalarMaximum{d, fd};
}

std::vector<double> log_space(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_space: bad range");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
    }
    out.back() = hi;
    return out;
}

}  // namespace boostctl
