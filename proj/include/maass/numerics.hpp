#pragma once

// Special functions and quadrature used by every other module: complex
// Gamma, Hurwitz/Riemann zeta and the completed zeta function, K-Bessel of
// complex order, J/I-Bessel of real order, Whittaker M, and adaptive
// quadrature on finite intervals and half-lines.
//
// All functions are pure and reentrant.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "maass/errors.hpp"

namespace maass {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I_unit{0.0, 1.0};

// Tolerances for quadrature and series. Errors are judged against
// max(target_abs_err, target_rel_err * scale) where scale is the L1 norm of
// the integrand (or the sum of absolute terms for a series).
struct Precision {
    double target_abs_err = 0.0;
    double target_rel_err = 1e-12;
    int max_subdivisions = 30;

    void validate() const {
        if (!(target_abs_err >= 0.0) || !(target_rel_err > 0.0) ||
            !(target_abs_err > 0.0 || target_rel_err > 0.0))
            throw DomainError("Precision: target errors must be positive");
        if (max_subdivisions < 1) throw DomainError("Precision: max_subdivisions must be >= 1");
    }
};

// A value with bookkeeping about how it was produced.
struct Evaluation {
    cplx value{};
    double error_estimate = 0.0;
    bool underflow = false; // magnitude below kUnderflow, value flushed to 0
};

inline constexpr double kUnderflow = 1e-300;

inline cplx e_frac(double t) { // e(t) = exp(2 pi i t)
    const double a = 2.0 * pi * t;
    return {std::cos(a), std::sin(a)};
}

namespace detail {

// B_{2k} / (2k)! for k = 1..12
inline constexpr std::array<double, 12> kBernoulliOverFactorial = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
    854513.0 / 138.0 / 1124000727777607680000.0,
    -236364091.0 / 2730.0 / 620448401733239439360000.0,
};

// B_{2k} / (2k (2k-1)) for the Stirling series, k = 1..10
inline constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
};

inline bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// log sin(pi z), stable for large |Im z|; any branch.
inline cplx log_sin_pi(cplx z) {
    if (std::abs(z.imag()) < 15.0) return std::log(std::sin(pi * z));
    // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i)
    if (z.imag() > 0) {
        // dominant e^{-i pi z}
        return -I_unit * pi * z + std::log(1.0 - std::exp(2.0 * I_unit * pi * z)) -
               std::log(cplx(0.0, -2.0));
    }
    return I_unit * pi * z + std::log(1.0 - std::exp(-2.0 * I_unit * pi * z)) -
           std::log(cplx(0.0, 2.0));
}

} // namespace detail

// log Gamma(z) on some branch (exp of it is always Gamma(z)).
inline cplx log_gamma(cplx z) {
    if (detail::is_nonpositive_integer(z)) throw PoleError("Gamma has a pole at a non-positive integer");
    if (z.real() < 0.5) {
        return std::log(pi) - detail::log_sin_pi(z) - log_gamma(1.0 - z);
    }
    cplx shift{0.0, 0.0};
    cplx w = z;
    while (std::abs(w) < 15.0) {
        shift += std::log(w);
        w += 1.0;
    }
    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    cplx series{0.0, 0.0};
    cplx p = inv;
    for (double c : detail::kStirling) {
        series += c * p;
        p *= inv2;
    }
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * pi) + series - shift;
}

inline cplx gamma_complex(cplx z) {
    if (detail::is_nonpositive_integer(z)) throw PoleError("Gamma has a pole at a non-positive integer");
    if (z.imag() == 0.0 && z.real() > 0.0 && z.real() < 170.0) return {std::tgamma(z.real()), 0.0};
    return std::exp(log_gamma(z));
}

// Hurwitz zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin summation.
inline cplx hurwitz_zeta(cplx s, double a) {
    if (!(a > 0.0)) throw DomainError("hurwitz_zeta: a must be positive");
    if (s == cplx(1.0, 0.0)) throw PoleError("hurwitz_zeta: pole at s = 1");
    const int n_direct = 20 + static_cast<int>(std::ceil(std::abs(s)));
    cplx sum{0.0, 0.0};
    for (int n = 0; n < n_direct; ++n) sum += std::exp(-s * std::log(n + a));
    const double big = n_direct + a;
    const double lb = std::log(big);
    const cplx big_pow = std::exp(-s * lb); // big^{-s}
    sum += big_pow * big / (s - 1.0) + 0.5 * big_pow;
    // + sum_k B_{2k}/(2k)! (s)_{2k-1} big^{-s-2k+1}
    cplx rising = s;           // (s)_1
    cplx power = big_pow / big; // big^{-s-1}
    for (std::size_t k = 0; k < detail::kBernoulliOverFactorial.size(); ++k) {
        const cplx term = detail::kBernoulliOverFactorial[k] * rising * power;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        const double m = 2.0 * static_cast<double>(k) + 1.0; // next factors (s+2k-1)(s+2k)
        rising *= (s + m) * (s + m + 1.0);
        power /= big * big;
    }
    return sum;
}

inline cplx zeta(cplx s) {
    if (s.real() >= 0.5) return hurwitz_zeta(s, 1.0);
    // reflection; the direct Euler-Maclaurin sum cancels badly for re(s) < 0
    const cplx half = 0.5 * s;
    if (detail::is_nonpositive_integer(half)) return {0.0, 0.0};
    return std::exp(s * std::log(2.0) + (s - 1.0) * std::log(pi) + detail::log_sin_pi(half) + log_gamma(1.0 - s)) *
           hurwitz_zeta(1.0 - s, 1.0);
}

// Lambda(s) = pi^{-s/2} Gamma(s/2) zeta(s).
inline cplx completed_zeta(cplx s) {
    if (s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0)) throw PoleError("completed_zeta: pole at s = 0 or 1");
    // Gamma(s/2) has poles where zeta has trivial zeros; use the reflection there.
    const cplx half = 0.5 * s;
    const bool near_trivial_zero =
        s.real() < 0.0 && std::abs(half - std::round(half.real())) < 1e-6;
    if (near_trivial_zero) return completed_zeta(1.0 - s);
    return std::exp(-half * std::log(pi) + log_gamma(half)) * zeta(s);
}

// ---------------------------------------------------------------------------
// K-Bessel of complex order.
//
// K_nu(x) = (1/2) int_R exp(-x cosh t + nu t) dt. For nu = a + i b the
// contour is moved to Im t = alpha, where the phase of the integrand is
// stationary near the saddle; on that line the integrand has no large
// oscillating cancellation, so the trapezoidal rule (which converges
// doubly exponentially for this integrand) delivers full relative accuracy.
// alpha = 0 is the plain real-axis cosh representation.
// ---------------------------------------------------------------------------
namespace detail {

inline double bessel_k_contour_angle(double b, double x) {
    if (b <= 0.0) return 0.0;
    const double delta = std::min(0.5, 7.0 / b); // accepted loss e^{b delta} <= e^7
    const double saddle = std::asin(std::min(b / x, 1.0));
    return std::min(saddle, pi / 2 - delta);
}

struct KContour {
    double a, b, x, alpha, ca, sa;

    double log_magnitude(double t) const { return -x * ca * std::cosh(t) + a * t - b * alpha; }

    cplx integrand(double t) const {
        const double ch = std::cosh(t), sh = std::sinh(t);
        const double re = -x * ca * ch + a * t - b * alpha;
        const double im = -x * sa * sh + b * t + a * alpha;
        return 0.5 * std::exp(re) * cplx(std::cos(im), std::sin(im));
    }
};

// Trapezoid sum of the K integrand along Im t = alpha.
inline Evaluation bessel_k_trapezoid(double a, double b, double x, double alpha, double rel_tol) {
    KContour k{a, b, x, alpha, std::cos(alpha), std::sin(alpha)};
    const double peak_t = std::asinh(a / (x * k.ca));
    const double peak = k.log_magnitude(peak_t);
    constexpr double drop = 42.0;
    auto find_edge = [&](double dir) {
        double step = 1.0;
        double t = peak_t + dir * step;
        while (k.log_magnitude(t) > peak - drop) {
            step *= 2.0;
            t = peak_t + dir * step;
        }
        double lo = peak_t, hi = t;
        for (int i = 0; i < 30; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (k.log_magnitude(mid) > peak - drop) lo = mid;
            else hi = mid;
        }
        return hi;
    };
    const double t_hi = find_edge(+1.0);
    const double t_lo = find_edge(-1.0);

    const double freq = std::max({b, std::abs(b - x * k.sa * std::cosh(t_hi)),
                                  std::abs(b - x * k.sa * std::cosh(t_lo)), 1.0});
    double h = std::min(0.5, 2.0 * pi / (2.5 * freq));
    // grid anchored at peak_t: t_j = peak_t + j h
    auto sweep = [&](double step, double offset, double& l1) {
        cplx sum{0.0, 0.0};
        const long j_lo = static_cast<long>(std::floor((t_lo - peak_t - offset) / step));
        const long j_hi = static_cast<long>(std::ceil((t_hi - peak_t - offset) / step));
        for (long j = j_lo; j <= j_hi; ++j) {
            const cplx f = k.integrand(peak_t + offset + static_cast<double>(j) * step);
            sum += f;
            l1 += std::abs(f);
        }
        return sum;
    };
    double l1 = 0.0;
    cplx s = sweep(h, 0.0, l1) * h;
    l1 *= h;
    for (int level = 0; level < 12; ++level) {
        double l1_mid = 0.0;
        const cplx mid = sweep(h, 0.5 * h, l1_mid);
        const cplx refined = 0.5 * s + 0.5 * h * mid;
        l1 = 0.5 * l1 + 0.5 * h * l1_mid;
        const double change = std::abs(refined - s);
        s = refined;
        h *= 0.5;
        if (change <= rel_tol * l1 && level >= 1) return {s, change, false};
    }
    throw ConvergenceError("bessel_k: trapezoid refinement did not converge");
}

} // namespace detail

// K_nu(x) for complex nu and x > 0. Values below kUnderflow are flushed to 0
// with the underflow flag set. For purely imaginary nu the result is real
// and the imaginary residue is checked.
inline Evaluation bessel_k_eval(cplx nu, double x, const Precision& prec = {}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_k: x must be positive and finite");
    if (nu.real() < 0.0) nu = -nu; // K_{-nu} = K_nu
    const bool conj = nu.imag() < 0.0;
    const double a = nu.real();
    const double b = std::abs(nu.imag());
    // K_nu(x) <= K_{Re nu}(x) <= ~ sqrt(pi/2x) e^{-x} (1 + a^2/x) for the orders used here
    if (x - a * std::log(2.0 * (a + 1.0) / x + 1.0) > 700.0) return {{0.0, 0.0}, 0.0, true};

    const double tol = std::max(prec.target_rel_err * 1e-2, 4e-16);
    const double alpha = detail::bessel_k_contour_angle(b, x);
    Evaluation out = detail::bessel_k_trapezoid(a, b, x, alpha, tol);
    // Shift factor e^{i nu alpha} is already folded in (b alpha, a alpha terms).
    if (conj) out.value = std::conj(out.value);
    if (a == 0.0) {
        const double scale = std::abs(out.value) + out.error_estimate;
        if (std::abs(out.value.imag()) > 10.0 * std::max(prec.target_abs_err, 1e-12 * scale) &&
            std::abs(out.value.imag()) > 1e-8 * scale)
            throw ConvergenceError("bessel_k: imaginary residue for imaginary order");
        out.value = {out.value.real(), 0.0};
    }
    if (std::abs(out.value) < kUnderflow) {
        out.value = {0.0, 0.0};
        out.underflow = true;
    }
    return out;
}

inline cplx bessel_k(cplx nu, double x, const Precision& prec = {}) { return bessel_k_eval(nu, x, prec).value; }

// Real-valued K_{ir}(x).
inline double bessel_k_imag_order(double r, double x) { return bessel_k_eval(cplx(0.0, r), x).value.real(); }

// Same integral along an explicitly chosen contour angle. Exposed so tests
// can compare two independent paths.
inline Evaluation bessel_k_on_contour(cplx nu, double x, double alpha, double rel_tol = 1e-15) {
    if (!(x > 0.0)) throw DomainError("bessel_k: x must be positive");
    if (nu.real() < 0.0) nu = -nu;
    const bool conj = nu.imag() < 0.0;
    Evaluation e = detail::bessel_k_trapezoid(nu.real(), std::abs(nu.imag()), x, alpha, rel_tol);
    if (conj) e.value = std::conj(e.value);
    return e;
}

// ---------------------------------------------------------------------------
// J and I Bessel of real order >= 0.
// ---------------------------------------------------------------------------
enum class BesselKind { J, I };

namespace detail {

inline double bessel_ascending_series(BesselKind kind, double nu, double x) {
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double q = 0.25 * x * x;
    const double sign = kind == BesselKind::J ? -1.0 : 1.0;
    // term_0 = (x/2)^nu / Gamma(nu+1)
    double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
    double sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= sign * q / (static_cast<double>(k) * (nu + k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > q / (nu + k)) return sum;
    }
    throw ConvergenceError("bessel_jl: ascending series did not converge");
}

// J_nu(x) = (1/pi) int_0^pi cos(x sin th - nu th) dth - sin(nu pi)/pi int_0^inf e^{-x sinh t - nu t} dt
inline double bessel_j_integral(double nu, double x) {
    using boost::math::quadrature::gauss;
    const int panels = static_cast<int>(std::ceil(x / 3.0)) + 4;
    const double w = pi / panels;
    double first = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * w;
        first += gauss<double, 30>::integrate(
            [&](double th) { return std::cos(x * std::sin(th) - nu * th); }, a, a + w);
    }
    double second = 0.0;
    const double snp = std::sin(nu * pi);
    if (snp != 0.0) {
        boost::math::quadrature::exp_sinh<double> es;
        second = es.integrate([&](double t) { return std::exp(-x * std::sinh(t) - nu * t); }, 0.0,
                              std::numeric_limits<double>::infinity(), 1e-15);
    }
    return first / pi - snp / pi * second;
}

} // namespace detail

// J_nu(x) or I_nu(x), nu >= 0, x >= 0.
inline double bessel_jl(BesselKind kind, double nu, double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_jl: x must be >= 0");
    if (!(nu >= 0.0)) throw DomainError("bessel_jl: order must be >= 0");
    if (kind == BesselKind::I) {
        if (x > 700.0) throw DomainError("bessel_jl: I-Bessel overflows for x > 700");
        return detail::bessel_ascending_series(kind, nu, x);
    }
    if (x <= 12.0 + 0.5 * nu) return detail::bessel_ascending_series(kind, nu, x);
    return detail::bessel_j_integral(nu, x);
}

// Whittaker M_{k,nu}(x) = e^{-x/2} x^{nu+1/2} 1F1(nu - k + 1/2; 1 + 2 nu; x), k in {0, 1}.
inline cplx whittaker_m(int k, cplx nu, double x) {
    if (k != 0 && k != 1) throw DomainError("whittaker_m: first index must be 0 or 1");
    if (!(x > 0.0)) throw DomainError("whittaker_m: x must be positive");
    const cplx b = 1.0 + 2.0 * nu;
    if (detail::is_nonpositive_integer(b)) throw DomainError("whittaker_m: 1 + 2 nu is a non-positive integer");
    const cplx a = nu - static_cast<double>(k) + 0.5;
    cplx term{1.0, 0.0};
    cplx sum{1.0, 0.0};
    double log_scale = 0.0;
    const int max_terms = 200 + static_cast<int>(4.0 * x);
    int n = 0;
    for (; n < max_terms; ++n) {
        term *= (a + static_cast<double>(n)) / ((b + static_cast<double>(n)) * (n + 1.0)) * x;
        sum += term;
        if (std::abs(sum) > 1e200) {
            sum *= 1e-200;
            term *= 1e-200;
            log_scale += 200.0 * std::log(10.0);
        }
        if (n > x && std::abs(term) < 1e-17 * std::abs(sum)) break;
        if (term == cplx(0.0, 0.0)) break;
    }
    if (n == max_terms) throw ConvergenceError("whittaker_m: Kummer series did not converge");
    return sum * std::exp(log_scale - 0.5 * x + (nu + 0.5) * std::log(x));
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------
struct Interval {
    double a, b;
};

// [a, inf); the integrand must decay at least like an integrable power.
struct HalfLine {
    double a;
};

struct Integral {
    cplx value{};
    double error_estimate = 0.0;
    double l1_norm = 0.0;
};

namespace detail {
inline void check_integral(const Integral& r, const Precision& prec, const char* what) {
    const double target = std::max(prec.target_abs_err, prec.target_rel_err * r.l1_norm);
    if (!(r.error_estimate <= target) || !std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
        throw ConvergenceError(std::string(what) + ": error estimate " + std::to_string(r.error_estimate) +
                               " above target " + std::to_string(target));
}
} // namespace detail

// Globally adaptive Gauss-Kronrod (7-15) on a finite interval: the panel
// with the largest error estimate is bisected until the summed estimate
// meets the target. At most 50 * max_subdivisions panels, none narrower
// than (b - a) 2^{-max_subdivisions}.
template <class F>
Integral integrate(F&& f, Interval dom, const Precision& prec = {}) {
    prec.validate();
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto g = [&](double t) { return cplx(f(t)); };
    struct Panel {
        double a, b;
        cplx value;
        double err, l1;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    auto panel = [&](double a, double b) {
        Panel p{a, b, {}, 0.0, 0.0};
        p.value = GK::integrate(g, a, b, 0, 0.0, &p.err, &p.l1);
        return p;
    };
    std::priority_queue<Panel> heap;
    heap.push(panel(dom.a, dom.b));
    Integral r;
    const double min_width = std::abs(dom.b - dom.a) * std::ldexp(1.0, -prec.max_subdivisions);
    const std::size_t max_panels = 50 * static_cast<std::size_t>(prec.max_subdivisions);
    std::vector<Panel> done;
    auto totals = [&]() {
        cplx v{};
        double e = 0.0, l1 = 0.0;
        auto h = heap;
        while (!h.empty()) {
            v += h.top().value;
            e += h.top().err;
            l1 += h.top().l1;
            h.pop();
        }
        for (const Panel& p : done) {
            v += p.value;
            e += p.err;
            l1 += p.l1;
        }
        r.value = v;
        r.error_estimate = e;
        r.l1_norm = l1;
    };
    double err = heap.top().err, l1 = heap.top().l1;
    while (!heap.empty() && heap.size() + done.size() < max_panels &&
           err > std::max(prec.target_abs_err, prec.target_rel_err * l1)) {
        const Panel p = heap.top();
        heap.pop();
        if (std::abs(p.b - p.a) <= 2.0 * min_width) {
            done.push_back(p); // cannot split further; its error stays in the total
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        const Panel lo = panel(p.a, m), hi = panel(m, p.b);
        err += lo.err + hi.err - p.err;
        l1 += lo.l1 + hi.l1 - p.l1;
        heap.push(lo);
        heap.push(hi);
    }
    totals();
    detail::check_integral(r, prec, "integrate");
    return r;
}

// Double-exponential (exp-sinh) rule on [a, inf).
template <class F>
Integral integrate(F&& f, HalfLine dom, const Precision& prec = {}) {
    prec.validate();
    auto g = [&](double t) { return cplx(f(t)); };
    boost::math::quadrature::exp_sinh<double> es(static_cast<std::size_t>(std::max(prec.max_subdivisions / 3, 9)));
    Integral r;
    r.value = es.integrate(g, dom.a, std::numeric_limits<double>::infinity(), prec.target_rel_err * 0.1,
                           &r.error_estimate, &r.l1_norm);
    detail::check_integral(r, prec, "integrate");
    return r;
}

} // namespace maass
