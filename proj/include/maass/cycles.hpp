#pragma once

// Integrals along the geodesics of the forms [0, |d|, c], which run
// vertically from infinity down to -c/|d|:
//
//   d > 0:  sum_c (d/c) int_0^inf phi(-c/d + iy) y^{s-1} dy
//   d < 0:  sum_c (d/c) i int_C d_z phi y^s dz = sum_c (d/c) int_0^inf d_z phi(-c/|d| + iy) y^s dy
//
// and the matching L-value expressions, the m = 0 Eisenstein version, and
// the auxiliary function H_m.

#include <cmath>
#include <functional>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "maass/arithmetic.hpp"
#include "maass/lfunctions.hpp"
#include "maass/maass_form.hpp"
#include "maass/numerics.hpp"
#include "maass/poincare.hpp"
#include "maass/quadforms.hpp"

namespace maass {

enum class CycleIntegrand { maass, maass_dz, eisenstein_truncated, eisenstein_truncated_dz };

struct CycleIntegralJob {
    Discriminant d;
    cplx s;
    CycleIntegrand integrand = CycleIntegrand::maass;
    Precision quad{0.0, 1e-11, 30};
};

// How the part of each geodesic near its finite endpoint is evaluated.
enum class CycleMethod {
    pullback, // phi at the fundamental-domain pullback of every point
    split,    // split at y = 1/|d|; map the lower half by the matrix sending -c/|d| to infinity and sum Fourier series directly
};

struct CycleTerm {
    QuadraticForm Q;
    int chi = 0;
    cplx integral{}; // unweighted
};

struct CycleSum {
    cplx value{};
    double error_estimate = 0.0;
    std::vector<CycleTerm> terms;
};

// i int_C F(z) dz over the downward vertical geodesic from infinity to x0,
// parametrized as z = x0 + i e^{-tau}, tau from -inf to inf (so dz = -i e^{-tau} dtau),
// restricted to heights in [y_lo, y_hi].
inline Integral oriented_vertical_integral(const std::function<cplx(cplx)>& F, double x0, double y_lo, double y_hi,
                                           const Precision& prec = {0.0, 1e-11, 30}) {
    const Integral r = integrate(
        [&](double tau) {
            const cplx z(x0, std::exp(-tau));
            const cplx dz = cplx(0.0, -std::exp(-tau));
            return I_unit * F(z) * dz;
        },
        Interval{-std::log(y_hi), -std::log(y_lo)}, prec);
    return r;
}

namespace detail {

// Heights beyond which phi is negligible at a cusp: 2 pi y past r + 45.
inline double cusp_height(const MaassEvaluator& ev, cplx s) { return (ev.form().r + 45.0 + std::abs(s)) / (2.0 * pi); }

inline void check_cycle_discriminant(const Discriminant& d, bool positive) {
    if (!d.fundamental) throw DomainError("cycle integral: discriminant must be fundamental");
    if (positive && d.value < 0) throw DomainError("cycle_sum_maass: needs d > 0");
    if (!positive && d.value > 0) throw DomainError("cycle_sum_maass_dz: needs d < 0");
}

// int_{y_lo}^{y_hi} g(y) dy over log y
inline Integral log_height_integral(const std::function<cplx(double)>& g, double y_lo, double y_hi, const Precision& prec) {
    return integrate([&](double t) { const double y = std::exp(t); return g(y) * y; }, Interval{std::log(y_lo), std::log(y_hi)}, prec);
}

} // namespace detail

// sum_Q chi_d(Q) int_{C_Q} phi(z) y^{s-1} |dz|, d > 0
inline CycleSum cycle_sum_maass(const MaassEvaluator& ev, const Discriminant& d, cplx s, CycleMethod method = CycleMethod::pullback,
                                const Precision& prec = {0.0, 1e-11, 30}) {
    detail::check_cycle_discriminant(d, true);
    if (s.real() < 0.0) throw DomainError("cycle_sum_maass: needs re(s) >= 0");
    const double D = static_cast<double>(d.abs());
    const double y_hi = detail::cusp_height(ev, s), y_lo = 1.0 / (D * D * y_hi);
    CycleSum out;
    for (const QuadraticForm& Q : square_disc_representatives(d.value)) {
        CycleTerm t{Q, genus_character(d.value, Q), {}};
        if (t.chi != 0) {
            const GeodesicData geo = geodesic(Q);
            const double x0 = geo.end.x;
            auto weight = [&](double y) { return std::exp((s - 1.0) * std::log(y)); };
            if (method == CycleMethod::pullback) {
                const Integral r = detail::log_height_integral([&](double y) { return ev(cplx(x0, y)) * weight(y); }, y_lo, y_hi, prec);
                t.integral = r.value;
                out.error_estimate += r.error_estimate;
            } else {
                // g(-c/d + iy) = a/d + i/(d^2 y) for g with bottom row (d, c)
                const Mat2 g = cusp_to_infinity(endpoint_cusps(Q)[1]);
                const double xa = g.apply(cplx(x0, 1.0)).real();
                const double split = 1.0 / D;
                const Integral hi = detail::log_height_integral(
                    [&](double y) { return ev.expansion(cplx(x0, y)).value * weight(y); }, split, y_hi, prec);
                // lower half: d^{-2s} int_{1/d}^inf phi(a/d + i eta) eta^{-s-1} d eta
                const Integral lo = detail::log_height_integral(
                    [&](double eta) { return ev.expansion(cplx(xa, eta)).value * std::exp((-s - 1.0) * std::log(eta)); }, split, y_hi, prec);
                t.integral = hi.value + std::exp(-2.0 * s * std::log(D)) * lo.value;
                out.error_estimate += hi.error_estimate + lo.error_estimate;
            }
            out.value += static_cast<double>(t.chi) * t.integral;
        }
        out.terms.push_back(t);
    }
    return out;
}

// sum_Q chi_d(Q) i int_{C_Q} d_z phi(z) y^s dz, d < 0, geodesics oriented downward
inline CycleSum cycle_sum_maass_dz(const MaassEvaluator& ev, const Discriminant& d, cplx s, CycleMethod method = CycleMethod::pullback,
                                   const Precision& prec = {0.0, 1e-11, 30}) {
    detail::check_cycle_discriminant(d, false);
    if (s.real() < 0.0) throw DomainError("cycle_sum_maass_dz: needs re(s) >= 0");
    const double D = static_cast<double>(d.abs());
    const double y_hi = detail::cusp_height(ev, s), y_lo = 1.0 / (D * D * y_hi);
    CycleSum out;
    for (const QuadraticForm& Q : square_disc_representatives(d.value)) {
        CycleTerm t{Q, genus_character(d.value, Q), {}};
        if (t.chi != 0) {
            const GeodesicData geo = geodesic(Q);
            if (geo.orientation != Orientation::downward) throw InvariantError("cycle_sum_maass_dz: geodesic is not vertical");
            const double x0 = geo.end.x;
            if (method == CycleMethod::pullback) {
                const Integral r = oriented_vertical_integral(
                    [&](cplx z) { return ev.dz(z) * std::exp(s * std::log(z.imag())); }, x0, y_lo, y_hi, prec);
                t.integral = r.value;
                out.error_estimate += r.error_estimate;
            } else {
                const Mat2 g = cusp_to_infinity(endpoint_cusps(Q)[1]);
                const double xa = g.apply(cplx(x0, 1.0)).real();
                const double split = 1.0 / D;
                const Integral hi = detail::log_height_integral(
                    [&](double y) { return ev.dz_expansion(cplx(x0, y)) * std::exp(s * std::log(y)); }, split, y_hi, prec);
                // d_z phi(z) = (d_z phi)(gz) (|d| z + c)^{-2} = -(d_z phi)(a/|d| + i eta) / (d^2 y^2), eta = 1/(d^2 y)
                const Integral lo = detail::log_height_integral(
                    [&](double eta) { return ev.dz_expansion(cplx(xa, eta)) * std::exp(-s * std::log(eta)); }, split, y_hi, prec);
                t.integral = hi.value - std::exp(-2.0 * s * std::log(D)) * lo.value;
                out.error_estimate += hi.error_estimate + lo.error_estimate;
            }
            out.value += static_cast<double>(t.chi) * t.integral;
        }
        out.terms.push_back(t);
    }
    return out;
}

// pi^{-s-1/2} |d|^{1/2} Gamma(s/2 + ir/2 + delta) Gamma(s/2 - ir/2 + delta) L(s + 1/2, phi x chi_d),
// delta = 1/4 for d > 0 and 3/4 for d < 0
inline cplx cycle_gamma_factor(double r, const Discriminant& d, cplx s) {
    const double delta = d.value > 0 ? 0.25 : 0.75;
    return std::exp((-s - 0.5) * std::log(pi) + 0.5 * std::log(static_cast<double>(d.abs())) +
                    log_gamma(0.5 * s + cplx(delta, 0.5 * r)) + log_gamma(0.5 * s + cplx(delta, -0.5 * r)));
}

inline cplx rhs_formula(const MaassForm& f, const Discriminant& d, cplx s, const AfeSettings& afe = {}) {
    if (!d.fundamental) throw DomainError("rhs_formula: discriminant must be fundamental");
    const cplx w = s + 0.5;
    const cplx L = w.real() >= 1.7 ? twisted_L_direct(w, f, d, SumSpec{0, 0.0, 1e-4}).value : twisted_L_afe(w, f, d, afe).value;
    return cycle_gamma_factor(f.r, d, s) * L;
}

// ---------------------------------------------------------------------------
// m = 0 Eisenstein check
// ---------------------------------------------------------------------------
struct IdentityPair {
    cplx lhs{}, rhs{};
    double error_estimate = 0.0;
};

// lhs = sum_Q chi_d(Q) int_{C_Q} F_{0,Q}(z, s) y^{-1} |dz|, rhs = Gamma(s/2)^2 d^s L(s, chi_d)^2 / (Gamma(s) zeta(2s)).
// Each geodesic is split at y = 1/d; the lower half is moved to the cusp at
// infinity by g (F_{0,Q}(z) = F_{0,gQ}(gz)). Beyond Y the truncated series is
// Lambda(2s-1)/Lambda(2s) y^{1-s} - (d^2 y)^{-s} up to exp(-2 pi Y), integrated in closed form.
inline IdentityPair eisenstein_cycle_check(const Discriminant& d, double s, const Precision& prec = {0.0, 1e-11, 30}) {
    if (!d.fundamental || d.value < 0) throw DomainError("eisenstein_cycle_check: needs fundamental d > 0");
    if (!(s > 1.0)) throw DomainError("eisenstein_cycle_check: needs s > 1");
    const double D = static_cast<double>(d.value);
    const double split = 1.0 / D, Y = 8.0 + s;
    const double ratio = (completed_zeta(2.0 * s - 1.0) / completed_zeta(2.0 * s)).real();
    const double tail = ratio * std::pow(Y, 1.0 - s) / (s - 1.0) - std::pow(D, -2.0 * s) * std::pow(Y, -s) / s;
    IdentityPair out;
    for (const QuadraticForm& Q : square_disc_representatives(d.value)) {
        const int chi = genus_character(d.value, Q);
        if (chi == 0) continue;
        const double x0 = geodesic(Q).end.x;
        const Mat2 g = cusp_to_infinity(endpoint_cusps(Q)[1]);
        const QuadraticForm gQ = act(g, Q);
        const double xa = g.apply(cplx(x0, 1.0)).real();
        const Integral hi = detail::log_height_integral(
            [&](double y) { return poincare_truncated(0, Q, cplx(x0, y), s) / y; }, split, Y, prec);
        const Integral lo = detail::log_height_integral(
            [&](double eta) { return poincare_truncated(0, gQ, cplx(xa, eta), s) / eta; }, split, Y, prec);
        out.lhs += static_cast<double>(chi) * (hi.value + lo.value + 2.0 * tail);
        out.error_estimate += hi.error_estimate + lo.error_estimate;
    }
    const double L = dirichlet_L(s, d).real();
    out.rhs = std::exp(2.0 * std::lgamma(0.5 * s) - std::lgamma(s)) * std::pow(D, s) * L * L / zeta(2.0 * s).real();
    return out;
}

// ---------------------------------------------------------------------------
// H_m(t) = i t int_0^pi e(-m t cos th) phi_{2,m}(t sin th, s) e^{-i th} d th,
//   phi_{2,0}(y) = s y^{s-1},
//   phi_{2,m}(y) = s m^{-1/2} (2 pi y)^{-1} Gamma(s)/Gamma(2s) M_{1,s-1/2}(4 pi m y).
// ---------------------------------------------------------------------------
enum class HmMode { quadrature, closed };

inline cplx phi_2m(i64 m, double y, double s) {
    if (m == 0) return s * std::pow(y, s - 1.0);
    const double md = static_cast<double>(m);
    return s / std::sqrt(md) / (2.0 * pi * y) * std::exp(std::lgamma(s) - std::lgamma(2.0 * s)) *
           whittaker_m(1, s - 0.5, 4.0 * pi * md * y);
}

inline cplx h_m(i64 m, double t, double s, HmMode mode) {
    if (m < 0) throw DomainError("h_m: m must be >= 0");
    if (!(t > 0.0)) throw DomainError("h_m: t must be positive");
    if (!(s > 0.0)) throw DomainError("h_m: s must be positive");
    const double md = static_cast<double>(m);
    if (mode == HmMode::closed) {
        const double c = 2.0 * std::sqrt(pi) * std::exp(std::lgamma(0.5 * (s + 1.0)) - std::lgamma(0.5 * s));
        if (m == 0) return c * std::pow(t, s);
        return c * std::sqrt(t) * bessel_jl(BesselKind::J, s - 0.5, 2.0 * pi * md * t);
    }
    // M_{1,s-1/2}(x) grows like e^{x/2}, so the integrand cancels to about exp(2 pi m t)
    auto f = [&](double th) { return e_frac(-md * t * std::cos(th)) * phi_2m(m, t * std::sin(th), s) * std::exp(cplx(0.0, -th)); };
    boost::math::quadrature::tanh_sinh<double> ts;
    double err_re = 0.0, err_im = 0.0;
    const double re = ts.integrate([&](double th) { return f(th).real(); }, 0.0, pi, 1e-13, &err_re);
    const double im = ts.integrate([&](double th) { return f(th).imag(); }, 0.0, pi, 1e-13, &err_im);
    const cplx v(re, im);
    if (!(err_re + err_im <= 1e-9 * std::max(1.0, std::abs(v)))) throw ConvergenceError("h_m: quadrature did not converge");
    return I_unit * t * v;
}

} // namespace maass
