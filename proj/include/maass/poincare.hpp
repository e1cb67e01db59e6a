#pragma once

// The real-analytic Eisenstein series F_0(z, s) = sum Im(gz)^s and the
// Niebur-Poincare series
//
//   F_m(z, s) = sum_{g in G_inf \ G} f_m(gz, s),
//   f_m(z, s) = Gamma(s) / (2 pi |m|^{1/2} Gamma(2s)) M_{0, s-1/2}(4 pi |m| y) e(mx),
//
// evaluated either from their Fourier expansions or by summing over cosets,
// plus the Kloosterman-Bessel series Phi and Phi+.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "maass/arithmetic.hpp"
#include "maass/numerics.hpp"
#include "maass/quadforms.hpp"

namespace maass {

// ---------------------------------------------------------------------------
// Cosets of G_inf in SL2(Z), by bottom rows (c, d)
// ---------------------------------------------------------------------------
struct CosetEnumeration {
    i64 bound = 0;        // largest c
    double window = 0.0;  // rows keep |c x + d| <= window * c
    std::vector<std::pair<i64, i64>> pairs;
};

// (0, 1) and every coprime (c, d) with 1 <= c <= bound and |c x + d| <= window c.
// Each coset of G_inf \ G appears at most once since c > 0 fixes the sign.
inline CosetEnumeration coset_enumeration(i64 bound, double x = 0.0, double window = 200.0) {
    if (bound < 0 || !(window > 0.0)) throw DomainError("coset_enumeration: bad bound or window");
    CosetEnumeration e{bound, window, {{0, 1}}};
    for (i64 c = 1; c <= bound; ++c) {
        const double cx = static_cast<double>(c) * x, R = window * static_cast<double>(c);
        for (i64 d = static_cast<i64>(std::ceil(-cx - R)); d <= static_cast<i64>(std::floor(-cx + R)); ++d)
            if (gcd(c, d) == 1) e.pairs.emplace_back(c, d);
    }
    return e;
}

// The coset of g, normalized to c > 0 or (c, d) = (0, 1).
inline std::pair<i64, i64> coset_of(const Mat2& g) {
    if (g.c < 0 || (g.c == 0 && g.d < 0)) return {-g.c, -g.d};
    return {g.c, g.d};
}

// Ramanujan sum c_c(m) = sum_{a mod c, (a,c)=1} e(am/c); c_c(0) = phi(c).
inline i64 ramanujan_sum(i64 c, i64 m) {
    i64 s = 0;
    for (i64 g : divisors(gcd(c, std::llabs(m)))) {
        const i64 q = c / g;
        int mu = 1;
        for (auto [p, e] : factorize(q)) mu = e > 1 ? 0 : -mu;
        s += mu * g;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation modes
// ---------------------------------------------------------------------------
enum class SeriesKind { fourier, direct };

struct EvalMode {
    SeriesKind kind = SeriesKind::fourier;
    // direct: cosets with c <= bound, |cx + d| <= window c
    i64 bound = 80;
    double window = 200.0;
    // direct: add the analytic row tails (|cx + d| > window c) and the
    // constant-mode tail over c > bound
    bool analytic_tails = true;
    // fourier: truncation of the Phi(m, n; s) series
    SumSpec phi_spec{2000, 2.0, 1e-10};

    static EvalMode fourier() { return {}; }
    static EvalMode direct(i64 bound, double window = 200.0) {
        EvalMode m;
        m.kind = SeriesKind::direct;
        m.bound = bound;
        m.window = window;
        return m;
    }
};

// f_m(z, s); f_0 = y^s.
inline cplx f_m(i64 m, cplx z, double s) {
    const double y = z.imag();
    if (!(y > 0.0)) throw DomainError("f_m: z must lie in the upper half-plane");
    if (m == 0) return std::pow(y, s);
    const double am = static_cast<double>(std::llabs(m));
    const double A = std::exp(std::lgamma(s) - std::lgamma(2.0 * s)) / (2.0 * pi * std::sqrt(am));
    return A * whittaker_m(0, s - 0.5, 4.0 * pi * am * y) * e_frac(static_cast<double>(m) * z.real());
}

namespace detail {

// sum over cosets with c <= bound of term(gz), excluding `skip`, plus the
// analytic tails. As Im(gz) -> 0 the summand is lead * Im(gz)^s e(m Re gz);
// averaging over the units mod c and over the row turns that into
// lead * sqrt(pi) Gamma(s-1/2)/Gamma(s) y^{1-s} sum_c c_c(m) c^{-2s}, whose
// c > bound part is total - partial with total = sum_c c_c(m) c^{-2s}.
template <class Term>
cplx direct_coset_sum(cplx z, cplx s, i64 m, const EvalMode& mode, Term&& term, cplx lead, cplx total,
                      const std::vector<std::pair<i64, i64>>& skip) {
    if (!(s.real() > 1.0)) throw DomainError("direct coset sum diverges for re(s) <= 1");
    if (mode.bound < 1) throw DomainError("direct coset sum: bound must be >= 1");
    const double x = z.real(), y = z.imag();
    auto skipped = [&](i64 c, i64 d) { return std::find(skip.begin(), skip.end(), std::make_pair(c, d)) != skip.end(); };
    cplx sum{};
    std::size_t found = 0;
    if (skipped(0, 1)) ++found;
    else sum += term(z);
    const cplx ys = std::exp(s * std::log(y));
    cplx partial{}, rows{};
    for (i64 c = 1; c <= mode.bound; ++c) {
        const double cx = static_cast<double>(c) * x, R = mode.window * static_cast<double>(c);
        cplx row{};
        for (i64 d = static_cast<i64>(std::ceil(-cx - R)); d <= static_cast<i64>(std::floor(-cx + R)); ++d) {
            if (gcd(c, d) != 1) continue;
            if (skipped(c, d)) {
                ++found;
                continue;
            }
            const i64 a = c == 1 ? 0 : mod_inverse(mod(d, c), c);
            const cplx w = static_cast<double>(c) * z + static_cast<double>(d);
            // gz = a/c - 1/(c w); keep the integer part of a/c out of the phase
            const cplx gz = static_cast<double>(a) / static_cast<double>(c) - 1.0 / (static_cast<double>(c) * w);
            row += term(gz);
        }
        sum += row;
        const double rs = static_cast<double>(ramanujan_sum(c, m));
        const cplx c2s = std::exp(-2.0 * s * std::log(static_cast<double>(c)));
        partial += rs * c2s;
        // sum over |t| > R of (rs / c) lead y^s |t|^{-2s}
        rows += rs / static_cast<double>(c) * 2.0 * std::exp((1.0 - 2.0 * s) * std::log(R)) / (2.0 * s - 1.0);
    }
    if (found != skip.size()) throw DomainError("direct coset sum: an excluded coset lies outside the enumeration window");
    if (mode.analytic_tails) {
        sum += lead * ys * rows;
        const cplx g0 = std::sqrt(pi) * std::exp(log_gamma(s - 0.5) - log_gamma(s)) * std::exp((1.0 - s) * std::log(y));
        sum += lead * g0 * (total - partial);
    }
    return sum;
}

inline double lead_coefficient(i64 m, double s) {
    // f_m = lead Y^s e(mx) (1 + O(Y^2)) since M_{0,nu}(x) = x^{nu+1/2}(1 + O(x^2))
    const double am = static_cast<double>(std::llabs(m));
    return std::exp(std::lgamma(s) - std::lgamma(2.0 * s) + s * std::log(4.0 * pi * am)) / (2.0 * pi * std::sqrt(am));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Eisenstein series
// ---------------------------------------------------------------------------
// F_0 = y^s + Lambda(2s-1)/Lambda(2s) y^{1-s}
//       + 4 sqrt(y) sum_{n >= 1} n^{s-1/2} sigma_{1-2s}(n)/Lambda(2s) K_{s-1/2}(2 pi n y) cos(2 pi n x)
inline cplx eisenstein_eval(cplx z, cplx s, const EvalMode& mode = {}, const std::vector<std::pair<i64, i64>>& skip = {}) {
    const double y = z.imag();
    if (!(y > 0.0)) throw DomainError("eisenstein_eval: z must lie in the upper half-plane");
    if (mode.kind == SeriesKind::direct) {
        const cplx total = zeta(2.0 * s - 1.0) / zeta(2.0 * s);
        return detail::direct_coset_sum(
            z, s, 0, mode, [&](cplx w) { return std::exp(s * std::log(w.imag())); }, 1.0, total, skip);
    }
    if (!skip.empty()) throw DomainError("eisenstein_eval: excluded cosets need direct mode");
    if (s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0)) throw PoleError("eisenstein_eval: pole at s = 0 or 1");
    const cplx L2s = completed_zeta(2.0 * s);
    cplx out = std::exp(s * std::log(y)) + completed_zeta(2.0 * s - 1.0) / L2s * std::exp((1.0 - s) * std::log(y));
    const cplx nu = s - 0.5;
    const i64 N = static_cast<i64>(std::ceil((45.0 + std::abs(nu)) / (2.0 * pi * y)));
    cplx tail{};
    for (i64 n = 1; n <= N; ++n) {
        const double nn = static_cast<double>(n);
        tail += std::exp(nu * std::log(nn)) * divisor_sigma(1.0 - 2.0 * s, n) * bessel_k(nu, 2.0 * pi * nn * y) *
                std::cos(2.0 * pi * nn * z.real());
    }
    return out + 4.0 * std::sqrt(y) / L2s * tail;
}

// ---------------------------------------------------------------------------
// Kloosterman-Bessel series
// ---------------------------------------------------------------------------
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    bool converged = false;
    i64 terms = 0;
};

namespace detail {

// K(m, n; c) for a fixed c and several n, from one table of units and cosines.
class KloostermanRow {
public:
    void reset(i64 c) {
        c_ = c;
        units_.clear();
        for (i64 d = 0; d < c; ++d)
            if (gcd(d, c) == 1) units_.emplace_back(d, mod_inverse(d, c));
        cos_.resize(static_cast<std::size_t>(c));
        for (i64 k = 0; k < c; ++k) cos_[static_cast<std::size_t>(k)] = root_of_unity(k, c).real();
    }
    double operator()(i64 m, i64 n) const {
        const i64 mr = mod(m, c_), nr = mod(n, c_);
        double s = 0.0;
        for (auto [d, db] : units_) s += cos_[static_cast<std::size_t>((mr * db + nr * d) % c_)];
        return s;
    }

private:
    i64 c_ = 1;
    std::vector<std::pair<i64, i64>> units_;
    std::vector<double> cos_;
};

// Tail of sum_c K/c B_nu(4 pi sqrt|mn| / c) past C, using |K| <= tau sqrt(c)
// with tau the largest |K|/sqrt(c) seen on (C/2, C], and the small-argument
// bound (x/2)^nu / Gamma(nu + 1) (times exp(x^2/(4(nu+1))) for I).
inline double kloosterman_bessel_tail(double tau, double nu, double x1, i64 C, i64 step, bool i_bessel) {
    const double Cd = static_cast<double>(C);
    const double xC = x1 / Cd;
    double f = std::exp(nu * std::log(0.5 * x1) - std::lgamma(nu + 1.0));
    if (i_bessel) f *= std::exp(xC * xC / (4.0 * (nu + 1.0)));
    // sum_{c > C, step | c} c^{-1/2 - nu} <= C^{1/2 - nu} / ((nu - 1/2) step)
    return tau * f * std::pow(Cd, 0.5 - nu) / ((nu - 0.5) * static_cast<double>(step));
}

} // namespace detail

// Phi(m, n; s) = sum_{c > 0} K(m, n; c)/c * (J if mn > 0, I if mn < 0)_{2s-1}(4 pi sqrt|mn| / c),
// for several n at once.
inline std::vector<SeriesValue> phi_series_many(i64 m, const std::vector<i64>& ns, double s, const SumSpec& spec) {
    spec.validate();
    if (m == 0) throw DomainError("phi_series: m must be nonzero");
    if (!(s > 1.0)) throw DomainError("phi_series: needs s > 1");
    const double nu = 2.0 * s - 1.0;
    std::vector<SeriesValue> out(ns.size());
    std::vector<double> tau(ns.size(), 0.0);
    detail::KloostermanRow row;
    for (std::size_t j = 0; j < ns.size(); ++j)
        if (ns[j] == 0) throw DomainError("phi_series: n must be nonzero");
    for (i64 c = spec.max_modulus; c >= 1; --c) { // small terms first
        row.reset(c);
        for (std::size_t j = 0; j < ns.size(); ++j) {
            const i64 n = ns[j];
            const double K = row(m, n);
            const double x = 4.0 * pi * std::sqrt(std::abs(static_cast<double>(m) * static_cast<double>(n))) / static_cast<double>(c);
            const BesselKind kind = (m > 0) == (n > 0) ? BesselKind::J : BesselKind::I;
            out[j].value += K / static_cast<double>(c) * bessel_jl(kind, nu, x);
            if (2 * c > spec.max_modulus) tau[j] = std::max(tau[j], std::abs(K) / std::sqrt(static_cast<double>(c)));
        }
    }
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const double x1 = 4.0 * pi * std::sqrt(std::abs(static_cast<double>(m) * static_cast<double>(ns[j])));
        out[j].tail_bound = detail::kloosterman_bessel_tail(tau[j], nu, x1, spec.max_modulus, 1, (m > 0) != (ns[j] > 0));
        out[j].converged = out[j].tail_bound <= spec.target_rel_err * std::max(std::abs(out[j].value), 1e-300);
        out[j].terms = spec.max_modulus;
    }
    return out;
}

inline SeriesValue phi_series(i64 m, i64 n, double s, const SumSpec& spec = {}) { return phi_series_many(m, {n}, s, spec)[0]; }

// Phi+(p, q; s) = Gamma(s - sgn p/4) Gamma(s - sgn q/4) / (3 sqrt(pi) 2^{2-2s} Gamma(2s - 1/2))
//               * (pq)^{-1/2} sum_{4 | c} K+(p, q; c)/c J_{2s-1}(4 pi sqrt(pq) / c)
inline double phi_plus_prefactor(i64 p, i64 q, double s) {
    const double sp = p > 0 ? 1.0 : -1.0, sq = q > 0 ? 1.0 : -1.0;
    return std::exp(std::lgamma(s - 0.25 * sp) + std::lgamma(s - 0.25 * sq) - std::lgamma(2.0 * s - 0.5)) /
           (3.0 * std::sqrt(pi) * std::pow(2.0, 2.0 - 2.0 * s));
}

inline SeriesValue phi_plus_series(i64 p, i64 q, double s, const SumSpec& spec = {}) {
    spec.validate();
    auto plus_space = [](i64 v) { return mod(v, 4) == 0 || mod(v, 4) == 1; };
    if (!plus_space(p) || !plus_space(q)) throw DomainError("phi_plus_series: p, q must be 0 or 1 mod 4");
    if (p == 0 || q == 0 || (p > 0) != (q > 0)) throw DomainError("phi_plus_series: needs pq > 0");
    if (!(s > 1.0)) throw DomainError("phi_plus_series: needs s > 1");
    const double nu = 2.0 * s - 1.0;
    const double x1 = 4.0 * pi * std::sqrt(static_cast<double>(p) * static_cast<double>(q));
    SeriesValue out;
    double tau = 0.0, sum = 0.0;
    const i64 C = spec.max_modulus - spec.max_modulus % 4;
    if (C < 4) throw DomainError("phi_plus_series: max_modulus must be >= 4");
    for (i64 c = C; c >= 4; c -= 4) {
        const cplx K = kloosterman_plus(p, q, c);
        if (std::abs(K.imag()) > 1e-8 * static_cast<double>(c)) throw InvariantError("phi_plus_series: K+ is not real");
        sum += K.real() / static_cast<double>(c) * bessel_jl(BesselKind::J, nu, x1 / static_cast<double>(c));
        if (2 * c > C) tau = std::max(tau, std::abs(K.real()) / std::sqrt(static_cast<double>(c)));
    }
    const double pre = phi_plus_prefactor(p, q, s) / std::sqrt(static_cast<double>(p) * static_cast<double>(q));
    out.value = pre * sum;
    out.tail_bound = pre * detail::kloosterman_bessel_tail(tau, nu, x1, C, 4, false);
    out.converged = out.tail_bound <= spec.target_rel_err * std::max(std::abs(out.value), 1e-300);
    out.terms = C / 4;
    return out;
}

// ---------------------------------------------------------------------------
// Poincare series F_m, m >= 1, real s > 1
// ---------------------------------------------------------------------------
// Fourier expansion
//   F_m = f_m + 2 m^{1/2-s} sigma_{2s-1}(m) / ((2s-1) Lambda(2s)) y^{1-s}
//         + 2 sqrt(y) sum_{n != 0} Phi(m, n; s) K_{s-1/2}(2 pi |n| y) e(nx).
// The Phi values are cached per n.
class PoincareFourier {
public:
    PoincareFourier(i64 m, double s, SumSpec spec = EvalMode{}.phi_spec) : m_(m), s_(s), spec_(spec) {
        if (m < 1) throw DomainError("poincare_eval: m must be >= 1");
        if (!(s > 1.0)) throw DomainError("poincare_eval: needs s > 1");
        const double md = static_cast<double>(m);
        c_ = 2.0 * std::pow(md, 0.5 - s) * divisor_sigma(2.0 * s - 1.0, m).real() /
             ((2.0 * s - 1.0) * completed_zeta(2.0 * s).real());
    }

    double constant_coefficient() const { return c_; }

    double phi(i64 n) {
        ensure(std::llabs(n));
        return phi_.at(n);
    }

    // Phi(m, -n) grows like exp(4 pi sqrt(mn)), so the expansion cancels to
    // about exp(2 pi m / y); it is summed at the fundamental-domain pullback.
    cplx operator()(cplx z) {
        if (!(z.imag() > 0.0)) throw DomainError("poincare_eval: z must lie in the upper half-plane");
        z = pullback(z).z;
        const double y = z.imag();
        // past N, 2 pi n y - 4 pi sqrt(mn) exceeds L
        const double L = 45.0 + s_, md = static_cast<double>(m_);
        const double u = (4.0 * pi * std::sqrt(md) + std::sqrt(16.0 * pi * pi * md + 8.0 * pi * y * L)) / (4.0 * pi * y);
        const i64 N = static_cast<i64>(std::ceil(u * u));
        ensure(N);
        cplx sum{};
        for (i64 n = N; n >= 1; --n) {
            const double K = bessel_k(s_ - 0.5, 2.0 * pi * static_cast<double>(n) * y).real();
            const double nd = static_cast<double>(n);
            sum += K * (phi_.at(n) * e_frac(nd * z.real()) + phi_.at(-n) * e_frac(-nd * z.real()));
        }
        return f_m(m_, z, s_) + c_ * std::pow(y, 1.0 - s_) + 2.0 * std::sqrt(y) * sum;
    }

private:
    void ensure(i64 N) {
        std::vector<i64> need;
        for (i64 n = 1; n <= N; ++n) {
            if (!phi_.count(n)) need.push_back(n);
            if (!phi_.count(-n)) need.push_back(-n);
        }
        if (need.empty()) return;
        const auto v = phi_series_many(m_, need, s_, spec_);
        for (std::size_t j = 0; j < need.size(); ++j) phi_[need[j]] = v[j].value;
    }

    i64 m_;
    double s_;
    SumSpec spec_;
    double c_ = 0.0;
    std::map<i64, double> phi_;
};

inline cplx poincare_eval(i64 m, cplx z, double s, const EvalMode& mode = {}, const std::vector<std::pair<i64, i64>>& skip = {}) {
    if (m < 1) throw DomainError("poincare_eval: m must be >= 1");
    if (mode.kind == SeriesKind::direct) {
        const cplx total = divisor_sigma(1.0 - 2.0 * s, m) / zeta(2.0 * s);
        return detail::direct_coset_sum(
            z, s, m, mode, [&](cplx w) { return f_m(m, w, s); }, detail::lead_coefficient(m, s), total, skip);
    }
    if (!skip.empty()) throw DomainError("poincare_eval: excluded cosets need direct mode");
    PoincareFourier F(m, s, mode.phi_spec);
    return F(z);
}

// ---------------------------------------------------------------------------
// F_{m,Q}: F_m without the two cosets g_j with g_j a_j = infinity, a_j the
// endpoints of the geodesic of Q.
// ---------------------------------------------------------------------------
inline std::array<Mat2, 2> endpoint_cosets(const QuadraticForm& Q) {
    const auto cusps = endpoint_cusps(Q);
    const std::array<Mat2, 2> g{cusp_to_infinity(cusps[0]), cusp_to_infinity(cusps[1])};
    if (coset_of(g[0]) == coset_of(g[1])) throw DomainError("poincare_truncated: endpoints are not distinct cusps");
    return g;
}

inline cplx poincare_truncated(i64 m, const QuadraticForm& Q, cplx z, double s, const EvalMode& mode = {}) {
    if (m < 0) throw DomainError("poincare_truncated: m must be >= 0");
    const auto g = endpoint_cosets(Q);
    if (mode.kind == SeriesKind::direct) {
        const std::vector<std::pair<i64, i64>> skip{coset_of(g[0]), coset_of(g[1])};
        return m == 0 ? eisenstein_eval(z, s, mode, skip) : poincare_eval(m, z, s, mode, skip);
    }
    const cplx full = m == 0 ? eisenstein_eval(z, s, mode) : poincare_eval(m, z, s, mode);
    return full - f_m(m, g[0].apply(z), s) - f_m(m, g[1].apply(z), s);
}

} // namespace maass
