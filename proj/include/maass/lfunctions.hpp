#pragma once

// Dirichlet L-functions L(s, chi_d) and the twisted Maass L-functions
//
//   L(s, phi x chi_d) = sum_n a(n) chi_d(n) n^{-s},
//
// by direct summation for re(s) >= 1.2 and through a smoothed approximate
// functional equation elsewhere. The completed function is
//
//   Lambda(s) = |d|^s gamma(s) L(s),
//   gamma(s)  = pi^{-s} Gamma((s + kappa + ir)/2) Gamma((s + kappa - ir)/2),
//
// kappa = 0 for d > 0 and 1 for d < 0, with Lambda(s) = eps Lambda(1 - s).

#include <cmath>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "maass/arithmetic.hpp"
#include "maass/maass_form.hpp"
#include "maass/numerics.hpp"

namespace maass {

// L(s, chi_d) = |d|^{-s} sum_{a=1}^{|d|} chi_d(a) zeta(s, a/|d|)
inline cplx dirichlet_L(cplx s, const Discriminant& d) {
    if (!d.fundamental) throw DomainError("dirichlet_L: discriminant must be fundamental");
    if (d.value == 1) {
        if (s == cplx(1.0, 0.0)) throw PoleError("dirichlet_L: zeta has a pole at s = 1");
        return zeta(s);
    }
    const i64 q = d.abs();
    if (s == cplx(1.0, 0.0)) {
        // the 1/(s-1) parts of the Hurwitz zetas cancel; L(1) = -q^{-1} sum chi(a) psi(a/q)
        double acc = 0.0;
        for (i64 a = 1; a < q; ++a) acc -= d.chi(a) * boost::math::digamma(static_cast<double>(a) / static_cast<double>(q));
        return {acc / static_cast<double>(q), 0.0};
    }
    cplx sum{};
    for (i64 a = 1; a < q; ++a) {
        const int c = d.chi(a);
        if (c != 0) sum += static_cast<double>(c) * hurwitz_zeta(s, static_cast<double>(a) / static_cast<double>(q));
    }
    return std::exp(-s * std::log(static_cast<double>(q))) * sum;
}

inline cplx dirichlet_L(cplx s, i64 d) { return dirichlet_L(s, Discriminant::fundamental_only(d)); }

struct LValue {
    cplx value{};
    double tail_bound = 0.0; // bound (direct sums) or size of the last retained term
    i64 terms = 0;
};

// Direct sum. The tail is bounded by sum_{n > N} n^{0.2 - re s} using
// a(n) << n^{7/64 + eps}; SumSpec::max_modulus is the number of terms
// (0 = all available) and target_rel_err the admissible tail.
inline LValue twisted_L_direct(cplx s, const MaassForm& f, const Discriminant& d, SumSpec spec = {0, 0.0, 1e-5}) {
    if (!d.fundamental) throw DomainError("twisted_L_direct: discriminant must be fundamental");
    if (s.real() < 1.2) throw DomainError("twisted_L_direct: direct summation needs re(s) >= 1.2");
    const i64 N = spec.max_modulus > 0 ? spec.max_modulus : f.max_n();
    if (N > f.max_n()) throw InsufficientCoefficientsError("twisted_L_direct: more terms requested than coefficients available");
    LValue out;
    cplx sum{};
    for (i64 n = N; n >= 1; --n) { // small terms first
        const int c = d.chi(n);
        if (c == 0) continue;
        sum += f.coeffs[static_cast<std::size_t>(n - 1)] * static_cast<double>(c) * std::exp(-s * std::log(static_cast<double>(n)));
    }
    out.value = sum;
    out.terms = N;
    out.tail_bound = std::pow(static_cast<double>(N), 1.2 - s.real()) / (s.real() - 1.2);
    if (s.real() == 1.2 || out.tail_bound > spec.target_rel_err * std::max(std::abs(sum), 1e-300))
        throw InsufficientCoefficientsError("twisted_L_direct: tail bound " + std::to_string(out.tail_bound) +
                                            " exceeds the target; more coefficients needed");
    return out;
}

// Euler product over p <= p_max (for testing the direct sum).
inline cplx twisted_L_euler(cplx s, const MaassForm& f, const Discriminant& d, i64 p_max) {
    cplx prod{1.0, 0.0};
    for (i64 p = 2; p <= p_max; ++p) {
        if (!is_prime(p)) continue;
        const double c = d.chi(p);
        if (c == 0.0) continue;
        const cplx ps = std::exp(-s * std::log(static_cast<double>(p)));
        prod /= 1.0 - f.a(p) * c * ps + c * c * ps * ps;
    }
    return prod;
}

// ---------------------------------------------------------------------------
// Approximate functional equation
// ---------------------------------------------------------------------------
enum class AfeKernel {
    plain,    // G(w) = 1: incomplete-gamma type cutoff
    gaussian, // G(w) = exp(w^2 / A)
};

struct AfeSettings {
    double X = 1.0;          // balance between the two sums
    double epsilon = 1.0;    // root number
    AfeKernel kernel = AfeKernel::plain;
    double gaussian_A = 8.0;
    double contour = 1.0;    // smallest re(w) of the integration line
    double step = 0.125;     // trapezoid step in im(w)
    double cutoff = 1e-18;   // V below this ends a sum
};

inline int gamma_shift(const Discriminant& d) { return d.value > 0 ? 0 : 1; }

// log gamma(s) for the twisted L-function
inline cplx log_gamma_factor(cplx s, double r, int kappa) {
    return -s * std::log(pi) + log_gamma(0.5 * (s + static_cast<double>(kappa) + cplx(0.0, r))) +
           log_gamma(0.5 * (s + static_cast<double>(kappa) - cplx(0.0, r)));
}

// V_s(y) = (1/2 pi i) int_{(c)} gamma(s + w)/gamma(s) G(w) y^{-w} dw / w on
// trapezoid grids, with re(s + w) > 1 on the line so that it lies right of
// every pole of gamma(s + w) and the Dirichlet series converges. For large y the line is moved right, to the c that
// minimizes |gamma(s + c)/gamma(s)| y^{-c}, so the value keeps its relative
// accuracy as it decays.
class AfeCutoff {
public:
    AfeCutoff(cplx s, double r, int kappa, const AfeSettings& st) {
        double T = r + std::abs(s.imag()) + 36.0;
        if (st.kernel == AfeKernel::gaussian) T = std::min(T, std::sqrt(st.gaussian_A * 45.0) + 2.0);
        const cplx lg0 = log_gamma_factor(s, r, kappa);
        const int K = static_cast<int>(std::ceil(T / st.step));
        for (int j = 0; j < kLines; ++j) {
            const double c = std::max(st.contour, 1.5 - s.real()) + j;
            Line line;
            line.c = c;
            line.log_size = (log_gamma_factor(s + c, r, kappa) - lg0).real();
            if (st.kernel == AfeKernel::gaussian) line.log_size += c * c / st.gaussian_A;
            for (int k = -K; k <= K; ++k) {
                const cplx w(c, k * st.step);
                cplx lw = log_gamma_factor(s + w, r, kappa) - lg0;
                if (st.kernel == AfeKernel::gaussian) lw += w * w / st.gaussian_A;
                line.nodes.push_back(w);
                line.weights.push_back(std::exp(lw) / w * (st.step / (2.0 * pi)));
            }
            lines_.push_back(std::move(line));
        }
    }

    cplx operator()(double y) const {
        const double ly = std::log(y);
        std::size_t best = 0;
        for (std::size_t j = 1; j < lines_.size(); ++j)
            if (lines_[j].log_size - lines_[j].c * ly < lines_[best].log_size - lines_[best].c * ly) best = j;
        const Line& L = lines_[best];
        cplx sum{};
        for (std::size_t k = 0; k < L.nodes.size(); ++k) sum += L.weights[k] * std::exp(-L.nodes[k] * ly);
        return sum;
    }

private:
    static constexpr int kLines = 48;
    struct Line {
        double c = 1.0, log_size = 0.0;
        std::vector<cplx> nodes, weights;
    };
    std::vector<Line> lines_;
};

namespace detail {

// sum_n a(n) chi(n) n^{-s} V(n / Y), stopping once V is negligible beyond the transition
inline cplx afe_sum(cplx s, const MaassForm& f, const Discriminant& d, const AfeCutoff& V, double Y, double y_transition,
                    double cutoff, i64& used) {
    cplx sum{};
    for (i64 n = 1;; ++n) {
        const double y = static_cast<double>(n) / Y;
        const cplx v = V(y);
        if (y > y_transition && std::abs(v) < cutoff) {
            used = std::max(used, n);
            return sum;
        }
        if (n > f.max_n())
            throw InsufficientCoefficientsError("approximate functional equation needs more than " + std::to_string(f.max_n()) +
                                                " coefficients");
        const int c = d.chi(n);
        if (c != 0) sum += f.coeffs[static_cast<std::size_t>(n - 1)] * static_cast<double>(c) * std::exp(-s * std::log(static_cast<double>(n))) * v;
    }
}

} // namespace detail

// L(s, phi x chi_d) for any s from the approximate functional equation
//   L(s) = sum a chi n^{-s} V_s(n / (X q^{1/2}))
//        + eps q^{1/2 - s} gamma(1-s)/gamma(s) sum a chi n^{s-1} V_{1-s}(n X / q^{1/2}),
// q = d^2.
inline LValue twisted_L_afe(cplx s, const MaassForm& f, const Discriminant& d, const AfeSettings& st = {}) {
    if (!d.fundamental) throw DomainError("twisted_L_afe: discriminant must be fundamental");
    if (!(st.X > 0.0)) throw DomainError("twisted_L_afe: X must be positive");
    const int kappa = gamma_shift(d);
    const double sq = static_cast<double>(d.abs()); // q^{1/2}
    const double y_tr = (f.r + std::abs(s.imag()) + 2.0) / (2.0 * pi);
    LValue out;
    const AfeCutoff V1(s, f.r, kappa, st);
    const cplx first = detail::afe_sum(s, f, d, V1, st.X * sq, y_tr, st.cutoff, out.terms);
    const AfeCutoff V2(1.0 - s, f.r, kappa, st);
    const cplx second_sum = detail::afe_sum(1.0 - s, f, d, V2, sq / st.X, y_tr, st.cutoff, out.terms);
    const cplx factor = st.epsilon * std::exp((0.5 - s) * std::log(sq * sq) + log_gamma_factor(1.0 - s, f.r, kappa) -
                                              log_gamma_factor(s, f.r, kappa));
    out.value = first + factor * second_sum;
    out.tail_bound = st.cutoff;
    return out;
}

// L(1/2, phi x chi_d); the value must come out real.
inline double twisted_L_center(const MaassForm& f, const Discriminant& d, const AfeSettings& st = {}) {
    const LValue v = twisted_L_afe(cplx(0.5, 0.0), f, d, st);
    if (std::abs(v.value.imag()) > 1e-6 * std::max(1.0, std::abs(v.value.real())))
        throw InvariantError("twisted_L_center: non-real central value " + std::to_string(v.value.imag()));
    return v.value.real();
}

inline double twisted_L_center(const MaassForm& f, i64 d, const AfeSettings& st = {}) {
    return twisted_L_center(f, Discriminant::fundamental_only(d), st);
}

} // namespace maass
