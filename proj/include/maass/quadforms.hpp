#pragma once

// Integral binary quadratic forms [a, b, c] = a x^2 + b xy + c y^2, the
// action of SL2(Z), representatives of forms of discriminant d^2, genus
// characters and the geometry of the attached geodesics.

#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "maass/arithmetic.hpp"

namespace maass {

struct QuadraticForm {
    i64 a = 0, b = 0, c = 0;

    i64 disc() const { return b * b - 4 * a * c; }
    i64 value(i64 x, i64 y) const { return a * x * x + b * x * y + c * y * y; }
    QuadraticForm operator-() const { return {-a, -b, -c}; }
    auto operator<=>(const QuadraticForm&) const = default;
};

// Integer matrix [[a, b], [c, d]].
struct Mat2 {
    i64 a = 1, b = 0, c = 0, d = 1;

    i64 det() const { return a * d - b * c; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse() const { return {d, -b, -c, a}; } // det 1 only
    cplx apply(cplx z) const { return (double(a) * z + double(b)) / (double(c) * z + double(d)); }
    auto operator<=>(const Mat2&) const = default;

    static Mat2 S() { return {0, -1, 1, 0}; }
    static Mat2 T(i64 n = 1) { return {1, n, 0, 1}; }
};

// g.Q = Q o g^{-1}; the roots of g.Q are the images under g of the roots of Q.
inline QuadraticForm act(const Mat2& g, const QuadraticForm& Q) {
    if (g.det() != 1) throw DomainError("act: matrix is not unimodular");
    const Mat2 h = g.inverse();
    const i64 p = h.a, q = h.b, r = h.c, s = h.d;
    return {Q.a * p * p + Q.b * p * r + Q.c * r * r,
            2 * Q.a * p * q + Q.b * (p * s + q * r) + 2 * Q.c * r * s,
            Q.a * q * q + Q.b * q * s + Q.c * s * s};
}

enum class RepFlavor { left, right };

// left: [c, |d|, 0]; right: [0, |d|, c]; 0 <= c < |d|
inline std::vector<QuadraticForm> square_disc_representatives(i64 d, RepFlavor flavor = RepFlavor::right) {
    if (!is_fundamental(d)) throw DomainError("square_disc_representatives: d must be fundamental");
    const i64 ad = std::llabs(d);
    std::vector<QuadraticForm> out;
    out.reserve(static_cast<std::size_t>(ad));
    for (i64 c = 0; c < ad; ++c)
        out.push_back(flavor == RepFlavor::left ? QuadraticForm{c, ad, 0} : QuadraticForm{0, ad, c});
    return out;
}

// chi_d(Q) for disc(Q) = d d', read off a represented value coprime to d.
inline int genus_character(i64 d, const QuadraticForm& Q) {
    const i64 D = Q.disc();
    if (d == 0 || D % d != 0) throw DomainError("genus_character: d does not divide disc(Q)");
    const i64 dp = D / d;
    if (mod(dp, 4) > 1) throw DomainError("genus_character: disc(Q)/d is not a discriminant");
    if (gcd(gcd(gcd(Q.a, Q.b), Q.c), d) > 1) return 0;
    const i64 bound = 2 * d * d;
    for (i64 radius = 1;; radius = std::min(2 * radius, bound)) {
        i64 best = 0;
        for (i64 x = -radius; x <= radius; ++x)
            for (i64 y = -radius; y <= radius; ++y) {
                const i64 n = Q.value(x, y);
                if (n != 0 && gcd(n, d) == 1 && (best == 0 || std::llabs(n) < std::llabs(best))) best = n;
            }
        if (best != 0) return kronecker(d, best);
        if (radius == bound) break;
    }
    throw ConvergenceError("genus_character: no represented value coprime to d in the search box");
}

struct ProjectivePoint {
    double x = 0.0;
    bool infinite = false;
};

enum class Orientation { clockwise, counterclockwise, downward };

struct GeodesicData {
    ProjectivePoint start, end; // in the direction of travel
    Orientation orientation = Orientation::downward;
    std::optional<cplx> apex;
};

inline GeodesicData geodesic(const QuadraticForm& Q) {
    const i64 D = Q.disc();
    if (D <= 0) throw DomainError("geodesic: discriminant must be positive");
    const double sq = std::sqrt(static_cast<double>(D));
    GeodesicData g;
    if (Q.a == 0) {
        g.orientation = Orientation::downward;
        g.start = {0.0, true};
        g.end = {-static_cast<double>(Q.c) / static_cast<double>(Q.b), false};
        return g;
    }
    const double r1 = (-static_cast<double>(Q.b) - sq) / (2.0 * Q.a);
    const double r2 = (-static_cast<double>(Q.b) + sq) / (2.0 * Q.a);
    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
    if (Q.a > 0) {
        g.orientation = Orientation::clockwise;
        g.start = {lo, false};
        g.end = {hi, false};
    } else {
        g.orientation = Orientation::counterclockwise;
        g.start = {hi, false};
        g.end = {lo, false};
    }
    g.apex = cplx(-static_cast<double>(Q.b) / (2.0 * Q.a), sq / (2.0 * std::llabs(Q.a)));
    return g;
}

// Rational cusp p/q (q may be 0 for infinity), in lowest terms.
struct Cusp {
    i64 p = 1, q = 0;
};

// The two endpoints of the geodesic of a form with square discriminant.
inline std::array<Cusp, 2> endpoint_cusps(const QuadraticForm& Q) {
    const i64 D = Q.disc();
    const i64 f = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(D))));
    if (D <= 0 || f * f != D) throw DomainError("endpoint_cusps: discriminant is not a positive square");
    auto reduce = [](i64 p, i64 q) {
        const i64 g = gcd(p, q);
        p /= g;
        q /= g;
        if (q < 0 || (q == 0 && p < 0)) {
            p = -p;
            q = -q;
        }
        return Cusp{p, q};
    };
    if (Q.a == 0) return {Cusp{1, 0}, reduce(-Q.c, Q.b)};
    return {reduce(-Q.b - f, 2 * Q.a), reduce(-Q.b + f, 2 * Q.a)};
}

// A matrix in SL2(Z) sending the cusp p/q to infinity.
inline Mat2 cusp_to_infinity(const Cusp& k) {
    if (k.q == 0) return {};
    // gamma = [[x, y], [-q, p]] with x p + y q = 1
    i64 old_r = k.p, r = k.q, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const i64 qq = old_r / r;
        old_r -= qq * r;
        std::swap(old_r, r);
        old_s -= qq * s;
        std::swap(old_s, s);
        old_t -= qq * t;
        std::swap(old_t, t);
    }
    if (old_r < 0) {
        old_s = -old_s;
        old_t = -old_t;
    }
    return {old_s, old_t, -k.q, k.p};
}

// For disc(Q) = f^2 > 0: the unique [0, f, c] with 0 <= c < f equivalent to
// Q, and g with g.Q equal to it. One endpoint is sent to infinity, then c is
// reduced by translation.
inline std::pair<QuadraticForm, Mat2> reduce_square_form(const QuadraticForm& Q) {
    const i64 f = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(Q.disc()))));
    for (const Cusp& k : endpoint_cusps(Q)) {
        const Mat2 g = cusp_to_infinity(k);
        const QuadraticForm R = act(g, Q);
        if (R.a != 0) throw InvariantError("reduce_square_form: endpoint not sent to infinity");
        if (R.b != f) continue;
        // T^n maps [0, f, c] to [0, f, c - f n]
        const i64 n = (R.c - mod(R.c, f)) / f;
        const Mat2 h = Mat2::T(n) * g;
        return {act(h, Q), h};
    }
    throw InvariantError("reduce_square_form: no endpoint gives middle coefficient +f");
}

// Breadth-first search over words in S, T, T^{-1} for g with g.from = to,
// visiting only forms with coefficients bounded by coeff_bound.
inline std::optional<Mat2> find_gamma_equivalence(const QuadraticForm& from, const QuadraticForm& to, i64 coeff_bound,
                                                  int max_word_length) {
    if (from.disc() != to.disc()) return std::nullopt;
    std::deque<std::pair<QuadraticForm, std::pair<Mat2, int>>> queue;
    std::set<QuadraticForm> seen;
    queue.push_back({from, {Mat2{}, 0}});
    seen.insert(from);
    const std::array<Mat2, 3> gens = {Mat2::S(), Mat2::T(1), Mat2::T(-1)};
    while (!queue.empty()) {
        auto [Q, gm] = queue.front();
        queue.pop_front();
        if (Q == to) return gm.first;
        if (gm.second >= max_word_length) continue;
        for (const Mat2& h : gens) {
            const QuadraticForm R = act(h, Q);
            if (std::llabs(R.a) > coeff_bound || std::llabs(R.b) > coeff_bound || std::llabs(R.c) > coeff_bound) continue;
            if (seen.insert(R).second) queue.push_back({R, {h * gm.first, gm.second + 1}});
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Fundamental domain
// ---------------------------------------------------------------------------
struct Pullback {
    cplx z;      // point in the standard fundamental domain
    Mat2 gamma;  // z = gamma(input)
};

inline Pullback pullback(cplx z) {
    if (!(z.imag() > 0.0)) throw DomainError("pullback: point must lie in the upper half plane");
    const cplx z0 = z;
    Mat2 g{};
    for (int it = 0; it < 100000; ++it) {
        const double n = std::round(z.real());
        if (n != 0.0) {
            z -= n;
            g = Mat2::T(-static_cast<i64>(n)) * g;
        }
        if (std::norm(z) < 1.0 - 1e-13) {
            z = -1.0 / z;
            g = Mat2::S() * g;
        } else {
            // recompute from the integer matrix to avoid accumulated rounding
            const long double x = z0.real(), y = z0.imag();
            const long double cx = g.c * x + g.d;
            const long double den = cx * cx + static_cast<long double>(g.c) * g.c * y * y;
            const long double xr = ((g.a * x + g.b) * cx + static_cast<long double>(g.a) * g.c * y * y) / den;
            return {cplx(static_cast<double>(xr), static_cast<double>(y / den)), g};
        }
    }
    throw ConvergenceError("pullback: too many reduction steps");
}

} // namespace maass
