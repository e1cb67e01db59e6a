#pragma once

// Hejhal's collocation method for even Maass cusp forms on SL2(Z), and
// extension of a solved form to many coefficients by sampling it along
// low horocycles through the fundamental-domain pullback.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "maass/maass_form.hpp"

namespace maass {

struct HejhalParams {
    double y1 = 0.85 * std::sqrt(3.0) / 2.0;
    double y2 = 0.80 * std::sqrt(3.0) / 2.0;
    int m0 = 0;                // unknowns; 0 chooses from K-Bessel decay at min(y1, y2)
    int extra_points = 16;     // Q = 2 m0 + extra_points samples on half a horocycle
    double decay_margin = 45;  // m0 = ceil((r + margin) / (2 pi y_min))
    int scan_points = 16;      // initial sign scan over the bracket
    double r_tol = 1e-12;
    int max_iter = 100;
    int trusted = 0;           // solved coefficients kept before extension; 0 = automatic
    double trust_tol = 1e-9;   // automatic choice: leading a(n) agreeing this well at both heights
    int extension_passes = 3;
    double certify_tol = 1e-6; // a(2), a(3), a(4) must agree this well at both heights
};

struct HejhalDiagnostics {
    double r_residual = 0.0;           // |a_{Y1}(2) - a_{Y2}(2)| at the returned r
    double coefficient_spread = 0.0;   // max_n |a_{Y1}(n) - a_{Y2}(n)| over trusted n
    double automorphy_residual = 0.0;  // max |phi(z) - phi(z*)| / max|phi| at a third height
    HeckeReport hecke;
    int m0 = 0;
    int trusted = 0;
    int iterations = 0;
};

namespace detail {

inline int default_m0(double r, const HejhalParams& p) {
    if (p.m0 > 0) return p.m0;
    return static_cast<int>(std::ceil((r + p.decay_margin) / (2.0 * pi * std::min(p.y1, p.y2))));
}

// the table truncates to zero past x_hi; the collocation matrix needs the tiny values
inline double scaled_g(const ScaledBesselTable& t, double x) { return x < t.x_hi() ? t.g(x) : t.direct_g(x); }

// f_k(z) * e^{pi r/2} = 4 sqrt(y) K(2 pi k y) cos(2 pi k x) e^{pi r/2}
inline double scaled_term(const ScaledBesselTable& t, int k, cplx z) {
    const double x = 2.0 * pi * k * z.imag();
    return 4.0 * scaled_g(t, x) / std::sqrt(2.0 * pi * k) * std::cos(2.0 * pi * k * z.real());
}

} // namespace detail

// Solve the collocation system at one height Y with a(1) = 1; returns a(1..M).
inline std::vector<double> hejhal_system(const ScaledBesselTable& table, double Y, int M, int Q) {
    if (Q <= M) throw DomainError("hejhal_system: need more sample points than unknowns");
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(M, M);
    std::vector<cplx> zs(static_cast<std::size_t>(Q));
    std::vector<double> xs(static_cast<std::size_t>(Q));
    for (int m = 1; m <= Q; ++m) {
        xs[static_cast<std::size_t>(m - 1)] = (m - 0.5) / (2.0 * Q);
        zs[static_cast<std::size_t>(m - 1)] = pullback(cplx(xs[static_cast<std::size_t>(m - 1)], Y)).z;
    }
    Eigen::MatrixXd F(Q, M); // f_k(z_m*)
    for (int m = 0; m < Q; ++m)
        for (int k = 1; k <= M; ++k) F(m, k - 1) = detail::scaled_term(table, k, zs[static_cast<std::size_t>(m)]);
    for (int n = 1; n <= M; ++n) {
        for (int m = 0; m < Q; ++m) {
            const double c = std::cos(2.0 * pi * n * xs[static_cast<std::size_t>(m)]);
            for (int k = 0; k < M; ++k) V(n - 1, k) += F(m, k) * c;
        }
        V.row(n - 1) *= 2.0 / Q;
        V(n - 1, n - 1) -= 4.0 * detail::scaled_g(table, 2.0 * pi * n * Y) / std::sqrt(2.0 * pi * n);
    }
    // unknowns b(k) = a(k) |V_kk| keep the columns of comparable size
    std::vector<double> scale(static_cast<std::size_t>(M));
    for (int k = 1; k <= M; ++k) {
        const double d = std::abs(V(k - 1, k - 1));
        if (d == 0.0) throw ConvergenceError("hejhal_system: K-Bessel underflow on the diagonal");
        scale[static_cast<std::size_t>(k - 1)] = d;
        V.col(k - 1) /= d;
    }
    // drop the n = 1 equation; a(1) = 1 moves column 1 to the right-hand side
    const Eigen::MatrixXd A = V.block(1, 1, M - 1, M - 1);
    const Eigen::VectorXd b = -V.block(1, 0, M - 1, 1) * scale[0];
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() < M - 1) throw ConvergenceError("hejhal_system: singular collocation matrix");
    const Eigen::VectorXd x = lu.solve(b);
    std::vector<double> a(static_cast<std::size_t>(M));
    a[0] = 1.0;
    for (int i = 1; i < M; ++i) a[static_cast<std::size_t>(i)] = x(i - 1) / scale[static_cast<std::size_t>(i)];
    return a;
}

// a(2) at Y1 minus a(2) at Y2; vanishes at an eigenvalue.
inline double hejhal_mismatch(double r, const HejhalParams& p) {
    const int M = detail::default_m0(r, p);
    const ScaledBesselTable table(r, 2.0 * pi * std::min(p.y1, p.y2) * 0.99);
    const auto a1 = hejhal_system(table, p.y1, M, 2 * M + p.extra_points);
    const auto a2 = hejhal_system(table, p.y2, M, 2 * M + p.extra_points);
    return a1[1] - a2[1];
}

// Replace a(n), n_known < n <= n_max, by sampling phi on horocycles at
// heights where 2 pi n Y stays inside a zero-free window of K_{ir} near the
// turning point, then projecting onto cos(2 pi n x). phi itself is
// evaluated in the fundamental domain from the current coefficients, so the
// ones beyond n_known only need to be roughly right.
inline void extend_coefficients(MaassForm& f, i64 n_known, i64 n_max) {
    if (n_known < 1 || n_known > f.max_n()) throw DomainError("extend_coefficients: bad known range");
    const MaassEvaluator ev(f);
    const double r = f.r;
    const double w = std::cbrt(r / 2.0);
    const double x_lo = std::max(r - 1.5 * w, 0.5 * r), x_hi = r + w;
    f.coeffs.resize(static_cast<std::size_t>(n_max), 0.0);
    const double scale = ev.table().scale();
    i64 n_lo = n_known + 1;
    while (n_lo <= n_max) {
        const double Y = x_lo / (2.0 * pi * n_lo);
        if (Y >= std::sqrt(3.0) / 2.0)
            throw DomainError("extend_coefficients: known range too short; sampling height inside the fundamental domain");
        const i64 n_hi = std::min<i64>(n_max, static_cast<i64>(std::floor(x_hi / (2.0 * pi * Y))));
        const i64 Q = static_cast<i64>(std::ceil(2.3 * n_hi)) + 16;
        std::vector<double> vals(static_cast<std::size_t>(Q));
        for (i64 m = 1; m <= Q; ++m) vals[static_cast<std::size_t>(m - 1)] = ev(cplx((m - 0.5) / (2.0 * Q), Y));
        // cos(2 pi n (2m - 1) / (4Q)) from a table indexed mod 4Q
        std::vector<double> ctab(static_cast<std::size_t>(4 * Q));
        for (i64 k = 0; k < 4 * Q; ++k) ctab[static_cast<std::size_t>(k)] = std::cos(2.0 * pi * static_cast<double>(k) / (4.0 * Q));
        for (i64 n = n_lo; n <= n_hi; ++n) {
            double s = 0.0;
            i64 idx = n % (4 * Q), step = (2 * n) % (4 * Q);
            for (i64 m = 1; m <= Q; ++m) {
                s += vals[static_cast<std::size_t>(m - 1)] * ctab[static_cast<std::size_t>(idx)];
                idx += step;
                if (idx >= 4 * Q) idx -= 4 * Q;
            }
            const double kn = 4.0 * ev.table().direct_g(2.0 * pi * n * Y) / std::sqrt(2.0 * pi * n) / scale;
            f.coeffs[static_cast<std::size_t>(n - 1)] = (2.0 / Q) * s / kn;
        }
        n_lo = n_hi + 1;
    }
}

// Max relative automorphy defect |phi(z) - phi(z*)| on a horocycle below the
// fundamental domain, both sides from the Fourier series.
inline double automorphy_residual(const MaassForm& f, double Y, int Q = 40) {
    const MaassEvaluator ev(f, Y * 0.99);
    double worst = 0.0, size = 0.0;
    for (int m = 1; m <= Q; ++m) {
        const cplx z((m - 0.5) / (2.0 * Q), Y);
        const double direct = ev.expansion(z).value;
        const double pulled = ev.value(z).value;
        worst = std::max(worst, std::abs(direct - pulled));
        size = std::max(size, std::abs(direct));
    }
    return worst / size;
}

struct HejhalResult {
    MaassForm form;
    HejhalDiagnostics diagnostics;
};

// Locate the even eigenvalue in [r_lo, r_hi] and return the form with
// n_coeffs Hecke-normalized coefficients.
inline HejhalResult hejhal_solve(double r_lo, double r_hi, i64 n_coeffs, const HejhalParams& p = {}) {
    if (!(r_lo > 0.0 && r_hi > r_lo)) throw DomainError("hejhal_solve: bad bracket");
    if (n_coeffs < 2) throw DomainError("hejhal_solve: need at least 2 coefficients");
    // scan for sign changes; poles of the mismatch also change sign, so keep
    // the bracket whose endpoint values are smallest
    std::vector<double> rs, hs;
    for (int i = 0; i <= p.scan_points; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / p.scan_points;
        rs.push_back(r);
        hs.push_back(hejhal_mismatch(r, p));
    }
    std::vector<int> candidates;
    for (int i = 0; i < p.scan_points; ++i)
        if (std::signbit(hs[static_cast<std::size_t>(i)]) != std::signbit(hs[static_cast<std::size_t>(i + 1)])) candidates.push_back(i);
    auto size = [&](int i) { return std::abs(hs[static_cast<std::size_t>(i)]) + std::abs(hs[static_cast<std::size_t>(i + 1)]); };
    std::sort(candidates.begin(), candidates.end(), [&](int i, int j) { return size(i) < size(j); });

    HejhalResult out;
    double r = 0.0;
    int M = 0;
    std::vector<double> a1, a2;
    bool found = false;
    for (int i : candidates) {
        std::uintmax_t iters = static_cast<std::uintmax_t>(p.max_iter);
        auto tol = [&](double a, double b) { return std::abs(a - b) <= p.r_tol; };
        const auto root = boost::math::tools::toms748_solve([&](double t) { return hejhal_mismatch(t, p); },
                                                            rs[static_cast<std::size_t>(i)], rs[static_cast<std::size_t>(i + 1)],
                                                            hs[static_cast<std::size_t>(i)], hs[static_cast<std::size_t>(i + 1)], tol, iters);
        r = 0.5 * (root.first + root.second);
        M = detail::default_m0(r, p);
        const ScaledBesselTable table(r, 2.0 * pi * std::min(p.y1, p.y2) * 0.99);
        a1 = hejhal_system(table, p.y1, M, 2 * M + p.extra_points);
        a2 = hejhal_system(table, p.y2, M, 2 * M + p.extra_points);
        out.diagnostics.iterations = static_cast<int>(iters);
        // a pole or a spurious zero of the a(2) mismatch leaves a(3), a(4) disagreeing
        double spread = 0.0;
        for (int n = 1; n < std::min(M, 4); ++n)
            spread = std::max(spread, std::abs(a1[static_cast<std::size_t>(n)] - a2[static_cast<std::size_t>(n)]));
        if (spread <= p.certify_tol) {
            found = true;
            break;
        }
    }
    if (!found) throw ConvergenceError("hejhal_solve: no eigenvalue found in the bracket");
    out.diagnostics.m0 = M;
    out.diagnostics.r_residual = std::abs(a1[1] - a2[1]);
    // leading coefficients on which the two heights agree
    int trusted = p.trusted > 0 ? std::min(p.trusted, M) : 2;
    if (p.trusted <= 0)
        while (trusted < M && std::abs(a1[static_cast<std::size_t>(trusted)] - a2[static_cast<std::size_t>(trusted)]) < p.trust_tol)
            ++trusted;
    out.diagnostics.trusted = trusted;
    for (int n = 0; n < trusted; ++n)
        out.diagnostics.coefficient_spread =
            std::max(out.diagnostics.coefficient_spread, std::abs(a1[static_cast<std::size_t>(n)] - a2[static_cast<std::size_t>(n)]));

    MaassForm& f = out.form;
    f.r = r;
    f.parity = Parity::even;
    f.coeffs = a1;
    if (n_coeffs > trusted)
        for (int pass = 0; pass < p.extension_passes; ++pass) extend_coefficients(f, trusted, std::max<i64>(n_coeffs, M));
    f.coeffs.resize(static_cast<std::size_t>(n_coeffs));
    out.diagnostics.automorphy_residual = automorphy_residual(f, 0.75 * std::sqrt(3.0) / 2.0);
    out.diagnostics.hecke = hecke_check(f, std::min<i64>(f.max_n(), 2000));
    return out;
}

} // namespace maass
