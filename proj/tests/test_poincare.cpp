#include <gtest/gtest.h>

#include <set>

#include "maass/poincare.hpp"

using namespace maass;

namespace {

const std::vector<cplx> kGrid = {{0.0, 1.0}, {0.3, 1.1}, {-0.4, 0.9}, {0.1, 2.0}, {0.45, 0.6}};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST(Cosets, Enumeration) {
    const CosetEnumeration e = coset_enumeration(30, 0.3, 5.0);
    std::set<std::pair<i64, i64>> seen;
    for (auto [c, d] : e.pairs) {
        EXPECT_EQ(gcd(c, d), 1);
        EXPECT_GE(c, 0);
        EXPECT_TRUE(seen.insert({c, d}).second) << c << " " << d;
    }
    EXPECT_TRUE(seen.count({0, 1}));
    EXPECT_FALSE(seen.count({0, -1}));
    EXPECT_EQ(coset_of(Mat2{1, 0, -2, 1}), std::make_pair(i64{2}, i64{-1}));
}

TEST(Cosets, RamanujanSum) {
    for (i64 c = 1; c <= 40; ++c)
        for (i64 m = 0; m <= 12; ++m) {
            double brute = 0.0;
            for (i64 a = 0; a < c; ++a)
                if (gcd(a, c) == 1) brute += root_of_unity(a * m, c).real();
            EXPECT_NEAR(static_cast<double>(ramanujan_sum(c, m)), brute, 1e-9) << c << " " << m;
        }
}

TEST(Eisenstein, CrossModeAtI) {
    const cplx z(0.0, 1.0);
    EXPECT_LT(rel(eisenstein_eval(z, 3.0), eisenstein_eval(z, 3.0, EvalMode::direct(80))), 1e-6);
}

TEST(Eisenstein, CrossModeGrid) {
    for (double s : {1.5, 2.0, 3.0})
        for (cplx z : kGrid) EXPECT_LT(rel(eisenstein_eval(z, s), eisenstein_eval(z, s, EvalMode::direct(80))), 1e-5) << s << " " << z;
}

TEST(Eisenstein, FunctionalEquation) {
    const cplx z(0.0, 2.0);
    const cplx a = completed_zeta(1.4) * eisenstein_eval(z, 0.7);
    const cplx b = completed_zeta(0.6) * eisenstein_eval(z, 0.3);
    EXPECT_LT(std::abs(a - b), 1e-8 * std::abs(a));
    // and off the real line
    const cplx s(0.5, 4.0);
    const cplx w(0.2, 1.3);
    EXPECT_LT(std::abs(completed_zeta(2.0 * s) * eisenstein_eval(w, s) - completed_zeta(2.0 - 2.0 * s) * eisenstein_eval(w, 1.0 - s)), 1e-8);
}

TEST(Eisenstein, Automorphy) {
    for (cplx z : {cplx(0.1, 1.2), cplx(-0.3, 0.8), cplx(0.45, 0.95), cplx(0.0, 1.7), cplx(0.25, 0.7)})
        for (double s : {0.3, 2.0}) {
            EXPECT_LT(rel(eisenstein_eval(z, s), eisenstein_eval(-1.0 / z, s)), 1e-9) << z << " " << s;
            EXPECT_LT(rel(eisenstein_eval(z, s), eisenstein_eval(z + 1.0, s)), 1e-12);
        }
}

TEST(Eisenstein, Errors) {
    EXPECT_THROW(eisenstein_eval(cplx(0.0, 1.0), 1.0), PoleError);
    EXPECT_THROW(eisenstein_eval(cplx(0.0, 1.0), 0.0), PoleError);
    EXPECT_THROW(eisenstein_eval(cplx(0.0, 1.0), 0.9, EvalMode::direct(10)), DomainError);
    EXPECT_THROW(eisenstein_eval(cplx(0.0, -1.0), 2.0), DomainError);
}

TEST(Phi, Symmetry) {
    const SumSpec spec{300, 2.0, 1e-6};
    for (auto [m, n] : {std::pair<i64, i64>{1, 2}, {2, 3}, {1, -3}, {-2, 5}}) {
        EXPECT_DOUBLE_EQ(phi_series(m, n, 1.7, spec).value, phi_series(n, m, 1.7, spec).value) << m << " " << n;
    }
    EXPECT_THROW(phi_series(0, 1, 1.5), DomainError);
    EXPECT_THROW(phi_series(1, 1, 1.0), DomainError);
}

TEST(Phi, TruncationStability) {
    const SeriesValue a = phi_series(1, 1, 1.5, SumSpec{1000, 2.0, 1e-8});
    const SeriesValue b = phi_series(1, 1, 1.5, SumSpec{10000, 2.0, 1e-8});
    EXPECT_LE(std::abs(a.value - b.value), a.tail_bound);
    EXPECT_LT(b.tail_bound, a.tail_bound);
    EXPECT_FALSE(a.converged); // 1e-8 is not reachable at c <= 1000
}

TEST(Phi, IBesselBranch) {
    const SeriesValue v = phi_series(1, -1, 1.5, SumSpec{1000, 2.0, 1e-6});
    EXPECT_TRUE(std::isfinite(v.value));
    EXPECT_TRUE(v.converged);
    // c = 1 term is I_2(4 pi); J would be much smaller
    EXPECT_GT(v.value, 0.5 * bessel_jl(BesselKind::I, 2.0, 4.0 * pi));
}

TEST(Poincare, CrossModeExample) {
    const cplx z(0.3, 1.1);
    EXPECT_LT(rel(poincare_eval(1, z, 1.5), poincare_eval(1, z, 1.5, EvalMode::direct(80))), 1e-5);
}

TEST(Poincare, CrossModeGrid) {
    for (double s : {1.5, 2.0, 3.0}) {
        PoincareFourier F(1, s);
        for (cplx z : kGrid) EXPECT_LT(rel(F(z), poincare_eval(1, z, s, EvalMode::direct(80))), 1e-5) << s << " " << z;
    }
    PoincareFourier F2(2, 2.0);
    for (cplx z : {kGrid[0], kGrid[2]}) EXPECT_LT(rel(F2(z), poincare_eval(2, z, 2.0, EvalMode::direct(80))), 1e-5) << z;
}

TEST(Poincare, LeadingTermDominates) {
    const cplx z(0.2, 50.0);
    const cplx F = poincare_eval(1, z, 1.5);
    EXPECT_LT(std::abs(F - f_m(1, z, 1.5)), 1e-8 * std::abs(F));
}

TEST(Poincare, Periodicity) {
    PoincareFourier F(1, 2.0);
    const cplx z(0.15, 0.9);
    EXPECT_LT(rel(F(z), F(z + 1.0)), 1e-12);
    EXPECT_LT(rel(poincare_eval(1, z, 2.0, EvalMode::direct(40)), poincare_eval(1, z + 1.0, 2.0, EvalMode::direct(40))), 1e-9);
}

// The constant Fourier mode of F_m - f_m is c y^{1-s}. Average the direct coset
// sum (without analytic tails) over x and fit c by least squares.
TEST(Poincare, ConstantTermFit) {
    const double s = 2.0;
    EvalMode mode = EvalMode::direct(120, 100.0);
    mode.analytic_tails = false;
    const int J = 8;
    double num = 0.0, den = 0.0;
    for (double y : {0.9, 1.2, 1.6}) {
        cplx avg{};
        for (int j = 0; j < J; ++j) {
            const cplx z(static_cast<double>(j) / J, y);
            avg += poincare_eval(1, z, s, mode) - f_m(1, z, s);
        }
        avg /= static_cast<double>(J);
        const double b = std::pow(y, 1.0 - s);
        num += avg.real() * b;
        den += b * b;
    }
    const double expected = 2.0 * divisor_sigma(2.0 * s - 1.0, 1).real() / ((2.0 * s - 1.0) * completed_zeta(2.0 * s).real());
    EXPECT_NEAR(num / den, expected, 1e-4 * expected);
    EXPECT_NEAR(PoincareFourier(1, s).constant_coefficient(), expected, 1e-14 * expected);
}

TEST(Truncated, DecayAtInfinity) {
    const QuadraticForm Q{0, 1, 0};
    auto g = [&](double y) { return std::abs(poincare_truncated(0, Q, cplx(0.0, y), 2.0)) / y; };
    const double g10 = g(10.0), g100 = g(100.0);
    EXPECT_LT(g100, 0.02 * g10);
    // the untruncated series grows like y^{s-1}
    EXPECT_GT(std::abs(eisenstein_eval(cplx(0.0, 100.0), 2.0)) / 100.0, 50.0);
}

TEST(Truncated, EisensteinReduction) {
    const QuadraticForm Q{0, 5, 2}; // endpoints infinity and -2/5
    const cplx z(0.1, 0.8);
    const cplx expect = eisenstein_eval(z, 2.0) - std::pow(z.imag(), 2.0) -
                        std::pow(z.imag() / std::norm(5.0 * z + 2.0), 2.0);
    EXPECT_LT(rel(poincare_truncated(0, Q, z, 2.0), expect), 1e-13);
    EXPECT_LT(rel(poincare_truncated(0, Q, z, 2.0, EvalMode::direct(60)), expect), 1e-6);
}

// With (sigma Q)(x, y) = Q((x, y) sigma), the endpoints of sigma Q are sigma^{-1} of
// those of Q, which in terms of act() is act(sigma^{-1}, Q).
TEST(Truncated, Equivariance) {
    const std::vector<Mat2> sigmas = {Mat2::T(), Mat2::S(), Mat2{2, 1, 1, 1}};
    const std::vector<QuadraticForm> forms = {{0, 1, 0}, {0, 5, 2}, {1, 3, 0}};
    const cplx z(0.2, 0.9);
    for (const Mat2& sg : sigmas)
        for (const QuadraticForm& Q : forms)
            for (i64 m : {0, 1}) {
                const cplx lhs = poincare_truncated(m, act(sg.inverse(), Q), z, 2.0);
                const cplx rhs = poincare_truncated(m, Q, sg.apply(z), 2.0);
                EXPECT_LT(std::abs(lhs - rhs), 1e-8 * std::max(1.0, std::abs(lhs))) << m;
            }
    // the same identity through the coset-sum path
    const QuadraticForm Q{0, 5, 2};
    const cplx a = poincare_truncated(1, act(Mat2::T().inverse(), Q), z, 2.0, EvalMode::direct(40));
    const cplx b = poincare_truncated(1, Q, Mat2::T().apply(z), 2.0, EvalMode::direct(40));
    EXPECT_LT(std::abs(a - b), 1e-9 * std::abs(a));
}

TEST(Truncated, Errors) {
    EXPECT_THROW(poincare_truncated(0, QuadraticForm{1, 1, 1}, cplx(0.0, 1.0), 2.0), DomainError);
    // an excluded coset beyond the direct-sum window
    EXPECT_THROW(poincare_truncated(0, QuadraticForm{0, 97, 3}, cplx(0.0, 1.0), 2.0, EvalMode::direct(20)), DomainError);
}

TEST(PhiPlus, DoublingStability) {
    const SeriesValue a = phi_plus_series(5, 5, 1.6, SumSpec{2000, 2.0, 1e-8});
    const SeriesValue b = phi_plus_series(5, 5, 1.6, SumSpec{4000, 2.0, 1e-8});
    EXPECT_LE(std::abs(a.value - b.value), a.tail_bound);
}

TEST(PhiPlus, Symmetry) {
    for (i64 c = 4; c <= 64; c += 4)
        for (auto [p, q] : {std::pair<i64, i64>{5, 8}, {1, 12}, {-3, -4}, {13, 1}})
            EXPECT_LT(std::abs(kloosterman_plus(p, q, c) - kloosterman_plus(q, p, c)), 1e-10) << p << " " << q << " " << c;
    const SumSpec spec{400, 2.0, 1e-6};
    EXPECT_DOUBLE_EQ(phi_plus_series(5, 8, 1.6, spec).value, phi_plus_series(8, 5, 1.6, spec).value);
    EXPECT_DOUBLE_EQ(phi_plus_series(-3, -4, 1.6, spec).value, phi_plus_series(-4, -3, 1.6, spec).value);
}

TEST(PhiPlus, SignFlipPrefactor) {
    const double s = 1.6;
    EXPECT_NEAR(phi_plus_prefactor(-3, -4, s),
                std::tgamma(s + 0.25) * std::tgamma(s + 0.25) / (3.0 * std::sqrt(pi) * std::pow(2.0, 2.0 - 2.0 * s) * std::tgamma(2.0 * s - 0.5)),
                1e-14);
    EXPECT_NEAR(phi_plus_prefactor(5, 8, s),
                std::tgamma(s - 0.25) * std::tgamma(s - 0.25) / (3.0 * std::sqrt(pi) * std::pow(2.0, 2.0 - 2.0 * s) * std::tgamma(2.0 * s - 0.5)),
                1e-14);
    EXPECT_THROW(phi_plus_series(5, -3, s), DomainError);
    EXPECT_THROW(phi_plus_series(2, 5, s), DomainError);
}
