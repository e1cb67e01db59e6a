#include <gtest/gtest.h>

#include <random>

#include "maass/arithmetic.hpp"

using namespace maass;

namespace {

// Brute-force inverse by search.
i64 slow_inverse(i64 a, i64 c) {
    for (i64 x = 0; x < c; ++x)
        if (mod(a * x, c) == 1 % c) return x;
    return -1;
}

cplx ephase(i64 k, i64 c) { return std::polar(1.0, 2.0 * pi * double(mod(k, c)) / double(c)); }

// Legendre symbol via Euler's criterion.
int euler_criterion(i64 a, i64 p) {
    a = mod(a, p);
    if (a == 0) return 0;
    i64 r = 1, b = a, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

// Kronecker symbol from its definition: completely multiplicative in n, with
// Legendre symbols at odd primes, the mod-8 rule at 2 and the sign rule at -1.
int kronecker_oracle(i64 d, i64 n) {
    if (n == 0) return std::llabs(d) == 1;
    int t = 1;
    if (n < 0) {
        n = -n;
        if (d < 0) t = -t;
    }
    for (i64 p = 2; n > 1; ++p) {
        while (n % p == 0) {
            n /= p;
            if (p == 2) {
                if (d % 2 == 0) return 0;
                const i64 r = mod(d, 8);
                t *= (r == 1 || r == 7) ? 1 : -1;
            } else {
                t *= euler_criterion(d, p);
            }
        }
    }
    return t;
}

bool fundamental_oracle(i64 d) {
    if (mod(d, 4) > 1 || d == 0) return false;
    for (i64 f = 2; f * f <= std::llabs(d); ++f)
        if (d % (f * f) == 0 && mod(d / (f * f), 4) <= 1) return false;
    return true;
}

cplx kplus_oracle(i64 p, i64 q, i64 c) {
    cplx s = 0;
    for (i64 d = 1; d < c; d += 2) {
        if (std::gcd(d, c) != 1) continue;
        const cplx eps = d % 4 == 1 ? cplx(1, 0) : cplx(0, 1);
        s += double(kronecker_oracle(c, d)) * eps * ephase(p * slow_inverse(d, c) + q * d, c);
    }
    return cplx(1, -1) * ((c / 4) % 2 ? 2.0 : 1.0) * s;
}

} // namespace

TEST(Kronecker, Examples) {
    for (i64 n = -20; n <= 20; ++n) EXPECT_EQ(kronecker(1, n), 1);
    EXPECT_EQ(kronecker(5, 2), -1);
    for (i64 d = -30; d <= 30; ++d) EXPECT_EQ(kronecker(d, 1), 1);
    EXPECT_EQ(kronecker(5, 0), 0);
    EXPECT_EQ(kronecker(-1, 0), 1);
    EXPECT_EQ(kronecker(-3, -1), -1);
    EXPECT_EQ(kronecker(5, -1), 1);
}

TEST(Kronecker, MatchesDefinition) {
    for (i64 d = -60; d <= 60; ++d)
        for (i64 n = -80; n <= 80; ++n) ASSERT_EQ(kronecker(d, n), kronecker_oracle(d, n)) << d << " " << n;
}

TEST(Kronecker, FundamentalCharacterIsPeriodic) {
    for (i64 d = -60; d <= 60; ++d) {
        if (!is_fundamental(d)) continue;
        const i64 ad = std::llabs(d);
        for (i64 n = 0; n < 200; ++n) ASSERT_EQ(kronecker(d, n), kronecker(d, n + ad)) << d << " " << n;
    }
}

TEST(Fundamental, Examples) {
    EXPECT_TRUE(is_fundamental(5));
    EXPECT_FALSE(is_fundamental(9));
    EXPECT_TRUE(is_fundamental(1));
    EXPECT_TRUE(is_fundamental(-3));
    EXPECT_TRUE(is_fundamental(-4));
    EXPECT_TRUE(is_fundamental(8));
    EXPECT_TRUE(is_fundamental(12));
    EXPECT_FALSE(is_fundamental(4));
    EXPECT_FALSE(is_fundamental(0));
    EXPECT_FALSE(is_fundamental(-16));
    for (i64 d = -400; d <= 400; ++d) ASSERT_EQ(is_fundamental(d), fundamental_oracle(d)) << d;
}

TEST(Fundamental, DiscriminantType) {
    EXPECT_THROW(Discriminant::fundamental_only(9), DomainError);
    EXPECT_THROW(Discriminant::of(2), DomainError);
    EXPECT_EQ(Discriminant::fundamental_only(-4).abs(), 4);
}

TEST(DivisorSigma, Examples) {
    EXPECT_NEAR(divisor_sigma(0.0, 6).real(), 4.0, 1e-14);
    EXPECT_NEAR(divisor_sigma(1.0, 6).real(), 12.0, 1e-13);
    EXPECT_NEAR(divisor_sigma(-1.0, 4).real(), 1.75, 1e-15);
    EXPECT_THROW(divisor_sigma(1.0, 0), DomainError);
    // multiplicativity at complex exponent
    const cplx a(0.3, 2.1);
    EXPECT_LT(std::abs(divisor_sigma(a, 36) - divisor_sigma(a, 4) * divisor_sigma(a, 9)), 1e-12);
}

TEST(ModInverse, MatchesSearch) {
    for (i64 c = 1; c < 80; ++c)
        for (i64 a = -c; a < 2 * c; ++a)
            if (std::gcd(a, c) == 1) {
                ASSERT_EQ(mod_inverse(a, c), slow_inverse(mod(a, c), c));
            }
    EXPECT_THROW(mod_inverse(2, 4), DomainError);
}

TEST(Kloosterman, Examples) {
    EXPECT_NEAR(kloosterman(3, 7, 1), 1.0, 1e-15);
    EXPECT_NEAR(kloosterman(1, 1, 2), 1.0, 1e-15);
    EXPECT_NEAR(kloosterman(0, 0, 4), 2.0, 1e-14);
    for (i64 c = 1; c < 40; ++c) EXPECT_NEAR(kloosterman(0, 0, c), double(euler_phi(c)), 1e-9);
}

TEST(Kloosterman, MatchesBruteForce) {
    for (i64 c = 1; c <= 30; ++c)
        for (i64 m = -3; m <= 3; ++m)
            for (i64 n = -2; n <= 4; ++n) {
                cplx s = 0;
                for (i64 d = 0; d < c; ++d)
                    if (std::gcd(d, c) == 1) s += ephase(m * slow_inverse(d, c) + n * d, c);
                ASSERT_NEAR(kloosterman(m, n, c), s.real(), 1e-10);
                ASSERT_NEAR(s.imag(), 0.0, 1e-10);
            }
}

TEST(Kloosterman, Symmetry) {
    for (i64 c = 1; c <= 50; ++c)
        for (i64 m = -5; m <= 5; ++m)
            for (i64 n = -5; n <= 5; ++n) ASSERT_NEAR(kloosterman(m, n, c), kloosterman(n, m, c), 1e-10);
}

TEST(Kloosterman, TwistedMultiplicativity) {
    for (i64 c1 = 1; c1 <= 60; ++c1)
        for (i64 c2 = 1; c1 * c2 <= 60; ++c2) {
            if (std::gcd(c1, c2) != 1) continue;
            for (i64 m : {1, 2, 5, -3})
                for (i64 n : {1, 3, -1, 4}) {
                    const i64 i2 = mod_inverse(c2, c1), i1 = mod_inverse(c1, c2);
                    const double lhs = kloosterman(m, n, c1 * c2);
                    const double rhs = kloosterman(m * i2 * i2, n, c1) * kloosterman(m * i1 * i1, n, c2);
                    ASSERT_NEAR(lhs, rhs, 1e-9) << c1 << " " << c2 << " " << m << " " << n;
                }
        }
}

TEST(Kloosterman, WeilSizeSanity) {
    for (i64 c = 1; c <= 500; ++c)
        EXPECT_LE(std::abs(kloosterman(1, 1, c)), double(divisor_count(c)) * std::sqrt(double(c)) + 1e-9) << c;
}

TEST(KloostermanPlus, SmallCasesMatchOracle) {
    const cplx a = kloosterman_plus(1, 1, 4);
    EXPECT_LT(std::abs(a - kplus_oracle(1, 1, 4)), 1e-12);
    EXPECT_LT(std::abs(kloosterman_plus(5, 0, 4) - kplus_oracle(5, 0, 4)), 1e-12);
    EXPECT_LT(std::abs(kloosterman_plus(1, 0, 4) - cplx(4, 0)), 1e-12);
    EXPECT_LT(std::abs(kloosterman_plus(-3, 0, 4) - cplx(4, 0)), 1e-12);
    EXPECT_THROW(kloosterman_plus(1, 1, 6), DomainError);
}

TEST(KloostermanPlus, RealAndSymmetric) {
    for (i64 c = 4; c <= 64; c += 4)
        for (i64 p : {1, 5, 8, -3, -4, 0, 4, 12, -7})
            for (i64 q : {1, 5, 8, -3, -4, 0, 13}) {
                const cplx v = kloosterman_plus(p, q, c);
                ASSERT_NEAR(v.imag(), 0.0, 1e-10) << p << " " << q << " " << c;
                ASSERT_LT(std::abs(v - kloosterman_plus(q, p, c)), 1e-10);
                if (c <= 32) {
                    ASSERT_LT(std::abs(v - kplus_oracle(p, q, c)), 1e-10);
                }
            }
}

TEST(KloostermanPlus, TabulatedZeroPathMatchesGeneral) {
    KloostermanPlusZero fast;
    for (i64 c = 4; c <= 400; c += 4)
        for (i64 p : {1, 5, 8, -3, -4, 12, -8, 21})
            ASSERT_LT(std::abs(fast(p, c) - kloosterman_plus(p, 0, c)), 1e-10 * double(c)) << p << " " << c;
}

TEST(GaussSum, Examples) {
    for (i64 n = -5; n <= 5; ++n) EXPECT_LT(std::abs(gauss_sum(n, 1) - cplx(1, 0)), 1e-15);
    EXPECT_LT(std::abs(gauss_sum(1, 5) - std::sqrt(5.0)), 1e-13);
    EXPECT_LT(std::abs(gauss_sum(1, -4) - cplx(0, 2)), 1e-13);
    EXPECT_THROW(gauss_sum(1, 9), DomainError);
}

TEST(GaussSum, ClosedFormOnRandomCases) {
    std::vector<i64> ds;
    for (i64 d = -40; d <= 40; ++d)
        if (is_fundamental(d)) ds.push_back(d);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> pick(0, ds.size() - 1);
    std::uniform_int_distribution<i64> nn(-500, 500);
    for (int i = 0; i < 200; ++i) {
        const i64 d = ds[pick(rng)], n = nn(rng);
        EXPECT_LT(std::abs(gauss_sum(n, d) - gauss_sum_closed(n, d)), 1e-10) << n << " " << d;
    }
}
