#include <gtest/gtest.h>

#include <map>
#include <random>

#include "maass/quadforms.hpp"

using namespace maass;

namespace {

Mat2 random_gamma(std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<int> pick(0, 2);
    Mat2 g;
    for (int i = 0; i < len; ++i) {
        const int k = pick(rng);
        g = (k == 0 ? Mat2::S() : k == 1 ? Mat2::T(1) : Mat2::T(-1)) * g;
    }
    return g;
}

const std::vector<i64> kSmallFundamentals = {1, 5, 8, 12, 13, -3, -4, -7, -8, -11, -15, -19, -20};

// All forms reachable from Q by words of length <= len in S, T, T^{-1}
// without leaving the coefficient box.
std::set<QuadraticForm> orbit(const QuadraticForm& Q, i64 bound, int len) {
    std::set<QuadraticForm> seen{Q};
    std::vector<QuadraticForm> frontier{Q};
    for (int step = 0; step < len; ++step) {
        std::vector<QuadraticForm> next;
        for (const auto& F : frontier)
            for (const Mat2& h : {Mat2::S(), Mat2::T(1), Mat2::T(-1)}) {
                const QuadraticForm R = act(h, F);
                if (std::llabs(R.a) > bound || std::llabs(R.b) > bound || std::llabs(R.c) > bound) continue;
                if (seen.insert(R).second) next.push_back(R);
            }
        frontier.swap(next);
    }
    return seen;
}

} // namespace

TEST(Act, Examples) {
    const QuadraticForm Q{3, -7, 2};
    EXPECT_EQ(act(Mat2{}, Q), Q);
    EXPECT_EQ(act(Mat2::S(), Q), (QuadraticForm{2, 7, 3}));
    EXPECT_THROW(act(Mat2{2, 0, 0, 1}, Q), DomainError);
}

TEST(Act, DiscriminantInvariantAndGroupAction) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<i64> co(-30, 30);
    for (int i = 0; i < 100; ++i) {
        const QuadraticForm Q{co(rng), co(rng), co(rng)};
        const Mat2 g = random_gamma(rng, 8), h = random_gamma(rng, 5);
        EXPECT_EQ(act(g, Q).disc(), Q.disc());
        EXPECT_EQ(act(g * h, Q), act(g, act(h, Q)));
    }
}

TEST(Act, RootsMoveWithTheMatrix) {
    std::mt19937_64 rng(2);
    const QuadraticForm Q{2, 3, -5}; // roots 1 and -5/2
    for (int i = 0; i < 30; ++i) {
        const Mat2 g = random_gamma(rng, 6);
        const QuadraticForm R = act(g, Q);
        for (double root : {1.0, -2.5}) {
            const double den = g.c * root + g.d;
            if (std::abs(den) < 1e-12) {
                EXPECT_EQ(R.a, 0);
                continue;
            }
            const double image = (g.a * root + g.b) / den;
            EXPECT_NEAR(R.a * image * image + R.b * image + R.c, 0.0, 1e-8 * (1 + image * image) * (std::llabs(R.a) + std::llabs(R.b) + std::llabs(R.c)));
        }
    }
}

TEST(Representatives, ExamplesAndCount) {
    const auto one = square_disc_representatives(1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], (QuadraticForm{0, 1, 0}));
    const auto five = square_disc_representatives(5);
    ASSERT_EQ(five.size(), 5u);
    for (i64 c = 0; c < 5; ++c) EXPECT_EQ(five[std::size_t(c)], (QuadraticForm{0, 5, c}));
    for (i64 d : kSmallFundamentals)
        for (auto fl : {RepFlavor::left, RepFlavor::right})
            EXPECT_EQ(square_disc_representatives(d, fl).size(), std::size_t(std::llabs(d)));
    EXPECT_THROW(square_disc_representatives(9), DomainError);
}

TEST(Representatives, CompleteAndDistinctForDisc25) {
    const auto reps = square_disc_representatives(5);
    std::map<QuadraticForm, int> owner;
    for (std::size_t i = 0; i < reps.size(); ++i)
        for (const auto& F : orbit(reps[i], 50, 12)) {
            auto [it, fresh] = owner.emplace(F, int(i));
            ASSERT_TRUE(fresh || it->second == int(i)) << "two representatives are equivalent";
        }
    // every form of discriminant 25 with small coefficients is reached
    for (i64 a = -12; a <= 12; ++a)
        for (i64 b = -12; b <= 12; ++b)
            for (i64 c = -12; c <= 12; ++c) {
                const QuadraticForm Q{a, b, c};
                if (Q.disc() != 25) continue;
                auto it = owner.find(Q);
                ASSERT_NE(it, owner.end()) << a << " " << b << " " << c;
                EXPECT_EQ(reduce_square_form(Q).first, reps[std::size_t(it->second)]);
            }
}

TEST(Representatives, ReductionCertificate) {
    for (i64 d : kSmallFundamentals) {
        const i64 f = std::llabs(d);
        for (i64 a = -8; a <= 8; ++a)
            for (i64 b = -3 * f; b <= 3 * f; ++b) {
                if ((b * b - f * f) % 4 != 0 || a == 0) continue;
                const i64 c4 = b * b - f * f;
                if (c4 % (4 * a)) continue;
                const QuadraticForm Q{a, b, c4 / (4 * a)};
                auto [R, g] = reduce_square_form(Q);
                EXPECT_EQ(act(g, Q), R);
                EXPECT_EQ(R.a, 0);
                EXPECT_EQ(R.b, f);
                EXPECT_TRUE(R.c >= 0 && R.c < f);
            }
    }
}

TEST(Representatives, FlavorsAreEquivalentMultisets) {
    for (i64 d : {1, 5, 8, -3, -4, -7, -8}) {
        std::multiset<QuadraticForm> left, right;
        for (const auto& Q : square_disc_representatives(d, RepFlavor::left)) left.insert(reduce_square_form(Q).first);
        for (const auto& Q : square_disc_representatives(d, RepFlavor::right)) right.insert(reduce_square_form(Q).first);
        EXPECT_EQ(left, right) << d;
        // cross-check one pairing with the word search
        const auto L = square_disc_representatives(d, RepFlavor::left);
        const auto R = square_disc_representatives(d, RepFlavor::right);
        for (const auto& Q : L) {
            int hits = 0;
            for (const auto& P : R) hits += find_gamma_equivalence(Q, P, 80, 18).has_value();
            EXPECT_EQ(hits, 1) << d;
        }
    }
}

TEST(GenusCharacter, Examples) {
    EXPECT_EQ(genus_character(5, {0, 5, 1}), 1);
    EXPECT_EQ(genus_character(5, {0, 5, 2}), -1);
    EXPECT_EQ(genus_character(5, {0, 5, 0}), 0);
    EXPECT_EQ(genus_character(1, {0, 1, 0}), 1);
    EXPECT_THROW(genus_character(5, {1, 1, 1}), DomainError);
}

TEST(GenusCharacter, EqualsKroneckerOnRepresentatives) {
    for (i64 d : kSmallFundamentals)
        for (const auto& Q : square_disc_representatives(d)) EXPECT_EQ(genus_character(d, Q), kronecker(d, Q.c)) << d;
}

TEST(GenusCharacter, GammaInvariant) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pd(0, kSmallFundamentals.size() - 1);
    for (int i = 0; i < 200; ++i) {
        const i64 d = kSmallFundamentals[pd(rng)];
        const auto reps = square_disc_representatives(d);
        std::uniform_int_distribution<std::size_t> pq(0, reps.size() - 1);
        const QuadraticForm Q = reps[pq(rng)];
        const Mat2 g = random_gamma(rng, 7);
        EXPECT_EQ(genus_character(d, act(g, Q)), genus_character(d, Q));
    }
}

TEST(GenusCharacter, NonSquareDiscriminantInvariance) {
    // disc = d d' with d' = -7 and d = 5: forms of discriminant -35
    std::mt19937_64 rng(6);
    const QuadraticForm Q{3, 1, 3};
    ASSERT_EQ(Q.disc(), -35);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(genus_character(5, act(random_gamma(rng, 6), Q)), genus_character(5, Q));
}

TEST(GenusCharacter, NegationFlipsSignForNegativeD) {
    for (i64 d : {-3, -4, -7, -8})
        for (const auto& Q : square_disc_representatives(d)) EXPECT_EQ(genus_character(d, -Q), -genus_character(d, Q));
}

TEST(Geodesic, Examples) {
    const auto g0 = geodesic({0, 1, 0});
    EXPECT_TRUE(g0.start.infinite);
    EXPECT_EQ(g0.end.x, 0.0);
    EXPECT_EQ(g0.orientation, Orientation::downward);
    EXPECT_FALSE(g0.apex.has_value());
    const auto g1 = geodesic({0, 5, -1});
    EXPECT_TRUE(g1.start.infinite);
    EXPECT_NEAR(g1.end.x, 0.2, 1e-15);
    const auto g2 = geodesic({1, 3, 0});
    ASSERT_TRUE(g2.apex.has_value());
    EXPECT_NEAR(g2.apex->real(), -1.5, 1e-15);
    EXPECT_NEAR(g2.apex->imag(), 1.5, 1e-15);
    EXPECT_EQ(g2.orientation, Orientation::clockwise);
    EXPECT_EQ(geodesic({-1, 3, 0}).orientation, Orientation::counterclockwise);
    EXPECT_THROW(geodesic({1, 1, 1}), DomainError);
}

TEST(Cusps, SentToInfinity) {
    for (i64 p = -12; p <= 12; ++p)
        for (i64 q = 1; q <= 12; ++q) {
            if (std::gcd(p, q) != 1) continue;
            const Mat2 g = cusp_to_infinity({p, q});
            EXPECT_EQ(g.det(), 1);
            EXPECT_EQ(g.c * p + g.d * q, 0);
        }
}
