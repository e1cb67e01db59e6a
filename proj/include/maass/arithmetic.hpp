#pragma once

// Integer kernel: Kronecker symbols, fundamental discriminants, divisor
// sums, modular inverses, Gauss sums, ordinary and plus-space Kloosterman
// sums.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <utility>
#include <vector>

#include "maass/errors.hpp"
#include "maass/numerics.hpp"

namespace maass {

using i64 = std::int64_t;

// Truncation policy for an infinite series over moduli c: stop at
// max_modulus; the neglected tail is estimated as const * sum_{c > max} c^{-tail_exponent}.
struct SumSpec {
    i64 max_modulus = 1000;
    double tail_exponent = 2.0;
    double target_rel_err = 1e-8;

    void validate() const {
        if (max_modulus < 1) throw DomainError("SumSpec: max_modulus must be >= 1");
        if (!(target_rel_err > 0.0)) throw DomainError("SumSpec: target_rel_err must be positive");
    }

    // sum_{c > max_modulus} c^{-tail_exponent}, bounded by the integral from max_modulus
    double tail_sum() const {
        if (tail_exponent <= 1.0) return std::numeric_limits<double>::infinity();
        return std::pow(static_cast<double>(max_modulus), 1.0 - tail_exponent) / (tail_exponent - 1.0);
    }
};

inline i64 mod(i64 a, i64 m) {
    const i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

// Inverse of a modulo m (m >= 1, gcd(a, m) = 1).
inline i64 mod_inverse(i64 a, i64 m) {
    if (m == 1) return 0;
    i64 old_r = mod(a, m), r = m, old_s = 1, s = 0;
    while (r != 0) {
        const i64 q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
    }
    if (old_r != 1) throw DomainError("mod_inverse: argument not invertible");
    return mod(old_s, m);
}

// Jacobi symbol (a/n) for odd n > 0.
inline int jacobi(i64 a, i64 n) {
    if (n <= 0 || n % 2 == 0) throw DomainError("jacobi: n must be odd and positive");
    a = mod(a, n);
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            const i64 r = n % 8;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

// Kronecker symbol (d/n).
inline int kronecker(i64 d, i64 n) {
    if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
    int t = 1;
    if (n < 0) {
        n = -n;
        if (d < 0) t = -t;
    }
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    if (v > 0) {
        if (d % 2 == 0) return 0;
        const i64 r = mod(d, 8);
        if ((r == 3 || r == 5) && (v % 2 == 1)) t = -t;
    }
    return t * jacobi(d, n);
}

inline bool is_squarefree(i64 n) {
    n = std::llabs(n);
    if (n == 0) return false;
    for (i64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return false;
        }
    }
    return true;
}

inline bool is_fundamental(i64 d) {
    if (d == 1) return true;
    const i64 r = mod(d, 4);
    if (r == 1) return is_squarefree(d);
    if (r == 0) {
        const i64 m = d / 4;
        const i64 rm = mod(m, 4);
        return (rm == 2 || rm == 3) && is_squarefree(m);
    }
    return false;
}

struct Discriminant {
    i64 value = 1;
    bool fundamental = true;

    static Discriminant of(i64 d) {
        if (d == 0 || (mod(d, 4) != 0 && mod(d, 4) != 1)) throw DomainError("not a discriminant: " + std::to_string(d));
        return {d, is_fundamental(d)};
    }
    static Discriminant fundamental_only(i64 d) {
        Discriminant D = of(d);
        if (!D.fundamental) throw DomainError("not a fundamental discriminant: " + std::to_string(d));
        return D;
    }
    i64 abs() const { return std::llabs(value); }
    int sign() const { return value > 0 ? 1 : -1; }
    int chi(i64 n) const { return kronecker(value, n); }
};

// Prime factorization by trial division; fine for the moduli used here.
inline std::vector<std::pair<i64, int>> factorize(i64 n) {
    std::vector<std::pair<i64, int>> out;
    n = std::llabs(n);
    for (i64 p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline i64 euler_phi(i64 n) {
    i64 r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

inline i64 divisor_count(i64 n) {
    i64 r = 1;
    for (auto [p, e] : factorize(n)) r *= e + 1;
    return r;
}

inline std::vector<i64> divisors(i64 n) {
    std::vector<i64> out;
    for (i64 t = 1; t * t <= n; ++t)
        if (n % t == 0) {
            out.push_back(t);
            if (t * t != n) out.push_back(n / t);
        }
    std::sort(out.begin(), out.end());
    return out;
}

// sigma_a(n) = sum_{t | n} t^a
inline cplx divisor_sigma(cplx a, i64 n) {
    if (n < 1) throw DomainError("divisor_sigma: n must be >= 1");
    cplx s{0.0, 0.0};
    for (i64 t : divisors(n)) s += std::exp(a * std::log(static_cast<double>(t)));
    return s;
}

inline cplx root_of_unity(i64 k, i64 c) { return e_frac(static_cast<double>(mod(k, c)) / static_cast<double>(c)); }

// K(m, n; c) = sum over units d mod c of e((m dbar + n d) / c)
inline double kloosterman(i64 m, i64 n, i64 c) {
    if (c < 1) throw DomainError("kloosterman: c must be >= 1");
    cplx s{0.0, 0.0};
    const i64 mr = mod(m, c), nr = mod(n, c);
    for (i64 d = 0; d < c; ++d) {
        if (gcd(d, c) != 1) continue;
        const i64 db = mod_inverse(d, c);
        s += root_of_unity(mr * db + nr * d, c);
    }
    if (std::abs(s.imag()) > 1e-9 * std::max(1.0, static_cast<double>(c)))
        throw InvariantError("kloosterman: non-real result");
    return s.real();
}

// K+(p, q; c) = (1 - i) sum_{d mod c, d odd, (d,c)=1} (c/d) eps_d e((p dbar + q d)/c) * (2 if c/4 odd)
inline cplx kloosterman_plus(i64 p, i64 q, i64 c) {
    if (c < 4 || c % 4 != 0) throw DomainError("kloosterman_plus: modulus must be a positive multiple of 4");
    cplx s1{0.0, 0.0}, s3{0.0, 0.0};
    const i64 pr = mod(p, c), qr = mod(q, c);
    for (i64 d = 1; d < c; d += 2) {
        if (gcd(d, c) != 1) continue;
        const int ch = jacobi(c, d);
        const i64 db = mod_inverse(d, c);
        const cplx t = static_cast<double>(ch) * root_of_unity(pr * db + qr * d, c);
        if (d % 4 == 1) s1 += t;
        else s3 += t;
    }
    const double w = (c / 4) % 2 == 1 ? 2.0 : 1.0;
    return cplx(1.0, -1.0) * w * (s1 + I_unit * s3);
}

// Gauss sum G(n, d) = sum_{c mod |d|} chi_d(c) e(nc / |d|) for fundamental d.
inline cplx gauss_sum(i64 n, i64 d) {
    if (!is_fundamental(d)) throw DomainError("gauss_sum: d must be a fundamental discriminant");
    const i64 ad = std::llabs(d);
    cplx s{0.0, 0.0};
    for (i64 c = 0; c < ad; ++c) {
        const int ch = kronecker(d, c);
        if (ch) s += static_cast<double>(ch) * root_of_unity(n * c, ad);
    }
    return s;
}

// Closed form chi_d(n) sqrt|d| (1 if d > 0, i if d < 0).
inline cplx gauss_sum_closed(i64 n, i64 d) {
    const double v = kronecker(d, n) * std::sqrt(static_cast<double>(std::llabs(d)));
    return d > 0 ? cplx(v, 0.0) : cplx(0.0, v);
}

// Repeated evaluation of K+(p, 0; c) for many moduli c. With q = 0 the
// substitution d -> dbar leaves (c/d) and eps_d unchanged, so no inverses are
// needed; the character (c/.) is tabulated from Legendre tables of the prime
// factors of c, and e(k/c) from two short sin/cos tables.
class KloostermanPlusZero {
public:
    cplx operator()(i64 p, i64 c) {
        if (c < 4 || c % 4 != 0) throw DomainError("kloosterman_plus: modulus must be a positive multiple of 4");
        build_character(c);
        build_roots(c);
        const i64 step = mod(p, c);
        // odd d only; index k = p d mod c advances by 2p
        const i64 step2 = mod(2 * step, c);
        i64 k = step;
        double s1r = 0, s1i = 0, s3r = 0, s3i = 0;
        for (i64 d = 1; d < c; d += 4) {
            const int ch1 = chi_[static_cast<std::size_t>(d)];
            if (ch1) {
                s1r += ch1 * roots_[static_cast<std::size_t>(k)].real();
                s1i += ch1 * roots_[static_cast<std::size_t>(k)].imag();
            }
            k += step2;
            if (k >= c) k -= c;
            const int ch3 = chi_[static_cast<std::size_t>(d + 2)];
            if (ch3) {
                s3r += ch3 * roots_[static_cast<std::size_t>(k)].real();
                s3i += ch3 * roots_[static_cast<std::size_t>(k)].imag();
            }
            k += step2;
            if (k >= c) k -= c;
        }
        const double w = (c / 4) % 2 == 1 ? 2.0 : 1.0;
        const cplx s(s1r - s3i, s1i + s3r);
        return cplx(1.0, -1.0) * w * s;
    }

private:
    const std::vector<std::int8_t>& legendre_table(i64 q) {
        auto it = legendre_.find(q);
        if (it != legendre_.end()) return it->second;
        std::vector<std::int8_t> t(static_cast<std::size_t>(q), -1);
        t[0] = 0;
        for (i64 x = 1; x <= q / 2; ++x) t[static_cast<std::size_t>(x * x % q)] = 1;
        return legendre_.emplace(q, std::move(t)).first->second;
    }

    // chi_[d] = (c/d) for odd d in [0, c), 0 for even d
    void build_character(i64 c) {
        chi_.assign(static_cast<std::size_t>(c), 0);
        for (i64 d = 1; d < c; d += 2) chi_[static_cast<std::size_t>(d)] = 1;
        for (auto [q, e] : factorize(c)) {
            if (q == 2) {
                if (e % 2 == 1)
                    for (i64 d = 1; d < c; d += 2) {
                        const i64 r = d & 7;
                        if (r == 3 || r == 5) chi_[static_cast<std::size_t>(d)] = static_cast<std::int8_t>(-chi_[static_cast<std::size_t>(d)]);
                    }
                continue;
            }
            const auto& L = legendre_table(q);
            const bool odd_power = e % 2 == 1;
            const bool flip = q % 4 == 3; // reciprocity sign for d = 3 mod 4
            i64 r = 1;
            for (i64 d = 1; d < c; d += 2) {
                auto& x = chi_[static_cast<std::size_t>(d)];
                const std::int8_t l = L[static_cast<std::size_t>(r)];
                if (l == 0) x = 0;
                else if (odd_power) x = static_cast<std::int8_t>(x * ((flip && (d & 3) == 3) ? -l : l));
                r += 2;
                if (r >= q) r -= q;
            }
        }
    }

    void build_roots(i64 c) {
        roots_.resize(static_cast<std::size_t>(c));
        const i64 b = static_cast<i64>(std::ceil(std::sqrt(static_cast<double>(c))));
        fine_.resize(static_cast<std::size_t>(b));
        for (i64 i = 0; i < b; ++i) fine_[static_cast<std::size_t>(i)] = root_of_unity(i, c);
        for (i64 j = 0; j * b < c; ++j) {
            const cplx coarse = root_of_unity(j * b, c);
            const i64 lim = std::min(b, c - j * b);
            for (i64 i = 0; i < lim; ++i) roots_[static_cast<std::size_t>(j * b + i)] = coarse * fine_[static_cast<std::size_t>(i)];
        }
    }

    std::unordered_map<i64, std::vector<std::int8_t>> legendre_;
    std::vector<std::int8_t> chi_;
    std::vector<cplx> roots_, fine_;
};

} // namespace maass
