#pragma once

// Even Hecke-Maass cusp forms for SL2(Z):
//
//   phi(z) = 2 sqrt(y) sum_{n != 0} a(n) K_{ir}(2 pi |n| y) e(nx)
//          = 4 sqrt(y) sum_{n >= 1} a(n) K_{ir}(2 pi n y) cos(2 pi n x)
//
// Point evaluation goes through the fundamental domain, where about ten
// terms suffice, using a cached piecewise-Chebyshev table of
// e^{pi r/2} sqrt(x) K_{ir}(x) and its derivative.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "maass/arithmetic.hpp"
#include "maass/numerics.hpp"
#include "maass/quadforms.hpp"

namespace maass {

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct MaassForm {
    double r = 0.0;
    Parity parity = Parity::even;
    std::vector<double> coeffs; // coeffs[n - 1] = a(n)
    std::optional<double> norm; // <phi, phi> with measure dx dy / y^2
    bool rescaled = false;      // a(1) was not 1 on input

    i64 max_n() const { return static_cast<i64>(coeffs.size()); }
    double lambda() const { return 0.25 + r * r; }

    // a(n) for n != 0, using a(-n) = +-a(n)
    double a(i64 n) const {
        const i64 m = std::llabs(n);
        if (m == 0 || m > max_n()) throw InsufficientCoefficientsError("coefficient a(" + std::to_string(n) + ") not available");
        const double v = coeffs[static_cast<std::size_t>(m - 1)];
        return (n < 0 && parity == Parity::odd) ? -v : v;
    }
};

// ---------------------------------------------------------------------------
// Piecewise Chebyshev interpolation
// ---------------------------------------------------------------------------
class PiecewiseChebyshev {
public:
    PiecewiseChebyshev() = default;

    template <class F>
    PiecewiseChebyshev(F&& f, double lo, double hi, double width, int degree) : lo_(lo), hi_(hi), degree_(degree) {
        const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
        width_ = (hi - lo) / pieces;
        coef_.assign(static_cast<std::size_t>(pieces * (degree + 1)), 0.0);
        const int n = degree + 1;
        std::vector<double> vals(static_cast<std::size_t>(n));
        for (int p = 0; p < pieces; ++p) {
            const double a = lo + p * width_, b = a + width_;
            for (int j = 0; j < n; ++j) {
                const double t = std::cos(pi * (j + 0.5) / n);
                vals[static_cast<std::size_t>(j)] = f(0.5 * (a + b) + 0.5 * (b - a) * t);
            }
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += vals[static_cast<std::size_t>(j)] * std::cos(pi * k * (j + 0.5) / n);
                coef_[static_cast<std::size_t>(p * n + k)] = (k == 0 ? 1.0 : 2.0) * s / n;
            }
        }
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double operator()(double x) const {
        int p = static_cast<int>((x - lo_) / width_);
        const int pieces = static_cast<int>(coef_.size()) / (degree_ + 1);
        p = std::clamp(p, 0, pieces - 1);
        const double a = lo_ + p * width_;
        const double t = 2.0 * (x - a) / width_ - 1.0;
        const double* c = &coef_[static_cast<std::size_t>(p * (degree_ + 1))];
        double b1 = 0.0, b2 = 0.0;
        for (int k = degree_; k >= 1; --k) {
            const double b0 = 2.0 * t * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c[0];
    }

private:
    double lo_ = 0.0, hi_ = 0.0, width_ = 1.0;
    int degree_ = 0;
    std::vector<double> coef_;
};

// g(x) = e^{pi r/2} sqrt(x) K_{ir}(x) and g'(x) for x >= x_lo; both are
// treated as zero beyond x_hi, where |g| < kNegligible.
class ScaledBesselTable {
public:
    static constexpr double kNegligible = 1e-20;

    ScaledBesselTable() = default;
    ScaledBesselTable(double r, double x_lo) : r_(r), x_lo_(x_lo), scale_(std::exp(0.5 * pi * r)) {
        // find the cutoff beyond the turning point
        double x = std::max(r, x_lo) + 1.0;
        while (std::abs(direct_g(x)) > kNegligible) x += 1.0;
        x_hi_ = x;
        g_ = PiecewiseChebyshev([this](double t) { return direct_g(t); }, x_lo_, x_hi_, 0.5, 16);
        dg_ = PiecewiseChebyshev([this](double t) { return direct_dg(t); }, x_lo_, x_hi_, 0.5, 16);
        g_hi_ = std::abs(direct_g(x_hi_));
        decay_ = std::sqrt(std::max(0.0, 1.0 - (r * r) / (x_hi_ * x_hi_)));
    }

    double r() const { return r_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    double scale() const { return scale_; } // e^{pi r / 2}
    // |g(x)| <= g_hi * exp(-decay * (x - x_hi)) for x >= x_hi
    double g_hi() const { return g_hi_; }
    double decay() const { return decay_; }

    double g(double x) const {
        if (x >= x_hi_) return 0.0;
        if (x < x_lo_) return direct_g(x);
        return g_(x);
    }
    double dg(double x) const {
        if (x >= x_hi_) return 0.0;
        if (x < x_lo_) return direct_dg(x);
        return dg_(x);
    }

    double direct_g(double x) const { return scale_ * std::sqrt(x) * bessel_k_imag_order(r_, x); }
    double direct_dg(double x) const {
        const double k = bessel_k_imag_order(r_, x);
        const double kp = -bessel_k(cplx(1.0, r_), x).real(); // K'_{ir} = -(K_{ir-1} + K_{ir+1}) / 2
        return scale_ * (0.5 * k / std::sqrt(x) + std::sqrt(x) * kp);
    }

private:
    double r_ = 0.0, x_lo_ = 0.0, x_hi_ = 0.0, scale_ = 1.0, g_hi_ = 0.0, decay_ = 1.0;
    PiecewiseChebyshev g_, dg_;
};

// |a(n)| <= tau(n) n^{7/64} <= 8.5 n^{23/64}
inline double coefficient_bound(double n) { return 8.5 * std::pow(n, 23.0 / 64.0); }

struct PointValue {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms = 0;
};

class MaassEvaluator {
public:
    // The table covers heights y >= y_floor; points are pulled into the
    // fundamental domain (y >= sqrt(3)/2) before summation.
    explicit MaassEvaluator(MaassForm form, double y_floor = 0.8)
        : form_(std::move(form)), table_(form_.r, 2.0 * pi * y_floor), y_floor_(y_floor) {
        if (form_.parity != Parity::even) throw DomainError("MaassEvaluator: only even forms are supported");
        if (form_.coeffs.empty()) throw InsufficientCoefficientsError("MaassEvaluator: no coefficients");
        inv_scale_ = 1.0 / table_.scale();
    }

    const MaassForm& form() const { return form_; }
    const ScaledBesselTable& table() const { return table_; }

    // Number of terms needed at height y.
    int terms_at(double y) const { return static_cast<int>(std::floor(table_.x_hi() / (2.0 * pi * y))); }

    // Fourier series at z without pullback.
    PointValue expansion(cplx z) const {
        const double x = z.real(), y = z.imag();
        const int N = terms_at(y);
        if (N > form_.max_n())
            throw InsufficientCoefficientsError("evaluate: need " + std::to_string(N) + " coefficients at y = " +
                                                std::to_string(y));
        double s = 0.0;
        const double w = 2.0 * pi * y;
        const cplx step = e_frac(x);
        cplx ph = step;
        for (int n = 1; n <= N; ++n) {
            s += form_.coeffs[static_cast<std::size_t>(n - 1)] * table_.g(w * n) / std::sqrt(2.0 * pi * n) * ph.real();
            ph = (n % 32 == 0) ? e_frac(x * (n + 1)) : ph * step;
        }
        PointValue out;
        out.value = 4.0 * s * inv_scale_;
        out.terms = N;
        out.tail_bound = tail_bound(y, N);
        return out;
    }

    // phi(z) for any z in the upper half plane.
    PointValue value(cplx z) const { return expansion(pullback(z).z); }
    double operator()(cplx z) const { return value(z).value; }

    // d phi / dz = (d_x - i d_y) phi / 2 on the Fourier series at w.
    cplx dz_expansion(cplx w) const {
        const double u = w.real(), v = w.imag();
        const int N = terms_at(v);
        if (N > form_.max_n()) throw InsufficientCoefficientsError("evaluate_dz: not enough coefficients");
        double sin_part = 0.0, cos_part = 0.0;
        for (int n = 1; n <= N; ++n) {
            const double an = form_.coeffs[static_cast<std::size_t>(n - 1)];
            const double x = 2.0 * pi * n * v;
            const double c = std::cos(2.0 * pi * n * u), s = std::sin(2.0 * pi * n * u);
            // sqrt(v) K(2 pi n v) = g(x) / sqrt(2 pi n); d/dv of it = g'(x) sqrt(2 pi n)
            sin_part += an * n * table_.g(x) / std::sqrt(2.0 * pi * n) * s;
            cos_part += an * std::sqrt(2.0 * pi * n) * table_.dg(x) * c;
        }
        return cplx(-4.0 * pi * sin_part, -2.0 * cos_part) * inv_scale_;
    }

    // d phi / dz at any z: phi(z) = phi(gamma z) gives phi'(z) = phi'(gamma z) / (cz + d)^2.
    cplx dz(cplx z) const {
        const Pullback p = pullback(z);
        const cplx j = double(p.gamma.c) * z + double(p.gamma.d);
        return dz_expansion(p.z) / (j * j);
    }

private:
    double tail_bound(double y, int N) const {
        // sum_{n > N} |a(n)| 4 sqrt(y) |K(2 pi n y)| with the exponential decay of g beyond x_hi
        const double w = 2.0 * pi * y;
        const double q = std::exp(-table_.decay() * w);
        if (q >= 1.0) return std::numeric_limits<double>::infinity();
        const double n1 = N + 1.0;
        const double first = coefficient_bound(n1) * table_.g_hi() * std::exp(-table_.decay() * (w * n1 - table_.x_hi())) /
                             std::sqrt(2.0 * pi * n1);
        // coefficient_bound grows slower than (1 + 1/n), absorbed by a factor 2 for q <= 1/2
        return 4.0 * inv_scale_ * first * 2.0 / (1.0 - q);
    }

    MaassForm form_;
    ScaledBesselTable table_;
    double y_floor_;
    double inv_scale_ = 1.0;
};

inline PointValue evaluate(const MaassForm& f, cplx z) { return MaassEvaluator(f).value(z); }
inline cplx evaluate_dz(const MaassForm& f, cplx z) { return MaassEvaluator(f).dz(z); }

// ---------------------------------------------------------------------------
// Hecke operators
// ---------------------------------------------------------------------------
inline bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

// (T_p a)(n) = a(pn) + a(n/p) on n = 1 .. floor(max_n / p), the second term
// only when p | n. With phi normalized as above an eigenform satisfies
// T_p a = a(p) a.
inline std::vector<double> hecke_apply(i64 p, const MaassForm& f) {
    if (!is_prime(p)) throw DomainError("hecke_apply: p must be prime");
    const i64 N = f.max_n() / p;
    if (N < 1) throw DomainError("hecke_apply: coefficient range too short for p = " + std::to_string(p));
    std::vector<double> out(static_cast<std::size_t>(N));
    for (i64 n = 1; n <= N; ++n) out[static_cast<std::size_t>(n - 1)] = f.a(p * n) + (n % p == 0 ? f.a(n / p) : 0.0);
    return out;
}

struct HeckeReport {
    double max_multiplicative = 0.0; // |a(m) a(n) - a(mn)|, gcd(m, n) = 1
    double max_prime_power = 0.0;    // |a(p) a(p^k) - a(p^{k+1}) - a(p^{k-1})|
    double max() const { return std::max(max_multiplicative, max_prime_power); }
};

inline HeckeReport hecke_check(const MaassForm& f, i64 limit = -1) {
    const i64 N = limit > 0 ? std::min(limit, f.max_n()) : f.max_n();
    HeckeReport rep;
    for (i64 m = 2; m * m <= N; ++m)
        for (i64 n = m + 1; m * n <= N; ++n)
            if (gcd(m, n) == 1)
                rep.max_multiplicative = std::max(rep.max_multiplicative, std::abs(f.a(m) * f.a(n) - f.a(m * n)));
    for (i64 p = 2; p * p <= N; ++p) {
        if (!is_prime(p)) continue;
        i64 prev = 1, cur = p;
        while (cur * p <= N) {
            rep.max_prime_power = std::max(rep.max_prime_power, std::abs(f.a(p) * f.a(cur) - f.a(cur * p) - f.a(prev)));
            prev = cur;
            cur *= p;
        }
    }
    return rep;
}

// a(n) for n <= N from a(p) alone, by multiplicativity and the prime-power recursion.
inline std::vector<double> hecke_generate(const MaassForm& f, i64 N) {
    std::vector<double> a(static_cast<std::size_t>(N + 1), 0.0);
    a[1] = 1.0;
    for (i64 n = 2; n <= N; ++n) {
        i64 p = 2;
        while (n % p) ++p;
        i64 pk = 1, k = 0;
        while (n % (pk * p) == 0) {
            pk *= p;
            ++k;
        }
        const i64 rest = n / pk;
        if (rest > 1) {
            a[static_cast<std::size_t>(n)] = a[static_cast<std::size_t>(pk)] * a[static_cast<std::size_t>(rest)];
        } else if (k == 1) {
            a[static_cast<std::size_t>(n)] = f.a(p);
        } else {
            a[static_cast<std::size_t>(n)] = f.a(p) * a[static_cast<std::size_t>(n / p)] - a[static_cast<std::size_t>(n / p / p)];
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Coefficient files
// ---------------------------------------------------------------------------
inline void save_coefficients(const MaassForm& f, std::ostream& os) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", f.r);
    os << "r=" << buf << "\n";
    os << "parity=" << to_string(f.parity) << "\n";
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", f.coeffs[i]);
        os << (i + 1) << "," << buf << "\n";
    }
}

inline void save_coefficients(const MaassForm& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    save_coefficients(f, os);
}

struct LoadOptions {
    double hecke_tol = 1e-5;
    i64 hecke_limit = 2000; // check relations among the first coefficients only
    bool check_hecke = true;
};

inline MaassForm load_coefficients(std::istream& is, const LoadOptions& opt = {}) {
    auto parse_double = [](const std::string& s, int line) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line) + ": not a number: '" + s + "'");
        }
        if (pos != s.size() || !std::isfinite(v)) throw ParseError("line " + std::to_string(line) + ": not a number: '" + s + "'");
        return v;
    };
    MaassForm f;
    std::string line;
    int lineno = 0;
    auto next = [&]() {
        while (std::getline(is, line)) {
            ++lineno;
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    if (!next() || line.rfind("r=", 0) != 0) throw ParseError("line 1: expected r=<value>");
    f.r = parse_double(line.substr(2), lineno);
    if (!(f.r > 0)) throw ParseError("r must be positive");
    if (!next() || line.rfind("parity=", 0) != 0) throw ParseError("line 2: expected parity=even|odd");
    const std::string par = line.substr(7);
    if (par == "even") f.parity = Parity::even;
    else if (par == "odd") f.parity = Parity::odd;
    else throw ParseError("line 2: parity must be even or odd");
    i64 expect = 1;
    while (next()) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected n,a(n)");
        i64 n = 0;
        try {
            std::size_t pos = 0;
            n = std::stoll(line.substr(0, comma), &pos);
            if (pos != comma) throw std::invalid_argument("index");
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad index");
        }
        if (n != expect) throw ParseError("line " + std::to_string(lineno) + ": expected index " + std::to_string(expect));
        f.coeffs.push_back(parse_double(line.substr(comma + 1), lineno));
        ++expect;
    }
    if (f.coeffs.empty()) throw ParseError("no coefficients");
    const double a1 = f.coeffs[0];
    if (a1 == 0.0) throw InvariantError("a(1) = 0 cannot be normalized");
    if (std::abs(a1 - 1.0) > 1e-9) f.rescaled = true;
    if (a1 != 1.0)
        for (double& v : f.coeffs) v /= a1;
    if (opt.check_hecke) {
        const HeckeReport rep = hecke_check(f, opt.hecke_limit);
        if (rep.max() > opt.hecke_tol)
            throw InvariantError("Hecke relations violated: residual " + std::to_string(rep.max()));
    }
    return f;
}

inline MaassForm load_coefficients(const std::string& path, const LoadOptions& opt = {}) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open " + path);
    return load_coefficients(is, opt);
}

// ---------------------------------------------------------------------------
// Petersson norm over {|x| <= 1/2, |z| >= 1} with dx dy / y^2
// ---------------------------------------------------------------------------
struct NormSettings {
    double y_max = 8.0;
    int panels = 6; // Gauss-Legendre panels per direction in the lower region
};

struct NormResult {
    double value = 0.0;
    double tail_bound = 0.0;
};

inline NormResult petersson_norm(const MaassEvaluator& ev, const Precision& prec = {}, const NormSettings& ns = {}) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const MaassForm& f = ev.form();
    // y >= 1: Parseval in x, int_{-1/2}^{1/2} phi^2 dx = 8 y sum a(n)^2 K(2 pi n y)^2
    const int N = std::min<int>(ev.terms_at(1.0), static_cast<int>(f.max_n()));
    const double inv = 1.0 / ev.table().scale();
    double upper = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double an = f.coeffs[static_cast<std::size_t>(n - 1)];
        auto g = [&](double y) {
            const double k = ev.table().g(2.0 * pi * n * y) * inv / std::sqrt(2.0 * pi * n * y);
            return 8.0 * an * an * k * k / y;
        };
        // the table is cut to zero past x_hi
        const double top = std::min(ns.y_max, ev.table().x_hi() / (2.0 * pi * n));
        // later terms are tiny; hold them to the accuracy of the running total
        Precision pn = prec;
        pn.target_abs_err = std::max(prec.target_abs_err, 0.1 * prec.target_rel_err * upper);
        if (top > 1.0) upper += integrate(g, Interval{1.0, top}, pn).value.real();
    }
    // sqrt(1 - x^2) <= y <= 1, 0 <= x <= 1/2, doubled by evenness
    double lower = 0.0;
    const double hx = 0.5 / ns.panels;
    for (int px = 0; px < ns.panels; ++px)
        for (std::size_t ix = 0; ix < GL::abscissa().size(); ++ix)
            for (int sx : {-1, 1}) {
                const double t = GL::abscissa()[ix] * sx;
                if (ix == 0 && sx == -1 && GL::abscissa()[0] == 0.0) continue;
                const double x = (px + 0.5) * hx + 0.5 * hx * t;
                const double wx = GL::weights()[ix] * 0.5 * hx;
                const double y0 = std::sqrt(1.0 - x * x);
                const double hy = (1.0 - y0) / ns.panels;
                for (int py = 0; py < ns.panels; ++py)
                    for (std::size_t iy = 0; iy < GL::abscissa().size(); ++iy)
                        for (int sy : {-1, 1}) {
                            if (iy == 0 && sy == -1 && GL::abscissa()[0] == 0.0) continue;
                            const double y = y0 + (py + 0.5) * hy + 0.5 * hy * GL::abscissa()[iy] * sy;
                            const double wy = GL::weights()[iy] * 0.5 * hy;
                            const double v = ev.expansion(cplx(x, y)).value;
                            lower += wx * wy * v * v / (y * y);
                        }
            }
    NormResult res;
    res.value = upper + 2.0 * lower;
    // tail beyond Y = y_max: K_{ir}(x)^2 <= K_0(x)^2 <= (pi / 2x) e^{-2x}, so
    // int_Y^inf K(2 pi n y)^2 dy / y <= e^{-4 pi n Y} / (16 pi n^2 Y^2)
    double tail = 0.0;
    const double Y = ns.y_max;
    for (int n = 1; n <= static_cast<int>(f.max_n()); ++n) {
        const double bn = std::max(std::abs(f.coeffs[static_cast<std::size_t>(n - 1)]), coefficient_bound(n));
        const double t = 8.0 * bn * bn * std::exp(-4.0 * pi * n * Y) / (16.0 * pi * n * n * Y * Y);
        tail += t;
        if (t < 1e-30 * tail) break;
    }
    res.tail_bound = tail;
    if (tail > std::max(prec.target_abs_err, prec.target_rel_err * res.value))
        throw ConvergenceError("petersson_norm: tail beyond y_max too large; increase y_max");
    return res;
}

inline double petersson_norm(const MaassForm& f, const Precision& prec = {}) {
    return petersson_norm(MaassEvaluator(f), prec).value;
}

} // namespace maass
