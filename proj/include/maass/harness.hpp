#pragma once

// Verification campaigns: identity checks over lists of discriminants,
// |b(d)|^2 tables, CSV/JSON reports.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "maass/arithmetic.hpp"
#include "maass/cycles.hpp"
#include "maass/hejhal.hpp"
#include "maass/lfunctions.hpp"
#include "maass/maass_form.hpp"

namespace maass {

enum class Status { pass, fail, skipped };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    default: return "skipped";
    }
}

struct VerificationRow {
    std::string check_id;
    i64 d = 0;
    cplx s{};
    cplx lhs{}, rhs{};
    double abs_err = 0.0, rel_err = 0.0;
    Status status = Status::skipped;
    i64 runtime_ms = 0;
    std::string note; // JSON only
};

inline VerificationRow make_row(std::string id, i64 d, cplx s, cplx lhs, cplx rhs, double tol) {
    VerificationRow r;
    r.check_id = std::move(id);
    r.d = d;
    r.s = s;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_err = std::abs(lhs - rhs);
    r.rel_err = r.abs_err / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    r.status = r.rel_err <= tol ? Status::pass : Status::fail;
    return r;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------
// sum_{c <= C} K+(d, 0; 4c) c^{-s-1/2} against 4 L(s, chi_d) / zeta(2s)
inline VerificationRow kloosterman_identity_check(const Discriminant& d, double s, const SumSpec& spec, double tol) {
    spec.validate();
    if (!d.fundamental) throw DomainError("kloosterman_identity_check: discriminant must be fundamental");
    if (!(s > 1.0)) throw DomainError("kloosterman_identity_check: needs s > 1");
    KloostermanPlusZero K;
    cplx sum{};
    double tau = 0.0;
    for (i64 c = spec.max_modulus; c >= 1; --c) {
        const cplx k = K(d.value, 4 * c);
        sum += k * std::pow(static_cast<double>(c), -s - 0.5);
        if (2 * c > spec.max_modulus) tau = std::max(tau, std::abs(k) / std::sqrt(static_cast<double>(c)));
    }
    const cplx rhs = 4.0 * dirichlet_L(s, d) / zeta(2.0 * s);
    VerificationRow row = make_row("kloosterman_plus", d.value, s, sum, rhs, tol);
    // |K+(d, 0; 4c)| <= tau sqrt(c) past the cut
    const double tail = tau * std::pow(static_cast<double>(spec.max_modulus), 1.0 - s) / (s - 1.0);
    if (tail > spec.target_rel_err * std::abs(sum)) row.note = "tail estimate " + std::to_string(tail) + " above target";
    return row;
}

inline VerificationRow theorem_identity_check(const MaassEvaluator& ev, const Discriminant& d, cplx s, double tol) {
    const CycleSum lhs = d.value > 0 ? cycle_sum_maass(ev, d, s) : cycle_sum_maass_dz(ev, d, s);
    const cplx rhs = rhs_formula(ev.form(), d, s);
    return make_row(d.value > 0 ? "theorem_pos" : "theorem_neg", d.value, s, lhs.value, rhs, tol);
}

inline VerificationRow eisenstein_row(const Discriminant& d, double s, double tol) {
    const IdentityPair p = eisenstein_cycle_check(d, s);
    return make_row("eisenstein_cycle", d.value, s, p.lhs, p.rhs, tol);
}

enum class BMode { cycle, lvalue };

struct BValue {
    double value = 0.0;  // |b(d)|^2
    double source = 0.0; // the cycle sum at s = 0, or L(1/2, phi x chi_d)
};

// cycle:  12 pi^{1/2} |d|^{3/2} |b(d)|^2 = <phi,phi>^{-1} sum_Q chi_d(Q) (cycle integral at s = 0)
// lvalue: 12 pi |d| |b(d)|^2 = <phi,phi>^{-1} |Gamma(1/2 - sgn(d)/4 + ir/2)|^2 L(1/2, phi x chi_d)
inline BValue compute_b_coefficient(const MaassEvaluator& ev, double norm, const Discriminant& d, BMode mode,
                                    const AfeSettings& afe = {}) {
    if (!d.fundamental) throw DomainError("compute_b_coefficient: discriminant must be fundamental");
    if (!(norm > 0.0)) throw DomainError("compute_b_coefficient: Petersson norm must be positive");
    const double ad = static_cast<double>(d.abs());
    BValue out;
    double scale = 0.0;
    if (mode == BMode::cycle) {
        const CycleSum c = d.value > 0 ? cycle_sum_maass(ev, d, 0.0) : cycle_sum_maass_dz(ev, d, 0.0);
        out.source = c.value.real();
        for (const CycleTerm& t : c.terms) scale += std::abs(t.integral);
        scale /= 12.0 * std::sqrt(pi) * std::pow(ad, 1.5) * norm;
        out.value = out.source / (12.0 * std::sqrt(pi) * std::pow(ad, 1.5) * norm);
    } else {
        out.source = twisted_L_center(ev.form(), d, afe);
        const double g = std::abs(std::exp(log_gamma(cplx(0.5 - (d.value > 0 ? 0.25 : -0.25), 0.5 * ev.form().r))));
        out.value = g * g * out.source / (12.0 * pi * ad * norm);
        scale = g * g / (12.0 * pi * ad * norm);
    }
    // a negative square is a convention error, not rounding
    if (out.value < -1e-6 * scale) throw InvariantError("compute_b_coefficient: negative |b(d)|^2 for d = " + std::to_string(d.value));
    out.value = std::max(out.value, 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Campaign configuration (JSON)
// ---------------------------------------------------------------------------
struct CampaignConfig {
    // form source: a coefficient file, or the Hejhal solver on a bracket
    std::string coefficients;
    std::optional<std::pair<double, double>> solve_bracket;
    i64 solve_coefficients = 10000;
    std::optional<double> petersson_norm;

    std::vector<i64> discriminants;
    std::vector<double> s_values{2.0};
    std::vector<std::string> checks{"kloosterman", "theorem", "eisenstein", "b_modes"};

    double tol_kloosterman = 1e-4;
    double tol_theorem_pos = 1e-4;
    double tol_theorem_neg = 1e-3;
    double tol_eisenstein = 1e-4;
    double tol_b_modes = 5e-3;

    i64 kloosterman_max_c = 25000;

    std::string output_path;
    std::string format = "csv";
    int threads = 0; // 0: hardware concurrency
    bool record_timing = false;

    bool wants(const std::string& check) const { return std::find(checks.begin(), checks.end(), check) != checks.end(); }
    bool needs_form() const { return wants("theorem") || wants("b_modes"); }
};

inline const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> k{"kloosterman", "theorem", "eisenstein", "b_modes"};
    return k;
}

// Collects every problem before failing; messages name the offending field.
inline void validate(const CampaignConfig& c, bool form_supplied = false) {
    std::vector<std::string> errs;
    for (std::size_t i = 0; i < c.discriminants.size(); ++i)
        if (!is_fundamental(c.discriminants[i]))
            errs.push_back("discriminants[" + std::to_string(i) + "]: " + std::to_string(c.discriminants[i]) + " is not a fundamental discriminant");
    for (const std::string& k : c.checks)
        if (std::find(known_checks().begin(), known_checks().end(), k) == known_checks().end()) errs.push_back("checks: unknown check '" + k + "'");
    for (std::size_t i = 0; i < c.s_values.size(); ++i) {
        const double s = c.s_values[i];
        if (!(s > 1.0) && (c.wants("kloosterman") || c.wants("eisenstein")))
            errs.push_back("s_values[" + std::to_string(i) + "]: kloosterman and eisenstein checks need s > 1");
        if (!(s >= 0.0)) errs.push_back("s_values[" + std::to_string(i) + "]: s must be >= 0");
    }
    if (c.needs_form() && !form_supplied && c.coefficients.empty() && !c.solve_bracket) errs.push_back("form: give 'coefficients' or 'solve'");
    if (c.solve_bracket && !(c.solve_bracket->first < c.solve_bracket->second)) errs.push_back("form.solve: r_lo must be below r_hi");
    if (c.kloosterman_max_c < 1) errs.push_back("truncation.kloosterman_max_c: must be >= 1");
    if (c.format != "csv" && c.format != "json") errs.push_back("output.format: must be csv or json");
    for (double t : {c.tol_kloosterman, c.tol_theorem_pos, c.tol_theorem_neg, c.tol_eisenstein, c.tol_b_modes})
        if (!(t > 0.0)) {
            errs.push_back("tolerances: must be positive");
            break;
        }
    if (c.threads < 0) errs.push_back("threads: must be >= 0");
    if (!errs.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ConfigError(msg);
    }
}

inline CampaignConfig parse_config(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    CampaignConfig c;
    auto field = [&](const json& node, const char* key, auto& out, const std::string& path) {
        if (!node.contains(key)) return;
        try {
            node.at(key).get_to(out);
        } catch (const json::exception& e) {
            throw ConfigError("config field " + path + ": " + e.what());
        }
    };
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::vector<std::string> keys{"form", "petersson_norm", "discriminants", "s_values", "checks", "tolerances",
                                                   "truncation", "output", "threads", "record_timing"};
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) throw ConfigError("config: unknown field '" + it.key() + "'");
    }
    if (j.contains("form")) {
        const json& f = j["form"];
        field(f, "coefficients", c.coefficients, "form.coefficients");
        if (f.contains("solve")) {
            double lo = 0, hi = 0;
            field(f["solve"], "r_lo", lo, "form.solve.r_lo");
            field(f["solve"], "r_hi", hi, "form.solve.r_hi");
            field(f["solve"], "coefficients", c.solve_coefficients, "form.solve.coefficients");
            c.solve_bracket = std::make_pair(lo, hi);
        }
    }
    if (j.contains("petersson_norm")) {
        double n = 0;
        field(j, "petersson_norm", n, "petersson_norm");
        c.petersson_norm = n;
    }
    field(j, "discriminants", c.discriminants, "discriminants");
    field(j, "s_values", c.s_values, "s_values");
    field(j, "checks", c.checks, "checks");
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        field(t, "kloosterman", c.tol_kloosterman, "tolerances.kloosterman");
        field(t, "theorem_pos", c.tol_theorem_pos, "tolerances.theorem_pos");
        field(t, "theorem_neg", c.tol_theorem_neg, "tolerances.theorem_neg");
        field(t, "eisenstein", c.tol_eisenstein, "tolerances.eisenstein");
        field(t, "b_modes", c.tol_b_modes, "tolerances.b_modes");
    }
    if (j.contains("truncation")) field(j["truncation"], "kloosterman_max_c", c.kloosterman_max_c, "truncation.kloosterman_max_c");
    if (j.contains("output")) {
        field(j["output"], "path", c.output_path, "output.path");
        field(j["output"], "format", c.format, "output.format");
    }
    field(j, "threads", c.threads, "threads");
    field(j, "record_timing", c.record_timing, "record_timing");
    validate(c);
    return c;
}

inline CampaignConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------
struct Report {
    std::vector<VerificationRow> rows;
    bool all_pass() const {
        return std::none_of(rows.begin(), rows.end(), [](const VerificationRow& r) { return r.status == Status::fail; });
    }
    int exit_code() const { return all_pass() ? 0 : 1; }
};

// Runs jobs on `threads` workers; results keep the job order.
inline std::vector<VerificationRow> run_jobs(const std::vector<std::function<VerificationRow()>>& jobs, int threads, bool record_timing) {
    std::vector<VerificationRow> out(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                out[i] = jobs[i]();
            } catch (const std::exception& e) {
                out[i].status = Status::fail;
                out[i].note = e.what();
            }
            if (record_timing)
                out[i].runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

struct CampaignForm {
    std::optional<MaassEvaluator> ev;
    double norm = 0.0;
};

inline CampaignForm prepare_form(const CampaignConfig& c) {
    CampaignForm out;
    if (!c.needs_form()) return out;
    MaassForm f = c.coefficients.empty() ? hejhal_solve(c.solve_bracket->first, c.solve_bracket->second, c.solve_coefficients).form
                                         : load_coefficients(c.coefficients);
    out.ev.emplace(f);
    if (c.wants("b_modes")) out.norm = c.petersson_norm ? *c.petersson_norm : petersson_norm(*out.ev).value;
    return out;
}

inline Report run_campaign(const CampaignConfig& c, const CampaignForm& form) {
    validate(c, true);
    if (c.needs_form() && !form.ev) throw ConfigError("run_campaign: the selected checks need a Maass form");
    std::vector<std::function<VerificationRow()>> jobs;
    const int threads = c.threads > 0 ? c.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    for (const std::string& check : known_checks()) {
        if (!c.wants(check)) continue;
        for (i64 dv : c.discriminants) {
            const Discriminant d = Discriminant::fundamental_only(dv);
            if (check == "kloosterman")
                for (double s : c.s_values)
                    jobs.push_back([=, &c] { return kloosterman_identity_check(d, s, SumSpec{c.kloosterman_max_c, 2.0, c.tol_kloosterman}, c.tol_kloosterman); });
            if (check == "theorem")
                for (double s : c.s_values)
                    jobs.push_back([=, &c, &form] {
                        return theorem_identity_check(*form.ev, d, s, d.value > 0 ? c.tol_theorem_pos : c.tol_theorem_neg);
                    });
            if (check == "eisenstein" && dv > 0)
                for (double s : c.s_values) jobs.push_back([=, &c] { return eisenstein_row(d, s, c.tol_eisenstein); });
            if (check == "b_modes")
                jobs.push_back([=, &c, &form] {
                    const BValue cyc = compute_b_coefficient(*form.ev, form.norm, d, BMode::cycle);
                    const BValue lv = compute_b_coefficient(*form.ev, form.norm, d, BMode::lvalue);
                    return make_row("b_modes", d.value, 0.0, cyc.value, lv.value, c.tol_b_modes);
                });
        }
    }
    Report r;
    r.rows = run_jobs(jobs, threads, c.record_timing);
    return r;
}

inline Report run_campaign(const CampaignConfig& c) { return run_campaign(c, prepare_form(c)); }

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------
inline const char* kReportHeader = "check_id,d,s_re,s_im,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,status,runtime_ms";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const Report& r, std::ostream& os) {
    os << kReportHeader << "\n";
    for (const VerificationRow& w : r.rows) {
        os << w.check_id << ',' << w.d << ',' << format_double(w.s.real()) << ',' << format_double(w.s.imag()) << ','
           << format_double(w.lhs.real()) << ',' << format_double(w.lhs.imag()) << ',' << format_double(w.rhs.real()) << ','
           << format_double(w.rhs.imag()) << ',' << format_double(w.abs_err) << ',' << format_double(w.rel_err) << ','
           << to_string(w.status) << ',' << w.runtime_ms << "\n";
    }
}

inline void write_json(const Report& r, std::ostream& os) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const VerificationRow& w : r.rows) {
        nlohmann::ordered_json j;
        j["check_id"] = w.check_id;
        j["d"] = w.d;
        j["s"] = {w.s.real(), w.s.imag()};
        j["lhs"] = {w.lhs.real(), w.lhs.imag()};
        j["rhs"] = {w.rhs.real(), w.rhs.imag()};
        j["abs_err"] = w.abs_err;
        j["rel_err"] = w.rel_err;
        j["status"] = to_string(w.status);
        j["runtime_ms"] = w.runtime_ms;
        if (!w.note.empty()) j["note"] = w.note;
        rows.push_back(j);
    }
    nlohmann::ordered_json doc;
    doc["rows"] = rows;
    doc["all_pass"] = r.all_pass();
    os << doc.dump(2) << "\n";
}

inline void write_report(const Report& r, std::ostream& os, const std::string& format) {
    if (format == "json") write_json(r, os);
    else write_csv(r, os);
}

} // namespace maass
