// maass_cli: solve for a form, run verification campaigns, print |b(d)|^2
// tables and evaluate exponential sums.
//
// Exit codes: 0 all checks pass, 1 some check fails, 2 bad configuration or input.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "maass/harness.hpp"

using namespace maass;

namespace {

std::vector<i64> parse_list(const std::string& text) {
    std::vector<i64> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stoll(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--d: not an integer: '" + item + "'");
        }
    }
    return out;
}

std::pair<double, double> parse_bracket(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("--r-bracket: expected LO:HI");
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError("--r-bracket: expected LO:HI, got '" + text + "'");
    }
}

// Writes to the file at `path`, or to stdout when it is empty.
template <class F>
void emit(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write(os);
}

std::string fmt(double v) { return format_double(v); }

struct FormFlags {
    std::string coeffs, bracket;
    i64 n = 10000;
    double norm = 0.0;

    void add(CLI::App* app) {
        app->add_option("--coeffs", coeffs, "coefficient file");
        app->add_option("--r-bracket", bracket, "solve on LO:HI instead of reading a file");
        app->add_option("--n", n, "coefficients to compute when solving")->check(CLI::PositiveNumber);
        app->add_option("--norm", norm, "Petersson norm (computed when omitted)");
    }
    // flags override the config file only when given
    void apply(CampaignConfig& c, const CLI::App* app) const {
        if (!coeffs.empty()) c.coefficients = coeffs;
        if (!bracket.empty()) c.solve_bracket = parse_bracket(bracket);
        if (app->count("--n")) c.solve_coefficients = n;
        if (norm > 0.0) c.petersson_norm = norm;
    }
};

int cmd_solve(const std::string& bracket, i64 n, const std::string& out, bool with_norm) {
    const auto [lo, hi] = parse_bracket(bracket);
    const HejhalResult res = hejhal_solve(lo, hi, n);
    emit(out, [&](std::ostream& os) { save_coefficients(res.form, os); });
    const HejhalDiagnostics& dg = res.diagnostics;
    std::fprintf(stderr, "r = %.15g  (M0 = %d, trusted = %d, r residual %.2e, spread %.2e, automorphy %.2e, hecke %.2e)\n",
                 res.form.r, dg.m0, dg.trusted, dg.r_residual, dg.coefficient_spread, dg.automorphy_residual, dg.hecke.max());
    if (with_norm) std::fprintf(stderr, "petersson_norm = %.15g\n", petersson_norm(MaassEvaluator(res.form)).value);
    return 0;
}

int cmd_verify(CampaignConfig c) {
    validate(c);
    const Report r = run_campaign(c);
    emit(c.output_path, [&](std::ostream& os) { write_report(r, os, c.format); });
    for (const VerificationRow& w : r.rows)
        if (w.status == Status::fail)
            std::fprintf(stderr, "FAIL %s d=%lld rel_err=%.3e %s\n", w.check_id.c_str(), static_cast<long long>(w.d), w.rel_err, w.note.c_str());
    return r.exit_code();
}

int cmd_btable(CampaignConfig c, const std::string& mode, const std::string& out, const std::string& format) {
    c.checks = {"b_modes"};
    validate(c);
    const CampaignForm form = prepare_form(c);
    const bool cyc = mode != "lvalue", lv = mode != "cycle";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::ostringstream csv;
    csv << "d,mode,b_squared,source\n";
    for (i64 dv : c.discriminants) {
        const Discriminant d = Discriminant::fundamental_only(dv);
        for (BMode m : {BMode::cycle, BMode::lvalue}) {
            if ((m == BMode::cycle && !cyc) || (m == BMode::lvalue && !lv)) continue;
            const BValue b = compute_b_coefficient(*form.ev, form.norm, d, m);
            const char* name = m == BMode::cycle ? "cycle" : "lvalue";
            csv << dv << ',' << name << ',' << fmt(b.value) << ',' << fmt(b.source) << "\n";
            rows.push_back({{"d", dv}, {"mode", name}, {"b_squared", b.value}, {"source", b.source}});
        }
    }
    emit(out, [&](std::ostream& os) {
        if (format == "json") os << nlohmann::ordered_json{{"r", form.ev->form().r}, {"petersson_norm", form.norm}, {"rows", rows}}.dump(2) << "\n";
        else os << csv.str();
    });
    return 0;
}

int cmd_sums(const std::string& kind, i64 m, i64 n, i64 c) {
    cplx v;
    if (kind == "K") v = kloosterman(m, n, c);
    else if (kind == "Kplus") v = kloosterman_plus(m, n, c);
    else if (kind == "G") v = gauss_sum(m, c);
    else throw ConfigError("--kind must be K, Kplus or G");
    std::printf("%s %s\n", fmt(v.real()).c_str(), fmt(v.imag()).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maass forms, cycle integrals and |b(d)|^2"};
    app.require_subcommand(1);

    std::string bracket, out;
    i64 n = 10000;
    bool with_norm = false;
    auto* solve = app.add_subcommand("solve", "solve for an even form and write its coefficient file");
    solve->add_option("--r-bracket", bracket, "LO:HI")->required();
    solve->add_option("--n", n, "number of coefficients")->check(CLI::PositiveNumber);
    solve->add_option("--out", out, "output path (stdout when omitted)");
    solve->add_flag("--with-norm", with_norm, "also print the Petersson norm");

    FormFlags form;
    std::string config_path, d_list, format = "csv", checks;
    double s = 2.0, tol = 0.0;
    i64 max_c = 25000;
    int threads = 0;
    auto* verify = app.add_subcommand("verify", "run an identity campaign");
    verify->add_option("--config", config_path, "JSON campaign config; other flags override it");
    form.add(verify);
    verify->add_option("--d", d_list, "comma separated discriminants");
    verify->add_option("--s", s, "s value");
    verify->add_option("--tol", tol, "tolerance for every check");
    verify->add_option("--max-c", max_c, "Kloosterman truncation");
    verify->add_option("--checks", checks, "comma separated: kloosterman,theorem,eisenstein,b_modes");
    verify->add_option("--out", out, "report path (stdout when omitted)");
    verify->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    verify->add_option("--threads", threads, "worker threads (0: all cores)");

    std::string mode = "both";
    auto* btable = app.add_subcommand("b-table", "|b(d)|^2 from cycle integrals and from central L-values");
    form.add(btable);
    btable->add_option("--d", d_list, "comma separated discriminants")->required();
    btable->add_option("--mode", mode, "cycle, lvalue or both")->check(CLI::IsMember({"cycle", "lvalue", "both"}));
    btable->add_option("--out", out, "output path (stdout when omitted)");
    btable->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::string kind = "K";
    i64 sm = 1, sn = 1, sc = 1;
    auto* sums = app.add_subcommand("sums", "K(m,n;c), K+(m,n;c) or the Gauss sum G(m,c)");
    sums->add_option("--kind", kind, "K, Kplus or G");
    sums->add_option("--m", sm, "first argument");
    sums->add_option("--n", sn, "second argument (unused for G)");
    sums->add_option("--c", sc, "modulus")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*solve) return cmd_solve(bracket, n, out, with_norm);
        if (*sums) return cmd_sums(kind, sm, sn, sc);

        CampaignConfig c;
        if (*verify && !config_path.empty()) c = load_config(config_path);
        form.apply(c, *verify ? verify : btable);
        if (!d_list.empty()) c.discriminants = parse_list(d_list);
        if (*verify) {
            if (verify->count("--s")) c.s_values = {s};
            if (tol > 0.0) c.tol_kloosterman = c.tol_theorem_pos = c.tol_theorem_neg = c.tol_eisenstein = c.tol_b_modes = tol;
            if (verify->count("--max-c")) c.kloosterman_max_c = max_c;
            if (!checks.empty()) {
                c.checks.clear();
                std::stringstream ss(checks);
                for (std::string k; std::getline(ss, k, ',');) c.checks.push_back(k);
            }
            if (!out.empty()) c.output_path = out;
            if (verify->count("--format")) c.format = format;
            if (verify->count("--threads")) c.threads = threads;
            return cmd_verify(c);
        }
        return cmd_btable(c, mode, out, format);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
