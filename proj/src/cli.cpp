#include "kd/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "kd/correlation.hpp"
#include "kd/dispersion.hpp"
#include "kd/parallel.hpp"
#include "kd/spectral.hpp"
#include "kd/titchmarsh.hpp"
#include "kd/verify.hpp"

namespace kd::cli {

ConfigError::ConfigError(std::size_t line, const std::string& what)
    : std::runtime_error("config line " + std::to_string(line) + ": " + what), line(line) {}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
    return true;
}

}  // namespace

std::string ExperimentConfig::serialize() const {
    std::string out = "subcommand=" + subcommand + "\n";
    for (const auto& [k, v] : params) out += k + "=" + v + "\n";
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(no, "expected key=value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(no, "invalid key '" + key + "'");
        if (value.empty()) throw ConfigError(no, "empty value for '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(no, "duplicate key '" + key + "'");
        if (key == "subcommand")
            cfg.subcommand = value;
        else
            cfg.params.emplace_back(key, value);
    }
    if (cfg.subcommand.empty()) throw ConfigError(no, "missing subcommand");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(0, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string format_number(double v) {
    if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e17) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string emit_csv(const Row& header, const std::vector<Row>& rows) {
    std::string out;
    auto cell = [&](const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) {
            out += s;
            return;
        }
        out += '"';
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
    };
    auto line = [&](const Row& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            cell(r[i]);
        }
        out += "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(u64 v) { return std::to_string(v); }
std::string num(i64 v) { return std::to_string(v); }
std::string num(unsigned v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

u64 as_count(double v, const char* what) {
    if (!(v >= 0) || v != std::trunc(v) || v > 1.8e19)
        throw std::invalid_argument(std::string(what) + " must be a nonnegative integer");
    return u64(v);
}

struct Table {
    Row header;
    std::vector<Row> rows;
    bool verified = true;
};

using Runner = std::function<Table()>;

Table verify_table(const std::vector<VerifyResult>& rs) {
    Table t{{"check", "checked", "worst_relative_error", "ok"}, {}, true};
    for (const auto& r : rs) {
        t.rows.push_back({r.name, num(r.checked), num(r.worst), flag(r.ok)});
        t.verified = t.verified && r.ok;
    }
    return t;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Number-theory experiment runner: exact sums, identity suites and calibrated envelopes", "kd"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    std::string out_path, mode = "strict", config_path;
    app.add_option("--threads", threads, "worker threads (0: hardware default)");
    app.add_option("--out", out_path, "write CSV here instead of stdout");
    app.add_option("--mode", mode, "strict: exit 1 on a failed check; report: always exit 0")
        ->check(CLI::IsMember({"strict", "report"}));
    app.add_option("--config", config_path, "key=value experiment file; command-line flags take precedence");

    std::map<std::string, Runner> runners;

    // constants
    double precision = 1e-5;
    auto* sc = app.add_subcommand("constants", "C1 and C2 with tail certificates");
    sc->add_option("--precision", precision, "target bound on both tails")->capture_default_str();
    runners["constants"] = [&] {
        Table t{{"name", "value", "cutoff", "tail", "meets_target"}, {}, true};
        TitchmarshConstants c;
        bool reached = true;
        try {
            c = constants(precision);
        } catch (const std::domain_error&) {
            c = constants_with_cutoff(u64(1) << 28);
            reached = false;
        }
        t.rows.push_back({"C1", num(c.c1_product), num(c.cutoff), num(c.c1_tail), flag(c.c1_tail <= precision)});
        t.rows.push_back({"C2", num(c.c2), num(c.cutoff), num(c.c2_tail), flag(c.c2_tail <= precision)});
        t.verified = reached;
        return t;
    };

    // titchmarsh
    std::vector<double> tx{1e5, 1e6};
    double ttol = 0.01;
    auto* st = app.add_subcommand("titchmarsh", "T(x) = sum of Lambda(n) tau(n - 1) against its main term");
    st->add_option("--x", tx, "comma-separated x values")->delimiter(',')->capture_default_str();
    st->add_option("--tol", ttol, "strict bound on |T / main - 1|")->capture_default_str();
    runners["titchmarsh"] = [&] {
        Table t{{"x", "t_sum", "main_term", "relative_error"}, {}, true};
        for (double xv : tx) {
            u64 x = as_count(xv, "x");
            double T = t_sum(x), m = main_term(double(x));
            double rel = std::abs(T / m - 1);
            t.rows.push_back({num(x), num(T), num(m), num(rel)});
            t.verified = t.verified && rel <= ttol;
        }
        return t;
    };

    // correlation
    unsigned ck = 2;
    std::vector<double> cx{1e5};
    auto* scor = app.add_subcommand("correlation", "T_k(x) = sum of tau_k(n) tau(n + 1) against the exact proxy");
    scor->add_option("--k", ck, "divisor order, 2..8")->capture_default_str();
    scor->add_option("--x", cx, "comma-separated x values")->delimiter(',')->capture_default_str();
    runners["correlation"] = [&] {
        Table t{{"x", "k", "tk", "proxy", "residual_over_x"}, {}, true};
        for (double xv : cx) {
            u64 x = as_count(xv, "x");
            u64 T = tk_correlation(x, ck);
            double p = main_term_proxy(x, ck);
            t.rows.push_back({num(x), num(ck), num(T), num(p), num((double(T) - p) / double(x))});
        }
        return t;
    };

    // kloosterman-verify
    u64 pmax = 500, nmax = 500;
    auto* sk = app.add_subcommand("kloosterman-verify", "Weil bound on primes and the Ramanujan sum identity");
    sk->add_option("--pmax", pmax, "primes below this bound")->capture_default_str();
    sk->add_option("--nmax", nmax, "n, c up to this bound")->capture_default_str();
    runners["kloosterman-verify"] = [&] { return verify_table({verify_weil_primes(pmax), verify_ramanujan(nmax)}); };

    // cusp-verify
    u64 qmax = 30, gmax = 5, cmax = 30;
    auto* scu = app.add_subcommand("cusp-verify", "cusp Kloosterman expansions against the enumeration oracle");
    scu->add_option("--qmax", qmax, "largest level")->capture_default_str();
    scu->add_option("--gmax", gmax, "largest multiple for the (a, a) expansion")->capture_default_str();
    scu->add_option("--cmax", cmax, "largest c for the (inf, 1/s) expansion")->capture_default_str();
    runners["cusp-verify"] = [&] { return verify_table({verify_cusp_aa(qmax, gmax), verify_cusp_inf_s(qmax, cmax)}); };

    // dispersion
    u64 dM = 64, dN = 32, dQ = 32, dR = 4;
    i64 da1 = 1, da2 = 1;
    std::vector<u64> dseeds{0};
    bool dsf = false;
    auto* sd = app.add_subcommand("dispersion", "dispersion sums, main terms and the bilinear u_R sum");
    sd->add_option("--M", dM)->capture_default_str();
    sd->add_option("--N", dN)->capture_default_str();
    sd->add_option("--Q", dQ)->capture_default_str();
    sd->add_option("--R", dR)->capture_default_str();
    sd->add_option("--a1", da1)->capture_default_str();
    sd->add_option("--a2", da2)->capture_default_str();
    sd->add_option("--seeds", dseeds, "comma-separated coefficient seeds")->delimiter(',')->capture_default_str();
    sd->add_flag("--squarefree", dsf, "restrict beta to squarefree n");
    runners["dispersion"] = [&] {
        Table t{{"seed", "M", "N", "Q", "R", "a1", "a2", "s1", "s2_re", "s2_im", "s3", "residual", "normalized_residual",
                 "x1", "x2", "x3", "lhs_re", "lhs_im"},
                {},
                true};
        for (u64 seed : dseeds) {
            auto c = make_dispersion_config(dM, dN, dQ, dR, da1, da2, seed, Coefficients::Random, Coefficients::Random, dsf);
            auto s = dispersion_sums(c);
            double X1 = x1(c), X2 = x2(c), X3 = x3(c);
            auto lhs = theorem51_lhs(c);
            double norm = s.residual() * double(dR) * double(dR) / (double(dM) * double(dN) * double(dN));
            t.rows.push_back({num(seed), num(dM), num(dN), num(dQ), num(dR), num(da1), num(da2), num(s.s1),
                              num(s.s2.real()), num(s.s2.imag()), num(s.s3), num(s.residual()), num(norm), num(X1),
                              num(X2), num(X3), num(lhs.real()), num(lhs.imag())});
            t.verified = t.verified && std::abs(X2 - X3) <= 1e-9 * std::abs(X3) && s.residual() >= -1e-9 * s.s1;
        }
        return t;
    };

    // trilinear
    std::size_t tcount = 50;
    u64 tgrid = 1, trange = 32, tq = 8;
    std::vector<u64> tseeds{1};
    double tcal = kTrilinearCalibration;
    auto* str = app.add_subcommand("trilinear", "quintilinear Kloosterman-fraction sum against its bound");
    str->add_option("--count", tcount, "random instances")->capture_default_str();
    str->add_option("--grid-seed", tgrid, "seed of the parameter grid")->capture_default_str();
    str->add_option("--max-range", trange, "C, D, N, R, S drawn from 1..max-range")->capture_default_str();
    str->add_option("--max-q", tq, "q drawn from 1..max-q")->capture_default_str();
    str->add_option("--seeds", tseeds, "comma-separated coefficient seeds")->delimiter(',')->capture_default_str();
    str->add_option("--calibration", tcal, "strict bound on |lhs| / bound")->capture_default_str();
    runners["trilinear"] = [&] {
        auto rep = theorem21_ratio_experiment(random_trilinear_grid(tcount, tgrid, trange, tq), tseeds, tcal);
        Table t{{"grid_seed", "seed", "C", "D", "N", "R", "S", "q", "lhs_abs", "bound", "ratio"}, {}, rep.ok};
        for (const auto& r : rep.rows)
            t.rows.push_back({num(tgrid), num(r.seed), num(r.p.C), num(r.p.D), num(r.p.N), num(r.p.R), num(r.p.S),
                              num(r.p.q), num(r.lhs_abs), num(r.bound), num(r.ratio)});
        return t;
    };

    // spectral-check
    std::vector<double> sX{1e-3, 1e-2, 1e-1, 1, 10, 100, 1000}, sT;
    for (int i = 0; i <= 20; ++i) sT.push_back(0.5 * i);
    double scal = kLemma44Calibration;
    auto* ssp = app.add_subcommand("spectral-check", "Bessel transforms of a bump: ratio against the envelope");
    ssp->add_option("--X", sX, "comma-separated scales")->delimiter(',')->capture_default_str();
    ssp->add_option("--t", sT, "comma-separated spectral parameters")->delimiter(',')->capture_default_str();
    ssp->add_option("--calibration", scal, "strict bound on the ratio")->capture_default_str();
    runners["spectral-check"] = [&] {
        Table t{{"X", "t", "ratio"}, {}, true};
        for (double X : sX) {
            auto rep = lemma44_check(X, sT, scal);
            for (std::size_t i = 0; i < rep.ts.size(); ++i) t.rows.push_back({num(X), num(rep.ts[i]), num(rep.ratios[i])});
            t.verified = t.verified && rep.ok;
        }
        double k0a = bessel_k_imag(0, 1), k0b = bessel_k0_series(1);
        t.verified = t.verified && std::abs(k0a - k0b) <= 1e-8;
        return t;
    };

    // poisson-check
    u64 pq = 50;
    std::vector<double> pM{100, 1000};
    double pcal = kPoissonCalibration;
    auto* sp = app.add_subcommand("poisson-check", "Poisson summation in progressions for a bump of width M");
    sp->add_option("--qmax", pq, "moduli 1..qmax")->capture_default_str();
    sp->add_option("--M", pM, "comma-separated bump half-widths")->delimiter(',')->capture_default_str();
    sp->add_option("--calibration", pcal, "C in the bound 1e-8 + C / q")->capture_default_str();
    runners["poisson-check"] = [&] {
        Table t{{"M", "q", "a", "lhs", "rhs", "difference", "tolerance"}, {}, true};
        for (double M : pM) {
            auto f = bump(-1, 1, M);
            for (u64 q = 1; q <= pq; ++q)
                for (u64 a = 0; a < q; ++a) {
                    if (gcd(a, q) != 1) continue;
                    auto r = poisson_check(f, q, i64(a));
                    double d = std::abs(r.lhs - r.rhs), tol = 1e-8 + pcal / double(q);
                    t.rows.push_back({num(M), num(q), num(a), num(r.lhs), num(r.rhs), num(d), num(tol)});
                    t.verified = t.verified && d <= tol;
                }
        }
        return t;
    };

    // sieve-bench
    std::vector<double> bx{1e8};
    auto* sb = app.add_subcommand("sieve-bench", "sieve-backed T(x) and T_2(x); timings on stderr");
    sb->add_option("--x", bx, "comma-separated x values")->delimiter(',')->capture_default_str();
    runners["sieve-bench"] = [&] {
        Table t{{"x", "t_sum", "t2"}, {}, true};
        for (double xv : bx) {
            u64 x = as_count(xv, "x");
            auto t0 = std::chrono::steady_clock::now();
            double T = t_sum(x);
            auto t1 = std::chrono::steady_clock::now();
            u64 T2 = tk_correlation(x, 2);
            auto t2 = std::chrono::steady_clock::now();
            err << "x=" << x << " t_sum " << std::chrono::duration<double>(t1 - t0).count() << " s, t2 "
                << std::chrono::duration<double>(t2 - t1).count() << " s, threads " << thread_count() << "\n";
            t.rows.push_back({num(x), num(T), num(T2)});
        }
        return t;
    };

    // config values become flags unless the command line already sets them
    std::vector<std::string> args = args_in;
    try {
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--config" || args[i].rfind("--config=", 0) == 0) {
                std::string path = args[i] == "--config" ? args[i + 1] : args[i].substr(9);
                auto cfg = load_config(path);
                std::set<std::string> given;
                for (const auto& a : args)
                    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
                bool has_sub = false;
                for (const auto& a : args) has_sub |= runners.count(a) > 0;
                std::vector<std::string> extra;
                for (const auto& [k, v] : cfg.params) {
                    if (given.count(k)) continue;
                    if (v == "true" || v == "false") {
                        if (v == "true") extra.push_back("--" + k);
                    } else {
                        extra.push_back("--" + k);
                        extra.push_back(v);
                    }
                }
                args.insert(args.end(), extra.begin(), extra.end());
                // global options may follow the subcommand
                if (!has_sub) args.insert(args.begin(), cfg.subcommand);
                break;
            }
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kBadInput;
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kBadInput;
    }
    // subcommand help is raised while parsing the subcommand
    CLI::App* sub = app.get_subcommands().front();

    set_thread_count(threads);
    Table t;
    try {
        t = runners.at(sub->get_name())();
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::out_of_range& e) {
        err << "invalid input: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::runtime_error& e) {
        err << "invalid input: " << e.what() << "\n";
        return kBadInput;
    }
    std::string csv = emit_csv(t.header, t.rows);
    if (out_path.empty()) {
        out << csv;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            err << "cannot write " << out_path << "\n";
            return kBadInput;
        }
        f << csv;
    }
    if (!t.verified) {
        err << sub->get_name() << ": verification failed\n";
        return mode == "strict" ? kVerifyFailed : kOk;
    }
    return kOk;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace kd::cli
