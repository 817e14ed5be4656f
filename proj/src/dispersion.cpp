#include "kd/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kd/characters.hpp"
#include "kd/parallel.hpp"
#include "kd/summation.hpp"

namespace kd {

u64 splitmix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double hash_unit(u64 seed, u64 stream, u64 index) {
    u64 h = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
    return double(h >> 11) * 0x1.0p-53;
}

namespace {

u64 uabs(i64 a) { return a < 0 ? u64(-(a + 1)) + 1 : u64(a); }

std::vector<cplx> make_coefficients(u64 lo, u64 count, Coefficients kind, unsigned A, u64 seed, u64 stream,
                                    bool squarefree) {
    std::vector<cplx> out(count);
    for (u64 i = 0; i < count; ++i) {
        u64 n = lo + 1 + i;
        auto f = factorize(n);
        if (squarefree && moebius(f) == 0) continue;
        switch (kind) {
            case Coefficients::Zero:
                break;
            case Coefficients::Ones:
                out[i] = 1.0;
                break;
            case Coefficients::Random: {
                double amp = std::pow(double(tau_k(f, 2)), double(A)) * hash_unit(seed, 2 * stream, n);
                double ph = 2 * std::numbers::pi * hash_unit(seed, 2 * stream + 1, n);
                out[i] = std::polar(amp, ph);
                break;
            }
        }
    }
    return out;
}

void check_bounds(const std::vector<cplx>& c, u64 lo, unsigned A, const char* name) {
    for (u64 i = 0; i < c.size(); ++i) {
        u64 n = lo + 1 + i;
        double cap = std::pow(double(tau_k(factorize(n), 2)), double(A));
        if (std::abs(c[i]) > cap * (1 + 1e-12))
            throw std::invalid_argument(std::string(name) + " coefficient at " + std::to_string(n) +
                                        " exceeds the divisor bound");
    }
}

// integers strictly inside the support of w where w > 0
std::vector<u64> support_integers(const SmoothTestFunction& w) {
    std::vector<u64> out;
    u64 lo = u64(std::floor(std::max(0.0, w.support_lo()))) + 1;
    u64 hi = u64(std::ceil(w.support_hi()));
    for (u64 k = std::max<u64>(lo, 1); k < hi + 1; ++k)
        if (w(double(k)) > 0) out.push_back(k);
    return out;
}

struct Modulus {
    u64 q;
    double weight;
    double phi;
    u64 c;  // a1 / a2 mod q
    u64 d;  // a2 / a1 mod q
};

std::vector<Modulus> moduli(const DispersionConfig& cfg) {
    std::vector<Modulus> out;
    u64 a12 = uabs(cfg.a1) * uabs(cfg.a2);
    for (u64 q : support_integers(cfg.gamma_weight)) {
        if (gcd(q, a12) != 1) continue;
        u64 i1 = *modinv(cfg.a1, q), i2 = *modinv(cfg.a2, q);
        out.push_back({q, cfg.gamma_weight(double(q)), double(euler_phi(factorize(q))),
                       mulmod(mod_floor(cfg.a1, q), i2, q), mulmod(mod_floor(cfg.a2, q), i1, q)});
    }
    return out;
}

std::vector<u64> inverse_table(u64 q) {
    std::vector<u64> inv(q, 0);
    for (u64 r = 0; r < q; ++r)
        if (gcd(r, q) == 1) inv[r] = q == 1 ? 0 : *modinv(i64(r), q);
    return inv;
}

// beta summed over residue classes mod q, restricted to (n, a2) = 1
std::vector<cplx> beta_classes(const DispersionConfig& cfg, u64 q, u64 coprime_to) {
    std::vector<cplx> out(q);
    for (u64 n = cfg.N + 1; n <= 2 * cfg.N; ++n)
        if (gcd(n, coprime_to) == 1) out[n % q] += cfg.beta_at(n);
    return out;
}

std::vector<cplx> alpha_classes(const DispersionConfig& cfg, u64 q) {
    std::vector<cplx> out(q);
    for (u64 m = cfg.M + 1; m <= 2 * cfg.M; ++m) out[m % q] += cfg.alpha_at(m);
    return out;
}

}  // namespace

DispersionConfig make_dispersion_config(u64 M, u64 N, u64 Q, u64 R, i64 a1, i64 a2, u64 seed,
                                        Coefficients alpha_kind, Coefficients beta_kind, bool beta_squarefree,
                                        unsigned A) {
    if (M == 0 || N == 0 || Q == 0 || R == 0) throw std::invalid_argument("dispersion: M, N, Q, R must be positive");
    DispersionConfig cfg;
    cfg.M = M;
    cfg.N = N;
    cfg.Q = Q;
    cfg.R = R;
    cfg.a1 = a1;
    cfg.a2 = a2;
    cfg.A = A;
    cfg.seed = seed;
    cfg.beta_squarefree = beta_squarefree;
    cfg.alpha = make_coefficients(M, M, alpha_kind, A, seed, 0, false);
    cfg.beta = make_coefficients(N, N, beta_kind, A, seed, 1, beta_squarefree);
    cfg.gamma_weight = bump(0.5, 2.5, double(Q));
    cfg.alpha_majorant = bump(0.5, 2.5, double(M));
    validate(cfg);
    return cfg;
}

void validate(const DispersionConfig& cfg) {
    if (cfg.M == 0 || cfg.N == 0 || cfg.Q == 0 || cfg.R == 0)
        throw std::invalid_argument("dispersion: M, N, Q, R must be positive");
    if (cfg.a1 == 0 || cfg.a2 == 0) throw std::invalid_argument("dispersion: a1, a2 must be nonzero");
    if (cfg.alpha.size() != cfg.M || cfg.beta.size() != cfg.N)
        throw std::invalid_argument("dispersion: coefficient vectors must cover (M, 2M] and (N, 2N]");
    check_bounds(cfg.alpha, cfg.M, cfg.A, "alpha");
    check_bounds(cfg.beta, cfg.N, cfg.A, "beta");
    if (cfg.beta_squarefree)
        for (u64 i = 0; i < cfg.N; ++i)
            if (cfg.beta[i] != cplx{} && moebius(factorize(cfg.N + 1 + i)) == 0)
                throw std::invalid_argument("dispersion: beta not supported on squarefree integers");
    const auto& g = cfg.gamma_weight;
    double Q = double(cfg.Q);
    if (g.support_lo() < Q / 2 - 1e-9 || g.support_hi() > 5 * Q / 2 + 1e-9)
        throw std::invalid_argument("dispersion: gamma must be supported in (Q/2, 5Q/2)");
    for (u64 q = cfg.Q + 1; q <= 2 * cfg.Q; ++q)
        if (g(double(q)) < 1 - 1e-12) throw std::invalid_argument("dispersion: gamma must be 1 on (Q, 2Q]");
    for (u64 q : support_integers(g))
        if (g(double(q)) > 1 + 1e-12) throw std::invalid_argument("dispersion: gamma must take values in [0, 1]");
    const auto& a = cfg.alpha_majorant;
    double M = double(cfg.M);
    if (a.support_lo() < M / 2 - 1e-9 || a.support_hi() > 3 * M + 1e-9)
        throw std::invalid_argument("dispersion: alpha majorant must be supported in [M/2, 3M]");
    for (u64 m = cfg.M + 1; m <= 2 * cfg.M; ++m)
        if (a(double(m)) < 1 - 1e-12) throw std::invalid_argument("dispersion: alpha majorant must be >= 1 on (M, 2M]");
}

std::vector<double> u_r_table(u64 q, u64 R) {
    if (q == 0 || R == 0) throw std::invalid_argument("u_r: q and R must be positive");
    std::vector<double> out(q, 0.0);
    if (q <= R) return out;
    auto F = family_sum_table(q, R);
    double phi = double(euler_phi(factorize(q)));
    for (u64 r = 0; r < q; ++r)
        if (gcd(r, q) == 1) out[r] = (r == 1 ? 1.0 : 0.0) - F[r] / phi;
    return out;
}

double u_r(i64 n, u64 q, u64 R) {
    if (q == 0 || R == 0) throw std::invalid_argument("u_r: q and R must be positive");
    if (q <= R || gcd(mod_floor(n, q), q) != 1) return 0.0;
    return u_r_table(q, R)[mod_floor(n, q)];
}

double u_r_split(i64 n, u64 q, u64 R) {
    if (q == 0 || R == 0) throw std::invalid_argument("u_r: q and R must be positive");
    u64 r = mod_floor(n, q);
    bool unit = gcd(r, q) == 1;
    double phi = double(euler_phi(factorize(q)));
    double v = (r == 1 % q ? 1.0 : 0.0) - (unit ? 1.0 : 0.0) / phi;
    double s = 0;
    for (const auto& chi : chars_with_conductor_at_most(q, R))
        if (chi.conductor() > 1) s += chi(i64(r)).real();
    return v - s / phi;
}

cplx theorem51_lhs(const DispersionConfig& cfg) {
    validate(cfg);
    u64 a12 = uabs(cfg.a1) * uabs(cfg.a2);
    u64 qlo = std::max(cfg.Q + 1, cfg.R + 1);
    std::vector<u64> qs;
    for (u64 q = qlo; q <= 2 * cfg.Q; ++q)
        if (gcd(q, a12) == 1) qs.push_back(q);
    auto parts = parallel_map<cplx>(qs.size(), [&](std::size_t i) {
        u64 q = qs[i];
        auto am = alpha_classes(cfg, q);
        auto bn = beta_classes(cfg, q, uabs(cfg.a2));
        auto F = family_sum_table(q, cfg.R);
        auto inv = inverse_table(q);
        double phi = double(euler_phi(factorize(q)));
        u64 d = mulmod(mod_floor(cfg.a2, q), *modinv(cfg.a1, q), q);
        cplx diag, proj;
        for (u64 s = 0; s < q; ++s) {
            if (gcd(s, q) != 1 || am[s] == cplx{}) continue;
            u64 sd = mulmod(s, d, q);
            diag += am[s] * bn[inv[sd]];
            cplx inner;
            for (u64 t = 0; t < q; ++t)
                if (bn[t] != cplx{}) inner += bn[t] * F[mulmod(sd, t, q)];
            proj += am[s] * inner;
        }
        return diag - proj / phi;
    });
    CompensatedComplexSum acc;
    for (auto& v : parts) acc.add(v);
    return acc.value();
}

double bv_range_lhs(const DispersionConfig& cfg) {
    validate(cfg);
    std::vector<u64> qs;
    for (u64 q = std::max(cfg.Q + 1, cfg.R + 1); q <= 2 * cfg.Q; ++q) qs.push_back(q);
    auto parts = parallel_map<double>(qs.size(), [&](std::size_t i) {
        u64 q = qs[i];
        auto am = alpha_classes(cfg, q);
        auto bn = beta_classes(cfg, q, 1);
        auto F = family_sum_table(q, cfg.R);
        auto inv = inverse_table(q);
        double phi = double(euler_phi(factorize(q)));
        std::vector<cplx> conv(q);
        for (u64 s = 0; s < q; ++s) {
            if (gcd(s, q) != 1 || am[s] == cplx{}) continue;
            for (u64 t = 0; t < q; ++t)
                if (gcd(t, q) == 1) conv[mulmod(s, t, q)] += am[s] * bn[t];
        }
        double best = 0;
        for (u64 a = 1; a < q; ++a) {
            if (gcd(a, q) != 1) continue;
            cplx proj;
            for (u64 x = 0; x < q; ++x)
                if (conv[x] != cplx{}) proj += conv[x] * F[mulmod(x, inv[a], q)];
            best = std::max(best, std::abs(conv[a] - proj / phi));
        }
        return best;
    });
    CompensatedSum acc;
    for (double v : parts) acc.add(v);
    return acc.value();
}

DispersionSums dispersion_sums(const DispersionConfig& cfg) {
    validate(cfg);
    auto mods = moduli(cfg);
    // per modulus: A and B as functions of m mod q, already carrying gamma
    struct Tables {
        std::vector<cplx> A, B;
    };
    auto tabs = parallel_map<Tables>(mods.size(), [&](std::size_t i) {
        const auto& md = mods[i];
        u64 q = md.q;
        auto G = beta_classes(cfg, q, uabs(cfg.a2));
        auto F = family_sum_table(q, cfg.R);
        auto inv = inverse_table(q);
        Tables t{std::vector<cplx>(q), std::vector<cplx>(q)};
        for (u64 s = 0; s < q; ++s) {
            if (gcd(s, q) != 1) continue;
            t.A[s] = md.weight * G[mulmod(md.c, inv[s], q)];
            u64 sd = mulmod(s, md.d, q);
            cplx b;
            for (u64 r = 0; r < q; ++r)
                if (G[r] != cplx{}) b += G[r] * F[mulmod(sd, r, q)];
            t.B[s] = md.weight / md.phi * b;
        }
        return t;
    });
    auto ms = support_integers(cfg.alpha_majorant);
    struct Row {
        double s1, s3;
        cplx s2;
    };
    auto rows = parallel_map<Row>(ms.size(), [&](std::size_t j) {
        u64 m = ms[j];
        cplx A, B;
        for (std::size_t i = 0; i < mods.size(); ++i) {
            u64 r = m % mods[i].q;
            A += tabs[i].A[r];
            B += tabs[i].B[r];
        }
        double w = cfg.alpha_majorant(double(m));
        return Row{w * std::norm(A), w * std::norm(B), w * A * std::conj(B)};
    });
    CompensatedSum a1, a3;
    CompensatedComplexSum a2;
    for (const auto& r : rows) {
        a1.add(r.s1);
        a2.add(r.s2);
        a3.add(r.s3);
    }
    return {a1.value(), a2.value(), a3.value()};
}

double s1(const DispersionConfig& cfg) { return dispersion_sums(cfg).s1; }
cplx s2(const DispersionConfig& cfg) { return dispersion_sums(cfg).s2; }
double s3(const DispersionConfig& cfg) { return dispersion_sums(cfg).s3; }
double dispersion_residual(const DispersionConfig& cfg) { return dispersion_sums(cfg).residual(); }

namespace {

struct MainTerms {
    cplx x1, x2, x3;
};

// beta over classes mod g | q for (n, q a2) = 1, with g running over the divisors of q
struct ClassTables {
    std::vector<u64> divs;
    std::vector<std::vector<cplx>> u;
    std::vector<std::vector<double>> psi;  // sum over units b mod q, b = t (g), of F_q(b)

    std::size_t at(u64 g) const { return std::lower_bound(divs.begin(), divs.end(), g) - divs.begin(); }
};

enum class Which { X1, X2, X3 };

cplx main_term(const DispersionConfig& cfg, Which which) {
    validate(cfg);
    auto mods = moduli(cfg);
    u64 top = 0;
    for (const auto& m : mods) top = std::max(top, m.q);
    auto tabs = parallel_map<ClassTables>(mods.size(), [&](std::size_t i) {
        u64 q = mods[i].q;
        ClassTables t;
        t.divs = divisors(factorize(q));
        std::vector<double> F;
        if (which == Which::X2) F = family_sum_table(q, cfg.R);
        for (u64 g : t.divs) {
            std::vector<cplx> u(g);
            for (u64 n = cfg.N + 1; n <= 2 * cfg.N; ++n)
                if (gcd(n, q * uabs(cfg.a2)) == 1) u[n % g] += cfg.beta_at(n);
            t.u.push_back(std::move(u));
            if (which == Which::X2) {
                std::vector<double> p(g, 0.0);
                for (u64 b = 0; b < q; ++b)
                    if (gcd(b, q) == 1) p[b % g] += F[b];
                t.psi.push_back(std::move(p));
            }
        }
        return t;
    });
    std::vector<std::vector<double>> Fg(top + 1);
    std::vector<std::vector<u64>> inv(top + 1);
    std::vector<double> phig(top + 1, 0.0);
    std::vector<char> need(top + 1, 0);
    for (std::size_t i = 0; i < mods.size(); ++i)
        for (std::size_t j = 0; j < mods.size(); ++j) need[gcd(mods[i].q, mods[j].q)] = 1;
    for (u64 g = 1; g <= top; ++g) {
        if (!need[g]) continue;
        inv[g] = inverse_table(g);
        phig[g] = double(euler_phi(factorize(g)));
        if (which == Which::X3) Fg[g] = family_sum_table(g, cfg.R);
    }
    auto rows = parallel_map<cplx>(mods.size(), [&](std::size_t i) {
        CompensatedComplexSum acc;
        u64 q1 = mods[i].q;
        for (std::size_t j = 0; j < mods.size(); ++j) {
            u64 q2 = mods[j].q;
            u64 g = gcd(q1, q2);
            const auto& U1 = tabs[i].u[tabs[i].at(g)];
            std::size_t k2 = tabs[j].at(g);
            const auto& U2 = tabs[j].u[k2];
            const auto& iv = inv[g];
            double w = mods[i].weight * mods[j].weight / (double(q1 / g) * double(q2));
            cplx s;
            if (which == Which::X1) {
                for (u64 r = 0; r < g; ++r) s += U1[r] * std::conj(U2[r]);
            } else {
                for (u64 r1 = 0; r1 < g; ++r1) {
                    if (U1[r1] == cplx{} || gcd(r1, g) != 1) continue;
                    cplx inner;
                    for (u64 r2 = 0; r2 < g; ++r2) {
                        if (U2[r2] == cplx{} || gcd(r2, g) != 1) continue;
                        double k = which == Which::X3 ? Fg[g][mulmod(r1, iv[r2], g)]
                                                      : tabs[j].psi[k2][mulmod(r2, iv[r1], g)];
                        inner += std::conj(U2[r2]) * k;
                    }
                    s += U1[r1] * inner;
                }
                w /= which == Which::X3 ? phig[g] : mods[j].phi;
            }
            acc.add(w * s);
        }
        return acc.value();
    });
    CompensatedComplexSum total;
    for (auto& v : rows) total.add(v);
    return total.value();
}

}  // namespace

double x1(const DispersionConfig& cfg) { return main_term(cfg, Which::X1).real(); }
double x2(const DispersionConfig& cfg) { return main_term(cfg, Which::X2).real(); }
double x2_imag(const DispersionConfig& cfg) { return main_term(cfg, Which::X2).imag(); }
double x3(const DispersionConfig& cfg) { return main_term(cfg, Which::X3).real(); }

ResidualTrend residual_trend(u64 M, u64 N, u64 Q, const std::vector<u64>& Rs, const std::vector<u64>& seeds,
                             i64 a1, i64 a2) {
    if (Rs.empty() || seeds.empty()) throw std::invalid_argument("residual_trend: empty grid");
    ResidualTrend out{M, N, Q, Rs, {}, 0.0};
    double x = double(M) * double(N);
    double ll = std::log(std::log(x));
    for (u64 R : Rs) {
        CompensatedSum acc;
        for (u64 seed : seeds) {
            auto cfg = make_dispersion_config(M, N, Q, R, a1, a2, seed, Coefficients::Random, Coefficients::Random, true);
            acc.add(dispersion_residual(cfg) * double(R) * double(R) / (double(M) * double(N) * double(N)));
        }
        double v = acc.value() / double(seeds.size());
        out.normalized.push_back(v);
        if (v > 1) out.log_power = std::max(out.log_power, std::log(v) / ll);
    }
    return out;
}

bool congruence_identity_524(i64 q0, i64 q1, i64 q2, i64 a1, i64 a2, i64 n0, i64 n1, i64 n2) {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("congruence identity: ") + what); };
    if (q0 < 1 || q1 < 1 || q2 < 1 || n0 < 1 || n1 < 1 || n2 < 1) fail("q0, q1, q2, n0, n1, n2 must be positive");
    if (a1 == 0 || a2 == 0) fail("a1, a2 must be nonzero");
    auto g = [](i64 a, i64 b) { return gcd_signed(a, b); };
    if (g(q1, q2) != 1) fail("(q1, q2) != 1");
    if (g(q1 * q2, a1) != 1 || g(q1 * q2, a2) != 1) fail("(q1 q2, a1 a2) != 1");
    if (g(q0, a1) != 1 || g(q0, a2) != 1) fail("(q0, a1 a2) != 1");
    if (g(n1, n2) != 1) fail("(n1, n2) != 1");
    for (i64 nj : {n1, n2}) {
        i64 qj = nj == n1 ? q1 : q2;
        if (g(n0 * nj, q0 * qj) != 1 || g(n0 * nj, a2) != 1) fail("(n0 nj, q0 qj a2) != 1");
    }
    if ((n1 - n2) % q0 != 0) fail("n1 != n2 mod q0");
    if (moebius(factorize(u64(n0) * u64(n1))) == 0) fail("n0 n1 is not squarefree");

    auto inv = [&](i128 a, i128 m) -> i128 {
        i128 r = a % m;
        if (r < 0) r += m;
        auto v = modinv(i64(r), u64(m));
        if (!v) fail("non-invertible residue");
        return i128(*v);
    };
    // mu mod q0 q1 q2 from its two defining congruences
    i128 m1 = i128(q0) * q1, m2 = i128(q0) * q2;
    i128 r1 = inv(i128(a2) * n0 * n1, m1) * a1 % m1;
    i128 r2 = inv(i128(a2) * n0 * n2, m2) * a1 % m2;
    auto mu = crt(u64(r1 < 0 ? r1 + m1 : r1), u64(m1), u64(r2 < 0 ? r2 + m2 : r2), u64(m2));
    if (!mu) fail("inconsistent residues for mu");
    i128 iota = inv(i128(q1) * a2 * n0 * n2, i128(n1) * q2);
    i128 kappa = inv(i128(q0) * q1 * q2 * n1, i128(uabs(a2)) * n0);

    i128 lhs = i128(mu->r) * a2 * n0 * n1;
    i128 rhs = i128(a1) + i128(a1) * (n1 - n2) * iota * q1 * a2 * n0 - i128(a1) * kappa * q0 * q1 * q2 * n1;
    auto same = [&](i128 mod) {
        if (mod < 0) mod = -mod;
        i128 d = (lhs - rhs) % mod;
        return d == 0;
    };
    return same(i128(a2) * n0) && same(i128(n1) * q0) && same(i128(q0) * q1) && same(i128(q0) * q2);
}

cplx TrilinearInstance::b_at(u64 n, u64 r, u64 s) const {
    if (n < 1 || n > N || r <= R || r > 2 * R || s <= S || s > 2 * S) return {};
    return b[((n - 1) * R + (r - R - 1)) * S + (s - S - 1)];
}

double TrilinearInstance::norm_b() const {
    CompensatedSum acc;
    for (auto v : b) acc.add(std::norm(v));
    return std::sqrt(acc.value());
}

TrilinearInstance make_trilinear_instance(u64 C, u64 D, u64 N, u64 R, u64 S, u64 q, u64 seed) {
    if (!C || !D || !N || !R || !S || !q) throw std::invalid_argument("trilinear: parameters must be positive");
    TrilinearInstance t;
    t.C = C;
    t.D = D;
    t.N = N;
    t.R = R;
    t.S = S;
    t.q = q;
    auto unit = [&](u64 stream) {
        for (u64 k = 0;; ++k) {
            u64 c = u64(hash_unit(seed, stream, k) * double(q));
            if (gcd(c, q) == 1) return i64(c);
        }
    };
    t.c0 = unit(10);
    t.d0 = unit(11);
    t.b.resize(N * R * S);
    for (u64 i = 0; i < t.b.size(); ++i)
        t.b[i] = std::polar(hash_unit(seed, 12, i), 2 * std::numbers::pi * hash_unit(seed, 13, i));
    t.gc = bump(1.0, 2.0, double(C));
    t.gd = bump(1.0, 2.0, double(D));
    validate(t);
    return t;
}

void validate(const TrilinearInstance& t) {
    if (!t.C || !t.D || !t.N || !t.R || !t.S || !t.q) throw std::invalid_argument("trilinear: parameters must be positive");
    if (gcd_signed(t.c0 * t.d0, i64(t.q)) != 1) throw std::invalid_argument("trilinear: (c0 d0, q) != 1");
    if (t.b.size() != t.N * t.R * t.S) throw std::invalid_argument("trilinear: b must cover (0, N] x (R, 2R] x (S, 2S]");
    if (t.gc.support_lo() < double(t.C) - 1e-9 || t.gc.support_hi() > 2.0 * double(t.C) + 1e-9 ||
        t.gd.support_lo() < double(t.D) - 1e-9 || t.gd.support_hi() > 2.0 * double(t.D) + 1e-9)
        throw std::invalid_argument("trilinear: weight must be supported in (C, 2C) x (D, 2D)");
}

cplx theorem21_lhs(const TrilinearInstance& t) {
    validate(t);
    u64 q = t.q;
    std::vector<u64> cs, ds;
    for (u64 c : support_integers(t.gc))
        if (mod_floor(i64(c) - t.c0, q) == 0) cs.push_back(c);
    for (u64 d : support_integers(t.gd))
        if (mod_floor(i64(d) - t.d0, q) == 0) ds.push_back(d);
    double loops = double(cs.size()) * double(ds.size()) * double(t.N) * double(t.R) * double(t.S);
    if (loops > kTrilinearLoopBudget) throw std::runtime_error("trilinear: loop budget exceeded");
    if (t.g_scale == 0) return {};
    auto parts = parallel_map<cplx>(cs.size(), [&](std::size_t i) {
        u64 c = cs[i];
        double wc = t.gc(double(c));
        cplx acc;
        for (u64 s = t.S + 1; s <= 2 * t.S; ++s) {
            u64 m = s * c;
            if (gcd(q, m) != 1) continue;
            std::vector<cplx> root(m);
            for (u64 k = 0; k < m; ++k) root[k] = std::polar(1.0, 2 * std::numbers::pi * double(k) / double(m));
            for (u64 d : ds) {
                if (gcd(d, m) != 1) continue;
                double w = wc * t.gd(double(d));
                for (u64 r = t.R + 1; r <= 2 * t.R; ++r) {
                    if (gcd(r, m) != 1) continue;
                    u64 x = m == 1 ? 0 : *modinv(i64(mulmod(r, d, m)), m);
                    cplx inner;
                    for (u64 n = 1; n <= t.N; ++n) inner += t.b_at(n, r, s) * root[mulmod(n, x, m)];
                    acc += w * inner;
                }
            }
        }
        return acc;
    });
    cplx total;
    for (auto& v : parts) total += v;
    return t.g_scale * total;
}

double theorem21_k2(double C, double D, double N, double R, double S, double q) {
    return q * C * S * (R * S + N) * (C + R * D) + C * C * D * S * std::sqrt((R * S + N) * R) + D * D * N * R / S;
}

double theorem21_bound(const TrilinearInstance& t) {
    double K2 = theorem21_k2(double(t.C), double(t.D), double(t.N), double(t.R), double(t.S), double(t.q));
    return std::pow(double(t.q), 1.5) * std::sqrt(K2) * t.norm_b();
}

std::vector<TrilinearParams> random_trilinear_grid(std::size_t count, u64 seed, u64 max_range, u64 max_q) {
    std::vector<TrilinearParams> out;
    auto pick = [&](u64 stream, u64 i, u64 top) { return 1 + u64(hash_unit(seed, stream, i) * double(top)); };
    for (u64 i = 0; i < count; ++i)
        out.push_back({pick(20, i, max_range), pick(21, i, max_range), pick(22, i, max_range), pick(23, i, max_range),
                       pick(24, i, max_range), pick(25, i, max_q)});
    return out;
}

TrilinearReport theorem21_ratio_experiment(const std::vector<TrilinearParams>& grid, const std::vector<u64>& seeds,
                                           double calibration) {
    TrilinearReport rep{{}, 0.0, true};
    for (const auto& p : grid)
        for (u64 seed : seeds) {
            auto inst = make_trilinear_instance(p.C, p.D, p.N, p.R, p.S, p.q, seed);
            double lhs = std::abs(theorem21_lhs(inst));
            double bound = theorem21_bound(inst);
            double ratio = bound > 0 ? lhs / bound : 0.0;
            rep.rows.push_back({p, seed, lhs, bound, ratio});
            rep.max_ratio = std::max(rep.max_ratio, ratio);
        }
    rep.ok = rep.max_ratio <= calibration;
    return rep;
}

}  // namespace kd
