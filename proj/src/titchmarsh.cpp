#include "kd/titchmarsh.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <stdexcept>

#include "kd/sieve.hpp"

namespace kd {

namespace {

// tau(n - 1) on [lo, hi], with tau(0) = 0
std::vector<u64> tau_shifted(u64 lo, u64 hi, const std::vector<std::uint32_t>& base) {
    if (lo > 1) return detail::tau_k_block(lo - 1, hi - 1, 2, base);
    std::vector<u64> t{0};
    if (hi >= 2) {
        auto rest = detail::tau_k_block(1, hi - 1, 2, base);
        t.insert(t.end(), rest.begin(), rest.end());
    }
    return t;
}

// Lambda(n) tau(n - 1) on [lo, hi]
std::vector<double> lambda_tau_shift(u64 lo, u64 hi, const std::vector<std::uint32_t>& base) {
    auto lam = detail::lambda_block(lo, hi, base);
    auto tau = tau_shifted(lo, hi, base);
    std::vector<double> v(lam.size(), 0.0);
    for (std::size_t i = 0; i < lam.size(); ++i)
        if (lam[i].p) v[i] = std::log(double(lam[i].p)) * double(tau[i]);
    return v;
}

std::vector<double> lambda_values(u64 lo, u64 hi, const std::vector<std::uint32_t>& base) {
    auto lam = detail::lambda_block(lo, hi, base);
    std::vector<double> v(lam.size(), 0.0);
    for (std::size_t i = 0; i < lam.size(); ++i)
        if (lam[i].p) v[i] = std::log(double(lam[i].p));
    return v;
}

// number of e >= 1 with p^e <= y
unsigned power_count(u64 p, u64 y) {
    unsigned e = 0;
    for (u64 pe = 1; pe <= y / p; pe *= p) ++e;
    return e;
}

// psi_q(y) = psi(y) - sum over p | q of log p * #{p^e <= y}
double prime_power_share(const FactoredInt& f, u64 y) {
    double s = 0;
    for (const auto& pp : f.factors) s += std::log(double(pp.p)) * power_count(pp.p, y);
    return s;
}

}  // namespace

TitchmarshConstants constants_with_cutoff(u64 P) {
    if (P < 2) throw std::invalid_argument("constants: cutoff must be at least 2");
    auto primes = primes_up_to(P);
    CompensatedSum log_c1, c2;
    for (std::uint32_t p32 : primes) {
        double p = p32;
        log_c1.add(std::log1p(1.0 / (p * (p - 1))));
        c2.add(std::log(p) / (1.0 + p * (p - 1)));
    }
    TitchmarshConstants c;
    using boost::math::zeta;
    c.c1 = zeta(2.0) * zeta(3.0) / zeta(6.0);
    c.c1_product = std::exp(log_c1.value());
    c.c2 = c2.value();
    c.gamma = double(kEulerGamma);
    c.cutoff = P;
    double Pd = double(P);
    c.c1_tail = c.c1_product * std::expm1(1.0 / Pd);
    c.c2_tail = (std::log(Pd) + 1.0) * (1.0 / Pd + 1.0 / (Pd * Pd));
    return c;
}

TitchmarshConstants constants(double target) {
    if (!(target >= 1e-12)) throw std::invalid_argument("constants: target must be >= 1e-12");
    constexpr u64 kMaxCutoff = u64(1) << 28;
    for (u64 P = u64(1) << 10; P <= kMaxCutoff; P <<= 1) {
        double Pd = double(P);
        double c2_tail = (std::log(Pd) + 1.0) * (1.0 / Pd + 1.0 / (Pd * Pd));
        double c1_tail = 2.0 * std::expm1(1.0 / Pd);
        if (std::max(c1_tail, c2_tail) <= target) return constants_with_cutoff(P);
    }
    throw std::domain_error("constants: precision target out of reach of the prime cutoff budget");
}

const TitchmarshConstants& default_constants() {
    static const TitchmarshConstants c = constants_with_cutoff(10000000);
    return c;
}

std::pair<double, double> constants_q(u64 q) {
    if (q == 0) throw std::invalid_argument("constants_q: q must be positive");
    const auto& c = default_constants();
    auto f = factorize(q);
    double c1 = c.c1 / double(euler_phi(f)), c2 = c.c2;
    for (const auto& pp : f.factors) {
        double p = double(pp.p);
        c1 /= 1.0 + 1.0 / (p * (p - 1));
        c2 -= std::log(p) / (1.0 + p * (p - 1));
    }
    return {c1, c2};
}

double LogCombination::value() const {
    CompensatedSum s;
    for (auto [p, c] : coeff) s.add(double(c) * std::log(double(p)));
    return s.value();
}

double t_sum(u64 x) {
    if (x < 2) return 0.0;
    auto base = base_primes(x);
    auto r = progression_sums<CompensatedSum>(x, {{1, 0, 0}}, {}, [&](u64 lo, u64 hi) { return lambda_tau_shift(lo, hi, *base); });
    return r.progressions[0].value();
}

LogCombination t_sum_symbolic(u64 x) {
    if (x > 1000000) throw std::invalid_argument("t_sum_symbolic: x too large");
    LogCombination out;
    for (u64 n = 2; n <= x; ++n) {
        auto p = prime_power_base(factorize(n));
        if (p) out.coeff[*p] += tau_k(factorize(n - 1), 2);
    }
    return out;
}

std::vector<double> t_sum_series(u64 X) {
    std::vector<double> out(X + 1, 0.0);
    if (X < 2) return out;
    auto base = base_primes(X);
    auto v = lambda_tau_shift(1, X, *base);
    CompensatedSum s;
    for (u64 n = 1; n <= X; ++n) {
        s.add(v[n - 1]);
        out[n] = s.value();
    }
    return out;
}

u64 tau_shift_prime_sum(u64 x) {
    if (x < 2) return 0;
    auto base = base_primes(x);
    auto r = progression_sums<ExactSum>(x, {{1, 0, 0}}, {}, [&](u64 lo, u64 hi) {
        auto lam = detail::lambda_block(lo, hi, *base);
        auto shift = tau_shifted(lo, hi, *base);
        std::vector<u64> v(lam.size(), 0);
        for (std::size_t i = 0; i < lam.size(); ++i)
            if (lam[i].p && lam[i].e == 1) v[i] = shift[i];
        return v;
    });
    return r.progressions[0].value();
}

double main_term(double x) {
    const auto& c = default_constants();
    return c.c1 * x * (std::log(x) + 2 * c.gamma - 1 - 2 * c.c2);
}

double li(double x) {
    if (!(x > 0) || x == 1) throw std::domain_error("li: need x > 0, x != 1");
    return boost::math::expint(std::log(x));
}

double corollary13_main(double x) {
    const auto& c = default_constants();
    return c.c1 * (x + 2 * li(x) * (c.gamma - c.c2));
}

double exceptional_term(double x, u64 qt, double beta) {
    if (!(beta > 0 && beta < 1)) throw std::invalid_argument("exceptional_term: beta must lie in (0, 1)");
    auto [c1q, c2q] = constants_q(qt);
    double g = default_constants().gamma;
    double xb = std::pow(x, beta);
    return -c1q * (xb / beta) * (std::log(x / (double(qt) * double(qt))) + 2 * g - 1 / beta - 2 * c2q);
}

HyperbolaDecomposition hyperbola_decomposition(u64 x) {
    if (x < 4) throw std::invalid_argument("hyperbola_decomposition: x must be at least 4");
    HyperbolaDecomposition h;
    h.t_direct = t_sum(x);
    u64 r = isqrt(x);
    std::vector<ProgressionQuery> qs;
    for (u64 q = 1; q <= r; ++q) qs.push_back({q, 1 % q, q * q});
    auto base = base_primes(x);
    auto sums = progression_sums<CompensatedSum>(x, qs, {}, [&](u64 lo, u64 hi) { return lambda_values(lo, hi, *base); });
    CompensatedSum hyp;
    for (const auto& s : sums.progressions) hyp.add(2 * s.value());
    h.t_hyperbola = hyp.value();
    CompensatedSum corr;
    for (u64 m = 1; m * m + 1 <= x; ++m) corr.add(von_mangoldt(factorize(m * m + 1)));
    h.correction = corr.value();
    double slack = 1e-6 + 1e-12 * std::abs(h.t_direct);
    if (std::abs(h.t_direct - (h.t_hyperbola - h.correction)) > slack)
        throw std::logic_error("hyperbola_decomposition: identity failed");
    return h;
}

double theorem62_lhs(u64 x, u64 Q, i64 a1, i64 a2) {
    if (a1 == 0 || a2 == 0) throw std::invalid_argument("theorem62_lhs: a1, a2 must be nonzero");
    if (Q == 0) return 0.0;
    u64 a12 = checked_mul(u64(std::abs(a1)), u64(std::abs(a2)));
    std::vector<ProgressionQuery> qs{{1, 0, 0}};
    std::vector<u64> moduli{1};
    for (u64 q = 2; q <= Q; ++q) {
        if (gcd(q, a12) != 1) continue;
        u64 r = mulmod(mod_floor(a1, q), *modinv(a2, q), q);
        qs.push_back({q, r, 0});
        moduli.push_back(q);
    }
    auto base = base_primes(std::max<u64>(x, 2));
    auto sums = progression_sums<CompensatedSum>(x, qs, {}, [&](u64 lo, u64 hi) { return lambda_values(lo, hi, *base); });
    double psi_x = sums.progressions[0].value();
    CompensatedSum total;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        auto f = factorize(moduli[i]);
        double psi_q = psi_x - prime_power_share(f, x);
        total.add(sums.progressions[i].value() - psi_q / double(euler_phi(f)));
    }
    return total.value();
}

double prop63_lhs(u64 x, i64 a) {
    u64 r = isqrt(x);
    u64 aa = u64(std::abs(a));
    std::vector<ProgressionQuery> qs;
    std::vector<u64> moduli, points{x};
    for (u64 q = 1; q <= r; ++q) {
        if (gcd(q, aa) != 1) continue;
        qs.push_back({q, mod_floor(a, q), q * q});
        moduli.push_back(q);
        points.push_back(q * q);
    }
    auto base = base_primes(std::max<u64>(x, 2));
    auto sums = progression_sums<CompensatedSum>(x, qs, points, [&](u64 lo, u64 hi) { return lambda_values(lo, hi, *base); });
    double psi_x = sums.prefixes[0].value();
    CompensatedSum total;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        u64 q = moduli[i];
        auto f = factorize(q);
        double main = psi_x - sums.prefixes[i + 1].value() - (prime_power_share(f, x) - prime_power_share(f, q * q));
        total.add(sums.progressions[i].value() - main / double(euler_phi(f)));
    }
    return total.value();
}

}  // namespace kd
