#include "kd/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "kd/summation.hpp"

namespace kd {

std::vector<std::uint32_t> primes_up_to(u64 n) {
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    std::vector<bool> composite(n + 1, false);
    for (u64 i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(std::uint32_t(i));
        for (u64 j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

std::shared_ptr<const std::vector<std::uint32_t>> base_primes(u64 hi) {
    static std::mutex mu;
    static std::shared_ptr<const std::vector<std::uint32_t>> cached;
    static u64 cached_root = 0;
    u64 root = isqrt(hi);
    std::lock_guard<std::mutex> lock(mu);
    if (!cached || cached_root < root) {
        u64 target = std::max<u64>(root, 1 << 16);
        cached = std::make_shared<const std::vector<std::uint32_t>>(primes_up_to(target));
        cached_root = target;
    }
    return cached;
}

SieveTable::SieveTable(u64 lo, u64 hi, std::vector<std::uint32_t> spf,
                       std::shared_ptr<const std::vector<std::uint32_t>> base)
    : lo_(lo), hi_(hi), spf_(std::move(spf)), base_(std::move(base)) {}

u64 SieveTable::spf(u64 n) const {
    if (n < lo_ || n > hi_) throw std::out_of_range("SieveTable::spf outside segment");
    if (n == 1) return 1;
    std::uint32_t s = spf_[n - lo_];
    return s ? s : n;
}

FactoredInt SieveTable::factorization(u64 n) const {
    u64 p0 = spf(n);
    FactoredInt f;
    f.value = n;
    if (n == 1) return f;
    u64 m = n;
    const auto& base = *base_;
    auto it = std::lower_bound(base.begin(), base.end(), p0);
    for (; it != base.end(); ++it) {
        u64 p = *it;
        if (p * p > m) break;
        if (m % p) continue;
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        f.factors.push_back({p, e});
    }
    if (m > 1) f.factors.push_back({m, 1});
    return f;
}

SieveTable build_segment(u64 lo, u64 hi, u64 max_len) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("build_segment: need 1 <= lo <= hi");
    if (hi > kMaxSieveBound) throw std::invalid_argument("build_segment: hi exceeds 2^50");
    if (hi - lo + 1 > max_len) throw std::length_error("build_segment: segment too large");
    auto base = base_primes(hi);
    std::vector<std::uint32_t> spf(hi - lo + 1, 0);
    detail::factor_block(lo, hi, *base, [&](std::size_t i, u64 p, unsigned) {
        if (spf[i] == 0 && p * p <= hi) spf[i] = std::uint32_t(p);
    });
    return SieveTable(lo, hi, std::move(spf), std::move(base));
}

namespace detail {

std::vector<PrimePower> lambda_block(u64 lo, u64 hi, const std::vector<std::uint32_t>& base) {
    std::size_t len = std::size_t(hi - lo + 1);
    std::vector<std::uint8_t> composite(len, 0);
    std::vector<PrimePower> out(len, PrimePower{0, 0});
    if (lo == 1) composite[0] = 1;
    for (std::uint32_t p32 : base) {
        u64 p = p32;
        if (p * p > hi) break;
        u64 first = std::max(p * p, (lo + p - 1) / p * p);
        for (u64 j = first - lo; j < len; j += p) composite[j] = 1;
    }
    for (std::size_t j = 0; j < len; ++j)
        if (!composite[j]) out[j] = {lo + j, 1};
    for (std::uint32_t p32 : base) {
        u64 p = p32;
        if (p * p > hi) break;
        u64 pk = p;
        unsigned e = 1;
        while (pk <= hi / p) {
            pk *= p;
            ++e;
            if (pk >= lo) out[pk - lo] = {p, e};
        }
    }
    return out;
}

std::vector<u64> tau_k_block(u64 lo, u64 hi, unsigned k, const std::vector<std::uint32_t>& base) {
    if (k == 0) throw std::invalid_argument("tau_k: k must be >= 1");
    std::vector<u64> out(hi - lo + 1, 1);
    u64 w[64];
    for (unsigned e = 0; e < 64; ++e) w[e] = binomial(e + k - 1, k - 1);
    factor_block(lo, hi, base, [&](std::size_t i, u64, unsigned e) { out[i] = checked_mul(out[i], w[e]); });
    return out;
}

}  // namespace detail

std::vector<u64> tabulate_tau_k(const SieveTable& t, unsigned k) {
    return detail::tau_k_block(t.lo(), t.hi(), k, t.base());
}

std::vector<PrimePower> tabulate_lambda(const SieveTable& t) { return detail::lambda_block(t.lo(), t.hi(), t.base()); }

std::vector<std::int8_t> tabulate_mu(const SieveTable& t) {
    std::vector<std::int8_t> out(t.size(), 1);
    detail::factor_block(t.lo(), t.hi(), t.base(), [&](std::size_t i, u64, unsigned e) {
        out[i] = e > 1 ? 0 : std::int8_t(-out[i]);
    });
    return out;
}

std::vector<u64> tabulate_phi(const SieveTable& t) {
    std::vector<u64> out(t.size(), 1);
    detail::factor_block(t.lo(), t.hi(), t.base(), [&](std::size_t i, u64 p, unsigned e) {
        out[i] *= ipow(p, e - 1) * (p - 1);
    });
    return out;
}

std::vector<double> tabulate(const SieveTable& t, ArithFn fn) {
    std::vector<double> out;
    out.reserve(t.size());
    switch (fn.kind) {
        case ArithFn::TauK:
            for (u64 v : tabulate_tau_k(t, fn.k)) out.push_back(double(v));
            break;
        case ArithFn::Lambda:
            for (const auto& pp : tabulate_lambda(t)) out.push_back(pp.p ? std::log(double(pp.p)) : 0.0);
            break;
        case ArithFn::Mu:
            for (auto v : tabulate_mu(t)) out.push_back(double(v));
            break;
        case ArithFn::Phi:
            for (u64 v : tabulate_phi(t)) out.push_back(double(v));
            break;
    }
    return out;
}

std::vector<u64> tau_k_range(u64 lo, u64 hi, unsigned k) {
    auto base = base_primes(hi);
    auto parts = map_blocks<std::vector<u64>>(lo, hi, [&](u64 a, u64 b) { return detail::tau_k_block(a, b, k, *base); });
    std::vector<u64> out;
    out.reserve(hi - lo + 1);
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<double> lambda_range(u64 lo, u64 hi) {
    auto base = base_primes(hi);
    auto parts = map_blocks<std::vector<double>>(lo, hi, [&](u64 a, u64 b) {
        auto lam = detail::lambda_block(a, b, *base);
        std::vector<double> v(lam.size());
        for (std::size_t i = 0; i < lam.size(); ++i) v[i] = lam[i].p ? std::log(double(lam[i].p)) : 0.0;
        return v;
    });
    std::vector<double> out;
    out.reserve(hi - lo + 1);
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

double psi(u64 x, u64 q, u64 a) {
    if (q == 0 || a >= q) throw std::invalid_argument("psi: need q >= 1 and 0 <= a < q");
    if (x < 2) return 0.0;
    auto base = base_primes(x);
    auto parts = map_blocks<CompensatedSum>(1, x, [&](u64 lo, u64 hi) {
        CompensatedSum s;
        auto lam = detail::lambda_block(lo, hi, *base);
        for (std::size_t i = 0; i < lam.size(); ++i)
            if (lam[i].p && (lo + i) % q == a) s.add(std::log(double(lam[i].p)));
        return s;
    });
    CompensatedSum total;
    for (const auto& p : parts) total.add(p);
    return total.value();
}

double psi_coprime(u64 x, u64 q) {
    if (q == 0) throw std::invalid_argument("psi_coprime: q must be positive");
    if (x < 2) return 0.0;
    auto base = base_primes(x);
    auto parts = map_blocks<CompensatedSum>(1, x, [&](u64 lo, u64 hi) {
        CompensatedSum s;
        auto lam = detail::lambda_block(lo, hi, *base);
        for (std::size_t i = 0; i < lam.size(); ++i)
            if (lam[i].p && q % lam[i].p != 0) s.add(std::log(double(lam[i].p)));
        return s;
    });
    CompensatedSum total;
    for (const auto& p : parts) total.add(p);
    return total.value();
}

cplx psi_chi(u64 x, const DirichletCharacter& chi) {
    if (x < 2) return 0.0;
    auto base = base_primes(x);
    auto tab = chi.table();
    u64 q = chi.modulus();
    auto parts = map_blocks<CompensatedComplexSum>(1, x, [&](u64 lo, u64 hi) {
        CompensatedComplexSum s;
        auto lam = detail::lambda_block(lo, hi, *base);
        for (std::size_t i = 0; i < lam.size(); ++i)
            if (lam[i].p) s.add(std::log(double(lam[i].p)) * tab[(lo + i) % q]);
        return s;
    });
    CompensatedComplexSum total;
    for (const auto& p : parts) total.add(p);
    return total.value();
}

u64 divisor_sum_progression(u64 x, unsigned k, u64 q, u64 a) {
    if (q == 0 || a >= q) throw std::invalid_argument("divisor_sum_progression: need q >= 1 and 0 <= a < q");
    if (k < 1) throw std::invalid_argument("divisor_sum_progression: k must be >= 1");
    if (x == 0) return 0;
    auto base = base_primes(x);
    auto parts = map_blocks<u64>(1, x, [&](u64 lo, u64 hi) {
        auto t = detail::tau_k_block(lo, hi, k, *base);
        u64 s = 0;
        u64 first = lo + (a + q - lo % q) % q;
        for (u64 n = first; n <= hi; n += q) s = checked_add(s, t[n - lo]);
        return s;
    });
    u64 total = 0;
    for (u64 p : parts) total = checked_add(total, p);
    return total;
}

}  // namespace kd
