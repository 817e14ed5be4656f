#include "kd/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace kd {

namespace {

constexpr u64 kSmallLimit = 1000000;
constexpr u64 kMaxInput = (u64(1) << 63) - 1;

std::vector<std::uint32_t> build_small_primes() {
    std::vector<bool> composite(kSmallLimit, false);
    std::vector<std::uint32_t> out;
    for (u64 i = 2; i < kSmallLimit; ++i) {
        if (composite[i]) continue;
        out.push_back(std::uint32_t(i));
        for (u64 j = i * i; j < kSmallLimit; j += i) composite[j] = true;
    }
    return out;
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, unsigned s) {
    u64 x = powmod(a % n, d, n);
    if (x == 1 || x == n - 1 || x == 0) return false;
    for (unsigned r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1) return false;
    }
    return true;
}

u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 m = 128, r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_large(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_brent(n);
    factor_large(d, out);
    factor_large(n / d, out);
}

}  // namespace

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = build_small_primes();
    return primes;
}

bool FactoredInt::valid() const {
    if (value == 0) return false;
    u64 prod = 1;
    u64 last = 1;
    for (const auto& pp : factors) {
        if (pp.p <= last || pp.e == 0 || !is_prime(pp.p)) return false;
        last = pp.p;
        for (unsigned i = 0; i < pp.e; ++i) {
            if (prod > value / pp.p) return false;
            prod *= pp.p;
        }
    }
    return prod == value;
}

FactoredInt factorize(u64 n) {
    if (n == 0) throw std::invalid_argument("factorize: n must be positive");
    if (n > kMaxInput) throw std::invalid_argument("factorize: n exceeds 2^63-1");
    FactoredInt f;
    f.value = n;
    u64 m = n;
    for (std::uint32_t p : small_primes()) {
        if (u64(p) * p > m) break;
        if (m % p) continue;
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        f.factors.push_back({p, e});
    }
    if (m > 1) {
        std::vector<u64> rest;
        factor_large(m, rest);
        std::sort(rest.begin(), rest.end());
        for (u64 p : rest) {
            if (!f.factors.empty() && f.factors.back().p == p)
                ++f.factors.back().e;
            else
                f.factors.push_back({p, 1});
        }
    }
    return f;
}

FactoredInt from_factors(std::vector<PrimePower> factors) {
    std::sort(factors.begin(), factors.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
    FactoredInt f;
    for (const auto& pp : factors) {
        if (pp.e == 0) continue;
        if (!f.factors.empty() && f.factors.back().p == pp.p)
            f.factors.back().e += pp.e;
        else
            f.factors.push_back(pp);
        f.value = checked_mul(f.value, ipow(pp.p, pp.e));
    }
    return f;
}

u64 euler_phi(const FactoredInt& f) {
    u64 r = 1;
    for (const auto& pp : f.factors) r *= ipow(pp.p, pp.e - 1) * (pp.p - 1);
    return r;
}

int moebius(const FactoredInt& f) {
    for (const auto& pp : f.factors)
        if (pp.e > 1) return 0;
    return f.factors.size() % 2 ? -1 : 1;
}

u64 tau_k(const FactoredInt& f, unsigned k) {
    if (k == 0) throw std::invalid_argument("tau_k: k must be >= 1");
    u64 r = 1;
    for (const auto& pp : f.factors) r = checked_mul(r, binomial(pp.e + k - 1, k - 1));
    return r;
}

std::optional<u64> prime_power_base(const FactoredInt& f) {
    if (f.factors.size() != 1) return std::nullopt;
    return f.factors[0].p;
}

double von_mangoldt(const FactoredInt& f) {
    auto p = prime_power_base(f);
    return p ? std::log(double(*p)) : 0.0;
}

u64 kernel(const FactoredInt& f) {
    u64 r = 1;
    for (const auto& pp : f.factors) r *= pp.p;
    return r;
}

SquarefulSplit squareful_split(const FactoredInt& f) {
    SquarefulSplit s{1, 1};
    for (const auto& pp : f.factors) {
        if (pp.e == 1)
            s.nprime *= pp.p;
        else
            s.k *= ipow(pp.p, pp.e);
    }
    return s;
}

u64 coprime_power_gcd(u64 b, u64 a) {
    if (a == 0 || b == 0) throw std::invalid_argument("coprime_power_gcd: arguments must be positive");
    u64 r = 1;
    u64 g = gcd(b, a);
    while (g > 1) {
        r *= g;
        b /= g;
        g = gcd(b, g);
    }
    return r;
}

u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

i64 gcd_signed(i64 a, i64 b) { return std::gcd(a, b); }

u64 lcm(u64 a, u64 b) {
    if (a == 0 || b == 0) return 0;
    return checked_mul(a / gcd(a, b), b);
}

u64 checked_mul(u64 a, u64 b) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("64-bit multiplication overflow");
    return r;
}

u64 checked_add(u64 a, u64 b) {
    u64 r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("64-bit addition overflow");
    return r;
}

u64 mulmod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

u64 mod_floor(i64 a, u64 m) {
    if (m == 0) throw std::invalid_argument("mod_floor: zero modulus");
    i128 r = i128(a) % i128(m);
    if (r < 0) r += m;
    return u64(r);
}

u64 ipow(u64 b, unsigned e) {
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i) r = checked_mul(r, b);
    return r;
}

u64 isqrt(u64 n) {
    u64 r = u64(std::sqrt(double(n)));
    while (r > 0 && u128(r) * r > n) --r;
    while (u128(r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_square(u64 n) {
    u64 r = isqrt(n);
    return r * r == n;
}

u64 binomial(u64 n, u64 k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (u64 i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<u64>::max()) throw std::overflow_error("binomial overflow");
    }
    return u64(r);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (miller_rabin_witness(n, a, d, s)) return false;
    }
    return true;
}

std::vector<u64> divisors(const FactoredInt& f) {
    std::vector<u64> out{1};
    for (const auto& pp : f.factors) {
        size_t n = out.size();
        u64 pk = 1;
        for (unsigned e = 1; e <= pp.e; ++e) {
            pk *= pp.p;
            for (size_t i = 0; i < n; ++i) out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

unsigned valuation(u64 n, u64 p) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    unsigned v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

ExtGcd ext_gcd(i64 a, i64 b) {
    i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i64 q = old_r / r;
        i64 tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

std::optional<u64> modinv(i64 a, u64 m) {
    if (m == 0) throw std::invalid_argument("modinv: zero modulus");
    if (m == 1) return 0;
    u64 ar = mod_floor(a, m);
    // extended Euclid on unsigned values through 128-bit signed coefficients
    i128 old_r = ar, r = m, old_s = 1, s = 0;
    while (r != 0) {
        i128 q = old_r / r;
        i128 tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) return std::nullopt;
    i128 v = old_s % i128(m);
    if (v < 0) v += m;
    return u64(v);
}

std::optional<CrtResult> crt(u64 r1, u64 m1, u64 r2, u64 m2) {
    if (m1 == 0 || m2 == 0) throw std::invalid_argument("crt: zero modulus");
    r1 %= m1;
    r2 %= m2;
    u64 g = gcd(m1, m2);
    u64 diff = r2 >= r1 ? (r2 - r1) : (m2 - (r1 - r2) % m2) % m2;
    if (diff % g) return std::nullopt;
    u64 l = lcm(m1, m2);
    u64 m2g = m2 / g;
    if (m2g == 1) return CrtResult{r1, l};
    u64 inv = *modinv(i64((m1 / g) % m2g), m2g);
    u64 t = mulmod((diff / g) % m2g, inv, m2g);
    u64 r = u64((u128(m1) * t + r1) % l);
    return CrtResult{r, l};
}

}  // namespace kd
