#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace kd {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

struct PrimePower {
    u64 p;
    unsigned e;
    bool operator==(const PrimePower&) const = default;
};

// n together with its factorization; primes increasing, exponents >= 1
struct FactoredInt {
    u64 value = 1;
    std::vector<PrimePower> factors;

    bool valid() const;
};

FactoredInt factorize(u64 n);
FactoredInt from_factors(std::vector<PrimePower> factors);

u64 euler_phi(const FactoredInt& f);
int moebius(const FactoredInt& f);
u64 tau_k(const FactoredInt& f, unsigned k);
double von_mangoldt(const FactoredInt& f);
// exact form of Lambda: the prime p when n = p^e, nothing otherwise
std::optional<u64> prime_power_base(const FactoredInt& f);
u64 kernel(const FactoredInt& f);

struct SquarefulSplit {
    u64 nprime;  // squarefree part
    u64 k;       // squareful part, coprime to nprime
};
SquarefulSplit squareful_split(const FactoredInt& f);

// (b, a^inf): the part of b supported on primes dividing a
u64 coprime_power_gcd(u64 b, u64 a);

// inverse of a mod m; nullopt when gcd(a, m) > 1
std::optional<u64> modinv(i64 a, u64 m);

struct CrtResult {
    u64 r;
    u64 m;
};
// nullopt when r1, r2 disagree mod gcd(m1, m2)
std::optional<CrtResult> crt(u64 r1, u64 m1, u64 r2, u64 m2);

// plumbing shared by the other modules
u64 gcd(u64 a, u64 b);
u64 lcm(u64 a, u64 b);  // throws on overflow
i64 gcd_signed(i64 a, i64 b);
u64 checked_mul(u64 a, u64 b);
u64 checked_add(u64 a, u64 b);
u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
u64 mod_floor(i64 a, u64 m);
u64 ipow(u64 b, unsigned e);  // checked
u64 isqrt(u64 n);
bool is_square(u64 n);
u64 binomial(u64 n, u64 k);  // checked
bool is_prime(u64 n);
const std::vector<std::uint32_t>& small_primes();  // all primes below 10^6
std::vector<u64> divisors(const FactoredInt& f);    // increasing
unsigned valuation(u64 n, u64 p);

struct ExtGcd {
    i64 g;
    i64 x;
    i64 y;  // a*x + b*y = g >= 0
};
ExtGcd ext_gcd(i64 a, i64 b);

}  // namespace kd
