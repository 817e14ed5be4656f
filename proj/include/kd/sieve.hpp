#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <memory>
#include <vector>

#include "kd/arith.hpp"
#include "kd/characters.hpp"
#include "kd/parallel.hpp"
#include "kd/summation.hpp"

namespace kd {

constexpr u64 kDefaultSegmentSize = u64(1) << 24;
constexpr u64 kMaxSieveBound = u64(1) << 50;
constexpr u64 kBlockSize = u64(1) << 18;

std::vector<std::uint32_t> primes_up_to(u64 n);
// primes up to isqrt(hi), cached
std::shared_ptr<const std::vector<std::uint32_t>> base_primes(u64 hi);

class SieveTable {
public:
    SieveTable(u64 lo, u64 hi, std::vector<std::uint32_t> spf, std::shared_ptr<const std::vector<std::uint32_t>> base);

    u64 lo() const { return lo_; }
    u64 hi() const { return hi_; }
    u64 size() const { return hi_ - lo_ + 1; }
    u64 spf(u64 n) const;
    FactoredInt factorization(u64 n) const;
    const std::vector<std::uint32_t>& base() const { return *base_; }

private:
    u64 lo_, hi_;
    std::vector<std::uint32_t> spf_;  // 0: no prime factor up to sqrt(hi)
    std::shared_ptr<const std::vector<std::uint32_t>> base_;
};

SieveTable build_segment(u64 lo, u64 hi, u64 max_len = kDefaultSegmentSize);

struct ArithFn {
    enum Kind { TauK, Lambda, Mu, Phi } kind;
    unsigned k = 2;

    static ArithFn tau(unsigned k) { return {TauK, k}; }
    static ArithFn lambda() { return {Lambda, 0}; }
    static ArithFn mu() { return {Mu, 0}; }
    static ArithFn phi() { return {Phi, 0}; }
};

std::vector<double> tabulate(const SieveTable& t, ArithFn fn);
std::vector<u64> tabulate_tau_k(const SieveTable& t, unsigned k);
std::vector<PrimePower> tabulate_lambda(const SieveTable& t);  // {0,0} off prime powers
std::vector<std::int8_t> tabulate_mu(const SieveTable& t);
std::vector<u64> tabulate_phi(const SieveTable& t);

// whole ranges, split into fixed blocks and run on the worker pool
std::vector<u64> tau_k_range(u64 lo, u64 hi, unsigned k);
std::vector<double> lambda_range(u64 lo, u64 hi);

double psi(u64 x, u64 q, u64 a);
double psi_coprime(u64 x, u64 q);
cplx psi_chi(u64 x, const DirichletCharacter& chi);
u64 divisor_sum_progression(u64 x, unsigned k, u64 q, u64 a);

namespace detail {

// Factors every n in [lo, hi] with the primes of `base` (which must cover sqrt(hi)).
// visit(i, p, e) is called for each p^e || lo+i, primes increasing, the prime
// cofactor above sqrt(hi) (if any) last.
template <class Visit>
void factor_block(u64 lo, u64 hi, const std::vector<std::uint32_t>& base, Visit&& visit) {
    std::size_t len = std::size_t(hi - lo + 1);
    std::vector<u64> prod(len, 1);
    std::vector<std::uint8_t> ex(len, 0);
    for (std::uint32_t p32 : base) {
        u64 p = p32;
        if (p * p > hi) break;
        u64 first = (lo + p - 1) / p * p;
        if (first > hi) continue;
        for (u64 j = first - lo; j < len; j += p) ex[j] = 1;
        u64 pk = p;
        while (pk <= hi / p) {
            pk *= p;
            u64 f = (lo + pk - 1) / pk * pk;
            for (u64 j = f - lo; j < len; j += pk) ++ex[j];
        }
        for (u64 j = first - lo; j < len; j += p) {
            unsigned e = ex[j];
            u64 pe = p;
            for (unsigned i = 1; i < e; ++i) pe *= p;
            prod[j] *= pe;
            visit(std::size_t(j), p, e);
        }
    }
    for (std::size_t j = 0; j < len; ++j) {
        u64 n = lo + j;
        if (n > 1 && prod[j] != n) visit(j, n / prod[j], 1u);
    }
}

// Lambda on [lo, hi] as (p, e) pairs; p = 0 off prime powers
std::vector<PrimePower> lambda_block(u64 lo, u64 hi, const std::vector<std::uint32_t>& base);

// tau_k on [lo, hi]
std::vector<u64> tau_k_block(u64 lo, u64 hi, unsigned k, const std::vector<std::uint32_t>& base);

}  // namespace detail

// Splits [lo, hi] into fixed blocks of kBlockSize and runs f(block_lo, block_hi)
// on the pool. Results come back in block order, so reductions are deterministic.
template <class R, class F>
std::vector<R> map_blocks(u64 lo, u64 hi, F f, u64 block = kBlockSize) {
    if (hi < lo) return {};
    std::size_t n = std::size_t((hi - lo) / block + 1);
    return parallel_map<R>(n, [&](std::size_t i) {
        u64 b_lo = lo + u64(i) * block;
        u64 b_hi = std::min(hi, b_lo + block - 1);
        return f(b_lo, b_hi);
    });
}

// Like map_blocks, but hands each block result to fold(block_lo, block_hi, r) in
// block order, keeping at most `window` results alive.
template <class R, class F, class Fold>
void fold_blocks(u64 lo, u64 hi, F f, Fold fold, std::size_t window = 64, u64 block = kBlockSize) {
    if (hi < lo) return;
    std::size_t n = std::size_t((hi - lo) / block + 1);
    for (std::size_t start = 0; start < n; start += window) {
        std::size_t m = std::min(window, n - start);
        auto parts = parallel_map<R>(m, [&](std::size_t i) {
            u64 b_lo = lo + u64(start + i) * block;
            return f(b_lo, std::min(hi, b_lo + block - 1));
        });
        for (std::size_t i = 0; i < m; ++i) {
            u64 b_lo = lo + u64(start + i) * block;
            fold(b_lo, std::min(hi, b_lo + block - 1), parts[i]);
        }
    }
}

struct ExactSum {
    u64 v = 0;
    void add(u64 x) { v = checked_add(v, x); }
    void add(const ExactSum& o) { v = checked_add(v, o.v); }
    u64 value() const { return v; }
};

// sum of f(n) over lo < n <= x with n = a (mod q)
struct ProgressionQuery {
    u64 q;
    u64 a;
    u64 lo = 0;
};

template <class Acc>
struct ProgressionSums {
    std::vector<Acc> progressions;
    std::vector<Acc> prefixes;  // sum of f(n) over n <= point
};

// One pass over [1, x]: tab(lo, hi) returns f on [lo, hi].
template <class Acc, class Tab>
ProgressionSums<Acc> progression_sums(u64 x, const std::vector<ProgressionQuery>& qs, const std::vector<u64>& points, Tab tab) {
    for (const auto& Q : qs)
        if (Q.q == 0) throw std::invalid_argument("progression_sums: modulus must be positive");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return points[i] < points[j]; });
    for (u64 p : points)
        if (p > x) throw std::invalid_argument("progression_sums: point beyond x");
    struct Part {
        std::vector<Acc> prog, partial;
        Acc total;
    };
    ProgressionSums<Acc> out{std::vector<Acc>(qs.size()), std::vector<Acc>(points.size())};
    Acc running{};
    auto first_point = [&](u64 lo) {
        return std::lower_bound(order.begin(), order.end(), lo, [&](std::size_t i, u64 v) { return points[i] < v; });
    };
    fold_blocks<Part>(
        1, x,
        [&](u64 lo, u64 hi) {
            auto v = tab(lo, hi);
            Part p;
            p.prog.resize(qs.size());
            for (std::size_t i = 0; i < qs.size(); ++i) {
                const auto& Q = qs[i];
                u64 start = std::max(lo, Q.lo + 1);
                if (start > hi) continue;
                u64 n = start + (Q.a % Q.q + Q.q - start % Q.q) % Q.q;
                for (; n <= hi; n += Q.q) p.prog[i].add(v[n - lo]);
            }
            Acc run{};
            u64 n = lo;
            for (auto it = first_point(lo); it != order.end() && points[*it] <= hi; ++it) {
                for (; n <= points[*it]; ++n) run.add(v[n - lo]);
                p.partial.push_back(run);
            }
            for (; n <= hi; ++n) run.add(v[n - lo]);
            p.total = run;
            return p;
        },
        [&](u64 lo, u64 hi, Part& p) {
            for (std::size_t i = 0; i < qs.size(); ++i) out.progressions[i].add(p.prog[i]);
            std::size_t j = 0;
            for (auto it = first_point(lo); it != order.end() && points[*it] <= hi; ++it) {
                Acc r = running;
                r.add(p.partial[j++]);
                out.prefixes[*it] = r;
            }
            running.add(p.total);
        });
    return out;
}

}  // namespace kd
