#include "kd/correlation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "kd/sieve.hpp"

namespace kd {

namespace {

void check_k(unsigned k) {
    if (k < 2 || k > 8) throw std::invalid_argument("correlation: need 2 <= k <= 8");
}

std::vector<int> mobius_table(u64 n) {
    std::vector<int> mu(n + 1, 1);
    std::vector<bool> composite(n + 1, false);
    for (u64 p = 2; p <= n; ++p) {
        if (composite[p]) continue;
        for (u64 m = p; m <= n; m += p) {
            if (m > p) composite[m] = true;
            mu[m] = -mu[m];
        }
        if (p <= n / p)
            for (u64 m = p * p; m <= n; m += p * p) mu[m] = 0;
    }
    return mu;
}

// (d, mu(d)) for squarefree d | q
std::vector<std::pair<u64, int>> squarefree_divisors(const FactoredInt& f) {
    std::vector<std::pair<u64, int>> ds{{1, 1}};
    for (const auto& pp : f.factors) {
        std::size_t m = ds.size();
        for (std::size_t i = 0; i < m; ++i) ds.push_back({ds[i].first * pp.p, -ds[i].second});
    }
    return ds;
}

// Sums of tau_k over multiples of squarefree d: up to x, and up to (d i)^2 for d i <= R.
class MultipleSums {
public:
    MultipleSums(const std::vector<std::uint32_t>& t, u64 x, u64 R) : t_(t), x_(x), total_(R + 1, kUnset), at_sq_(R + 1) {
        auto mu = mobius_table(R);
        for (u64 d = 1; d <= R; ++d) {
            if (mu[d] == 0) continue;
            u64 run = 0, i = 1;
            for (u64 j = 1; j <= x / d; ++j) {
                run += t[d * j];
                if (i <= R / d && j == d * i * i) {
                    at_sq_[d].push_back(run);
                    ++i;
                }
            }
            total_[d] = run;
        }
    }

    u64 total(u64 d) {
        if (d < total_.size() && total_[d] != kUnset) return total_[d];
        if (auto it = extra_.find(d); it != extra_.end()) return it->second;
        u64 run = 0;
        for (u64 j = d; j <= x_; j += d) run += t_[j];
        extra_[d] = run;
        return run;
    }

    // (d i)^2 with d i <= R
    u64 at_square(u64 d, u64 i) const { return at_sq_[d][i - 1]; }

    // sum over n <= x with (n, q) = 1
    i64 coprime_total(const FactoredInt& f) {
        i64 s = 0;
        for (auto [d, mu] : squarefree_divisors(f)) s += mu * i64(total(d));
        return s;
    }

    // sum over n <= q^2 with (n, q) = 1
    i64 coprime_at_square(u64 q, const FactoredInt& f) const {
        i64 s = 0;
        for (auto [d, mu] : squarefree_divisors(f)) s += mu * i64(at_square(d, q / d));
        return s;
    }

private:
    static constexpr u64 kUnset = std::numeric_limits<u64>::max();

    const std::vector<std::uint32_t>& t_;
    u64 x_;
    std::vector<u64> total_;
    std::unordered_map<u64, u64> extra_;
    std::vector<std::vector<u64>> at_sq_;
};

u64 progression_total(const std::vector<std::uint32_t>& t, u64 hi, u64 q, u64 r, u64 lo = 1) {
    if (lo > hi) return 0;
    u64 s = 0;
    for (u64 n = lo + (r + q - lo % q) % q; n <= hi; n += q) s += t[n];
    return s;
}

}  // namespace

std::vector<std::uint32_t> tau_table(u64 x, unsigned k) {
    std::vector<std::uint32_t> out(x + 1, 0);
    if (x == 0) return out;
    auto base = base_primes(x);
    fold_blocks<std::vector<u64>>(
        1, x, [&](u64 lo, u64 hi) { return detail::tau_k_block(lo, hi, k, *base); },
        [&](u64 lo, u64, std::vector<u64>& v) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i] > std::numeric_limits<std::uint32_t>::max()) throw std::overflow_error("tau_table: value exceeds 32 bits");
                out[lo + i] = std::uint32_t(v[i]);
            }
        });
    return out;
}

u64 tk_correlation(u64 x, unsigned k) {
    check_k(k);
    if (x == 0) return 0;
    auto base = base_primes(x + 1);
    auto r = progression_sums<ExactSum>(x, {{1, 0, 0}}, {}, [&](u64 lo, u64 hi) {
        auto a = detail::tau_k_block(lo, hi, k, *base);
        auto b = detail::tau_k_block(lo + 1, hi + 1, 2, *base);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = checked_mul(a[i], b[i]);
        return a;
    });
    return r.progressions[0].value();
}

double main_term_proxy(u64 x, unsigned k) {
    check_k(k);
    if (x == 0) return 0.0;
    auto t = tau_table(x, k);
    u64 R = isqrt(x);
    MultipleSums ms(t, x, R);
    CompensatedSum s;
    for (u64 q = 1; q <= R; ++q) {
        auto f = factorize(q);
        i64 c = ms.coprime_total(f) - ms.coprime_at_square(q, f);
        s.add(2.0 * double(c) / double(euler_phi(f)));
    }
    u64 extra = 2 * t[1];
    for (u64 m = 2; m * m - 1 <= x; ++m) extra += t[m * m - 1];
    s.add(double(extra));
    return s.value();
}

double theorem71_lhs(u64 x, u64 Q, i64 a, unsigned k) {
    check_k(k);
    if (x == 0 || Q == 0) return 0.0;
    auto t = tau_table(x, k);
    MultipleSums ms(t, x, 0);
    u64 aa = u64(std::abs(a));
    CompensatedSum s;
    for (u64 q = 1; q <= Q; ++q) {
        if (gcd(q, aa) != 1) continue;
        auto f = factorize(q);
        u64 prog = progression_total(t, x, q, mod_floor(a, q));
        s.add(double(prog) - double(ms.coprime_total(f)) / double(euler_phi(f)));
    }
    return s.value();
}

double eq715_lhs(u64 x, i64 a, unsigned k) {
    check_k(k);
    if (x == 0) return 0.0;
    u64 R = isqrt(x);
    auto t = tau_table(R * R, k);
    MultipleSums ms(t, R * R, R);
    u64 aa = u64(std::abs(a));
    CompensatedSum s;
    for (u64 q = 1; q <= R; ++q) {
        if (gcd(q, aa) != 1) continue;
        auto f = factorize(q);
        u64 prog = progression_total(t, q * q, q, mod_floor(a, q));
        s.add(double(prog) - double(ms.coprime_at_square(q, f)) / double(euler_phi(f)));
    }
    return s.value();
}

ShiftedDecomposition shifted_decomposition(u64 x, unsigned k, i64 a) {
    check_k(k);
    if (a == 0) throw std::invalid_argument("shifted_decomposition: a must be nonzero");
    auto t = tau_table(x, k);
    u64 R = isqrt(x);
    u64 aa = u64(std::abs(a));
    ShiftedDecomposition out{0, 0};
    for (u64 q = 1; q <= R; ++q) out.direct += 2 * progression_total(t, x, q, mod_floor(-a, q), q * q);

    // d1 runs over divisors of a^infinity up to x
    auto fa = factorize(aa);
    std::vector<u64> d1s{1};
    for (const auto& pp : fa.factors) {
        std::size_t m = d1s.size();
        for (std::size_t i = 0; i < m; ++i)
            for (u64 v = d1s[i]; v <= x / pp.p;) {
                v *= pp.p;
                d1s.push_back(v);
            }
    }
    for (u64 d1 : d1s) {
        u64 inner = 0;
        for (u64 d2 : divisors(factorize(gcd(d1, aa)))) {
            u64 e1 = d1 / d2, e2 = aa / d2;
            for (u64 q = 1; q * d2 <= R; ++q) {
                if (gcd(q, e1) != 1 || gcd(q, e2) != 1) continue;
                i64 num = a / i64(d2);
                u64 r = q == 1 ? 0 : mulmod(mod_floor(-num, q), *modinv(i64(e1 % q), q), q);
                u64 qq = q * d2 * q * d2;
                u64 lo = (qq + d1 - 1) / d1, hi = x / d1;
                for (u64 n = lo + (r + q - lo % q) % q; n <= hi; n += q)
                    if (gcd(n, aa) == 1) inner += t[n];
            }
        }
        out.rewritten += 2 * tau_k(factorize(d1), k) * inner;
    }
    return out;
}

bool shifted_decomposition_check(u64 x, unsigned k, i64 a) {
    auto d = shifted_decomposition(x, k, a);
    return d.direct == d.rewritten;
}

std::vector<double> fit_pk(const std::vector<double>& xs, const std::vector<double>& values, unsigned k) {
    if (xs.size() != values.size()) throw std::invalid_argument("fit_pk: size mismatch");
    if (xs.size() < k + 2) throw std::invalid_argument("fit_pk: need at least k + 2 grid points");
    Eigen::Index n = Eigen::Index(xs.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = values[i] / xs[i];
    for (unsigned deg = 0; deg <= k; ++deg) {
        Eigen::MatrixXd A(n, deg + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            double L = std::log(xs[i]), p = 1;
            for (unsigned j = 0; j <= deg; ++j, p *= L) A(i, j) = p;
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
        if (deg == k || (A * c - y).norm() <= 1e-10 * y.norm()) return std::vector<double>(c.data(), c.data() + c.size());
    }
    return {};
}

CorrelationReport correlation_report(unsigned k, const std::vector<u64>& xs) {
    CorrelationReport r{k, xs, {}, {}, {}, 0.0};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    unsigned m = 0;
    for (u64 x : xs) {
        u64 tk = tk_correlation(x, k);
        double p = main_term_proxy(x, k);
        r.tk.push_back(tk);
        r.proxy.push_back(p);
        r.residual.push_back(double(tk) - p);
        double res = std::abs(double(tk) - p) / double(x);
        if (res > 0) {
            double lx = std::log(double(x)), ly = std::log(res);
            sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++m;
        }
    }
    if (m >= 2) r.decay_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return r;
}

}  // namespace kd
