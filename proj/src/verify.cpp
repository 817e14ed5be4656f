#include "kd/verify.hpp"

#include <algorithm>
#include <cmath>

#include "kd/characters.hpp"
#include "kd/parallel.hpp"

namespace kd {

namespace {

void record(VerifyResult& r, double err, double tol) {
    ++r.checked;
    double rel = err / tol;
    r.worst = std::max(r.worst, rel);
    if (!(rel <= 1)) r.ok = false;
}

void merge(VerifyResult& into, const VerifyResult& part) {
    into.checked += part.checked;
    into.worst = std::max(into.worst, part.worst);
    into.ok = into.ok && part.ok;
}

template <class F>
VerifyResult run_parallel(const char* name, std::size_t n, F f) {
    auto parts = parallel_map<VerifyResult>(n, f);
    VerifyResult out{name};
    for (const auto& p : parts) merge(out, p);
    return out;
}

}  // namespace

std::vector<Cusp> singular_cusps(u64 q, const DirichletCharacter& chi) {
    std::vector<Cusp> out;
    for (u64 w : divisors(factorize(q))) {
        u64 h = gcd(w, q / w);
        for (u64 u = 1; u <= h; ++u) {
            if (gcd(u, h) != 1) continue;
            u64 t = u;
            while (gcd(t, w) != 1) t += h;
            Cusp a = make_cusp(q, i64(t), w);
            if (std::find(out.begin(), out.end(), a) == out.end() && is_singular(q, chi, a)) out.push_back(a);
        }
    }
    return out;
}

VerifyResult verify_weil_primes(u64 pmax) {
    std::vector<u64> ps;
    for (u64 p = 2; p < pmax; ++p)
        if (is_prime(p)) ps.push_back(p);
    return run_parallel("weil", ps.size(), [&](std::size_t i) {
        u64 p = ps[i];
        VerifyResult r;
        double bound = 2 * std::sqrt(double(p)) + 1e-6;
        for (u64 m = 1; m < p; ++m) {
            auto row = kloosterman_row(i64(m), p);
            for (u64 n = 1; n < p; ++n) record(r, std::abs(row[n]), bound);
        }
        return r;
    });
}

VerifyResult verify_ramanujan(u64 nmax) {
    return run_parallel("ramanujan", nmax, [&](std::size_t i) {
        u64 c = i + 1;
        VerifyResult r;
        auto mu = [](u64 k) { return moebius(factorize(k)); };
        auto row = kloosterman_row(0, c);
        for (u64 n = 1; n <= nmax; ++n) {
            i64 closed = 0;
            for (u64 d : divisors(factorize(gcd(n, c)))) closed += i64(d) * mu(c / d);
            record(r, std::abs(row[n % c] - double(closed)), 1e-9);
        }
        return r;
    });
}

VerifyResult verify_cusp_inf_s(u64 qmax, u64 cmax) {
    return run_parallel("cusp-inf-s", qmax, [&](std::size_t i) {
        u64 q = i + 1;
        VerifyResult r;
        for (u64 s : divisors(factorize(q))) {
            u64 rr = q / s;
            if (gcd(rr, s) != 1) continue;
            for (u64 q0 : divisors(factorize(rr)))
                for (const auto& chi : all_characters(q0))
                    for (u64 c = 1; c <= cmax; ++c) {
                        if (gcd(c, rr) != 1) continue;
                        CuspSumSpec spec{q, chi, Cusp::inf(), make_cusp(q, 1, s)};
                        auto oracle = oracle_freq_terms(cusp_oracle_terms(q, spec.a, spec.b, lower_left_inf_s(c)), spec);
                        auto formula = lemma43_freq_terms(chi, rr, s, c);
                        record(r, term_distance(aggregate(oracle), aggregate(formula)), 1e-9 * std::sqrt(double(s * c)));
                    }
        }
        return r;
    });
}

VerifyResult verify_cusp_aa(u64 qmax, u64 gmax) {
    return run_parallel("cusp-aa", qmax, [&](std::size_t i) {
        u64 q = i + 1;
        VerifyResult r;
        for (u64 q0 : divisors(factorize(q)))
            for (const auto& chi : all_characters(q0))
                for (const auto& a : singular_cusps(q, chi))
                    for (u64 g = 1; g <= gmax; ++g) {
                        u64 c = g * q / cusp_width(q, a);
                        CuspSumSpec spec{q, chi, a, a};
                        auto oracle = oracle_freq_terms(cusp_oracle_terms(q, a, a, lower_left_aa(q, a, c)), spec);
                        auto formula = lemma41_freq_terms(q, chi, a.u, a.w, c);
                        record(r, term_distance(aggregate(oracle), aggregate(formula)), 1e-9 * std::sqrt(double(c)));
                    }
        return r;
    });
}

VerifyResult verify_orthogonality(u64 qmax) {
    return run_parallel("orthogonality", qmax, [&](std::size_t i) {
        u64 q = i + 1;
        VerifyResult r;
        auto cs = all_characters(q);
        double phi = double(cs.size());
        std::vector<cplx> col(q);
        for (const auto& c : cs) {
            auto tab = c.table();
            cplx row;
            for (u64 a = 0; a < q; ++a) {
                col[a] += tab[a];
                row += tab[a];
            }
            record(r, std::abs(row - (c.is_principal() ? phi : 0.0)), 1e-9);
        }
        for (u64 a = 0; a < q; ++a) record(r, std::abs(col[a] - (a == 1 % q ? phi : 0.0)), 1e-9);
        return r;
    });
}

VerifyResult verify_conductors(u64 qmax) {
    return run_parallel("conductor", qmax, [&](std::size_t i) {
        u64 q = i + 1;
        VerifyResult r;
        for (const auto& chi : all_characters(q)) {
            auto tab = chi.table();
            u64 f = q;
            for (u64 d : divisors(factorize(q))) {
                bool periodic = true;
                for (u64 a = 1; a < q && periodic; ++a) {
                    if (gcd(a, q) != 1) continue;
                    for (u64 b = a % d; b < q && periodic; b += d)
                        if (gcd(b, q) == 1 && std::abs(tab[a] - tab[b]) > 1e-9) periodic = false;
                }
                if (periodic) {
                    f = d;
                    break;
                }
            }
            record(r, chi.conductor() == f ? 0.0 : 1.0, 0.5);
        }
        return r;
    });
}

VerifyResult verify_gauss_sums(u64 qmax) {
    return run_parallel("gauss", qmax, [&](std::size_t i) {
        u64 q = i + 1;
        VerifyResult r;
        for (const auto& chi : all_characters(q))
            if (chi.is_primitive()) record(r, std::abs(std::abs(gauss_sum(chi)) - std::sqrt(double(q))), 1e-9);
        return r;
    });
}

}  // namespace kd
