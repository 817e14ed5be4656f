#include "kd/kloosterman.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "kd/summation.hpp"

namespace kd {

namespace {

i64 den_of(const Rational& x) { return x.denominator(); }

bool is_int(const Rational& x) { return x.denominator() == 1; }

i64 lcm_i(i64 a, i64 b) { return i64(lcm(u64(a), u64(b))); }

// e(k/c) for k = 0..c-1
std::vector<cplx> root_table(u64 c) {
    std::vector<cplx> t(c);
    for (u64 k = 0; k < c; ++k) t[k] = e_frac(i64(k), c);
    return t;
}

std::vector<u64> inverse_table(u64 c) {
    std::vector<u64> inv(c, 0);
    for (u64 d = 0; d < c; ++d)
        if (auto v = modinv(i64(d), c)) inv[d] = *v;
    return inv;
}

u64 gcd3(i64 m, i64 n, u64 c) {
    u64 am = u64(m < 0 ? -m : m), an = u64(n < 0 ? -n : n);
    return gcd(gcd(am, an), c);
}

Turn chi_bar(const DirichletCharacter& chi, i64 x) {
    auto t = chi.turn(x);
    if (!t) throw std::logic_error("chi evaluated at a non-unit");
    return -*t;
}

}  // namespace

Rational frac_part(const Rational& x) {
    i64 n = x.numerator(), d = x.denominator();
    return Rational(i64(mod_floor(n, u64(d))), d);
}

cplx e_rat(const Rational& x) { return e_frac(x.numerator(), u64(x.denominator())); }

std::vector<u64> kloosterman_phase_counts(i64 m, i64 n, u64 c) {
    if (c == 0) throw std::invalid_argument("kloosterman: c must be positive");
    std::vector<u64> counts(c, 0);
    u64 mm = mod_floor(m, c), nn = mod_floor(n, c);
    for (u64 d = 0; d < c; ++d) {
        auto inv = modinv(i64(d), c);
        if (!inv) continue;
        ++counts[(mulmod(mm, *inv, c) + mulmod(nn, d, c)) % c];
    }
    return counts;
}

cplx kloosterman(i64 m, i64 n, u64 c) {
    auto counts = kloosterman_phase_counts(m, n, c);
    CompensatedComplexSum s;
    for (u64 k = 0; k < c; ++k)
        if (counts[k]) s.add(double(counts[k]) * e_frac(i64(k), c));
    return s.value();
}

cplx twisted_kloosterman(const DirichletCharacter& chi, i64 m, i64 n, u64 c) {
    u64 q = chi.modulus();
    if (c == 0 || c % q) throw std::invalid_argument("twisted_kloosterman: modulus of chi must divide c");
    auto tab = chi.table();
    auto roots = root_table(c);
    u64 mm = mod_floor(m, c), nn = mod_floor(n, c);
    CompensatedComplexSum s;
    for (u64 d = 0; d < c; ++d) {
        auto inv = modinv(i64(d), c);
        if (!inv) continue;
        s.add(std::conj(tab[d % q]) * roots[(mulmod(mm, *inv, c) + mulmod(nn, d, c)) % c]);
    }
    return s.value();
}

std::vector<double> kloosterman_row(i64 m, u64 c) {
    if (c == 0) throw std::invalid_argument("kloosterman: c must be positive");
    auto inv = inverse_table(c);
    std::vector<double> cosines(c);
    for (u64 k = 0; k < c; ++k) cosines[k] = e_frac(i64(k), c).real();
    // phase of unit d at n is m dbar + n d, advanced by d as n steps
    std::vector<u64> units, phase;
    u64 mm = mod_floor(m, c);
    for (u64 d = 0; d < c; ++d)
        if (gcd(d, c) == 1) {
            units.push_back(d);
            phase.push_back(mulmod(mm, inv[d], c));
        }
    std::vector<double> out(c);
    for (u64 n = 0; n < c; ++n) {
        double s = 0;
        for (std::size_t i = 0; i < units.size(); ++i) {
            s += cosines[phase[i]];
            phase[i] += units[i];
            if (phase[i] >= c) phase[i] -= c;
        }
        out[n] = s;
    }
    return out;
}

cplx ramanujan_sum(i64 n, u64 c) { return kloosterman(0, n, c); }

cplx twisted_multiplicativity_rhs(const DirichletCharacter& chi, i64 m, i64 n, u64 c1, u64 c2) {
    u64 q = chi.modulus();
    if (c1 == 0 || c2 == 0 || gcd(c1, c2) != 1) throw std::invalid_argument("twisted_multiplicativity: need coprime c1, c2");
    if ((c1 * c2) % q) throw std::invalid_argument("twisted_multiplicativity: modulus of chi must divide c1 c2");
    u64 q1 = gcd(q, c1), q2 = gcd(q, c2);
    auto chi1 = crt_component(chi, q1);
    auto chi2 = crt_component(chi, q2);
    u64 i1 = c2 == 1 ? 0 : *modinv(i64(c1 % c2), c2);
    u64 i2 = c1 == 1 ? 0 : *modinv(i64(c2 % c1), c1);
    i64 m1 = i64(mulmod(mulmod(mod_floor(m, c1), i2, c1), i2, c1));
    i64 m2 = i64(mulmod(mulmod(mod_floor(m, c2), i1, c2), i1, c2));
    cplx phase = chi1(i64(c2)) * chi2(i64(c1));
    return std::conj(phase) * twisted_kloosterman(chi1, m1, n, c1) * twisted_kloosterman(chi2, m2, n, c2);
}

bool twisted_multiplicativity_check(const DirichletCharacter& chi, i64 m, i64 n, u64 c1, u64 c2) {
    cplx rhs = twisted_multiplicativity_rhs(chi, m, n, c1, c2);
    cplx lhs = twisted_kloosterman(chi, m, n, c1 * c2);
    return std::abs(lhs - rhs) <= 1e-9 * std::sqrt(double(c1 * c2));
}

WeilCheck weil_check(i64 m, i64 n, u64 c) {
    double v = std::abs(kloosterman(m, n, c));
    double b = double(tau_k(factorize(c), 2)) * std::sqrt(double(gcd3(m, n, c))) * std::sqrt(double(c));
    return {v, b, v <= b + 1e-6};
}

Cusp make_cusp(u64 q, i64 u, u64 w) {
    if (q == 0 || w == 0 || q % w) throw std::invalid_argument("cusp: need w | q");
    if (gcd(mod_floor(u, w), w) != 1) throw std::invalid_argument("cusp: need gcd(u, w) = 1");
    u64 h = gcd(w, q / w);
    u64 r = mod_floor(u, h);
    for (u64 t = r == 0 ? h : r;; t += h)
        if (gcd(t, w) == 1) return {false, i64(t), w};
}

u64 cusp_width(u64 q, const Cusp& a) { return a.infinity ? 1 : gcd(a.w, q / a.w); }

bool cusp_equivalent(u64 q, const Cusp& a, const Cusp& b) {
    auto canon = [&](const Cusp& x) { return x.infinity ? make_cusp(q, 1, q) : make_cusp(q, x.u, x.w); };
    return canon(a) == canon(b);
}

bool is_singular(u64 q, const DirichletCharacter& chi, const Cusp& a) {
    if (q % chi.modulus()) throw std::invalid_argument("is_singular: modulus of chi must divide q");
    if (a.infinity) return true;
    return (q / cusp_width(q, a)) % chi.conductor() == 0;
}

double moduli_set_min(u64 q, const Cusp& a, const Cusp& b) {
    if (a.infinity && b.infinity) return double(q);
    if (!a.infinity && a == b) return double(q / cusp_width(q, a));
    if (a.infinity && !b.infinity) {
        Cusp c = make_cusp(q, b.u, b.w);
        u64 s = c.w, r = q / s;
        if (c.u == 1 && gcd(r, s) == 1) return double(s) * std::sqrt(double(r));
    }
    throw std::domain_error("moduli_set_min: unsupported cusp pair");
}

ScalingMatrix scaling_matrix(u64 q, const Cusp& a) {
    ScalingMatrix s;
    if (a.infinity) {
        s.p[0][0] = 1, s.p[0][1] = 0, s.p[1][0] = 0, s.p[1][1] = 1;
        s.lambda = 1;
        return s;
    }
    if (a.u == 0) throw std::invalid_argument("scaling_matrix: need u != 0");
    Rational x(a.u, i64(a.w));
    s.p[0][0] = x, s.p[0][1] = 0, s.p[1][0] = 1, s.p[1][1] = 1 / x;
    s.lambda = lcm(q, a.w * a.w);
    return s;
}

void CuspSumSpec::validate() const {
    if (q == 0 || q % chi.modulus()) throw std::invalid_argument("CuspSumSpec: modulus of chi must divide q");
    for (const Cusp& x : {a, b}) {
        if (!x.infinity && (x.w == 0 || q % x.w || gcd(mod_floor(x.u, x.w), x.w) != 1))
            throw std::invalid_argument("CuspSumSpec: invalid cusp");
        if (!is_singular(q, chi, x)) throw std::invalid_argument("CuspSumSpec: cusp is not singular");
    }
}

cplx eval_terms(const std::vector<FreqTerm>& terms, i64 m, i64 n) {
    CompensatedComplexSum s;
    for (const auto& t : terms) {
        Rational x = t.alpha * m + t.beta * n;
        Turn ph = Turn::make(x.numerator() % x.denominator(), u64(x.denominator())) + t.weight;
        s.add(ph.value());
    }
    return s.value();
}

TermMap aggregate(const std::vector<FreqTerm>& terms) {
    TermMap out;
    for (const auto& t : terms) out[{frac_part(t.alpha), frac_part(t.beta)}] += t.weight.value();
    return out;
}

double term_distance(const TermMap& f, const TermMap& g) {
    double d = 0;
    auto i = f.begin();
    auto j = g.begin();
    while (i != f.end() || j != g.end()) {
        if (j == g.end() || (i != f.end() && i->first < j->first)) {
            d += std::abs(i->second);
            ++i;
        } else if (i == f.end() || j->first < i->first) {
            d += std::abs(j->second);
            ++j;
        } else {
            d += std::abs(i->second - j->second);
            ++i, ++j;
        }
    }
    return d;
}

std::vector<OracleTerm> cusp_oracle_terms(u64 q, const Cusp& a, const Cusp& b, const Rational& n21) {
    if (n21.numerator() <= 0) throw std::invalid_argument("oracle: lower-left entry must be positive");
    ScalingMatrix sa = scaling_matrix(q, a), sb = scaling_matrix(q, b);
    const auto& pa = sa.p;
    const auto& pb = sb.p;
    Rational pai[2][2] = {{pa[1][1], -pa[0][1]}, {-pa[1][0], pa[0][0]}};
    Rational pbi[2][2] = {{pb[1][1], -pb[0][1]}, {-pb[1][0], pb[0][0]}};
    Rational rowr = pai[1][0], rowp = pai[1][1];
    i64 dx = lcm_i(den_of(rowr), den_of(rowp));
    i64 den = dx * lcm_i(den_of(pb[0][1]), den_of(pb[1][1]));
    Rational top = n21 * i64(sb.lambda);
    Rational span = top * den;
    i64 jmax = span.numerator() / span.denominator();

    std::vector<OracleTerm> out;
    std::vector<std::array<i64, 4>> sols;
    for (i64 j = 1; j <= jmax; ++j) {
        Rational n22(j, den);
        Rational X = n21 * pbi[0][0] + n22 * pbi[1][0];
        Rational Y = n21 * pbi[0][1] + n22 * pbi[1][1];
        sols.clear();
        if (rowr.numerator() == 0) {
            Rational C = X / rowp, D = Y / rowp;
            if (!is_int(C) || !is_int(D)) continue;
            i64 c = C.numerator(), d = D.numerator();
            if (mod_floor(c, q) || gcd_signed(c, d) != 1) continue;
            ExtGcd e = ext_gcd(d, c);  // d x + c y = 1
            sols.push_back({e.x, -e.y, c, d});
        } else {
            i64 L = lcm_i(lcm_i(den_of(X), den_of(Y)), den_of(rowr));
            i64 x1 = (X * L).numerator(), y1 = (Y * L).numerator();
            Rational rr = rowr * L;
            i64 rhs = rr.numerator();
            i64 g = gcd_signed(x1, y1);
            if (g == 0 || rhs % g) continue;
            ExtGcd e = ext_gcd(x1, -y1);  // x1 ex - y1 ey = g
            i64 k0 = rhs / e.g;
            i64 D0 = e.x * k0, C0 = e.y * k0;
            i64 stepD = y1 / g, stepC = x1 / g;
            Rational fa = rowp * stepC / rowr, fb = rowp * stepD / rowr;
            i64 per = stepC ? i64(q / gcd(q, u64(stepC < 0 ? -stepC : stepC))) : 1;
            per = lcm_i(lcm_i(per, den_of(fa)), den_of(fb));
            for (i64 k = 0; k < per; ++k) {
                i64 C = C0 + k * stepC, D = D0 + k * stepD;
                if (mod_floor(C, q)) continue;
                Rational A = (X - rowp * C) / rowr, B = (Y - rowp * D) / rowr;
                if (!is_int(A) || !is_int(B)) continue;
                sols.push_back({A.numerator(), B.numerator(), C, D});
            }
        }
        if (sols.empty()) continue;
        auto [A, B, C, D] = sols[0];
        if (A * D - B * C != 1) throw std::logic_error("oracle: determinant check failed");
        Rational r0 = pai[0][0] * A + pai[0][1] * C;
        Rational r1 = pai[0][0] * B + pai[0][1] * D;
        Rational n11 = r0 * pb[0][0] + r1 * pb[1][0];
        OracleTerm t;
        t.alpha = frac_part(n11 / (n21 * i64(sa.lambda)));
        t.beta = n22 / (n21 * i64(sb.lambda));
        std::set<i64> ds;
        for (const auto& s : sols) ds.insert(i64(mod_floor(s[3], q)));
        t.ds.assign(ds.begin(), ds.end());
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<FreqTerm> oracle_freq_terms(const std::vector<OracleTerm>& terms, const CuspSumSpec& spec) {
    std::vector<FreqTerm> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        auto w0 = spec.chi.turn(t.ds[0]);
        for (i64 d : t.ds)
            if (spec.chi.turn(d) != w0) throw std::logic_error("oracle: multiplier not constant on a stabilizer coset");
        if (!w0) continue;
        out.push_back({frac_part(t.alpha + spec.t1), frac_part(t.beta + spec.t2), -*w0});
    }
    return out;
}

cplx cusp_sum_definition_oracle(const CuspSumSpec& spec, i64 m, i64 n, const Rational& n21) {
    spec.validate();
    return eval_terms(oracle_freq_terms(cusp_oracle_terms(spec.q, spec.a, spec.b, n21), spec), m, n);
}

Rational lower_left_aa(u64 q, const Cusp& a, u64 c) {
    return Rational(i64(c), i64(scaling_matrix(q, a).lambda));
}

Rational lower_left_inf_s(u64 c) { return Rational(i64(c)); }

std::vector<Lemma41Term> lemma41_solutions(u64 q, i64 u, u64 w, u64 c) {
    if (u == 0 || w == 0 || q % w || gcd(mod_floor(u, w), w) != 1) throw std::invalid_argument("lemma41: invalid cusp");
    u64 h = gcd(w, q / w);
    if ((c * h) % q) throw std::invalid_argument("lemma41: c must be a multiple of q/(w, q/w)");
    u64 G = c * h / q;
    u64 au = u64(u < 0 ? -u : u);
    u64 gu = gcd(G, au);
    i64 gp = i64(G / gu), up = u / i64(gu);
    u64 m1 = G * q / w, m2 = w * u64(gp);
    std::vector<Lemma41Term> out;
    for (u64 d = 0; d < c; ++d) {
        i64 dl = i64(d);
        if (gcd(d, m1) != 1) continue;
        if (gcd(mod_floor(i64(G) + u * dl, w), w) != 1) continue;
        if (mod_floor(dl * (i64(G) + u * dl) - u, h)) continue;
        u64 r1 = m1 > 1 ? *modinv(dl, m1) : 0;
        u64 r2 = 0;
        if (m2 > 1) {
            auto iu = modinv(up, m2);
            auto iv = modinv(gp + up * dl, m2);
            if (!iu || !iv) throw std::logic_error("lemma41: alpha congruence has no solution");
            r2 = (mulmod(u64(gp) % m2, *iu, m2) + mulmod(mod_floor(up, m2), *iv, m2)) % m2;
        }
        auto al = crt(r1, m1, r2, m2);
        if (!al) throw std::logic_error("lemma41: CRT inconsistency");
        i64 alpha = i64(al->r);
        i64 arg = alpha * dl - 1;
        if (arg % i64(G)) throw std::logic_error("lemma41: (alpha delta - 1)/gamma is not an integer");
        out.push_back({alpha, dl, alpha + u * (arg / i64(G))});
    }
    return out;
}

std::vector<FreqTerm> lemma41_freq_terms(u64 q, const DirichletCharacter& chi, i64 u, u64 w, u64 c) {
    if (q % chi.modulus()) throw std::invalid_argument("lemma41: modulus of chi must divide q");
    if (!is_singular(q, chi, Cusp{false, u, w})) throw std::invalid_argument("lemma41: cusp is not singular");
    u64 h = gcd(w, q / w);
    Rational shift{i64(h), u * i64(q)};
    std::vector<FreqTerm> out;
    for (const auto& s : lemma41_solutions(q, u, w, c)) {
        auto t = chi.turn(s.chi_arg);
        if (!t) continue;
        Rational ci(1, i64(c));
        out.push_back({frac_part(s.alpha * ci - shift), frac_part(s.delta * ci + shift), -*t});
    }
    return out;
}

cplx cusp_sum_lemma41(u64 q, const DirichletCharacter& chi, i64 u, u64 w, i64 m, i64 n, u64 c) {
    return eval_terms(lemma41_freq_terms(q, chi, u, w, c), m, n);
}

std::vector<FreqTerm> lemma43_freq_terms(const DirichletCharacter& chi, u64 r, u64 s, u64 c) {
    u64 q0 = chi.modulus();
    if (r == 0 || s == 0 || c == 0) throw std::invalid_argument("lemma43: r, s, c must be positive");
    if (r % q0) throw std::invalid_argument("lemma43: modulus of chi must divide r");
    if (gcd(r, s) != 1) throw std::invalid_argument("lemma43: need gcd(r, s) = 1");
    if (gcd(c, r) != 1) throw std::invalid_argument("lemma43: need gcd(c, r) = 1");
    u64 sc = s * c;
    u64 rbar = sc == 1 ? 0 : *modinv(i64(r % sc), sc);
    u64 sbar = r == 1 ? 0 : *modinv(i64(s % r), r);
    Turn w = chi_bar(chi, i64(c));
    Rational shift{i64(sbar), i64(r)};
    std::vector<FreqTerm> out;
    for (u64 x = 0; x < sc; ++x) {
        auto xi = modinv(i64(x), sc);
        if (!xi) continue;
        Rational al(i64(mulmod(rbar, *xi, sc)), i64(sc));
        out.push_back({frac_part(al), frac_part(Rational(i64(x), i64(sc)) + shift), w});
    }
    return out;
}

cplx cusp_sum_lemma43(u64 q0, const DirichletCharacter& chi, u64 r, u64 s, u64 c, i64 m, i64 n) {
    if (chi.modulus() != q0) throw std::invalid_argument("lemma43: chi must have modulus q0");
    if (r % q0 || gcd(r, s) != 1 || gcd(c, r) != 1) throw std::invalid_argument("lemma43: coprimality conditions violated");
    u64 sc = s * c;
    u64 rbar = sc == 1 ? 0 : *modinv(i64(r % sc), sc);
    u64 sbar = r == 1 ? 0 : *modinv(i64(s % r), r);
    i64 mr = i64(mulmod(mod_floor(m, sc), rbar, sc));
    return chi_bar(chi, i64(c)).value() * e_frac(n * i64(sbar), r) * kloosterman(mr, n, sc);
}

double lemma42_bound_check(const CuspSumSpec& spec, i64 m, i64 n, u64 c, double A) {
    spec.validate();
    if (!(spec.a == spec.b)) throw std::invalid_argument("lemma42: needs a = b");
    cplx s = spec.a.infinity ? twisted_kloosterman(spec.chi, m, n, c)
                             : cusp_sum_lemma41(spec.q, spec.chi, spec.a.u, spec.a.w, m, n, c);
    double denom = std::sqrt(double(gcd3(m, n, c))) * std::pow(double(tau_k(factorize(c), 2)), A) *
                   std::sqrt(double(c) * double(spec.chi.modulus()));
    return std::abs(s) / denom;
}

}  // namespace kd
