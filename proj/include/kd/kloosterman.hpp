#pragma once

#include <boost/rational.hpp>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "kd/arith.hpp"
#include "kd/characters.hpp"

namespace kd {

using Rational = boost::rational<i64>;

// e(x) for rational x
cplx e_rat(const Rational& x);
// x mod 1 in [0, 1)
Rational frac_part(const Rational& x);

cplx kloosterman(i64 m, i64 n, u64 c);
cplx twisted_kloosterman(const DirichletCharacter& chi, i64 m, i64 n, u64 c);
// S(m, n; c) = sum over d mod c* of e((m dbar + n d)/c) via phase counts
std::vector<u64> kloosterman_phase_counts(i64 m, i64 n, u64 c);
// S(m, n; c) for n = 0..c-1
std::vector<double> kloosterman_row(i64 m, u64 c);
cplx ramanujan_sum(i64 n, u64 c);

bool twisted_multiplicativity_check(const DirichletCharacter& chi, i64 m, i64 n, u64 c1, u64 c2);
// right-hand side of the CRT factorisation, evaluated from the two smaller sums
cplx twisted_multiplicativity_rhs(const DirichletCharacter& chi, i64 m, i64 n, u64 c1, u64 c2);

struct WeilCheck {
    double value;
    double bound;
    bool ok;
};
WeilCheck weil_check(i64 m, i64 n, u64 c);

// cusp u/w of Gamma_0(q), or infinity
struct Cusp {
    bool infinity = false;
    i64 u = 1;
    u64 w = 1;

    static Cusp inf() { return {true, 1, 0}; }
    bool operator==(const Cusp&) const = default;
};

// validated cusp u/w, u reduced to the smallest positive value coprime to w in its class mod (w, q/w)
Cusp make_cusp(u64 q, i64 u, u64 w);
u64 cusp_width(u64 q, const Cusp& a);  // (w, q/w); 1 at infinity
bool cusp_equivalent(u64 q, const Cusp& a, const Cusp& b);
bool is_singular(u64 q, const DirichletCharacter& chi, const Cusp& a);
// smallest element of C(a, b); supports (a, a) and (inf, 1/s) with q = rs, (r, s) = 1
double moduli_set_min(u64 q, const Cusp& a, const Cusp& b);

// sigma = P diag(sqrt(lambda), 1/sqrt(lambda)), det P = 1
struct ScalingMatrix {
    Rational p[2][2];
    u64 lambda;
};
ScalingMatrix scaling_matrix(u64 q, const Cusp& a);

struct CuspSumSpec {
    u64 q;
    DirichletCharacter chi;
    Cusp a, b;
    Rational t1 = 0, t2 = 0;

    void validate() const;
};

// sum of weight * e(m alpha + n beta), frequencies reduced mod 1
struct FreqTerm {
    Rational alpha, beta;
    Turn weight;
};
using TermMap = std::map<std::pair<Rational, Rational>, cplx>;

cplx eval_terms(const std::vector<FreqTerm>& terms, i64 m, i64 n);
TermMap aggregate(const std::vector<FreqTerm>& terms);
// sum of |weight difference| over all frequencies: bounds |f - g| at every (m, n)
double term_distance(const TermMap& f, const TermMap& g);

// Every d in D_ab(c) found by exact enumeration: alpha = a/c mod 1, beta = d/c, and the
// lower-right entries D of all Gamma-matrices with that lower row (mod q).
struct OracleTerm {
    Rational alpha, beta;
    std::vector<i64> ds;
};

// c = n21 * sqrt(lambda_a lambda_b), n21 the lower-left entry of P_a^-1 gamma P_b
std::vector<OracleTerm> cusp_oracle_terms(u64 q, const Cusp& a, const Cusp& b, const Rational& n21);
// weights chi-bar(D); throws when chi(D) is not constant on a family (cusp pair not singular)
std::vector<FreqTerm> oracle_freq_terms(const std::vector<OracleTerm>& terms, const CuspSumSpec& spec);
cplx cusp_sum_definition_oracle(const CuspSumSpec& spec, i64 m, i64 n, const Rational& n21);
// n21 for S_aa(m, n; c), and for S_{inf,1/s}(m, n; c s sqrt(r))
Rational lower_left_aa(u64 q, const Cusp& a, u64 c);
Rational lower_left_inf_s(u64 c);

struct Lemma41Term {
    i64 alpha, delta;  // residues mod c
    i64 chi_arg;       // alpha + u (alpha delta - 1)/gamma
};
std::vector<Lemma41Term> lemma41_solutions(u64 q, i64 u, u64 w, u64 c);
std::vector<FreqTerm> lemma41_freq_terms(u64 q, const DirichletCharacter& chi, i64 u, u64 w, u64 c);
cplx cusp_sum_lemma41(u64 q, const DirichletCharacter& chi, i64 u, u64 w, i64 m, i64 n, u64 c);

std::vector<FreqTerm> lemma43_freq_terms(const DirichletCharacter& chi, u64 r, u64 s, u64 c);
cplx cusp_sum_lemma43(u64 q0, const DirichletCharacter& chi, u64 r, u64 s, u64 c, i64 m, i64 n);

// |S| / (gcd(m,n,c)^(1/2) tau(c)^A (c q0)^(1/2)); cusp pairs (inf, inf) or (a, a)
double lemma42_bound_check(const CuspSumSpec& spec, i64 m, i64 n, u64 c, double A = 1.0);

}  // namespace kd
