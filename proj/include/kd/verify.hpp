#pragma once

#include <string>
#include <vector>

#include "kd/arith.hpp"
#include "kd/kloosterman.hpp"

namespace kd {

// exhaustive identity suites shared by the command line and the acceptance run
struct VerifyResult {
    std::string name;
    u64 checked = 0;
    double worst = 0;  // largest error relative to its tolerance; ok iff worst <= 1
    bool ok = true;
};

std::vector<Cusp> singular_cusps(u64 q, const DirichletCharacter& chi);

// |S(m, n; p)| <= 2 sqrt(p) + 1e-6 for primes p < pmax and all m, n with p not dividing mn
VerifyResult verify_weil_primes(u64 pmax);
// S(0, n; c) equals sum over d | (n, c) of d mu(c / d) exactly, for n, c <= nmax
VerifyResult verify_ramanujan(u64 nmax);
// (inf, 1/s) frequency expansion against the enumeration oracle: q = rs <= qmax, (r, s) = 1,
// c <= cmax, (c, r) = 1, all characters mod q0 | r; the frequency distance bounds the error at every (m, n)
VerifyResult verify_cusp_inf_s(u64 qmax, u64 cmax);
// (a, a) expansion on singular cusps of levels q <= qmax, c = gamma q / width, gamma <= gmax
VerifyResult verify_cusp_aa(u64 qmax, u64 gmax);
// orthogonality of the character tables for q <= qmax, within 1e-9
VerifyResult verify_orthogonality(u64 qmax);
// conductor against the smallest period of chi restricted to units, q <= qmax
VerifyResult verify_conductors(u64 qmax);
// |tau(chi)| = sqrt(q) for primitive chi mod q <= qmax, within 1e-9
VerifyResult verify_gauss_sums(u64 qmax);

}  // namespace kd
