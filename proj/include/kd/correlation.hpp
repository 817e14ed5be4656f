#pragma once

#include <cstdint>
#include <vector>

#include "kd/arith.hpp"

namespace kd {

// tau_k(n) for n in [0, x], entry 0 unused
std::vector<std::uint32_t> tau_table(u64 x, unsigned k);

// sum over n <= x of tau_k(n) tau(n + 1)
u64 tk_correlation(u64 x, unsigned k);

// 2 sum_{q <= sqrt x} phi(q)^-1 sum_{q^2 < n <= x, (n,q)=1} tau_k(n), plus the n = 1 term
// and the square diagonal sum over m >= 2 of tau_k(m^2 - 1)
double main_term_proxy(u64 x, unsigned k);

double theorem71_lhs(u64 x, u64 Q, i64 a, unsigned k);
double eq715_lhs(u64 x, i64 a, unsigned k);

struct ShiftedDecomposition {
    u64 direct;
    u64 rewritten;
};

ShiftedDecomposition shifted_decomposition(u64 x, unsigned k, i64 a);
bool shifted_decomposition_check(u64 x, unsigned k, i64 a);

// least squares T_k(x)/x against powers of log x, degree <= k; trailing
// degrees dropped once a lower degree fits exactly. Diagnostic only.
std::vector<double> fit_pk(const std::vector<double>& xs, const std::vector<double>& values, unsigned k);

struct CorrelationReport {
    unsigned k;
    std::vector<u64> xs;
    std::vector<u64> tk;
    std::vector<double> proxy;
    std::vector<double> residual;  // tk - proxy
    double decay_exponent;         // slope of log|residual/x| against log x
};

CorrelationReport correlation_report(unsigned k, const std::vector<u64>& xs);

}  // namespace kd
