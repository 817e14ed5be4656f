#pragma once

#include <map>
#include <utility>
#include <vector>

#include "kd/arith.hpp"

namespace kd {

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

struct TitchmarshConstants {
    double c1;          // zeta(2) zeta(3) / zeta(6)
    double c1_product;  // Euler product over p <= cutoff
    double c2;          // sum over p <= cutoff
    double gamma;
    u64 cutoff;
    double c1_tail;  // |C1 - c1_product| <= c1_tail
    double c2_tail;  // |C2 - c2| <= c2_tail
};

TitchmarshConstants constants_with_cutoff(u64 P);
// smallest power-of-two cutoff meeting target; domain_error if out of reach
TitchmarshConstants constants(double target = 1e-5);
const TitchmarshConstants& default_constants();  // cutoff 10^7, cached

// C1(q), C2(q); products and sums over p not dividing q
std::pair<double, double> constants_q(u64 q);

// sum of c_p log p
struct LogCombination {
    std::map<u64, u64> coeff;
    double value() const;
};

double t_sum(u64 x);
LogCombination t_sum_symbolic(u64 x);
std::vector<double> t_sum_series(u64 X);  // T(0..X)
u64 tau_shift_prime_sum(u64 x);

double main_term(double x);
double li(double x);  // principal value from 0
double corollary13_main(double x);
double exceptional_term(double x, u64 qt, double beta);

struct HyperbolaDecomposition {
    double t_direct;
    double t_hyperbola;
    double correction;  // sum of Lambda(n) over n - 1 a positive square; t_direct = t_hyperbola - correction
};

HyperbolaDecomposition hyperbola_decomposition(u64 x);

// t_hyperbola - t_direct <= C sqrt(x) log x; calibrated on every x in [4, 1e4] and a log grid to 1e7:
// observed maximum 0.640 (x = 5), 0.085 at x = 1e7
inline constexpr double kHyperbolaEnvelope = 1.0;

double theorem62_lhs(u64 x, u64 Q, i64 a1, i64 a2);
double prop63_lhs(u64 x, i64 a);

}  // namespace kd
