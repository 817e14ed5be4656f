#pragma once

#include <complex>
#include <vector>

#include "kd/arith.hpp"
#include "kd/spectral.hpp"

namespace kd {

using cplx = std::complex<double>;

// deterministic per-index hash, the source of every pseudo-random coefficient
u64 splitmix64(u64 x);
// uniform in [0, 1) from (seed, stream, index)
double hash_unit(u64 seed, u64 stream, u64 index);

enum class Coefficients { Random, Ones, Zero };

struct DispersionConfig {
    u64 M = 1, N = 1, Q = 1, R = 1;
    i64 a1 = 1, a2 = 1;
    unsigned A = 1;
    u64 seed = 0;
    bool beta_squarefree = false;
    std::vector<cplx> alpha;  // alpha[i] is the coefficient of m = M + 1 + i
    std::vector<cplx> beta;   // beta[i] is the coefficient of n = N + 1 + i
    SmoothTestFunction gamma_weight;    // >= 1 on (Q, 2Q], supported in (Q/2, 5Q/2)
    SmoothTestFunction alpha_majorant;  // >= 1 on (M, 2M], supported in [M/2, 3M]

    cplx alpha_at(u64 m) const { return m > M && m <= 2 * M ? alpha[m - M - 1] : cplx{}; }
    cplx beta_at(u64 n) const { return n > N && n <= 2 * N ? beta[n - N - 1] : cplx{}; }
};

// coefficients tau(n)^A * u * e(v) with u, v hashed from (seed, n); squarefree
// restriction zeroes beta off the squarefree integers
DispersionConfig make_dispersion_config(u64 M, u64 N, u64 Q, u64 R, i64 a1, i64 a2, u64 seed,
                                        Coefficients alpha_kind = Coefficients::Random,
                                        Coefficients beta_kind = Coefficients::Random,
                                        bool beta_squarefree = false, unsigned A = 1);
// throws std::invalid_argument naming the violated condition
void validate(const DispersionConfig& cfg);

// 1_{n = 1 (q)} - phi(q)^-1 sum over chi mod q of conductor <= R of chi(n)
double u_r(i64 n, u64 q, u64 R);
// u_R(n; q) for n = 0..q-1
std::vector<double> u_r_table(u64 q, u64 R);
// same value through the principal character split
double u_r_split(i64 n, u64 q, u64 R);

// sum over Q < q <= 2Q, (q, a1 a2) = 1 of sum alpha_m beta_n u_R(m n a2 / a1; q), (n, a2) = 1
cplx theorem51_lhs(const DispersionConfig& cfg);
// sum over Q < q <= 2Q of the max over units a of |sum alpha_m beta_n u_R(m n / a; q)|
double bv_range_lhs(const DispersionConfig& cfg);

struct DispersionSums {
    double s1;
    cplx s2;
    double s3;
    double residual() const { return s1 - 2 * s2.real() + s3; }
};
DispersionSums dispersion_sums(const DispersionConfig& cfg);
double s1(const DispersionConfig& cfg);
cplx s2(const DispersionConfig& cfg);
double s3(const DispersionConfig& cfg);
double dispersion_residual(const DispersionConfig& cfg);

double x1(const DispersionConfig& cfg);
double x2(const DispersionConfig& cfg);
double x3(const DispersionConfig& cfg);
// imaginary part of the x2 sum, zero up to rounding
double x2_imag(const DispersionConfig& cfg);

struct ResidualTrend {
    u64 M, N, Q;
    std::vector<u64> Rs;
    std::vector<double> normalized;  // seed average of residual R^2 / (M N^2)
    double log_power;                // max over R of log(normalized) / log log x, at least 0
};
ResidualTrend residual_trend(u64 M, u64 N, u64 Q, const std::vector<u64>& Rs, const std::vector<u64>& seeds,
                             i64 a1 = 1, i64 a2 = 1);

// mu q0 q1 q2 a2 n0 n1 against the three-term right side, checked modulo a2 n0,
// n1 q0, q0 q1 and q0 q2; throws std::invalid_argument on a failed hypothesis
bool congruence_identity_524(i64 q0, i64 q1, i64 q2, i64 a1, i64 a2, i64 n0, i64 n1, i64 n2);

struct TrilinearInstance {
    u64 C = 1, D = 1, N = 1, R = 1, S = 1;
    u64 q = 1;
    i64 c0 = 1, d0 = 1;
    std::vector<cplx> b;  // index ((n - 1) * R + (r - R - 1)) * S + (s - S - 1)
    SmoothTestFunction gc, gd;  // smooth weights supported in (C, 2C) and (D, 2D)
    double g_scale = 1.0;

    cplx b_at(u64 n, u64 r, u64 s) const;
    double norm_b() const;
};

TrilinearInstance make_trilinear_instance(u64 C, u64 D, u64 N, u64 R, u64 S, u64 q, u64 seed);
void validate(const TrilinearInstance& inst);

inline constexpr double kTrilinearLoopBudget = 1e9;

cplx theorem21_lhs(const TrilinearInstance& inst);
double theorem21_k2(double C, double D, double N, double R, double S, double q);
double theorem21_bound(const TrilinearInstance& inst);

struct TrilinearParams {
    u64 C, D, N, R, S, q;
};

struct TrilinearRow {
    TrilinearParams p;
    u64 seed;
    double lhs_abs;
    double bound;
    double ratio;
};

struct TrilinearReport {
    std::vector<TrilinearRow> rows;
    double max_ratio;
    bool ok;
};

// calibrated on random_trilinear_grid(50, 1) with instance seed 1: observed maximum 0.00897
inline constexpr double kTrilinearCalibration = 0.02;

std::vector<TrilinearParams> random_trilinear_grid(std::size_t count, u64 seed, u64 max_range = 32, u64 max_q = 8);
TrilinearReport theorem21_ratio_experiment(const std::vector<TrilinearParams>& grid, const std::vector<u64>& seeds,
                                           double calibration = kTrilinearCalibration);

}  // namespace kd
