#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "kd/arith.hpp"

namespace kd {

using cplx = std::complex<double>;

// phi(x) = Phi(x / X), Phi an exp-glue bump on [lo, hi] rising over a ramp of width
// ramp * (hi - lo) at each end and equal to 1 in between (the middle half by default)
struct SmoothTestFunction {
    double lo, hi;
    double X;
    double ramp;
    std::array<double, 5> certificate;  // sampled max of |phi^(j)| X^j, j <= 4

    double operator()(double x) const;
    std::array<double, 5> derivatives(double x) const;  // phi^(j)(x), j <= 4
    double support_lo() const { return lo * X; }
    double support_hi() const { return hi * X; }
    // points where phi is not analytic
    std::vector<double> breakpoints() const;
};

SmoothTestFunction bump(double lo, double hi, double X, double ramp = 0.25);

// real compactly supported profile: the common input of the transforms
struct Profile {
    std::function<double(double)> f;
    double lo, hi;
    std::vector<double> breaks;  // includes lo and hi
};

Profile profile(const SmoothTestFunction& f);
Profile combine(double a, const Profile& f, double b, const Profile& g);
Profile zero_profile(double lo, double hi);

// integral of f(t) e(-xi t)
cplx fourier(const Profile& f, double xi);
inline cplx fourier(const SmoothTestFunction& f, double xi) { return fourier(profile(f), xi); }

struct PoissonCheck {
    double lhs;
    double rhs;
    double H;
};
// sum of f(m) over m == a (q) against (1/q) sum_{|h| <= H} fhat(h/q) e(ah/q), H = q^1.05 / M
PoissonCheck poisson_check(const SmoothTestFunction& f, u64 q, i64 a);
// |lhs - rhs| <= 1e-8 + C / q for bump(-1, 1, M), M in {100, 1000}, q <= 50: observed max q |lhs - rhs| = 13.03
inline constexpr double kPoissonCalibration = 20.0;

// integral over x > 0 of f(x) x^(s-1)
cplx mellin(const Profile& f, cplx s);
inline cplx mellin(const SmoothTestFunction& f, cplx s) { return mellin(profile(f), s); }

cplx lgamma_complex(cplx z);
cplx gamma_complex(cplx z);

double bessel_j_int(unsigned nu, double x);
cplx bessel_j_imag(double t, double x);   // J_{2it}(x)
double bessel_k_imag(double t, double x);  // K_{2it}(x)
// K_{2it}(x) straight from the cosh integral, without the small-x continuation
double bessel_k_imag_integral(double t, double x);
// K_0 from its power series
double bessel_k0_series(double x);

cplx transform_dot(const Profile& f, unsigned k);
cplx transform_tilde(const Profile& f, double t, int kappa);
cplx transform_caron(const Profile& f, double t, int kappa);

struct Lemma44Report {
    double X;
    std::vector<double> ts;
    std::vector<double> ratios;
    double max_ratio;
    bool ok;
};

// calibrated on X in {1e-3, 1e-2, ..., 1e3}, t in {0, 0.5, ..., 10}: observed maximum 107.2 (X = 1, t = 7)
inline constexpr double kLemma44Calibration = 150.0;

Lemma44Report lemma44_check(double X, const std::vector<double>& ts, double calibration = kLemma44Calibration);

}  // namespace kd
