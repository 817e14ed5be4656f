#include "kd/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kd/characters.hpp"
#include "kd/summation.hpp"

namespace kd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kOrder = 5;

// truncated Taylor series: c[k] = f^(k) / k!
struct Jet {
    std::array<double, kOrder> c{};

    static Jet constant(double v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
    Jet operator+(const Jet& o) const {
        Jet r;
        for (int k = 0; k < kOrder; ++k) r.c[k] = c[k] + o.c[k];
        return r;
    }
    Jet operator-(const Jet& o) const {
        Jet r;
        for (int k = 0; k < kOrder; ++k) r.c[k] = c[k] - o.c[k];
        return r;
    }
    Jet operator*(const Jet& o) const {
        Jet r;
        for (int k = 0; k < kOrder; ++k)
            for (int j = 0; j <= k; ++j) r.c[k] += c[j] * o.c[k - j];
        return r;
    }
    Jet scaled(double s) const {
        Jet r;
        for (int k = 0; k < kOrder; ++k) r.c[k] = c[k] * s;
        return r;
    }
};

Jet recip(const Jet& f) {
    Jet h;
    h.c[0] = 1 / f.c[0];
    for (int k = 1; k < kOrder; ++k) {
        double s = 0;
        for (int j = 1; j <= k; ++j) s += f.c[j] * h.c[k - j];
        h.c[k] = -s / f.c[0];
    }
    return h;
}

Jet exp(const Jet& f) {
    Jet g;
    g.c[0] = std::exp(f.c[0]);
    for (int k = 1; k < kOrder; ++k) {
        double s = 0;
        for (int j = 1; j <= k; ++j) s += j * f.c[j] * g.c[k - j];
        g.c[k] = s / k;
    }
    return g;
}

// exp(-1/t) for t > 0
Jet psi(const Jet& t) {
    if (t.c[0] < 1e-6) return Jet{};
    return exp(recip(t).scaled(-1));
}

// smooth step: 0 for t <= 0, 1 for t >= 1
Jet step(const Jet& t) {
    if (t.c[0] <= 0) return Jet{};
    if (t.c[0] >= 1) return Jet::constant(1);
    Jet a = psi(t), b = psi(Jet::constant(1) - t);
    return a * recip(a + b);
}

double step(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    double a = t < 1e-6 ? 0 : std::exp(-1 / t), b = 1 - t < 1e-6 ? 0 : std::exp(-1 / (1 - t));
    return a / (a + b);
}

struct Quad {
    double value = 0, error = 0, l1 = 0;
};

using GK61 = boost::math::quadrature::gauss_kronrod<double, 61>;
using G30 = boost::math::quadrature::gauss<double, 30>;

// one 61-point Kronrod panel with the embedded 30-point Gauss rule
template <class F>
double gk_panel(F& f, double a, double b, double& err, double& l1) {
    const auto& x = GK61::abscissa();
    const auto& wk = GK61::weights();
    const auto& wg = G30::weights();
    double mid = (a + b) / 2, h = (b - a) / 2;
    double fc = f(mid), k = fc * wk[0], g = 0, l = std::abs(fc) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        double fp = f(mid + h * x[i]), fm = f(mid - h * x[i]);
        k += (fp + fm) * wk[i];
        l += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 1) g += (fp + fm) * wg[i / 2];
    }
    err = std::abs(h * (k - g));
    l1 = h * l;
    return h * k;
}

// bisection until the Kronrod-Gauss gap is below tol or at the rounding floor of the panel
template <class F>
void adapt(F& f, double a, double b, double tol, int depth, CompensatedSum& v, Quad& q) {
    double err = 0, l1 = 0;
    double r = gk_panel(f, a, b, err, l1);
    if (err <= tol || err <= 1e-14 * l1 || depth >= 40) {
        v.add(r);
        q.error += err;
        q.l1 += l1;
        return;
    }
    double mid = (a + b) / 2;
    adapt(f, a, mid, tol / 2, depth + 1, v, q);
    adapt(f, mid, b, tol / 2, depth + 1, v, q);
}

// adaptive Gauss-Kronrod over consecutive cuts, each piece split into n equal panels;
// tol is the absolute target for the whole range
template <class F>
Quad quad(F f, const std::vector<double>& cuts, std::size_t n = 1, double tol = 1e-13) {
    Quad q;
    CompensatedSum v;
    // rounding floor from a coarse L1 estimate of the whole range
    double coarse = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        for (std::size_t j = 0; j < n && cuts[i + 1] > cuts[i]; ++j) {
            double a = cuts[i] + (cuts[i + 1] - cuts[i]) * double(j) / double(n);
            double b = cuts[i] + (cuts[i + 1] - cuts[i]) * double(j + 1) / double(n);
            double err = 0, l1 = 0;
            gk_panel(f, a, b, err, l1);
            coarse += l1;
        }
    double per = std::max(tol, 1e-15 * coarse) / double(n * std::max<std::size_t>(1, cuts.size() - 1));
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        if (!(b > a)) continue;
        for (std::size_t j = 0; j < n; ++j) {
            double lo = a + (b - a) * double(j) / double(n), hi = j + 1 == n ? b : a + (b - a) * double(j + 1) / double(n);
            adapt(f, lo, hi, per, 0, v, q);
        }
    }
    q.value = v.value();
    return q;
}

void require_converged(const Quad& q, double tol, const char* what) {
    if (!(q.error <= tol + 1e-12 * q.l1)) throw std::runtime_error(std::string(what) + ": quadrature did not converge");
}

std::vector<double> log_cuts(const Profile& f) {
    std::vector<double> c;
    for (double b : f.breaks) c.push_back(std::log(b));
    return c;
}

// log breakpoints with each piece further split into n equal parts
std::vector<double> fine_log_cuts(const Profile& f, std::size_t n) {
    auto c = log_cuts(f);
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) out.push_back(c[i] + (c[i + 1] - c[i]) * double(j) / double(n));
    out.push_back(c.back());
    return out;
}

void require_positive_support(const Profile& f, const char* what) {
    if (!(f.lo > 0)) throw std::invalid_argument(std::string(what) + ": support must lie in the positive reals");
}

constexpr std::array<double, 15> kLanczos{0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
                                          14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
                                          .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
                                          -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
                                          .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};
constexpr double kLanczosG = 607.0 / 128.0;

// J_nu(x) and x J_nu'(x) by the power series
std::pair<cplx, cplx> j_series(cplx nu, double x) {
    cplx term = std::exp(nu * std::log(x / 2) - lgamma_complex(nu + 1.0));
    cplx sum = term, dsum = nu * term;
    double y = x * x / 4;
    for (int m = 1; m < 500; ++m) {
        term *= -y / (double(m) * (double(m) + nu));
        sum += term;
        dsum += (2.0 * m + nu) * term;
        if (m > x && std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return {sum, dsum};
}

constexpr double kSeriesLimit = 8.0;
constexpr std::size_t kOdePieces = 16;

using State6 = std::array<double, 6>;
using State3 = std::array<double, 3>;

// integrates from s0 to s1, restarting the step size at each cut strictly between them
template <class State, class Sys>
void run_ode(Sys sys, State& x, double s0, double s1, const std::vector<double>& cuts = {}) {
    using namespace boost::numeric::odeint;
    std::vector<double> stops{s0};
    for (double c : cuts)
        if ((c - s0) * (c - s1) < 0) stops.push_back(c);
    stops.push_back(s1);
    std::sort(stops.begin(), stops.end());
    if (s1 < s0) std::reverse(stops.begin(), stops.end());
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        auto stepper = make_controlled(1e-13, 1e-13, runge_kutta_fehlberg78<State>());
        double dt = (stops[i + 1] - stops[i]) * 1e-3;
        integrate_adaptive(stepper, sys, x, stops[i], stops[i + 1], dt);
    }
}

// J_{2it} on [x0, x1] upward from the series at x0 <= 8, with weight w(x) integrated in s = log x
template <class W>
std::pair<cplx, cplx> j_imag_ode(double t, double x0, double x1, W w, cplx* integral, const std::vector<double>& cuts = {}) {
    auto [y, ys] = j_series(cplx(0, 2 * t), x0);
    double scale = std::max(std::abs(y), std::abs(ys));
    if (scale == 0) scale = 1;
    State6 st{y.real() / scale, y.imag() / scale, ys.real() / scale, ys.imag() / scale, 0, 0};
    double q = 4 * t * t;
    auto sys = [&](const State6& v, State6& d, double s) {
        double x = std::exp(s), k = -(q + x * x), wt = w(x);
        d[0] = v[2], d[1] = v[3];
        d[2] = k * v[0], d[3] = k * v[1];
        d[4] = wt * v[0], d[5] = wt * v[1];
    };
    run_ode(sys, st, std::log(x0), std::log(x1), cuts);
    if (integral) *integral = cplx(st[4], st[5]) * scale;
    return {cplx(st[0], st[1]) * scale, cplx(st[2], st[3]) * scale};
}

// K_{2it}(x) and x K'(x) from the cosh integral; accurate when e^-x is not far below |K|
std::pair<double, double> k_integral(double t, double x) {
    double xi_max = std::log(2 * 70 / x) + 20;
    double w = 2 * t;
    std::size_t n = std::size_t(std::abs(w) * xi_max / (2 * kPi)) + 1;
    // beyond xi_max the integrand is below exp(-70 e^20): no tail contribution in double precision
    auto v = quad([&](double xi) { return std::exp(-x * std::cosh(xi)) * std::cos(w * xi); }, {0.0, xi_max}, n, 0.0);
    auto d = quad([&](double xi) { return -x * std::cosh(xi) * std::exp(-x * std::cosh(xi)) * std::cos(w * xi); }, {0.0, xi_max}, n, 0.0);
    require_converged(v, 0.0, "bessel_k_imag");
    return {v.value, d.value};
}

// K_{2it} continued downward from x1 to x0 in s = log x, with weight w integrated
template <class W>
double k_imag_ode(double t, double x1, double x0, W w, double* integral, const std::vector<double>& cuts = {}) {
    auto [y, ys] = k_integral(t, x1);
    double scale = std::max(std::abs(y), std::abs(ys));
    if (scale == 0) scale = 1;
    State3 st{y / scale, ys / scale, 0};
    double q = 4 * t * t;
    auto sys = [&](const State3& v, State3& d, double s) {
        double x = std::exp(s);
        d[0] = v[1];
        d[1] = (x * x - q) * v[0];
        d[2] = w(x) * v[0];
    };
    run_ode(sys, st, std::log(x1), std::log(x0), cuts);
    if (integral) *integral = -st[2] * scale;  // integrated from x1 down to x0
    return st[0] * scale;
}

void check_bessel_domain(double t, double x, const char* what) {
    if (!(x > 0 && x <= 1e3 && std::abs(t) <= 10)) throw std::domain_error(std::string(what) + ": need 0 < x <= 1e3 and |t| <= 10");
}

// integral of J_{2it}(x) f(x) dx / x
cplx j_imag_moment(const Profile& f, double t) {
    if (f.hi <= kSeriesLimit) {
        auto g = [&](double s, bool im) {
            double x = std::exp(s);
            cplx j = j_series(cplx(0, 2 * t), x).first * f.f(x);
            return im ? j.imag() : j.real();
        };
        auto cuts = log_cuts(f);
        auto re = quad([&](double s) { return g(s, false); }, cuts), im = quad([&](double s) { return g(s, true); }, cuts);
        require_converged(re, 1e-12, "transform_tilde");
        require_converged(im, 1e-12, "transform_tilde");
        return {re.value, im.value};
    }
    cplx out;
    j_imag_ode(t, std::min(f.lo, kSeriesLimit), f.hi, f.f, &out, fine_log_cuts(f, kOdePieces));
    return out;
}

// integral of K_{2it}(x) f(x) dx / x
double k_imag_moment(const Profile& f, double t) {
    if (f.lo >= 2 * std::abs(t)) {
        auto cuts = log_cuts(f);
        auto r = quad(
            [&](double s) {
                double x = std::exp(s), v = f.f(x);
                return v == 0 ? 0.0 : k_integral(t, x).first * v;
            },
            cuts);
        require_converged(r, 1e-12, "transform_caron");
        return r.value;
    }
    double out = 0;
    k_imag_ode(t, std::max(f.hi, 2 * std::abs(t)), f.lo, f.f, &out, fine_log_cuts(f, kOdePieces));
    return out;
}

cplx i_pow(int k) {
    static const cplx units[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    return units[((k % 4) + 4) % 4];
}

}  // namespace

double SmoothTestFunction::operator()(double x) const {
    double u = x / X, w = ramp * (hi - lo);
    if (u <= lo || u >= hi) return 0;
    return step((u - lo) / w) * step((hi - u) / w);
}

std::array<double, 5> SmoothTestFunction::derivatives(double x) const {
    double w = ramp * (hi - lo);
    Jet u;
    u.c[0] = x / X;
    u.c[1] = 1 / X;
    Jet v = step((u - Jet::constant(lo)).scaled(1 / w)) * step((Jet::constant(hi) - u).scaled(1 / w));
    std::array<double, 5> d{};
    double fact = 1;
    for (int k = 0; k < kOrder; ++k) {
        if (k) fact *= k;
        d[k] = v.c[k] * fact;
    }
    if (u.c[0] <= lo || u.c[0] >= hi) d.fill(0);
    return d;
}

std::vector<double> SmoothTestFunction::breakpoints() const {
    double w = ramp * (hi - lo);
    std::vector<double> b{lo, lo + w, hi - w, hi};
    for (double& v : b) v *= X;
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

SmoothTestFunction bump(double lo, double hi, double X, double ramp) {
    if (!(hi > lo)) throw std::invalid_argument("bump: empty support");
    if (!(X > 0)) throw std::invalid_argument("bump: scale must be positive");
    if (!(ramp > 0 && ramp <= 0.5)) throw std::invalid_argument("bump: ramp fraction must lie in (0, 1/2]");
    SmoothTestFunction f{lo, hi, X, ramp, {}};
    constexpr int kSamples = 4000;
    for (int i = 1; i < kSamples; ++i) {
        double x = (lo + (hi - lo) * i / kSamples) * X;
        auto d = f.derivatives(x);
        double p = 1;
        for (int j = 0; j < 5; ++j, p *= X) f.certificate[j] = std::max(f.certificate[j], std::abs(d[j]) * p);
    }
    for (double c : f.certificate)
        if (!std::isfinite(c)) throw std::runtime_error("bump: non-finite derivative certificate");
    return f;
}

Profile profile(const SmoothTestFunction& f) {
    return {[f](double x) { return f(x); }, f.support_lo(), f.support_hi(), f.breakpoints()};
}

Profile combine(double a, const Profile& f, double b, const Profile& g) {
    std::vector<double> br = f.breaks;
    br.insert(br.end(), g.breaks.begin(), g.breaks.end());
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return {[a, b, ff = f.f, gg = g.f](double x) { return a * ff(x) + b * gg(x); }, std::min(f.lo, g.lo), std::max(f.hi, g.hi), br};
}

Profile zero_profile(double lo, double hi) { return {[](double) { return 0.0; }, lo, hi, {lo, hi}}; }

cplx fourier(const Profile& f, double xi) {
    std::size_t n = std::size_t(std::abs(xi) * (f.hi - f.lo)) + 1;
    double w = 2 * kPi * xi;
    auto re = quad([&](double t) { return f.f(t) * std::cos(w * t); }, f.breaks, n);
    auto im = quad([&](double t) { return -f.f(t) * std::sin(w * t); }, f.breaks, n);
    require_converged(re, 1e-10, "fourier");
    require_converged(im, 1e-10, "fourier");
    return {re.value, im.value};
}

PoissonCheck poisson_check(const SmoothTestFunction& f, u64 q, i64 a) {
    if (q == 0 || gcd(mod_floor(a, q), q) != 1) throw std::invalid_argument("poisson_check: need gcd(a, q) = 1");
    double M = std::max({1.0, std::abs(f.support_lo()), std::abs(f.support_hi())});
    PoissonCheck out{0, 0, std::pow(double(q), 1.05) / M};
    i64 r = i64(mod_floor(a, q)), Q = i64(q);
    i64 m = i64(std::ceil(f.support_lo()));
    m += ((r - m) % Q + Q) % Q;
    CompensatedSum lhs;
    for (; double(m) <= f.support_hi(); m += Q) lhs.add(f(double(m)));
    out.lhs = lhs.value();
    Profile p = profile(f);
    CompensatedSum rhs;
    rhs.add(fourier(p, 0).real());
    for (i64 h = 1; double(h) <= out.H; ++h) rhs.add(2 * (fourier(p, double(h) / double(q)) * e_frac(r * h, q)).real());
    out.rhs = rhs.value() / double(q);
    return out;
}

cplx mellin(const Profile& f, cplx s) {
    require_positive_support(f, "mellin");
    auto cuts = log_cuts(f);
    std::size_t n = std::size_t(std::abs(s.imag()) * (cuts.back() - cuts.front()) / (2 * kPi)) + 1;
    auto g = [&](double u, bool im) {
        cplx v = std::exp(s * u) * f.f(std::exp(u));
        return im ? v.imag() : v.real();
    };
    auto re = quad([&](double u) { return g(u, false); }, cuts, n), im = quad([&](double u) { return g(u, true); }, cuts, n);
    require_converged(re, 1e-10, "mellin");
    require_converged(im, 1e-10, "mellin");
    return {re.value, im.value};
}

cplx lgamma_complex(cplx z) {
    if (z.real() < 0.5) return std::log(kPi / std::sin(kPi * z)) - lgamma_complex(1.0 - z);
    z -= 1.0;
    cplx s = kLanczos[0];
    for (int k = 1; k < 15; ++k) s += kLanczos[k] / (z + double(k));
    cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2 * kPi) + (z + 0.5) * std::log(t) - t + std::log(s);
}

cplx gamma_complex(cplx z) {
    if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma_complex(1.0 - z));
    return std::exp(lgamma_complex(z));
}

double bessel_j_int(unsigned nu, double x) {
    if (!(x >= 0 && x <= 1e3)) throw std::domain_error("bessel_j_int: need 0 <= x <= 1e3");
    return std::cyl_bessel_j(double(nu), x);
}

cplx bessel_j_imag(double t, double x) {
    check_bessel_domain(t, x, "bessel_j_imag");
    if (x <= kSeriesLimit) return j_series(cplx(0, 2 * t), x).first;
    return j_imag_ode(t, kSeriesLimit, x, [](double) { return 0.0; }, nullptr).first;
}

double bessel_k_imag(double t, double x) {
    check_bessel_domain(t, x, "bessel_k_imag");
    if (x >= 2 * std::abs(t)) return k_integral(t, x).first;
    return k_imag_ode(t, 2 * std::abs(t), x, [](double) { return 0.0; }, nullptr);
}

double bessel_k_imag_integral(double t, double x) {
    check_bessel_domain(t, x, "bessel_k_imag_integral");
    return k_integral(t, x).first;
}

double bessel_k0_series(double x) {
    if (!(x > 0)) throw std::domain_error("bessel_k0_series: need x > 0");
    double y = x * x / 4, term = 1, h = 0, i0 = 1, rest = 0;
    for (int k = 1; k < 500; ++k) {
        term *= y / (double(k) * k);
        h += 1.0 / k;
        i0 += term;
        rest += term * h;
        if (term * h < 1e-18 * rest) break;
    }
    return -(std::log(x / 2) + std::numbers::egamma) * i0 + rest;
}

cplx transform_dot(const Profile& f, unsigned k) {
    require_positive_support(f, "transform_dot");
    if (k < 1) throw std::invalid_argument("transform_dot: need k >= 1");
    std::vector<double> cuts;
    std::size_t n = std::size_t((f.hi - f.lo) / (2 * kPi)) + 1;
    for (double b : f.breaks) cuts.push_back(b);
    auto r = quad([&](double x) { return std::cyl_bessel_j(double(k - 1), x) * f.f(x) / x; }, cuts, n);
    require_converged(r, 1e-9, "transform_dot");
    return 4.0 * i_pow(int(k)) * r.value;
}

cplx transform_tilde(const Profile& f, double t, int kappa) {
    require_positive_support(f, "transform_tilde");
    if (kappa != 0 && kappa != 1) throw std::invalid_argument("transform_tilde: kappa must be 0 or 1");
    if (kappa == 1) {
        double ratio = t == 0 ? 1 / kPi : t / std::sinh(kPi * t);
        return cplx(0, 4 * kPi * ratio * j_imag_moment(f, t).real());
    }
    auto at = [&](double u) { return -4 * kPi * j_imag_moment(f, u).imag() / std::sinh(kPi * u); };
    constexpr double h = 1e-4;
    if (std::abs(t) >= h) return at(t);
    // even in t: Richardson on the symmetric values at h and h/2
    return (4 * at(h / 2) - at(h)) / 3;
}

cplx transform_caron(const Profile& f, double t, int kappa) {
    require_positive_support(f, "transform_caron");
    if (kappa != 0 && kappa != 1) throw std::invalid_argument("transform_caron: kappa must be 0 or 1");
    return 8.0 * i_pow(-kappa) * std::cosh(kPi * t) * k_imag_moment(f, t);
}

Lemma44Report lemma44_check(double X, const std::vector<double>& ts, double calibration) {
    if (!(X >= 1e-3 && X <= 1e3)) throw std::invalid_argument("lemma44_check: need 1e-3 <= X <= 1e3");
    Profile f = profile(bump(0.5, 2.5, X));
    Lemma44Report rep{X, ts, {}, 0, true};
    double scale = (1 + X) / (1 + std::abs(std::log(X)));
    for (double t : ts) {
        if (std::abs(t) > 10) throw std::invalid_argument("lemma44_check: need |t| <= 10");
        double decay = std::min(1.0, (1 + std::pow(X, 1.5)) / (1 + std::pow(std::abs(t), 3)));
        double worst = 0;
        for (int kappa = 0; kappa <= 1; ++kappa) {
            double v = std::abs(transform_tilde(f, t, kappa)) / (1 + std::pow(std::abs(t), kappa)) + std::abs(transform_caron(f, t, kappa));
            double k = std::round(t);
            if (k == t && k > kappa && (int(k) - kappa) % 2 == 0) v += std::abs(transform_dot(f, unsigned(k)));
            worst = std::max(worst, v * scale / decay);
        }
        rep.ratios.push_back(worst);
        rep.max_ratio = std::max(rep.max_ratio, worst);
    }
    rep.ok = rep.max_ratio <= calibration;
    return rep;
}

}  // namespace kd
