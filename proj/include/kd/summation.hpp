#pragma once

#include <cmath>
#include <complex>

namespace kd {

// Neumaier compensated sum
struct CompensatedSum {
    double s = 0.0;
    double c = 0.0;

    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    void add(const CompensatedSum& o) {
        add(o.s);
        add(o.c);
    }
    double value() const { return s + c; }
};

struct CompensatedComplexSum {
    CompensatedSum re, im;

    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    void add(const CompensatedComplexSum& o) {
        re.add(o.re);
        im.add(o.im);
    }
    std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace kd
