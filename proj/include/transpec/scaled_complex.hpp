#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace transpec {

/// Complex value stored as mantissa * exp(exponent), with |mantissa| in
/// [1, 2) or exactly zero.  The exponent is kept on the natural-log scale so
/// that quantities like e^{lambda} with Re(lambda) ~ 1e6 stay representable
/// while the mantissa preserves the phase exactly.
class ScaledComplex {
  public:
    constexpr ScaledComplex() = default;

    static ScaledComplex from(std::complex<double> v) {
        return make(v, 0.0);
    }

    /// e^{s} without overflow: mantissa carries the phase, exponent the Re part.
    static ScaledComplex from_exp(std::complex<double> s) {
        return make(std::polar(1.0, s.imag()), s.real());
    }

    static ScaledComplex scaled(std::complex<double> mantissa, double exponent) {
        return make(mantissa, exponent);
    }

    std::complex<double> mantissa() const { return mant_; }
    double exponent() const { return exp_; }
    bool is_zero() const { return mant_ == std::complex<double>(0.0, 0.0); }

    /// Collapse to a plain complex.  Overflows to inf for huge exponents.
    std::complex<double> value() const { return mant_ * std::exp(exp_); }

    /// ln|value|; -inf for zero.
    double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(mant_)) + exp_;
    }

    double arg() const { return std::arg(mant_); }

    friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero() || b.is_zero()) return {};
        return make(a.mant_ * b.mant_, a.exp_ + b.exp_);
    }

    friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
        return make(a.mant_ / b.mant_, a.exp_ - b.exp_);
    }

    friend ScaledComplex operator*(const ScaledComplex& a, std::complex<double> c) {
        if (a.is_zero() || c == std::complex<double>(0.0, 0.0)) return {};
        return make(a.mant_ * c, a.exp_);
    }

    friend ScaledComplex operator*(std::complex<double> c, const ScaledComplex& a) {
        return a * c;
    }

    friend ScaledComplex operator*(const ScaledComplex& a, double c) {
        return a * std::complex<double>(c, 0.0);
    }

    friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const ScaledComplex& big = (a.exp_ >= b.exp_) ? a : b;
        const ScaledComplex& sml = (a.exp_ >= b.exp_) ? b : a;
        const double d = sml.exp_ - big.exp_;       // <= 0
        if (d < -746.0) return big;                 // addend underflows entirely
        return make(big.mant_ + sml.mant_ * std::exp(d), big.exp_);
    }

    friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
        return a + (-b);
    }

    friend ScaledComplex operator-(const ScaledComplex& a) {
        ScaledComplex r = a;
        r.mant_ = -r.mant_;
        return r;
    }

    friend ScaledComplex conj(const ScaledComplex& a) {
        ScaledComplex r = a;
        r.mant_ = std::conj(r.mant_);
        return r;
    }

    friend ScaledComplex square(const ScaledComplex& a) { return a * a; }

  private:
    static ScaledComplex make(std::complex<double> m, double e) {
        ScaledComplex r;
        if (m == std::complex<double>(0.0, 0.0)) return r;   // canonical zero
        const double am = std::abs(m);
        if (!std::isfinite(am)) {
            r.mant_ = m;    // propagate NaN/inf rather than masking it
            r.exp_ = e;
            return r;
        }
        int k = 0;
        std::frexp(am, &k);                  // am = f * 2^k, f in [0.5, 1)
        const double scl = std::ldexp(1.0, 1 - k);   // exact power-of-two scaling
        r.mant_ = std::complex<double>(m.real() * scl, m.imag() * scl);
        r.exp_ = e + static_cast<double>(k - 1) * kLn2;
        return r;
    }

    static constexpr double kLn2 = 0.6931471805599453;

    std::complex<double> mant_{0.0, 0.0};
    double exp_ = 0.0;
};

/// sinh on the scaled representation; safe for |z| up to ~1e8 in the exponent.
inline ScaledComplex sc_sinh(std::complex<double> z) {
    if (std::abs(z) < 1e-3) {
        const std::complex<double> z2 = z * z;
        return ScaledComplex::from(z * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0))));
    }
    return (ScaledComplex::from_exp(z) - ScaledComplex::from_exp(-z)) * 0.5;
}

inline ScaledComplex sc_cosh(std::complex<double> z) {
    if (std::abs(z) < 1e-3) {
        const std::complex<double> z2 = z * z;
        return ScaledComplex::from(1.0 + z2 / 2.0 * (1.0 + z2 / 12.0 * (1.0 + z2 / 30.0)));
    }
    return (ScaledComplex::from_exp(z) + ScaledComplex::from_exp(-z)) * 0.5;
}

/// sinh(z)/z, finite at z = 0.
inline ScaledComplex sc_sinhc(std::complex<double> z) {
    if (std::abs(z) < 1e-3) {
        const std::complex<double> z2 = z * z;
        return ScaledComplex::from(1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0)));
    }
    return sc_sinh(z) * ScaledComplex::from(1.0 / z);
}

} // namespace transpec
