#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "transpec/scaled_complex.hpp"

using transpec::ScaledComplex;
using C = std::complex<double>;

namespace {

double phase_diff(double a, double b) {
    double d = a - b;
    while (d > 3.141592653589793) d -= 2 * 3.141592653589793;
    while (d < -3.141592653589793) d += 2 * 3.141592653589793;
    return std::abs(d);
}

} // namespace

TEST_CASE("mantissa stays normalized through arithmetic") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-30.0, 30.0), ang(-3.14, 3.14);
    ScaledComplex acc = ScaledComplex::from({1.0, 0.0});
    for (int i = 0; i < 2000; ++i) {
        const ScaledComplex v =
            ScaledComplex::scaled(std::polar(std::exp(mag(rng) / 10.0), ang(rng)), mag(rng));
        acc = (i % 3 == 0) ? acc + v : acc * v;
        if (acc.is_zero()) continue;
        const double am = std::abs(acc.mantissa());
        REQUIRE(am >= 1.0);
        REQUIRE(am < 2.0);
    }
}

TEST_CASE("round trip against plain complex where no overflow occurs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const C a{re(rng), re(rng)}, b{re(rng), re(rng)};
        const C sum = a + b, prod = a * b;
        const ScaledComplex ss = ScaledComplex::from(a) + ScaledComplex::from(b);
        const ScaledComplex ps = ScaledComplex::from(a) * ScaledComplex::from(b);
        if (std::abs(sum) > 0) {
            REQUIRE(std::abs(ss.value() - sum) <= 1e-12 * std::abs(sum));
            REQUIRE(phase_diff(ss.arg(), std::arg(sum)) < 1e-12);
        }
        if (std::abs(prod) > 0) {
            REQUIRE(std::abs(ps.value() - prod) <= 1e-12 * std::abs(prod));
            REQUIRE(phase_diff(ps.arg(), std::arg(prod)) < 1e-12);
        }
    }
}

TEST_CASE("phases survive magnitudes far beyond double range") {
    const ScaledComplex a = ScaledComplex::from_exp({900.0, 1.3});
    const ScaledComplex b = ScaledComplex::from_exp({850.0, -0.4});
    const ScaledComplex p = a * b;
    REQUIRE(p.log_abs() == Catch::Approx(1750.0));
    REQUIRE(phase_diff(p.arg(), 0.9) < 1e-12);

    const ScaledComplex q = a / b; // exponents cancel back into range
    REQUIRE(std::abs(q.value() - std::polar(std::exp(50.0), 1.7)) <
            1e-12 * std::exp(50.0));
}

TEST_CASE("sum keeps the dominant term when the other underflows") {
    const ScaledComplex a = ScaledComplex::from_exp({1000.0, 0.5});
    const ScaledComplex b = ScaledComplex::from_exp({-1000.0, 0.1});
    const ScaledComplex s = a + b;
    REQUIRE(s.log_abs() == Catch::Approx(1000.0));
    REQUIRE(phase_diff(s.arg(), 0.5) < 1e-14);
}

TEST_CASE("zero is canonical") {
    const ScaledComplex z = ScaledComplex::from({0.0, 0.0});
    REQUIRE(z.is_zero());
    REQUIRE(z.exponent() == 0.0);
    const ScaledComplex d = ScaledComplex::from({2.5, 0.0}) - ScaledComplex::from({2.5, 0.0});
    REQUIRE(d.is_zero());
    REQUIRE(d.exponent() == 0.0);
    REQUIRE((z * ScaledComplex::from_exp({500.0, 1.0})).is_zero());
}

TEST_CASE("conjugation flips the phase only") {
    const ScaledComplex a = ScaledComplex::from_exp({123.0, 2.1});
    const ScaledComplex c = conj(a);
    REQUIRE(c.log_abs() == Catch::Approx(a.log_abs()));
    REQUIRE(phase_diff(c.arg(), -2.1) < 1e-14);
}

TEST_CASE("scaled sinh/cosh agree with std near the series threshold") {
    for (double m : {0.5e-3, 0.99e-3, 1.01e-3, 2e-3, 0.5, 3.0}) {
        const C z{m, 0.7 * m};
        const C sh = std::sinh(z), ch = std::cosh(z);
        REQUIRE(std::abs(transpec::sc_sinh(z).value() - sh) <= 1e-13 * std::abs(sh));
        REQUIRE(std::abs(transpec::sc_cosh(z).value() - ch) <= 1e-13 * std::abs(ch));
        REQUIRE(std::abs(transpec::sc_sinhc(z).value() - sh / z) <= 1e-12 * std::abs(sh / z));
    }
}
