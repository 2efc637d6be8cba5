#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "transpec/charfun.hpp"

using namespace transpec;
using C = std::complex<double>;

namespace {
constexpr double kPi = 3.141592653589793;

double rel_diff(const ScaledComplex& a, const ScaledComplex& b) {
    const ScaledComplex d = a - b;
    if (d.is_zero()) return 0.0;
    return std::exp(d.log_abs() - std::max(a.log_abs(), b.log_abs()));
}
} // namespace

TEST_CASE("open-loop inviscid residual") {
    REQUIRE(char_open_inviscid({0.0, 0.0}, 1.0).is_zero());
    REQUIRE(std::exp(char_open_inviscid({0.0, kPi}, 1.0).log_abs()) < 1e-14);
    REQUIRE(std::abs(char_open_inviscid({std::log(2.0), 0.0}, 1.0).value() - C{3.0, 0.0}) <
            1e-13);
}

TEST_CASE("proportional-feedback residual vanishes on the closed-form roots") {
    // e^s = 1/2 and e^s = -2 solve w^2 + 1.5 w - 1 = 0
    REQUIRE(std::exp(char_prop_inviscid({-std::log(2.0), 0.0}, 1.0, 0.75).log_abs()) < 1e-13);
    REQUIRE(std::exp(char_prop_inviscid({std::log(2.0), kPi}, 1.0, 0.75).log_abs()) < 1e-12);
    REQUIRE(char_prop_inviscid({0.0, 0.0}, 1.0, 0.0).is_zero());
}

TEST_CASE("Schur verdict for the sampled-feedback polynomial") {
    {
        const SchurRoots r = schur_poly_roots(0.0, 1.0); // dead beat
        REQUIRE(std::abs(r.r1) < 1e-15);
        REQUIRE(std::abs(r.r2) < 1e-15);
        REQUIRE(r.stable);
    }
    {
        const SchurRoots r = schur_poly_roots(0.0, 0.0); // roots +-1, marginal
        REQUIRE(std::abs(std::abs(r.r1) - 1.0) < 1e-15);
        REQUIRE(std::abs(std::abs(r.r2) - 1.0) < 1e-15);
        REQUIRE_FALSE(r.stable);
    }
    {
        const SchurRoots r = schur_poly_roots(1.0, 1.0); // roots 0 and -2
        const double big = std::max(std::abs(r.r1), std::abs(r.r2));
        REQUIRE(big == Catch::Approx(2.0));
        REQUIRE_FALSE(r.stable);
    }
}

TEST_CASE("dead-beat viscous residual: confluence root and hand value at s = 0") {
    SystemParams p;
    p.set_viscosity(0.1).set_gains(0.0, 1.0);
    // confluence s = -1/(4 eta): N = D = 0 there
    REQUIRE(std::exp(char_deadbeat_viscous({-2.5, 0.0}, p).log_abs() -
                     char_deadbeat_viscous({-2.4, 0.0}, p).log_abs()) < 1e-10);
    // s = 0: lambda = (10, 0), N = 10, D = 10, P = 100 - 100 - 100 = -100
    const C v = char_deadbeat_viscous({0.0, 0.0}, p).value();
    REQUIRE(std::abs(v - C{-100.0, 0.0}) < 1e-9);
}

TEST_CASE("dead-beat viscous residual commutes with conjugation") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 4000; ++i) {
        const double eta = 0.02 + 0.3 * (0.5 + 0.5 * u(rng));
        const double eps = 0.2 * u(rng);
        SystemParams p;
        p.set_viscosity(eta).set_perturbation(eps);
        const C s{8.0 * u(rng), 80.0 * u(rng)};
        const ScaledComplex a = char_deadbeat_viscous(std::conj(s), p);
        const ScaledComplex b = conj(char_deadbeat_viscous(s, p));
        REQUIRE(rel_diff(a, b) < 1e-11);
    }
}

TEST_CASE("pole clearing is sound: P / D^2 = f^2 - f e^{-s} - 1 off the poles") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        const double eta = 0.03 + 0.4 * (0.5 + 0.5 * u(rng));
        const double eps = 0.2 * u(rng);
        SystemParams p;
        p.set_viscosity(eta).set_perturbation(eps);
        const C s{6.0 * u(rng), 50.0 * u(rng)};
        const TransferValue fv = f_viscous(s, p);
        if (fv.is_pole) continue;
        const ScaledComplex f = fv.value;
        const ScaledComplex E = ScaledComplex::from_exp(-s);
        const ScaledComplex direct = f * f - f * E - ScaledComplex::from(1.0);

        // rebuild D^2 = N^2 / f^2 from the pieces the evaluator uses
        const double c = 1.0 + eps;
        const C w = std::sqrt(C{c * c, 0.0} + 4.0 * eta * s);
        if (std::abs(w) < 1e-4) continue; // stay away from the confluence
        const ScaledComplex N = ScaledComplex::from(w / eta);
        const ScaledComplex D2 = (N / f) * (N / f);
        const ScaledComplex lhs = char_deadbeat_viscous(s, p) / D2;
        REQUIRE(rel_diff(lhs, direct) < 1e-9);
        ++checked;
    }
}

TEST_CASE("z-form residual values") {
    REQUIRE(char_zform({0.0, 0.0}, 0.1).is_zero());
    const C v = char_zform({1.0, 0.0}, 0.5).value();
    REQUIRE(std::abs(v - C{1.0, 0.0}) < 1e-13);
}

TEST_CASE("z-form roots map onto s-plane roots of the dead-beat residual") {
    // spot check: z solves the z-form <=> s = (z^2-1)/(4 eta) solves the s-form.
    const double eta = 0.1;
    SystemParams p;
    p.set_viscosity(eta);
    // Newton-refine a z-form root near z = 1.1 + 1.3i, then map it
    C z{1.1, 1.3};
    for (int it = 0; it < 80; ++it) {
        const double h = 1e-7;
        const ScaledComplex fd =
            (char_zform(z + C{h, 0.0}, eta) - char_zform(z - C{h, 0.0}, eta)) * (1.0 / (2 * h));
        const C step = (char_zform(z, eta) / fd).value();
        z -= step;
        if (std::abs(step) < 1e-13) break;
    }
    const C s = (z * z - 1.0) / (4.0 * eta);
    const ScaledComplex near_root = char_deadbeat_viscous(s, p);
    const ScaledComplex probe = char_deadbeat_viscous(s + C{0.05, 0.0}, p);
    REQUIRE(std::exp(near_root.log_abs() - probe.log_abs()) < 1e-8);
}

TEST_CASE("scalar-pair residual: factor 1 + e^{-s} kills s = i pi") {
    const double eta = 0.1;
    // at s = i pi the residual reduces to -e^{1/eta}
    const ScaledComplex v = char_simpler({0.0, kPi}, eta);
    REQUIRE(std::abs(v.log_abs() - 1.0 / eta) < 1e-10);
    REQUIRE(std::abs(std::abs(v.arg()) - kPi) < 1e-9);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const C s{2.0 * u(rng), 40.0 * u(rng)};
        const ScaledComplex a = char_simpler(std::conj(s), eta);
        const ScaledComplex b = conj(char_simpler(s, eta));
        REQUIRE(rel_diff(a, b) < 1e-11);
    }
}

TEST_CASE("perturbed inviscid dead beat") {
    // nominal case: residual is identically -1
    for (double im : {0.0, 3.0, 17.0}) {
        const C v = char_deadbeat_inviscid_perturbed({0.3, im}, 0.0).value();
        REQUIRE(std::abs(v - C{-1.0, 0.0}) < 1e-12);
    }
    // large real s: both exponentials vanish
    const C v = char_deadbeat_inviscid_perturbed({80.0, 0.0}, 0.1).value();
    REQUIRE(std::abs(v - C{-1.0, 0.0}) < 1e-12);
    // eps = 0.1 reduces to the polynomial q^40 - q^42 - 1 under q = e^{-s/22}
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const C s{u(rng), 30.0 * u(rng)};
        const C q = std::exp(-s / 22.0);
        C poly{1.0, 0.0};
        C q2 = q * q;
        C q40{1.0, 0.0};
        for (int k = 0; k < 20; ++k) q40 *= q2;
        poly = q40 - q40 * q2 - 1.0;
        const C direct = char_deadbeat_inviscid_perturbed(s, 0.1).value();
        REQUIRE(std::abs(direct - poly) <= 1e-11 * (std::abs(poly) + 1.0));
    }
}

TEST_CASE("variant dispatch matches the free evaluators") {
    const C s{-0.4, 2.2};
    REQUIRE(rel_diff(CharFn::open_inviscid(1.0)(s), char_open_inviscid(s, 1.0)) == 0.0);
    REQUIRE(rel_diff(CharFn::prop_inviscid(1.0, 0.75)(s), char_prop_inviscid(s, 1.0, 0.75)) ==
            0.0);
    SystemParams p;
    p.set_viscosity(0.1).set_gains(0.0, 1.0);
    REQUIRE(rel_diff(CharFn::deadbeat_viscous(0.1)(s), char_deadbeat_viscous(s, p)) == 0.0);
    REQUIRE(rel_diff(CharFn::simpler(0.1)(s), char_simpler(s, 0.1)) == 0.0);
    REQUIRE(rel_diff(CharFn::zform(0.1)(s), char_zform(s, 0.1)) == 0.0);
    REQUIRE(rel_diff(CharFn::deadbeat_perturbed(0.0, 0.1)(s),
                     char_deadbeat_inviscid_perturbed(s, 0.1)) == 0.0);
    REQUIRE_THROWS_AS(CharFn::deadbeat_viscous(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(CharFn::simpler(-0.1), std::invalid_argument);
}
