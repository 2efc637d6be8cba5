#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "transpec/model.hpp"

using namespace transpec;
using C = std::complex<double>;

namespace {

SystemParams viscous(double eta, double eps = 0.0) {
    SystemParams p;
    p.set_viscosity(eta).set_perturbation(eps);
    return p;
}

C sc_val(const ScaledComplex& v) { return v.value(); }

} // namespace

TEST_CASE("lambda pair closed-form values") {
    {
        const LambdaPair lp = lambda_pair({0.0, 0.0}, viscous(0.1));
        REQUIRE(std::abs(lp.lambda1 - C{10.0, 0.0}) < 1e-12);
        REQUIRE(std::abs(lp.lambda2 - C{0.0, 0.0}) < 1e-12);
    }
    {
        // discriminant zero: both roots collapse to 1/(2 eta)
        const LambdaPair lp = lambda_pair({-2.5, 0.0}, viscous(0.1));
        REQUIRE(std::abs(lp.lambda1 - C{5.0, 0.0}) < 1e-7);
        REQUIRE(std::abs(lp.lambda2 - C{5.0, 0.0}) < 1e-7);
    }
    {
        const LambdaPair lp = lambda_pair({1.0, 0.0}, viscous(0.25));
        REQUIRE(std::abs(lp.lambda1 - C{2.0 * (1.0 + std::sqrt(2.0)), 0.0}) < 1e-12);
        REQUIRE(std::abs(lp.lambda2 - C{2.0 * (1.0 - std::sqrt(2.0)), 0.0}) < 1e-12);
    }
}

TEST_CASE("lambda pair rejects the inviscid case") {
    REQUIRE_THROWS_AS(lambda_pair({1.0, 0.0}, SystemParams{}), std::invalid_argument);
}

TEST_CASE("Vieta identities hold over a large random sample") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000000; ++i) {
        const double eta = 0.001 + 0.999 * (0.5 + 0.5 * u(rng));
        const double eps = 0.45 * u(rng);
        const C s{40.0 * u(rng), 120.0 * u(rng)};
        const LambdaPair lp = lambda_pair(s, viscous(eta, eps));
        const C sum = lp.lambda1 + lp.lambda2;
        const C prod = lp.lambda1 * lp.lambda2;
        const C sum_want{(1.0 + eps) / eta, 0.0};
        const C prod_want = -s / eta;
        REQUIRE(std::abs(sum - sum_want) <= 1e-12 * (std::abs(sum_want) + 1.0));
        REQUIRE(std::abs(prod - prod_want) <= 1e-12 * (std::abs(prod_want) + 1.0));
    }
}

TEST_CASE("pure delay transfer") {
    REQUIRE(f_transport({0.0, 0.0}, 1.0) == C{1.0, 0.0});
    REQUIRE(std::abs(f_transport({0.0, 3.141592653589793}, 1.0) - C{-1.0, 0.0}) < 1e-15);
    REQUIRE(std::abs(f_transport({std::log(2.0), 0.0}, 1.0) - C{0.5, 0.0}) < 1e-15);
}

TEST_CASE("viscous transfer equals 1 at the origin") {
    for (double eta : {0.01, 0.1, 1.0}) {
        const TransferValue f = f_viscous({0.0, 0.0}, viscous(eta));
        REQUIRE_FALSE(f.is_pole);
        REQUIRE(std::abs(sc_val(f.value) - C{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("viscous transfer approaches the pure delay as eta -> 0") {
    const TransferValue f = f_viscous({1.0, 0.0}, viscous(1e-6));
    REQUIRE(std::abs(sc_val(f.value) - std::exp(C{-1.0, 0.0})) < 1e-3);
}

TEST_CASE("confluent value e^lam / (1 + lam) at the branch point") {
    const TransferValue f = f_viscous({-2.5, 0.0}, viscous(0.1));
    REQUIRE_FALSE(f.is_pole);
    REQUIRE(std::abs(sc_val(f.value) - std::exp(5.0) / 6.0) < 1e-9 * std::exp(5.0) / 6.0);
}

TEST_CASE("transfer is continuous across the confluence switch") {
    const double eta = 0.1, c = 1.0;
    const double s_star = -c * c / (4.0 * eta);
    // radius in s corresponding to twice the |w| switching threshold
    const double thr = detail::kConfluenceRel * c;
    const double rs = (2.0 * thr) * (2.0 * thr) / (4.0 * eta);
    const C limit = std::exp(C{5.0, 0.0}) / C{6.0, 0.0};
    for (int k = 0; k < 16; ++k) {
        const double ang = 2.0 * 3.141592653589793 * k / 16.0;
        const C s = C{s_star, 0.0} + std::polar(rs, ang);
        const C general = sc_val(f_viscous(s, viscous(eta)).value);
        REQUIRE(std::abs(general - limit) < 1e-8 * std::abs(limit));
    }
}

TEST_CASE("open-loop transfer values and poles") {
    {
        // inviscid, s = ln(1 + sqrt 2): G = w/(w^2 - 1) with w^2 - 1 = 2w, so 1/2
        SystemParams p = SystemParams::with_delay(1.0);
        const TransferValue g = open_loop_G({std::log(1.0 + std::sqrt(2.0)), 0.0}, p);
        REQUIRE_FALSE(g.is_pole);
        REQUIRE(std::abs(sc_val(g.value) - C{0.5, 0.0}) < 1e-12);
    }
    {
        // viscous pole at the origin
        const TransferValue g = open_loop_G({0.0, 0.0}, viscous(0.1));
        REQUIRE(g.is_pole);
    }
    {
        SystemParams p = SystemParams::with_delay(1.0);
        const TransferValue g = open_loop_G({0.0, 3.141592653589793 / 2.0}, p);
        REQUIRE_FALSE(g.is_pole);
        REQUIRE(std::abs(sc_val(g.value) - C{0.0, -0.5}) < 1e-12);
    }
}

TEST_CASE("X function special values") {
    REQUIRE(x_eta({0.0, 0.0}, 0.37).is_zero());
    REQUIRE(std::abs(sc_val(x_eta({1.0, 0.0}, 0.5)) - C{1.0, 0.0}) < 1e-15);
    // X is odd, so X(-1) = -X(1) = -1
    REQUIRE(std::abs(sc_val(x_eta({-1.0, 0.0}, 0.5)) - C{-1.0, 0.0}) < 1e-15);
}

TEST_CASE("evaluators commute with conjugation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 3000; ++i) {
        const double eta = 0.02 + 0.5 * (0.5 + 0.5 * u(rng));
        const double eps = 0.3 * u(rng);
        const C s{6.0 * u(rng), 60.0 * u(rng)};
        const SystemParams p = viscous(eta, eps);

        const ScaledComplex a = f_viscous(std::conj(s), p).value;
        const ScaledComplex b = conj(f_viscous(s, p).value);
        REQUIRE(std::abs(a.log_abs() - b.log_abs()) <= 1e-10 * (std::abs(b.log_abs()) + 1.0));
        REQUIRE(std::abs(std::arg(a.mantissa() * std::conj(b.mantissa()))) < 1e-10);

        const ScaledComplex xa = x_eta(std::conj(s), eta);
        const ScaledComplex xb = conj(x_eta(s, eta));
        if (!xa.is_zero() && !xb.is_zero()) {
            REQUIRE(std::abs(xa.log_abs() - xb.log_abs()) <=
                    1e-10 * (std::abs(xb.log_abs()) + 1.0));
            REQUIRE(std::abs(std::arg(xa.mantissa() * std::conj(xb.mantissa()))) < 1e-10);
        }
    }
}
