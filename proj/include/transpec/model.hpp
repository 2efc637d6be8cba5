#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "transpec/params.hpp"
#include "transpec/scaled_complex.hpp"

namespace transpec {

namespace detail {

/// Relative half-gap threshold below which the confluent limit of the
/// transfer function is used; cancellation in lambda1 - lambda2 exceeds
/// double precision there.
inline constexpr double kConfluenceRel = 1e-6;

/// sqrt((1+eps)^2 + 4*eta*s), principal branch.
inline std::complex<double> branch_root(std::complex<double> s, double eta, double eps) {
    const double c = 1.0 + eps;
    return std::sqrt(std::complex<double>(c * c, 0.0) + 4.0 * eta * s);
}

} // namespace detail

/// lambda_{1,2} = ((1+eps) +/- sqrt((1+eps)^2 + 4*eta*s)) / (2*eta).
inline LambdaPair lambda_pair(std::complex<double> s, const SystemParams& p) {
    const double eta = p.viscosity;
    if (!(eta > 0.0))
        throw std::invalid_argument("lambda_pair requires eta > 0 (inviscid case is a pure delay)");
    const double c = 1.0 + p.velocity_perturbation;
    const std::complex<double> w = detail::branch_root(s, eta, p.velocity_perturbation);
    return {(c + w) / (2.0 * eta), (c - w) / (2.0 * eta)};
}

/// Pure-delay transfer e^{-s*tau}.
inline std::complex<double> f_transport(std::complex<double> s, double tau) {
    return std::exp(-s * tau);
}

/// Result of a transfer-function evaluation; is_pole marks evaluation at a
/// zero of the denominator (a system pole), not a failure.
struct TransferValue {
    ScaledComplex value;
    bool is_pole = false;
};

namespace detail {

/// B(lam, d) = lam*sinh(d) + d*cosh(d); the denominator of the viscous
/// transfer is D = 2 e^{-lam} B with lam the mean of the lambda pair and d
/// the half gap.  Even in d, so single-valued across the branch cut.
inline ScaledComplex transfer_bracket(double lam, std::complex<double> d) {
    return ScaledComplex::from(std::complex<double>(lam, 0.0)) * sc_sinh(d) + sc_cosh(d) * d;
}

} // namespace detail

/// Transfer of one viscous transport subsystem:
///   f(s) = (lambda1 - lambda2) / (lambda1 e^{-lambda2} - lambda2 e^{-lambda1}).
/// Near the confluence lambda1 = lambda2 it switches to the limit
/// e^{lam}/(1+lam), lam = (1+eps)/(2*eta).
inline TransferValue f_viscous(std::complex<double> s, const SystemParams& p) {
    const double eta = p.viscosity;
    if (!(eta > 0.0)) throw std::invalid_argument("f_viscous requires eta > 0");
    const double c = 1.0 + p.velocity_perturbation;
    const double lam = c / (2.0 * eta);
    const std::complex<double> w = detail::branch_root(s, eta, p.velocity_perturbation);
    if (std::abs(w) < detail::kConfluenceRel * c) {
        const ScaledComplex f = ScaledComplex::from_exp({lam, 0.0}) *
                                ScaledComplex::from(1.0 / (1.0 + lam));
        return {f, false};
    }
    const std::complex<double> d = w / (2.0 * eta);
    const ScaledComplex bracket = detail::transfer_bracket(lam, d);
    if (bracket.is_zero()) return {ScaledComplex{}, true};
    const ScaledComplex num = ScaledComplex::from(d) * ScaledComplex::from_exp({lam, 0.0});
    return {num / bracket, false};
}

/// Open-loop input-output transfer G = f / (1 - f^2), with f the delay
/// transfer for eta = 0 and the viscous transfer otherwise.  A zero of
/// 1 - f^2 is flagged as a pole.
inline TransferValue open_loop_G(std::complex<double> s, const SystemParams& p) {
    ScaledComplex f;
    if (p.viscosity == 0.0) {
        f = ScaledComplex::from_exp(-s * p.delay);
    } else {
        TransferValue fv = f_viscous(s, p);
        if (fv.is_pole) return {ScaledComplex{}, true};
        f = fv.value;
    }
    const ScaledComplex one = ScaledComplex::from(1.0);
    const ScaledComplex den = one - f * f;
    const double den_scale = std::max(0.0, 2.0 * f.log_abs());
    if (den.is_zero() || den.log_abs() < den_scale + std::log(1e-12))
        return {ScaledComplex{}, true};
    return {f / den, false};
}

/// X(z) = (1+z)/2 e^{-(1-z)/(2*eta)} - (1-z)/2 e^{-(1+z)/(2*eta)}.
/// Odd in z; X(0) = 0 exactly.
inline ScaledComplex x_eta(std::complex<double> z, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("x_eta requires eta > 0");
    const double inv = 1.0 / (2.0 * eta);
    const std::complex<double> one{1.0, 0.0};
    const ScaledComplex t1 =
        ScaledComplex::from((one + z) * 0.5) * ScaledComplex::from_exp(-(one - z) * inv);
    const ScaledComplex t2 =
        ScaledComplex::from((one - z) * 0.5) * ScaledComplex::from_exp(-(one + z) * inv);
    return t1 - t2;
}

} // namespace transpec
