#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "transpec/model.hpp"

namespace transpec {

/// Closed-loop and open-loop characteristic residuals.  Every evaluator
/// returns an entire function of the argument (poles cleared, branch cuts
/// cancelled) so that argument-principle counting sees zeros only.
/// Residuals carry an arbitrary positive scale; zero sets and phases are
/// what matter downstream.

/// e^{2*s*tau} - 1 = 0: open-loop poles of the interconnected delay pair.
inline ScaledComplex char_open_inviscid(std::complex<double> s, double tau) {
    return ScaledComplex::from_exp(2.0 * s * tau) - ScaledComplex::from(1.0);
}

/// e^{2*s*tau} + 2*kp*e^{s*tau} - 1 = 0: proportional output feedback.
inline ScaledComplex char_prop_inviscid(std::complex<double> s, double tau, double kp) {
    return ScaledComplex::from_exp(2.0 * s * tau) +
           ScaledComplex::from_exp(s * tau) * (2.0 * kp) - ScaledComplex::from(1.0);
}

/// e^{2*s*tau} + 2*k1*e^{s*tau} + (k2 - 1) = 0: delayed dynamic feedback.
inline ScaledComplex char_dyn_inviscid(std::complex<double> s, double tau, double k1, double k2) {
    return ScaledComplex::from_exp(2.0 * s * tau) +
           ScaledComplex::from_exp(s * tau) * (2.0 * k1) + ScaledComplex::from(k2 - 1.0);
}

/// Roots of w^2 + 2*k1*w + (k2 - 1) and the strict Schur verdict.
struct SchurRoots {
    std::complex<double> r1, r2;
    bool stable = false;
};

inline SchurRoots schur_poly_roots(double k1, double k2) {
    const std::complex<double> disc = std::sqrt(std::complex<double>(k1 * k1 - (k2 - 1.0), 0.0));
    SchurRoots out;
    out.r1 = -k1 + disc;
    out.r2 = -k1 - disc;
    out.stable = std::abs(out.r1) < 1.0 && std::abs(out.r2) < 1.0;
    return out;
}

namespace detail {

struct ViscousParts {
    ScaledComplex N; // lambda1 - lambda2
    ScaledComplex D; // lambda1 e^{-lambda2} - lambda2 e^{-lambda1}
};

/// N and D through the half-gap form: with lam = (1+eps)/(2 eta) and
/// d = w/(2 eta), N = 2d and D = 2 e^{-lam} (lam sinh d + d cosh d).
/// Both expressions are odd in d, their even combinations entire in s.
inline ViscousParts viscous_parts(std::complex<double> s, double eta, double eps) {
    const double c = 1.0 + eps;
    const double lam = c / (2.0 * eta);
    const std::complex<double> w = branch_root(s, eta, eps);
    const std::complex<double> d = w / (2.0 * eta);
    ViscousParts out;
    out.N = ScaledComplex::from(2.0 * d);
    out.D = ScaledComplex::from_exp({-lam, 0.0}) * transfer_bracket(lam, d) * 2.0;
    return out;
}

} // namespace detail

/// Open-loop viscous characteristic, pole-cleared: N^2 - D^2
/// (equals D^2 (f^2 - 1) with f = N/D).
inline ScaledComplex char_open_viscous(std::complex<double> s, const SystemParams& p) {
    if (!(p.viscosity > 0.0)) throw std::invalid_argument("char_open_viscous requires eta > 0");
    const auto [N, D] = detail::viscous_parts(s, p.viscosity, p.velocity_perturbation);
    return N * N - D * D;
}

/// Dead-beat closed loop with viscosity (and optional velocity perturbation),
/// pole-cleared: P = N^2 - N D e^{-s} - D^2.  P is invariant under the
/// branch swap lambda1 <-> lambda2 (N and D both flip sign), hence entire.
/// The confluence point s = -(1+eps)^2/(4 eta), where N = D = 0, is a zero.
inline ScaledComplex char_deadbeat_viscous(std::complex<double> s, const SystemParams& p) {
    if (!(p.viscosity > 0.0)) throw std::invalid_argument("char_deadbeat_viscous requires eta > 0");
    const auto [N, D] = detail::viscous_parts(s, p.viscosity, p.velocity_perturbation);
    const ScaledComplex E = ScaledComplex::from_exp(-s);
    return N * N - N * D * E - D * D;
}

/// Same closed loop in the variable z = sqrt(1 + 4*eta*s):
///   X^2(z) + z e^{-(z^2-1)/(4 eta)} X(z) - z^2.
inline ScaledComplex char_zform(std::complex<double> z, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("char_zform requires eta > 0");
    const ScaledComplex X = x_eta(z, eta);
    const ScaledComplex E = ScaledComplex::from_exp(-(z * z - 1.0) / (4.0 * eta));
    return X * X + ScaledComplex::from(z) * E * X - ScaledComplex::from(z * z);
}

/// Characteristic of the scalar transport pair with diffusion on one leg:
///   H(s) (1 + e^{-s}) - e^{1/eta},
/// where H = (lambda1 e^{lambda1} - lambda2 e^{lambda2}) / (lambda1 - lambda2)
/// = e^{lam} (lam sinh(d)/d + cosh(d)).  H is even in the half gap d, so the
/// residual is entire; it is e^{1/eta} times the original F - 1, a nonzero
/// constant factor that leaves the zero set untouched.
inline ScaledComplex char_simpler(std::complex<double> s, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("char_simpler requires eta > 0");
    const double lam = 1.0 / (2.0 * eta);
    const std::complex<double> w = detail::branch_root(s, eta, 0.0);
    const std::complex<double> d = w / (2.0 * eta);
    const ScaledComplex H =
        ScaledComplex::from_exp({lam, 0.0}) *
        (ScaledComplex::from(std::complex<double>(lam, 0.0)) * sc_sinhc(d) + sc_cosh(d));
    const ScaledComplex loop = ScaledComplex::from(1.0) + ScaledComplex::from_exp(-s);
    return H * loop - ScaledComplex::from_exp({1.0 / eta, 0.0});
}

/// Dead-beat loop with eta = 0 but perturbed plant velocity 1 + eps: the
/// plant delay becomes 1/(1+eps) while the controller keeps delay 1, giving
///   e^{-2s/(1+eps)} - e^{-s(1/(1+eps) + 1)} - 1.
/// For eps = 0 this is identically -1: the nominal dead beat has no poles.
inline ScaledComplex char_deadbeat_inviscid_perturbed(std::complex<double> s, double eps) {
    const double c = 1.0 + eps;
    if (!(c > 0.0)) throw std::invalid_argument("1 + eps must be > 0");
    return ScaledComplex::from_exp(-2.0 * s / c) -
           ScaledComplex::from_exp(-s * (1.0 / c + 1.0)) - ScaledComplex::from(1.0);
}

/// Named characteristic-function handle: variant + parameters -> residual.
enum class Variant {
    OpenLoopInviscid,
    PropInviscid,
    DynInviscid,
    OpenLoopViscous,
    DeadbeatViscous,
    DeadbeatViscousPerturbed,
    SimplerSystem,
    ZForm,
};

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::OpenLoopInviscid: return "open-inviscid";
        case Variant::PropInviscid: return "prop-inviscid";
        case Variant::DynInviscid: return "dyn-inviscid";
        case Variant::OpenLoopViscous: return "open-viscous";
        case Variant::DeadbeatViscous: return "deadbeat-viscous";
        case Variant::DeadbeatViscousPerturbed: return "deadbeat-viscous-perturbed";
        case Variant::SimplerSystem: return "simpler";
        case Variant::ZForm: return "zform";
    }
    return "?";
}

struct CharFn {
    Variant variant = Variant::OpenLoopInviscid;
    SystemParams params;

    /// For ZForm the argument is z, otherwise the Laplace variable s.
    ScaledComplex operator()(std::complex<double> s) const {
        switch (variant) {
            case Variant::OpenLoopInviscid: return char_open_inviscid(s, params.delay);
            case Variant::PropInviscid: return char_prop_inviscid(s, params.delay, params.kp);
            case Variant::DynInviscid:
                return char_dyn_inviscid(s, params.delay, params.k1, params.k2);
            case Variant::OpenLoopViscous: return char_open_viscous(s, params);
            case Variant::DeadbeatViscous: return char_deadbeat_viscous(s, params);
            case Variant::DeadbeatViscousPerturbed:
                if (params.viscosity == 0.0)
                    return char_deadbeat_inviscid_perturbed(s, params.velocity_perturbation);
                return char_deadbeat_viscous(s, params);
            case Variant::SimplerSystem: return char_simpler(s, params.viscosity);
            case Variant::ZForm: return char_zform(s, params.viscosity);
        }
        throw std::logic_error("unknown variant");
    }

    static CharFn open_inviscid(double tau) {
        return {Variant::OpenLoopInviscid, SystemParams::with_delay(tau)};
    }
    static CharFn prop_inviscid(double tau, double kp) {
        CharFn f{Variant::PropInviscid, SystemParams::with_delay(tau)};
        f.params.set_proportional(kp);
        return f;
    }
    static CharFn dyn_inviscid(double tau, double k1, double k2) {
        CharFn f{Variant::DynInviscid, SystemParams::with_delay(tau)};
        f.params.set_gains(k1, k2);
        return f;
    }
    static CharFn open_viscous(double eta) {
        CharFn f{Variant::OpenLoopViscous, SystemParams{}};
        if (!(eta > 0.0)) throw std::invalid_argument("open_viscous requires eta > 0");
        f.params.set_viscosity(eta);
        return f;
    }
    static CharFn deadbeat_viscous(double eta, double eps = 0.0) {
        CharFn f{eps == 0.0 ? Variant::DeadbeatViscous : Variant::DeadbeatViscousPerturbed,
                 SystemParams{}};
        if (!(eta > 0.0)) throw std::invalid_argument("deadbeat_viscous requires eta > 0");
        f.params.set_viscosity(eta).set_perturbation(eps).set_gains(0.0, 1.0);
        return f;
    }
    static CharFn deadbeat_perturbed(double eta, double eps) {
        CharFn f{Variant::DeadbeatViscousPerturbed, SystemParams{}};
        if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
        f.params.set_viscosity(eta).set_perturbation(eps).set_gains(0.0, 1.0);
        return f;
    }
    static CharFn simpler(double eta) {
        CharFn f{Variant::SimplerSystem, SystemParams{}};
        if (!(eta > 0.0)) throw std::invalid_argument("simpler requires eta > 0");
        f.params.set_viscosity(eta);
        return f;
    }
    static CharFn zform(double eta) {
        CharFn f{Variant::ZForm, SystemParams{}};
        if (!(eta > 0.0)) throw std::invalid_argument("zform requires eta > 0");
        f.params.set_viscosity(eta);
        return f;
    }
};

} // namespace transpec
