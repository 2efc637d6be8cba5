#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace transpec {

/// Physical and controller constants shared by every system variant.
/// delay is tied to velocity (delay * velocity = 1) at construction.
struct SystemParams {
    double velocity = 1.0;              // transport velocity, > 0
    double delay = 1.0;                 // 1 / velocity
    double viscosity = 0.0;             // eta >= 0
    double velocity_perturbation = 0.0; // eps, additive; 1 + eps > 0
    double k1 = 0.0;
    double k2 = 0.0;
    double kp = 0.0;

    static SystemParams with_velocity(double velocity) {
        SystemParams p;
        if (!(velocity > 0.0)) throw std::invalid_argument("velocity must be > 0");
        p.velocity = velocity;
        p.delay = 1.0 / velocity;
        return p;
    }

    static SystemParams with_delay(double tau) {
        SystemParams p;
        if (!(tau > 0.0)) throw std::invalid_argument("delay must be > 0");
        p.delay = tau;
        p.velocity = 1.0 / tau;
        return p;
    }

    SystemParams& set_viscosity(double eta) {
        if (!(eta >= 0.0)) throw std::invalid_argument("viscosity must be >= 0");
        viscosity = eta;
        return *this;
    }

    SystemParams& set_perturbation(double eps) {
        if (!(1.0 + eps > 0.0)) throw std::invalid_argument("1 + eps must be > 0");
        velocity_perturbation = eps;
        return *this;
    }

    SystemParams& set_gains(double k1_, double k2_) {
        k1 = k1_;
        k2 = k2_;
        return *this;
    }

    SystemParams& set_proportional(double kp_) {
        kp = kp_;
        return *this;
    }

    void validate() const {
        if (!(velocity > 0.0)) throw std::invalid_argument("velocity must be > 0");
        if (!(viscosity >= 0.0)) throw std::invalid_argument("viscosity must be >= 0");
        if (!(1.0 + velocity_perturbation > 0.0))
            throw std::invalid_argument("1 + eps must be > 0");
        if (std::abs(delay * velocity - 1.0) > 1e-12)
            throw std::invalid_argument("delay * velocity must equal 1");
    }
};

/// Roots of eta*lambda^2 - (1+eps)*lambda - s = 0.
struct LambdaPair {
    std::complex<double> lambda1; // + branch of the principal square root
    std::complex<double> lambda2; // - branch
};

} // namespace transpec
