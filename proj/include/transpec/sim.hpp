#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "transpec/params.hpp"

namespace transpec {

/// Uniform 1-d grid with N cells (N+1 nodes on [0,1]).  Advection runs at
/// cfl <= 1 (exactly 1 by default, where upwind degenerates to the exact
/// characteristic shift); diffusion is implicit and subcycled so that each
/// solve carries a diffusion number of at most 10.
struct Grid1D {
    int cells = 0;
    double dx = 0.0;
    double dt = 0.0;
    double cfl = 0.0;
    double diffusion_number = 0.0; // per implicit solve
    int diffusion_substeps = 0;    // 0 when inviscid

    static Grid1D make(int n, double eta, double velocity, double cfl_request = 1.0) {
        if (n < 32) throw std::invalid_argument("grid needs at least 32 cells");
        if (!(velocity > 0.0)) throw std::invalid_argument("velocity must be > 0");
        if (!(cfl_request > 0.0) || cfl_request > 1.0 + 1e-12)
            throw std::invalid_argument("cfl must be in (0, 1]");
        Grid1D g;
        g.cells = n;
        g.dx = 1.0 / n;
        g.dt = cfl_request * g.dx / velocity;
        g.cfl = velocity * g.dt / g.dx;
        const double r_total = eta * g.dt / (g.dx * g.dx);
        if (r_total > 0.0) {
            g.diffusion_substeps = std::max(1, static_cast<int>(std::ceil(r_total / 10.0)));
            g.diffusion_number = r_total / g.diffusion_substeps;
        }
        return g;
    }
};

/// One upwind step; the inflow node u[0] is a boundary value and is left to
/// the caller.  At cfl = 1 the update is the exact shift.
inline void step_transport(std::vector<double>& u, double cfl) {
    if (cfl > 1.0 + 1e-12) throw std::invalid_argument("cfl must be <= 1");
    const size_t n = u.size() - 1;
    if (std::abs(cfl - 1.0) < 1e-12) {
        for (size_t j = n; j >= 1; --j) u[j] = u[j - 1];
        return;
    }
    for (size_t j = n; j >= 1; --j) u[j] -= cfl * (u[j] - u[j - 1]);
}

namespace detail {

/// Backward-Euler heat step on nodes 1..N with Dirichlet at node 0 and a
/// mirror-ghost Neumann condition at node N; coefficients precomputed once.
class DiffusionSolver {
  public:
    DiffusionSolver() = default;

    DiffusionSolver(int n_cells, double r) : n_(n_cells), r_(r) {
        cp_.resize(static_cast<size_t>(n_));
        inv_.resize(static_cast<size_t>(n_));
        dp_.resize(static_cast<size_t>(n_));
        const double b = 1.0 + 2.0 * r_;
        double denom = b;
        cp_[0] = -r_ / denom;
        inv_[0] = 1.0 / denom;
        for (int i = 1; i < n_; ++i) {
            const double a = (i == n_ - 1) ? -2.0 * r_ : -r_;
            denom = b - a * cp_[static_cast<size_t>(i - 1)];
            cp_[static_cast<size_t>(i)] = (i == n_ - 1) ? 0.0 : -r_ / denom;
            inv_[static_cast<size_t>(i)] = 1.0 / denom;
            sub_.push_back(a);
        }
    }

    void apply(std::vector<double>& u) {
        // rows 1..N of u; u[0] is the Dirichlet value
        dp_[0] = (u[1] + r_ * u[0]) * inv_[0];
        for (int i = 1; i < n_; ++i) {
            const double a = sub_[static_cast<size_t>(i - 1)];
            dp_[static_cast<size_t>(i)] =
                (u[static_cast<size_t>(i + 1)] - a * dp_[static_cast<size_t>(i - 1)]) *
                inv_[static_cast<size_t>(i)];
        }
        u[static_cast<size_t>(n_)] = dp_[static_cast<size_t>(n_ - 1)];
        for (int i = n_ - 2; i >= 0; --i)
            u[static_cast<size_t>(i + 1)] = dp_[static_cast<size_t>(i)] -
                                            cp_[static_cast<size_t>(i)] * u[static_cast<size_t>(i + 2)];
    }

  private:
    int n_ = 0;
    double r_ = 0.0;
    std::vector<double> cp_, inv_, dp_, sub_;
};

} // namespace detail

/// Split advection-diffusion step: upwind advection at the given cfl, then
/// the subcycled implicit heat solves.  Inflow Dirichlet is the current
/// u[0]; homogeneous Neumann at x = 1 sits inside the solver stencil.
inline void step_advdiff(std::vector<double>& u, const Grid1D& g,
                         detail::DiffusionSolver& solver) {
    step_transport(u, g.cfl);
    for (int k = 0; k < g.diffusion_substeps; ++k) solver.apply(u);
}

/// Ring buffer of output samples supporting delayed reads with linear
/// interpolation; history before t = 0 reads as zero.
class DelayLine {
  public:
    DelayLine(double delay, double dt) : dt_(dt), back_(delay / dt) {
        const size_t cap = static_cast<size_t>(std::ceil(2.0 * delay / dt)) + 4;
        buf_.assign(cap, 0.0);
    }

    void push(double y) {
        ++count_;
        buf_[static_cast<size_t>(count_ % static_cast<long>(buf_.size()))] = y;
    }

    /// Y(t_now - delay); t_now is the time of the latest pushed sample.
    /// Samples before t = 0 read as zero.
    double delayed() const {
        const double ri = static_cast<double>(count_) - back_;
        if (ri <= -1.0) return 0.0;
        const long i0 = static_cast<long>(std::floor(ri + 1e-9));
        const double fr = ri - static_cast<double>(i0);
        auto sample = [&](long k) { return (k < 0) ? 0.0 : at(std::min(k, count_)); };
        if (std::abs(fr) < 1e-9) return sample(i0);
        return (1.0 - fr) * sample(i0) + fr * sample(i0 + 1);
    }

  private:
    double at(long idx) const {
        if (idx < 0 || idx > count_ || count_ - idx >= static_cast<long>(buf_.size()))
            throw std::logic_error("delay line underrun");
        return buf_[static_cast<size_t>(idx % static_cast<long>(buf_.size()))];
    }

    std::vector<double> buf_;
    double dt_ = 0.0;
    double back_ = 0.0; // delay / dt
    long count_ = -1;   // index of the latest sample
};

enum class SystemKind { InviscidPair, ViscousPair, SimplerPair };
enum class ControllerKind { None, Proportional, DynamicDelayed, DeadBeat };
enum class InitialCondition { GaussianBump, RandomSmooth, ConstantOne };

struct ClosedLoopConfig {
    SystemKind system = SystemKind::InviscidPair;
    SystemParams params;                  // velocity 1 nominal; eps perturbs the plant
    ControllerKind controller = ControllerKind::None;
    InitialCondition ic = InitialCondition::GaussianBump;
    unsigned seed = 1u;
    double t_end = 10.0;
    int n_cells = 128;
    double cfl_request = 1.0;
    int snapshot_stride = 0;              // 0: no state snapshots

    void validate() const {
        params.validate();
        if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
        if (n_cells < 32) throw std::invalid_argument("need at least 32 cells");
        if (system == SystemKind::ViscousPair && !(params.viscosity > 0.0))
            throw std::invalid_argument("viscous pair requires eta > 0");
        if (system == SystemKind::InviscidPair && params.viscosity != 0.0)
            throw std::invalid_argument("inviscid pair requires eta = 0");
        if (system == SystemKind::SimplerPair && controller != ControllerKind::None)
            throw std::invalid_argument("the scalar pair has no external controller");
    }
};

/// U(t) = -2 k1 Y(t) - k2 Y(t - tau); proportional and dead-beat control are
/// the (kp, 0) and (0, 1) gain choices of the same law.
struct ControlLaw {
    double k1 = 0.0, k2 = 0.0;

    static ControlLaw of(const ClosedLoopConfig& c) {
        switch (c.controller) {
            case ControllerKind::None: return {0.0, 0.0};
            case ControllerKind::Proportional: return {c.params.kp, 0.0};
            case ControllerKind::DynamicDelayed: return {c.params.k1, c.params.k2};
            case ControllerKind::DeadBeat: return {0.0, 1.0};
        }
        return {};
    }

    double u(double y_now, double y_delayed) const { return -2.0 * k1 * y_now - k2 * y_delayed; }
};

struct Snapshot {
    double t = 0.0;
    std::vector<std::vector<double>> fields;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> output;       // Y(t)
    std::vector<double> energy;       // L2 energy over all transported fields
    std::vector<double> max_abs_1;    // sup-norm of the primary field
    std::vector<double> max_abs_2;    // sup-norm of the second field
    std::vector<Snapshot> snapshots;
    double dt = 0.0;
    bool aborted = false;
    std::string abort_reason;
};

namespace detail {

inline constexpr double kFieldPi = 3.141592653589793;

inline std::vector<double> initial_field(InitialCondition ic, int n, std::mt19937& rng) {
    std::vector<double> u(static_cast<size_t>(n) + 1, 0.0);
    switch (ic) {
        case InitialCondition::GaussianBump:
            for (int j = 0; j <= n; ++j) {
                const double x = static_cast<double>(j) / n;
                u[static_cast<size_t>(j)] = std::exp(-100.0 * (x - 0.5) * (x - 0.5));
            }
            break;
        case InitialCondition::RandomSmooth: {
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            double a[8], b[8];
            for (int k = 0; k < 8; ++k) {
                a[k] = dist(rng);
                b[k] = dist(rng);
            }
            for (int j = 0; j <= n; ++j) {
                const double x = static_cast<double>(j) / n;
                double v = 0.0;
                for (int k = 0; k < 8; ++k)
                    v += (a[k] * std::cos(2.0 * kFieldPi * (k + 1) * x) +
                          b[k] * std::sin(2.0 * kFieldPi * (k + 1) * x)) /
                         (k + 1.0);
                u[static_cast<size_t>(j)] = v;
            }
            break;
        }
        case InitialCondition::ConstantOne:
            std::fill(u.begin(), u.end(), 1.0);
            break;
    }
    return u;
}

inline double l2_energy(const std::vector<double>& u, double dx) {
    double s = 0.5 * (u.front() * u.front() + u.back() * u.back());
    for (size_t j = 1; j + 1 < u.size(); ++j) s += u[j] * u[j];
    return s * dx;
}

inline double max_abs(const std::vector<double>& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

} // namespace detail

/// Advance the requested closed loop from its initial state to t_end.
/// The boundary coupling is algebraic and applied at every new time level;
/// the controller keeps the nominal unit delay regardless of eps.
inline Trajectory run(const ClosedLoopConfig& cfg) {
    cfg.validate();
    const double vel = 1.0 + cfg.params.velocity_perturbation;
    const double eta = cfg.params.viscosity;
    const int n = cfg.n_cells;
    const bool simpler = cfg.system == SystemKind::SimplerPair;
    const Grid1D g = Grid1D::make(n, eta, vel, cfg.cfl_request);
    const ControlLaw law = ControlLaw::of(cfg);

    std::mt19937 rng(cfg.seed);
    std::vector<double> f1 = detail::initial_field(cfg.ic, n, rng);
    std::vector<double> f2 =
        (cfg.ic == InitialCondition::GaussianBump)
            ? std::vector<double>(static_cast<size_t>(n) + 1, 0.0)
            : detail::initial_field(cfg.ic, n, rng);

    detail::DiffusionSolver diff;
    if (g.diffusion_substeps > 0) diff = detail::DiffusionSolver(n, g.diffusion_number);

    const long nst = std::lround(cfg.t_end / g.dt);
    DelayLine line(cfg.params.delay, g.dt);

    Trajectory traj;
    traj.dt = g.dt;
    traj.times.reserve(static_cast<size_t>(nst) + 1);

    auto record = [&](double t, double y) {
        traj.times.push_back(t);
        traj.output.push_back(y);
        traj.energy.push_back(detail::l2_energy(f1, g.dx) + detail::l2_energy(f2, g.dx));
        traj.max_abs_1.push_back(detail::max_abs(f1));
        traj.max_abs_2.push_back(detail::max_abs(f2));
        if (cfg.snapshot_stride > 0 &&
            (traj.times.size() - 1) % static_cast<size_t>(cfg.snapshot_stride) == 0)
            traj.snapshots.push_back({t, {f1, f2}});
    };

    auto couple = [&](double y_out) {
        if (simpler) {
            f1[0] = f1[static_cast<size_t>(n)] - f2[static_cast<size_t>(n)];
            f2[0] = f1[0];
        } else {
            const double u_ctrl = law.u(y_out, line.delayed());
            f1[0] = f2[static_cast<size_t>(n)] + u_ctrl;
            f2[0] = y_out;
        }
    };

    double y = f1[static_cast<size_t>(n)];
    line.push(y);
    couple(y);
    record(0.0, y);

    for (long step = 1; step <= nst; ++step) {
        if (eta > 0.0) {
            step_advdiff(f1, g, diff);
            if (simpler)
                step_transport(f2, g.cfl); // the second leg stays inviscid
            else
                step_advdiff(f2, g, diff);
        } else {
            step_transport(f1, g.cfl);
            step_transport(f2, g.cfl);
        }
        y = f1[static_cast<size_t>(n)];
        line.push(y);
        couple(y);
        const double t = static_cast<double>(step) * g.dt;
        record(t, y);
        if (!std::isfinite(y) || std::abs(y) > 1e12) {
            traj.aborted = true;
            traj.abort_reason = "state grew beyond 1e12 at t = " + std::to_string(t) +
                                " (expected for unstable configurations)";
            break;
        }
    }
    return traj;
}

struct RateEstimate {
    bool ok = false;
    double rate = 0.0;
    double r2 = 0.0;
    int peaks = 0;
    std::string error;
};

/// Least-squares slope of ln(peak envelope of |Y|) over [t_skip, t_stop].
/// Peaks of |Y| suppress the carrier oscillation; at least 4 are required.
inline RateEstimate estimate_decay_rate(const Trajectory& traj, double t_skip,
                                        double t_stop = std::numeric_limits<double>::infinity()) {
    RateEstimate out;
    if (traj.times.empty() || traj.times.back() <= t_skip + 5.0) {
        out.error = "trajectory too short past t_skip";
        return out;
    }
    std::vector<double> pt, pv;
    for (size_t i = 1; i + 1 < traj.output.size(); ++i) {
        if (traj.times[i] < t_skip || traj.times[i] > t_stop) continue;
        const double a = std::abs(traj.output[i]);
        if (a >= std::abs(traj.output[i - 1]) && a > std::abs(traj.output[i + 1]) && a > 0.0) {
            pt.push_back(traj.times[i]);
            pv.push_back(std::log(a));
        }
    }
    out.peaks = static_cast<int>(pt.size());
    if (pt.size() < 4) {
        out.error = "insufficient envelope data (" + std::to_string(pt.size()) + " peaks)";
        return out;
    }
    double st = 0.0, sv = 0.0;
    for (size_t i = 0; i < pt.size(); ++i) {
        st += pt[i];
        sv += pv[i];
    }
    const double mt = st / static_cast<double>(pt.size());
    const double mv = sv / static_cast<double>(pt.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < pt.size(); ++i) {
        sxx += (pt[i] - mt) * (pt[i] - mt);
        sxy += (pt[i] - mt) * (pv[i] - mv);
        syy += (pv[i] - mv) * (pv[i] - mv);
    }
    out.ok = true;
    out.rate = sxy / sxx;
    out.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return out;
}

/// Exact iteration of the sampled input-output recurrence
///   Y(t) = Y(t - 2 tau) + U(t - tau),  U(t) = -2 k1 Y(t) - k2 Y(t - tau),
/// seeded with the free segment y_history covering [0, 2 tau).
inline Trajectory run_difference_recurrence(double k1, double k2, double tau, double dt,
                                            const std::vector<double>& y_history, double t_end) {
    if (!(tau > 0.0) || !(dt > 0.0)) throw std::invalid_argument("tau, dt must be > 0");
    const double steps = tau / dt;
    const long m = std::lround(steps);
    if (std::abs(steps - static_cast<double>(m)) > 1e-9 || m < 1)
        throw std::invalid_argument("dt must divide tau");
    if (y_history.size() < static_cast<size_t>(2 * m))
        throw std::invalid_argument("history must cover [0, 2 tau)");
    const ControlLaw law{k1, k2};
    const long nst = std::lround(t_end / dt);
    Trajectory traj;
    traj.dt = dt;
    std::vector<double>& Y = traj.output;
    Y.assign(static_cast<size_t>(nst) + 1, 0.0);
    for (long i = 0; i < 2 * m && i <= nst; ++i) Y[static_cast<size_t>(i)] = y_history[static_cast<size_t>(i)];
    for (long i = 2 * m; i <= nst; ++i) {
        const double u_mid =
            law.u(Y[static_cast<size_t>(i - m)],
                  (i - 2 * m >= 0) ? Y[static_cast<size_t>(i - 2 * m)] : 0.0);
        Y[static_cast<size_t>(i)] = Y[static_cast<size_t>(i - 2 * m)] + u_mid;
    }
    traj.times.resize(Y.size());
    for (size_t i = 0; i < Y.size(); ++i) traj.times[i] = static_cast<double>(i) * dt;
    traj.energy.assign(Y.size(), 0.0);
    traj.max_abs_1.assign(Y.size(), 0.0);
    traj.max_abs_2.assign(Y.size(), 0.0);
    return traj;
}

} // namespace transpec
