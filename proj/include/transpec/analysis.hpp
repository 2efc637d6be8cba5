#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "transpec/charfun.hpp"
#include "transpec/roots.hpp"

namespace transpec {

/// Window-scoped stability verdict for one characteristic function.
struct StabilityReport {
    Variant variant = Variant::DeadbeatViscous;
    SystemParams params;
    SearchWindow window;
    SpectralAbscissa sigma;      // window-limited estimate
    double margin_target = 0.0;  // sigma must stay at or below this ...
    double band_low = -std::numeric_limits<double>::infinity(); // ... and above this for probes
    bool probe = false;          // conjecture probe, not a theorem check
    bool satisfied = false;
    int roots_in_rhp = 0;
    int roots_found = 0;
    std::string error;           // non-empty if the root search failed here
};

struct SweepPoint {
    double eta = 0.0;
    double eps = 0.0;
    StabilityReport report;
};

struct SweepResult {
    std::string check;
    bool probe = false;
    double delta = 0.0;
    SearchWindow window;
    std::vector<SweepPoint> points;
    std::string sigma_monotonicity; // "increasing", "decreasing" or "none"
};

namespace detail {

inline constexpr double kLn2Margin = 0.6931471805599453;

inline StabilityReport report_for(const CharFn& fn, const SearchWindow& w, double margin,
                                  double band_low, bool probe, const RootFindOptions& opt) {
    StabilityReport rep;
    rep.variant = fn.variant;
    rep.params = fn.params;
    rep.window = w;
    rep.margin_target = margin;
    rep.band_low = band_low;
    rep.probe = probe;
    try {
        const Spectrum spec = find_roots(fn, w, opt);
        rep.window = spec.window;
        rep.sigma = spectral_abscissa(spec);
        rep.roots_found = spec.counted_total;
        for (const auto& r : spec.roots)
            if (r.s.real() > 0.0) rep.roots_in_rhp += r.multiplicity;
        if (probe) {
            rep.satisfied = rep.sigma.finite && rep.sigma.sigma <= margin &&
                            rep.sigma.sigma >= band_low;
        } else {
            rep.satisfied = !rep.sigma.finite || rep.sigma.sigma <= margin;
        }
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.satisfied = false;
    }
    return rep;
}

inline std::string monotonicity(const std::vector<SweepPoint>& pts) {
    bool inc = true, dec = true;
    bool any = false;
    for (size_t i = 1; i < pts.size(); ++i) {
        if (!pts[i - 1].report.sigma.finite || !pts[i].report.sigma.finite) continue;
        any = true;
        if (pts[i].report.sigma.sigma < pts[i - 1].report.sigma.sigma) inc = false;
        if (pts[i].report.sigma.sigma > pts[i - 1].report.sigma.sigma) dec = false;
    }
    if (!any) return "none";
    if (inc) return "increasing";
    if (dec) return "decreasing";
    return "none";
}

} // namespace detail

/// sigma_eta <= -ln 2 + delta, per viscosity in the list.
inline SweepResult theorem1_check(std::vector<double> etas, double delta, const SearchWindow& w,
                                  const RootFindOptions& opt = {}) {
    std::sort(etas.begin(), etas.end());
    SweepResult out{"theorem1", false, delta, w, {}, ""};
    const double margin = -detail::kLn2Margin + delta;
    for (double eta : etas) {
        SweepPoint pt{eta, 0.0, {}};
        pt.report = detail::report_for(CharFn::deadbeat_viscous(eta), w, margin,
                                       -std::numeric_limits<double>::infinity(), false, opt);
        out.points.push_back(std::move(pt));
    }
    out.sigma_monotonicity = detail::monotonicity(out.points);
    return out;
}

/// Two-sided band -ln 2 - delta <= sigma_eta <= -ln 2 + delta.  A probe:
/// band membership is reported, never a refutation.
inline SweepResult conjecture1_probe(std::vector<double> etas, double delta,
                                     const SearchWindow& w, const RootFindOptions& opt = {}) {
    std::sort(etas.begin(), etas.end());
    SweepResult out{"conjecture1", true, delta, w, {}, ""};
    for (double eta : etas) {
        SweepPoint pt{eta, 0.0, {}};
        pt.report = detail::report_for(CharFn::deadbeat_viscous(eta), w,
                                       -detail::kLn2Margin + delta,
                                       -detail::kLn2Margin - delta, true, opt);
        out.points.push_back(std::move(pt));
    }
    out.sigma_monotonicity = detail::monotonicity(out.points);
    return out;
}

/// sigma_{eta,eps} <= -ln 2 + 2 delta over a perturbation sweep at fixed
/// viscosity.  eta = 0 with eps != 0 uses the inviscid perturbed loop.
inline SweepResult theorem2_sweep(double eta, std::vector<double> eps_list, double delta,
                                  const SearchWindow& w, const RootFindOptions& opt = {}) {
    std::sort(eps_list.begin(), eps_list.end());
    SweepResult out{"theorem2", false, delta, w, {}, ""};
    const double margin = -detail::kLn2Margin + 2.0 * delta;
    for (double eps : eps_list) {
        SweepPoint pt{eta, eps, {}};
        if (eta == 0.0 && eps == 0.0) {
            // nominal dead beat: the residual is identically -1, no poles
            StabilityReport rep;
            rep.variant = Variant::DeadbeatViscousPerturbed;
            rep.params.set_gains(0.0, 1.0);
            rep.window = w;
            rep.margin_target = margin;
            rep.satisfied = true;
            pt.report = rep;
        } else {
            pt.report = detail::report_for(CharFn::deadbeat_perturbed(eta, eps), w, margin,
                                           -std::numeric_limits<double>::infinity(), false, opt);
        }
        out.points.push_back(std::move(pt));
    }
    out.sigma_monotonicity = detail::monotonicity(out.points);
    return out;
}

/// sigma_eta > -eps_bound for the scalar pair with diffusion; probe.
inline SweepResult conjecture3_probe(std::vector<double> etas, double eps_bound,
                                     const SearchWindow& w, const RootFindOptions& opt = {}) {
    std::sort(etas.begin(), etas.end());
    SweepResult out{"conjecture3", true, eps_bound, w, {}, ""};
    for (double eta : etas) {
        SweepPoint pt{eta, 0.0, {}};
        StabilityReport rep = detail::report_for(CharFn::simpler(eta), w,
                                                 std::numeric_limits<double>::infinity(),
                                                 -eps_bound, true, opt);
        rep.margin_target = -eps_bound; // lower bound is the operative edge here
        rep.satisfied = rep.sigma.finite && rep.sigma.sigma > -eps_bound;
        pt.report = rep;
        out.points.push_back(std::move(pt));
    }
    out.sigma_monotonicity = detail::monotonicity(out.points);
    return out;
}

/// Exact exponential rate of the sampled closed-loop recurrence
/// Y(t) + 2 k1 Y(t - tau) + (k2 - 1) Y(t - 2 tau) = 0:
/// ln(max root modulus of w^2 + 2 k1 w + (k2 - 1)) / tau.
struct RecurrenceRate {
    bool finite = false; // false <=> dead beat (both roots at the origin)
    double rate = -std::numeric_limits<double>::infinity();
};

inline RecurrenceRate difference_recurrence_rate(double k1, double k2, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
    const SchurRoots r = schur_poly_roots(k1, k2);
    const double mod = std::max(std::abs(r.r1), std::abs(r.r2));
    if (mod == 0.0) return {};
    return {true, std::log(mod) / tau};
}

} // namespace transpec
