#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "transpec/scaled_complex.hpp"

namespace transpec {

/// Rectangle in the complex plane that scopes a root search.  Every count
/// and every spectral-abscissa estimate is relative to such a window.
struct SearchWindow {
    double re_min = -1.0, re_max = 1.0;
    double im_min = -1.0, im_max = 1.0;
    int max_depth = 36;          // boundary-refinement depth per segment
    int boundary_samples = 96;   // initial samples per edge (>= 64)

    void validate() const {
        if (!(re_min < re_max) || !(im_min < im_max))
            throw std::invalid_argument("degenerate search window");
        if (boundary_samples < 64)
            throw std::invalid_argument("boundary_samples must be >= 64");
    }

    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    double diag() const { return std::hypot(width(), height()); }

    bool contains(std::complex<double> s, double slack = 0.0) const {
        return s.real() >= re_min - slack && s.real() <= re_max + slack &&
               s.imag() >= im_min - slack && s.imag() <= im_max + slack;
    }

    bool symmetric_about_real_axis() const {
        return std::abs(im_min + im_max) <= 1e-12 * (std::abs(im_min) + std::abs(im_max) + 1.0);
    }
};

struct RootRecord {
    std::complex<double> s;
    double residual = 0.0;   // magnitude of the final Newton correction |f/f'|
    int multiplicity = 1;
};

struct UnresolvedCell {
    SearchWindow box;
    int count = 0;
};

struct Spectrum {
    std::vector<RootRecord> roots;
    std::vector<UnresolvedCell> unresolved;
    SearchWindow window;     // actual window used (after any boundary nudge)
    int counted_total = 0;
};

class BoundaryZeroError : public std::runtime_error {
  public:
    explicit BoundaryZeroError(std::complex<double> near)
        : std::runtime_error("boundary-zero suspected near (" + std::to_string(near.real()) +
                             ", " + std::to_string(near.imag()) + ")"),
          near_(near) {}
    std::complex<double> near() const { return near_; }

  private:
    std::complex<double> near_;
};

namespace detail {

inline constexpr double kPi = std::numbers::pi;

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline double wrap_pi(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

template <typename F>
double boundary_phase(F&& f, std::complex<double> z) {
    const ScaledComplex v = f(z);
    if (v.is_zero()) throw BoundaryZeroError(z);
    const std::complex<double> m = v.mantissa();
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
        throw std::runtime_error("non-finite residual on contour");
    return std::arg(m);
}

/// Phase increment along one segment, bisecting until each piece turns by
/// less than pi/2.  Exhausted depth means a zero hugs the contour.
template <typename F>
double phase_increment(F&& f, std::complex<double> z0, double p0, std::complex<double> z1,
                       double p1, int depth, int max_depth) {
    const double d = wrap_pi(p1 - p0);
    if (std::abs(d) < kPi / 2.0) return d;
    if (depth >= max_depth) throw BoundaryZeroError((z0 + z1) * 0.5);
    const std::complex<double> zm = (z0 + z1) * 0.5;
    const double pm = boundary_phase(f, zm);
    return phase_increment(f, z0, p0, zm, pm, depth + 1, max_depth) +
           phase_increment(f, zm, pm, z1, p1, depth + 1, max_depth);
}

/// Winding number of f along the window boundary (counter-clockwise).
/// samples_per_unit guards against phase aliasing on long edges.
template <typename F>
int winding_number(F&& f, const SearchWindow& w, double samples_per_unit = 8.0) {
    const std::complex<double> c0{w.re_min, w.im_min}, c1{w.re_max, w.im_min},
        c2{w.re_max, w.im_max}, c3{w.re_min, w.im_max};
    std::vector<std::complex<double>> pts;
    auto add_edge = [&](std::complex<double> a, std::complex<double> b) {
        const double len = std::abs(b - a);
        const int n = std::max(w.boundary_samples,
                               static_cast<int>(std::ceil(len * samples_per_unit)) + 1);
        for (int k = 0; k < n; ++k)
            pts.push_back(a + (b - a) * (static_cast<double>(k) / n));
    };
    add_edge(c0, c1);
    add_edge(c1, c2);
    add_edge(c2, c3);
    add_edge(c3, c0);
    pts.push_back(c0);

    double prev = boundary_phase(f, pts[0]);
    double total = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) {
        const double cur = boundary_phase(f, pts[i]);
        total += phase_increment(f, pts[i - 1], prev, pts[i], cur, 0, w.max_depth);
        prev = cur;
    }
    const double turns = total / (2.0 * kPi);
    const int n = static_cast<int>(std::lround(turns));
    if (std::abs(turns - n) > 0.15)
        throw std::runtime_error("winding number failed to certify as an integer: " +
                                 std::to_string(turns));
    if (n < 0)
        throw std::runtime_error("negative winding number; residual is not zero-only here");
    return n;
}

struct NewtonResult {
    bool converged = false;
    std::complex<double> s;
    double last_step = 0.0;
};

template <typename F>
NewtonResult newton_polish(F&& f, std::complex<double> s, double cell_diag, double tol) {
    const double h = std::max(1e-6 * cell_diag, 1e-9);
    NewtonResult out;
    out.s = s;
    for (int it = 0; it < 60; ++it) {
        const ScaledComplex fd =
            (f(out.s + std::complex<double>(h, 0.0)) - f(out.s - std::complex<double>(h, 0.0))) *
            (1.0 / (2.0 * h));
        const ScaledComplex fv = f(out.s);
        if (fv.is_zero()) {
            out.converged = true;
            out.last_step = 0.0;
            return out;
        }
        if (fd.is_zero()) return out;
        const ScaledComplex ratio = fv / fd;
        if (ratio.log_abs() > 700.0) return out;
        const std::complex<double> step = ratio.value();
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return out;
        out.s -= step;
        out.last_step = std::abs(step);
        if (out.last_step > 8.0 * cell_diag) return out;   // wandered off
        if (out.last_step < tol) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

} // namespace detail

struct RootFindOptions {
    double tol = 1e-11;
    int threads = 1;
    double samples_per_unit = 8.0;
    double nudge_limit = 1e-3;     // max outward boundary nudge
    bool certify = true;           // per-root small-circle winding check
};

namespace detail {

template <typename F>
std::pair<int, SearchWindow> counted_window(F&& f, const SearchWindow& w,
                                            const RootFindOptions& opt) {
    w.validate();
    const double pads[] = {0.0, 0.25e-3, 0.5e-3, 1e-3};
    std::string last_err = "?";
    for (double pad : pads) {
        if (pad > opt.nudge_limit + 1e-18) break;
        SearchWindow nudged = w;
        nudged.re_min -= pad;
        nudged.re_max += pad;
        nudged.im_min -= pad;
        nudged.im_max += pad;
        try {
            const int n = winding_number(f, nudged, opt.samples_per_unit);
            return {n, nudged};
        } catch (const BoundaryZeroError& e) {
            last_err = e.what();
        }
    }
    throw BoundaryZeroError({w.re_min, w.im_min});
}

struct Cell {
    SearchWindow box;
    int count = 0;
};

struct CellOutcome {
    std::vector<RootRecord> roots;
    std::vector<UnresolvedCell> unresolved;
    std::vector<Cell> children;
};

template <typename F>
CellOutcome process_cell(F&& f, const Cell& cell, const RootFindOptions& opt) {
    CellOutcome out;
    if (cell.count == 0) return out;
    const double diag = cell.box.diag();
    const double min_cell = std::max(8.0 * opt.tol, 1e-9);

    auto try_newton_accept = [&](double slack) -> bool {
        const std::complex<double> center{(cell.box.re_min + cell.box.re_max) / 2.0,
                                          (cell.box.im_min + cell.box.im_max) / 2.0};
        const NewtonResult nr = newton_polish(f, center, diag, opt.tol);
        if (nr.converged && cell.box.contains(nr.s, slack)) {
            out.roots.push_back({nr.s, nr.last_step, cell.count});
            return true;
        }
        return false;
    };

    if (cell.count == 1 && try_newton_accept(0.0)) return out;
    if (diag < min_cell) {
        if (try_newton_accept(diag)) return out;
        out.unresolved.push_back({cell.box, cell.count});
        return out;
    }

    // quadrisect; shift the split lines until no child boundary crosses a zero
    static constexpr double fracs[] = {0.5, 0.46, 0.54, 0.41, 0.59, 0.37, 0.63};
    for (double fx : fracs) {
        for (double fy : fracs) {
            const double xm = cell.box.re_min + cell.box.width() * fx;
            const double ym = cell.box.im_min + cell.box.height() * fy;
            SearchWindow q[4] = {cell.box, cell.box, cell.box, cell.box};
            q[0].re_max = xm; q[0].im_max = ym;
            q[1].re_min = xm; q[1].im_max = ym;
            q[2].re_max = xm; q[2].im_min = ym;
            q[3].re_min = xm; q[3].im_min = ym;
            int counts[4];
            bool ok = true;
            int sum = 0;
            for (int i = 0; i < 4 && ok; ++i) {
                try {
                    counts[i] = winding_number(f, q[i], opt.samples_per_unit);
                    sum += counts[i];
                } catch (const BoundaryZeroError&) {
                    ok = false;
                } catch (const std::runtime_error&) {
                    ok = false;
                }
            }
            if (!ok || sum != cell.count) continue;
            for (int i = 0; i < 4; ++i)
                if (counts[i] > 0) out.children.push_back({q[i], counts[i]});
            return out;
        }
    }
    out.unresolved.push_back({cell.box, cell.count});
    return out;
}

} // namespace detail

/// Number of zeros of an entire residual inside the window, by the argument
/// principle.  Nudges the boundary outward by up to 1e-3 if a zero sits on
/// it; throws BoundaryZeroError if that fails.
template <typename F>
int count_zeros(F&& f, const SearchWindow& w, const RootFindOptions& opt = {}) {
    return detail::counted_window(f, w, opt).first;
}

/// Locate all zeros in the window: recursive quadrisection guided by
/// winding counts, then Newton polishing with central-difference
/// derivatives.  The result is deterministic for any thread count; roots
/// are sorted by (Re, Im) and conjugate-paired exactly when the window is
/// symmetric about the real axis.
template <typename F>
Spectrum find_roots(F&& f, const SearchWindow& w, const RootFindOptions& opt = {}) {
    Spectrum spec;
    auto [total, used] = detail::counted_window(f, w, opt);
    spec.window = used;
    spec.counted_total = total;
    if (total == 0) return spec;

    std::vector<detail::Cell> active{{used, total}};
    while (!active.empty()) {
        std::vector<detail::CellOutcome> outcomes(active.size());
        detail::parallel_for(static_cast<int>(active.size()), opt.threads,
                             [&](int i) { outcomes[static_cast<size_t>(i)] = detail::process_cell(f, active[static_cast<size_t>(i)], opt); });
        std::vector<detail::Cell> next;
        for (auto& oc : outcomes) {
            spec.roots.insert(spec.roots.end(), oc.roots.begin(), oc.roots.end());
            spec.unresolved.insert(spec.unresolved.end(), oc.unresolved.begin(),
                                   oc.unresolved.end());
            next.insert(next.end(), oc.children.begin(), oc.children.end());
        }
        active = std::move(next);
    }

    // dedupe near-identical records (adjacent cells converging to a shared edge)
    std::sort(spec.roots.begin(), spec.roots.end(), [](const RootRecord& a, const RootRecord& b) {
        if (a.s.real() != b.s.real()) return a.s.real() < b.s.real();
        return a.s.imag() < b.s.imag();
    });
    const double merge_tol = std::max(4.0 * opt.tol, 1e-13);
    std::vector<RootRecord> merged;
    for (const auto& r : spec.roots) {
        if (!merged.empty() && std::abs(merged.back().s - r.s) < merge_tol) {
            merged.back().multiplicity += r.multiplicity;
            merged.back().residual = std::max(merged.back().residual, r.residual);
        } else {
            merged.push_back(r);
        }
    }
    spec.roots = std::move(merged);

    // exact conjugate closure on symmetric windows
    if (used.symmetric_about_real_axis()) {
        const double axis_tol = std::max(1e-10, 4.0 * opt.tol);
        for (auto& r : spec.roots)
            if (std::abs(r.s.imag()) <= axis_tol) r.s = {r.s.real(), 0.0};
        std::vector<size_t> upper, lower;
        for (size_t i = 0; i < spec.roots.size(); ++i) {
            if (spec.roots[i].s.imag() > 0) upper.push_back(i);
            else if (spec.roots[i].s.imag() < 0) lower.push_back(i);
        }
        std::vector<bool> used_low(lower.size(), false);
        for (size_t ui : upper) {
            const std::complex<double> want = std::conj(spec.roots[ui].s);
            size_t best = lower.size();
            double best_d = 1e-6;
            for (size_t k = 0; k < lower.size(); ++k) {
                if (used_low[k]) continue;
                const double d = std::abs(spec.roots[lower[k]].s - want);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            if (best < lower.size()) {
                used_low[best] = true;
                const std::complex<double> mean =
                    (spec.roots[ui].s + std::conj(spec.roots[lower[best]].s)) * 0.5;
                spec.roots[ui].s = mean;
                spec.roots[lower[best]].s = std::conj(mean);
            }
        }
        std::sort(spec.roots.begin(), spec.roots.end(),
                  [](const RootRecord& a, const RootRecord& b) {
                      if (a.s.real() != b.s.real()) return a.s.real() < b.s.real();
                      return a.s.imag() < b.s.imag();
                  });
    }

    // conservation: every counted zero is either located or boxed as unresolved
    int located = 0;
    for (const auto& r : spec.roots) located += r.multiplicity;
    for (const auto& u : spec.unresolved) located += u.count;
    if (located != spec.counted_total)
        throw std::logic_error("zero-count conservation violated: located " +
                               std::to_string(located) + " of " +
                               std::to_string(spec.counted_total));

    // phase-stationarity certificate: a tiny circle around each root must
    // wind exactly its multiplicity
    if (opt.certify && !spec.roots.empty()) {
        std::vector<int> bad(spec.roots.size(), 0);
        detail::parallel_for(static_cast<int>(spec.roots.size()), opt.threads, [&](int i) {
            const auto& r = spec.roots[static_cast<size_t>(i)];
            double nn = spec.window.diag();
            for (size_t k = 0; k < spec.roots.size(); ++k)
                if (k != static_cast<size_t>(i))
                    nn = std::min(nn, std::abs(spec.roots[k].s - r.s));
            const double rad =
                std::min(0.25 * nn, std::max(1e-7, 30.0 * std::max(opt.tol, r.residual)));
            if (rad < 6.0 * opt.tol) return;  // too tight to certify; counts cover it
            SearchWindow circle{r.s.real() - rad, r.s.real() + rad, r.s.imag() - rad,
                                r.s.imag() + rad, spec.window.max_depth, 64};
            try {
                if (detail::winding_number(f, circle, 16.0 / rad) != r.multiplicity) bad[static_cast<size_t>(i)] = 1;
            } catch (...) {
                bad[static_cast<size_t>(i)] = 1;
            }
        });
        for (size_t i = 0; i < bad.size(); ++i)
            if (bad[i])
                throw std::logic_error("root certification failed at (" +
                                       std::to_string(spec.roots[i].s.real()) + ", " +
                                       std::to_string(spec.roots[i].s.imag()) + ")");
    }
    return spec;
}

/// Window-limited spectral abscissa: max Re over located roots, or the
/// -infinity sentinel when the window holds none.
struct SpectralAbscissa {
    bool finite = false;
    double sigma = -std::numeric_limits<double>::infinity();
    std::complex<double> attained_at{0.0, 0.0};
};

inline SpectralAbscissa spectral_abscissa(const Spectrum& spec) {
    SpectralAbscissa out;
    if (spec.roots.empty() && spec.unresolved.empty()) return out;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : spec.roots) best = std::max(best, r.s.real());
    for (const auto& u : spec.unresolved)
        if (u.box.re_max > best)
            throw std::runtime_error("unresolved cell may contain the rightmost root");
    if (spec.roots.empty()) return out;
    out.finite = true;
    out.sigma = best;
    std::complex<double> att{0.0, 0.0};
    bool have = false;
    for (const auto& r : spec.roots) {
        if (r.s.real() < best - 1e-10) continue;
        if (!have || std::abs(r.s.imag()) < std::abs(att.imag()) - 1e-15 ||
            (std::abs(std::abs(r.s.imag()) - std::abs(att.imag())) <= 1e-15 &&
             r.s.imag() > att.imag())) {
            att = r.s;
            have = true;
        }
    }
    out.attained_at = att;
    return out;
}

template <typename F>
SpectralAbscissa spectral_abscissa(F&& f, const SearchWindow& w, const RootFindOptions& opt = {}) {
    return spectral_abscissa(find_roots(f, w, opt));
}

} // namespace transpec
