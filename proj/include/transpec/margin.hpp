#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "transpec/polyroots.hpp"

namespace transpec {

/// Real boundary-coupling matrix, 2 <= n <= 8.
struct BoundaryMatrix {
    int n = 0;
    std::vector<double> a; // row-major

    double at(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }
    double& at(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }

    void validate() const {
        if (n < 2 || n > 8) throw std::invalid_argument("matrix size must be in [2, 8]");
        if (a.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
            throw std::invalid_argument("matrix data size mismatch");
        for (double v : a)
            if (!std::isfinite(v)) throw std::invalid_argument("matrix entries must be finite");
    }

    /// Coupling matrix of the delayed-feedback loop:
    ///   [ -2k1  1  -k2 ; 1 0 0 ; 1 0 0 ].
    static BoundaryMatrix feedback_loop(double k1, double k2) {
        BoundaryMatrix m;
        m.n = 3;
        m.a = {-2.0 * k1, 1.0, -k2, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
        return m;
    }

    static BoundaryMatrix identity(int n) {
        BoundaryMatrix m;
        m.n = n;
        m.a.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        m.validate();
        return m;
    }

    /// The 2x2 coupling of the scalar transport pair: [1 -1; 1 -1].
    static BoundaryMatrix scalar_pair() {
        BoundaryMatrix m;
        m.n = 2;
        m.a = {1.0, -1.0, 1.0, -1.0};
        return m;
    }
};

struct MarginResult {
    double rho2 = 0.0;
    double rho_bar = 0.0;
    std::vector<double> optimal_scaling; // positive diagonal entries, d1 = 1
    std::vector<double> optimal_phases;  // radians, theta1 = 0
    bool degenerate = false;             // scaling infimum approached at the cap
    bool convergence_warn = false;
    double tolerance = 5e-4;
};

/// rho2 for the feedback-loop matrix in closed form: |k1| + sqrt(1 + k1^2 + |k2|).
inline double rho2_closed_form(double k1, double k2) {
    return std::abs(k1) + std::sqrt(1.0 + k1 * k1 + std::abs(k2));
}

namespace detail {

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(int n, std::vector<double> m) {
    auto at = [&](int i, int j) -> double& { return m[static_cast<size_t>(i * n + j)]; };
    for (int sweep = 0; sweep < 120; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = at(k, p), mkq = at(k, q);
                    at(k, p) = c * mkp - s * mkq;
                    at(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = at(p, k), mqk = at(q, k);
                    at(p, k) = c * mpk - s * mqk;
                    at(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = at(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

/// Largest singular value via the symmetric eigenproblem of B^T B.
inline double spectral_norm(int n, const std::vector<double>& b) {
    std::vector<double> g(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += b[static_cast<size_t>(k * n + i)] * b[static_cast<size_t>(k * n + j)];
            g[static_cast<size_t>(i * n + j)] = s;
        }
    const double lmax = jacobi_eigenvalues(n, std::move(g)).front();
    return std::sqrt(std::max(0.0, lmax));
}

/// Spectral radius of a small complex matrix via its characteristic
/// polynomial (Faddeev-LeVerrier) and Durand-Kerner roots.
inline double spectral_radius(int n, const std::vector<std::complex<double>>& a) {
    using C = std::complex<double>;
    std::vector<C> M(a);
    std::vector<C> coeffs(static_cast<size_t>(n) + 1);
    coeffs[static_cast<size_t>(n)] = 1.0;
    std::vector<C> Mk = M;
    for (int k = 1; k <= n; ++k) {
        C tr = 0.0;
        for (int i = 0; i < n; ++i) tr += Mk[static_cast<size_t>(i * n + i)];
        const C ck = -tr / static_cast<double>(k);
        coeffs[static_cast<size_t>(n - k)] = ck;
        if (k == n) break;
        for (int i = 0; i < n; ++i) Mk[static_cast<size_t>(i * n + i)] += ck;
        std::vector<C> next(static_cast<size_t>(n) * static_cast<size_t>(n), C{0.0, 0.0});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                C s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += M[static_cast<size_t>(i * n + l)] * Mk[static_cast<size_t>(l * n + j)];
                next[static_cast<size_t>(i * n + j)] = s;
            }
        Mk = std::move(next);
    }
    double r = 0.0;
    for (const auto& root : polynomial_roots(coeffs)) r = std::max(r, std::abs(root));
    return r;
}

/// Golden-section minimization of a unimodal-enough 1-d slice; the caller
/// brackets with a coarse scan first.
template <typename Fn>
double golden_min(Fn&& fn, double lo, double hi, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = fn(x2);
        }
    }
    return (f1 <= f2) ? x1 : x2;
}

} // namespace detail

struct Rho2Options {
    double cap = 30.0;       // |log d_i| bound; the k2 = 0 infimum is not attained
    int max_sweeps = 80;
    double tol = 1e-11;
};

/// inf over positive diagonal D of ||D K D^{-1}||_2, by coordinate descent
/// on log-diagonal entries from a multistart grid (d1 fixed to 1).
inline MarginResult rho2_numeric(const BoundaryMatrix& K, const Rho2Options& opt = {}) {
    K.validate();
    const int n = K.n;
    const int nfree = n - 1;
    auto norm_at = [&](const std::vector<double>& x) {
        std::vector<double> b(static_cast<size_t>(n) * static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double xi = (i == 0) ? 0.0 : x[static_cast<size_t>(i - 1)];
            for (int j = 0; j < n; ++j) {
                const double xj = (j == 0) ? 0.0 : x[static_cast<size_t>(j - 1)];
                b[static_cast<size_t>(i * n + j)] = K.at(i, j) * std::exp(xi - xj);
            }
        }
        return detail::spectral_norm(n, b);
    };

    std::vector<std::vector<double>> starts;
    if (nfree <= 3) {
        const std::array<double, 5> g{-2.0, -1.0, 0.0, 1.0, 2.0};
        std::vector<double> x(static_cast<size_t>(nfree), 0.0);
        const int total = static_cast<int>(std::pow(5.0, nfree));
        for (int idx = 0; idx < total; ++idx) {
            int rem = idx;
            for (int c = 0; c < nfree; ++c) {
                x[static_cast<size_t>(c)] = g[static_cast<size_t>(rem % 5)];
                rem /= 5;
            }
            starts.push_back(x);
        }
    } else {
        starts.emplace_back(static_cast<size_t>(nfree), 0.0);
        for (int c = 0; c < nfree; ++c)
            for (double v : {-2.0, 2.0}) {
                std::vector<double> x(static_cast<size_t>(nfree), 0.0);
                x[static_cast<size_t>(c)] = v;
                starts.push_back(x);
            }
    }

    MarginResult best;
    best.rho2 = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    bool warn = false;
    for (const auto& start : starts) {
        std::vector<double> x = start;
        double f = norm_at(x);
        int sweep = 0;
        for (; sweep < opt.max_sweeps; ++sweep) {
            const double f_before = f;
            for (int c = 0; c < nfree; ++c) {
                const double lo = std::max(-opt.cap, x[static_cast<size_t>(c)] - 2.0);
                const double hi = std::min(opt.cap, x[static_cast<size_t>(c)] + 2.0);
                double scan_best = x[static_cast<size_t>(c)], scan_val = f;
                for (int k = 0; k <= 24; ++k) {
                    const double cand = lo + (hi - lo) * k / 24.0;
                    std::vector<double> xt = x;
                    xt[static_cast<size_t>(c)] = cand;
                    const double v = norm_at(xt);
                    if (v < scan_val) {
                        scan_val = v;
                        scan_best = cand;
                    }
                }
                const double span = (hi - lo) / 24.0;
                const double refined = detail::golden_min(
                    [&](double t) {
                        std::vector<double> xt = x;
                        xt[static_cast<size_t>(c)] = t;
                        return norm_at(xt);
                    },
                    std::max(lo, scan_best - span), std::min(hi, scan_best + span), opt.tol);
                std::vector<double> xt = x;
                xt[static_cast<size_t>(c)] = refined;
                const double v = norm_at(xt);
                if (v <= f) {
                    f = v;
                    x = xt;
                }
            }
            if (f_before - f < 1e-13 * (1.0 + std::abs(f))) break;
        }
        if (sweep == opt.max_sweeps) warn = true;
        if (f < best.rho2) {
            best.rho2 = f;
            best_x = x;
        }
    }
    best.optimal_scaling.assign(static_cast<size_t>(n), 1.0);
    best.degenerate = false;
    for (int c = 0; c < nfree; ++c) {
        best.optimal_scaling[static_cast<size_t>(c + 1)] = std::exp(best_x[static_cast<size_t>(c)]);
        if (std::abs(best_x[static_cast<size_t>(c)]) > opt.cap - 0.5) best.degenerate = true;
    }
    best.convergence_warn = warn;
    return best;
}

struct RhoBarOptions {
    int grid = 0;          // 0: pick by size (64 for n<=3, 24 for n=4, 8 beyond)
    int refine_rounds = 8;
};

/// max over phase vectors theta of the spectral radius of
/// diag(e^{-i theta}) K; a common phase only rotates the eigenvalues, so
/// theta_1 is fixed to 0.
inline MarginResult rho_bar_numeric(const BoundaryMatrix& K, const RhoBarOptions& opt = {}) {
    K.validate();
    const int n = K.n;
    const int nfree = n - 1;
    const int grid = opt.grid > 0 ? opt.grid : (n <= 3 ? 64 : (n == 4 ? 24 : 8));
    using C = std::complex<double>;

    auto rho_at = [&](const std::vector<double>& th) {
        std::vector<C> a(static_cast<size_t>(n) * static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double ti = (i == 0) ? 0.0 : th[static_cast<size_t>(i - 1)];
            const C phase = std::polar(1.0, -ti);
            for (int j = 0; j < n; ++j)
                a[static_cast<size_t>(i * n + j)] = phase * K.at(i, j);
        }
        return detail::spectral_radius(n, a);
    };

    const double step = 2.0 * std::numbers::pi / grid;
    std::vector<double> th(static_cast<size_t>(nfree), 0.0), best_th = th;
    double best = -1.0;
    long total = 1;
    for (int c = 0; c < nfree; ++c) total *= grid;
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int c = 0; c < nfree; ++c) {
            th[static_cast<size_t>(c)] = step * static_cast<double>(rem % grid);
            rem /= grid;
        }
        const double r = rho_at(th);
        if (r > best + 1e-15) {
            best = r;
            best_th = th;
        }
    }

    double span = step;
    for (int round = 0; round < opt.refine_rounds; ++round) {
        for (int c = 0; c < nfree; ++c) {
            const double t = detail::golden_min(
                [&](double v) {
                    std::vector<double> tt = best_th;
                    tt[static_cast<size_t>(c)] = v;
                    return -rho_at(tt);
                },
                best_th[static_cast<size_t>(c)] - span, best_th[static_cast<size_t>(c)] + span,
                1e-12);
            std::vector<double> tt = best_th;
            tt[static_cast<size_t>(c)] = t;
            const double r = rho_at(tt);
            if (r > best) {
                best = r;
                best_th = tt;
            }
        }
        span *= 0.5;
    }

    MarginResult out;
    out.rho_bar = best;
    out.optimal_phases.assign(static_cast<size_t>(n), 0.0);
    for (int c = 0; c < nfree; ++c) {
        double v = std::fmod(best_th[static_cast<size_t>(c)], 2.0 * std::numbers::pi);
        if (v < 0) v += 2.0 * std::numbers::pi;
        out.optimal_phases[static_cast<size_t>(c + 1)] = v;
    }
    return out;
}

/// Both margins of one matrix, merged into a single report.
inline MarginResult margin_of(const BoundaryMatrix& K, const Rho2Options& r2 = {},
                              const RhoBarOptions& rb = {}) {
    MarginResult a = rho2_numeric(K, r2);
    const MarginResult b = rho_bar_numeric(K, rb);
    a.rho_bar = b.rho_bar;
    a.optimal_phases = b.optimal_phases;
    return a;
}

struct EigenCheck {
    double beta = 0.0;
    double gamma = 0.0;
    double lambda_max = 0.0;
};

/// beta/gamma of det(lambda I - M) = lambda (lambda^2 - beta lambda + gamma)
/// for M = (D K D^{-1})^T (D K D^{-1}), K the feedback-loop matrix and
/// D = diag(1, th2, th3).  Cross-checks the closed form against an explicit
/// eigen-solve of M.
inline EigenCheck eigen_check_M(double k1, double k2, double th2, double th3) {
    if (!(th2 > 0.0) || !(th3 > 0.0)) throw std::invalid_argument("th2, th3 must be > 0");
    EigenCheck out;
    out.beta = 4.0 * k1 * k1 + (th2 * th2 + 1.0 / (th2 * th2)) +
               (th3 * th3 + k2 * k2 / (th3 * th3));
    out.gamma = 1.0 + (th3 * th3) / (th2 * th2) + k2 * k2 + k2 * k2 * (th2 * th2) / (th3 * th3);
    const double disc = out.beta * out.beta - 4.0 * out.gamma;
    if (disc < -1e-10)
        throw std::logic_error("beta^2 - 4 gamma < 0 although M is symmetric PSD");
    out.lambda_max = 0.5 * (out.beta + std::sqrt(std::max(0.0, disc)));

    const BoundaryMatrix K = BoundaryMatrix::feedback_loop(k1, k2);
    const double d[3] = {1.0, th2, th3};
    std::vector<double> b(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            b[static_cast<size_t>(i * 3 + j)] = d[i] * K.at(i, j) / d[j];
    std::vector<double> m(9, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += b[static_cast<size_t>(k * 3 + i)] * b[static_cast<size_t>(k * 3 + j)];
            m[static_cast<size_t>(i * 3 + j)] = s;
        }
    const double lmax = detail::jacobi_eigenvalues(3, std::move(m)).front();
    if (std::abs(lmax - out.lambda_max) > 1e-10 * std::max(1.0, std::abs(out.lambda_max)))
        throw std::logic_error("closed-form lambda_max disagrees with the eigen-solve");
    return out;
}

} // namespace transpec
