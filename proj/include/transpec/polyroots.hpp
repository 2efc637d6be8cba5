#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace transpec {

/// All roots of a polynomial given by coefficients in ascending order
/// (coeffs[k] multiplies x^k), via Durand-Kerner simultaneous iteration.
/// Intended for the small/medium degrees used here (n <= ~100).
inline std::vector<std::complex<double>> polynomial_roots(
    std::vector<std::complex<double>> coeffs, double tol = 1e-13, int max_iter = 800) {
    // strip vanishing leading coefficients
    while (coeffs.size() > 1 && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
    if (coeffs.size() <= 1) return {};

    std::vector<std::complex<double>> roots;
    // factor out roots at the origin
    size_t first = 0;
    while (first + 1 < coeffs.size() && std::abs(coeffs[first]) == 0.0) {
        roots.emplace_back(0.0, 0.0);
        ++first;
    }
    coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<long>(first));
    const size_t n = coeffs.size() - 1;
    if (n == 0) return roots;

    const std::complex<double> lead = coeffs.back();
    for (auto& c : coeffs) c /= lead;

    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc = coeffs.back();
        for (size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * x + coeffs[k];
        return acc;
    };

    if (n == 1) {
        roots.push_back(-coeffs[0]);
        return roots;
    }
    if (n == 2) {
        const std::complex<double> b = coeffs[1], c = coeffs[0];
        std::complex<double> q = std::sqrt(b * b - 4.0 * c);
        // pick the sign that avoids cancellation
        if (std::real(std::conj(b) * q) < 0.0) q = -q;
        const std::complex<double> r1 = (-b - q) * 0.5;
        roots.push_back(r1);
        roots.push_back(std::abs(r1) > 0 ? c / r1 : -b - r1);
        return roots;
    }

    double bound = 0.0;
    for (size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(coeffs[k]));
    const double radius = 1.0 + bound;

    std::vector<std::complex<double>> x(n);
    const std::complex<double> seed{0.4, 0.9};
    std::complex<double> p{1.0, 0.0};
    for (size_t k = 0; k < n; ++k) {
        p *= seed;
        x[k] = radius * p / std::abs(p) * (0.5 + 0.5 * static_cast<double>(k + 1) / n);
    }

    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (size_t i = 0; i < n; ++i) {
            std::complex<double> den{1.0, 0.0};
            for (size_t j = 0; j < n; ++j)
                if (j != i) den *= (x[i] - x[j]);
            if (std::abs(den) == 0.0) {
                x[i] += std::complex<double>(1e-8, 1e-8);
                continue;
            }
            const std::complex<double> dx = eval(x[i]) / den;
            x[i] -= dx;
            worst = std::max(worst, std::abs(dx));
        }
        if (worst < tol * radius) break;
    }

    // Newton polish against the original (monic) polynomial
    auto deriv = [&](std::complex<double> v) {
        std::complex<double> acc = coeffs.back() * static_cast<double>(n);
        for (size_t k = n - 1; k >= 1; --k) acc = acc * v + coeffs[k] * static_cast<double>(k);
        return acc;
    };
    for (auto& r : x) {
        for (int it = 0; it < 4; ++it) {
            const std::complex<double> d = deriv(r);
            if (std::abs(d) == 0.0) break;
            r -= eval(r) / d;
        }
    }
    roots.insert(roots.end(), x.begin(), x.end());
    return roots;
}

inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs,
                                                          double tol = 1e-13,
                                                          int max_iter = 800) {
    std::vector<std::complex<double>> c(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i];
    return polynomial_roots(std::move(c), tol, max_iter);
}

} // namespace transpec
