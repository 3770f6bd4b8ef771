#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "madel/errors.hpp"

namespace madel {

using Complex = std::complex<double>;

// Uniform 1D grid: x_i = x_min + i*h, h = (x_max - x_min)/(n_points - 1).
struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_points = 0;

    Grid1D() = default;
    Grid1D(double xmin, double xmax, int n) : x_min(xmin), x_max(xmax), n_points(n) {
        if (n < 3)
            throw invalid_grid_error("Grid1D requires n_points >= 3");
        if (!(xmax > xmin))
            throw invalid_grid_error("Grid1D requires x_max > x_min");
    }

    double spacing() const { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const { return x_min + i * spacing(); }

    bool operator==(const Grid1D& o) const {
        return x_min == o.x_min && x_max == o.x_max && n_points == o.n_points;
    }
};

template <typename T>
struct Field {
    Grid1D grid;
    std::vector<T> values;

    Field() = default;
    explicit Field(const Grid1D& g) : grid(g), values(static_cast<size_t>(g.n_points), T{}) {}
    Field(const Grid1D& g, std::vector<T> v) : grid(g), values(std::move(v)) {
        if (values.size() != static_cast<size_t>(g.n_points))
            throw invalid_grid_error("field length does not match grid");
    }

    int size() const { return grid.n_points; }
    T& operator[](int i) { return values[static_cast<size_t>(i)]; }
    const T& operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;

template <typename T, typename F>
Field<T> sample(const Grid1D& g, F&& f) {
    Field<T> out(g);
    for (int i = 0; i < g.n_points; ++i) out[i] = f(g.x(i));
    return out;
}

template <typename F>
ComplexField sample_complex(const Grid1D& g, F&& f) {
    return sample<Complex>(g, std::forward<F>(f));
}

template <typename F>
RealField sample_real(const Grid1D& g, F&& f) {
    return sample<double>(g, std::forward<F>(f));
}

// Central first difference on interior points, 3-point one-sided formulas at
// the endpoints. Exact for quadratics.
template <typename T>
Field<T> first_derivative(const Field<T>& f) {
    const int n = f.grid.n_points;
    if (n < 3) throw invalid_grid_error("first_derivative requires n_points >= 3");
    const double h = f.grid.spacing();
    Field<T> out(f.grid);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return out;
}

// Central second difference on interior points, 3-point one-sided formulas at
// the endpoints (first-order there, but still exact for quadratics).
template <typename T>
Field<T> second_derivative(const Field<T>& f) {
    const int n = f.grid.n_points;
    if (n < 3) throw invalid_grid_error("second_derivative requires n_points >= 3");
    const double h2 = f.grid.spacing() * f.grid.spacing();
    Field<T> out(f.grid);
    out[0] = (f[0] - 2.0 * f[1] + f[2]) / h2;
    for (int i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    out[n - 1] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / h2;
    return out;
}

// Pointwise relative residual of the stationary Schroedinger equation,
//   | -(hbar^2/2m) psi'' + (V - E) psi | / max(|psi| |E|, floor),
// on interior points; endpoints are reported as zero (one-sided stencils are
// kept only for derivative output, boundary conditions live in the solution).
// The floor guards against division blow-up at nodes of psi.
inline RealField schrodinger_residual(const ComplexField& psi, const RealField& V, double E,
                                      double m, double hbar, double floor = 1e-12) {
    if (!(psi.grid == V.grid))
        throw grid_mismatch_error("schrodinger_residual: psi and V on different grids");
    const ComplexField d2 = second_derivative(psi);
    RealField out(psi.grid);
    const double c = hbar * hbar / (2.0 * m);
    for (int i = 1; i + 1 < psi.grid.n_points; ++i) {
        const Complex lhs = -c * d2[i] + (V[i] - E) * psi[i];
        const double scale = std::max(std::abs(psi[i]) * std::abs(E), floor);
        out[i] = std::abs(lhs) / scale;
    }
    return out;
}

// Largest value over interior points (the residual convention above).
inline double max_interior(const RealField& f) {
    double m = 0.0;
    for (int i = 1; i + 1 < f.grid.n_points; ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

template <typename T>
double max_abs(const Field<T>& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

} // namespace madel
