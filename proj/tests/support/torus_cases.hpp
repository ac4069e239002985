#pragma once

// Manufactured torus problems shared by the solver tests and the acceptance suite.

#include "n1ma/torus_solver.hpp"

#include <cmath>
#include <vector>

namespace n1ma::oracle {

constexpr double kManufacturedAmplitude = 3.0;

/// u* = a (cos x1 + cos x2 cos x3) on the 3-torus.
inline GridField manufactured_u(const std::vector<int>& shape, double a = kManufacturedAmplitude) {
    return GridField::sample(shape, [a](std::span<const double> x) {
        return a * (std::cos(x[0]) + std::cos(x[1]) * std::cos(x[2]));
    });
}

/// Analytic alpha_{u*} with Gamma = I: H = (a/4) Hess(u*/a).
inline Eigen::Matrix3d manufactured_alpha(double x1, double x2, double x3, double a = kManufacturedAmplitude) {
    Eigen::Matrix3d h;
    h << -std::cos(x1), 0.0, 0.0, 0.0, -std::cos(x2) * std::cos(x3), std::sin(x2) * std::sin(x3), 0.0,
        std::sin(x2) * std::sin(x3), -std::cos(x2) * std::cos(x3);
    h *= a / 4.0;
    return Eigen::Matrix3d::Identity() + (h.trace() * Eigen::Matrix3d::Identity() - h) / 2.0;
}

/// Gamma = I and f = det alpha_{u*}, so (u*, c = 1) solves the equation.
inline torus::TorusProblem manufactured_problem(int N, double a = kManufacturedAmplitude,
                                                torus::SolverOptions opt = {}) {
    const std::vector<int> shape{N, N, N};
    GridField f = GridField::sample(
        shape, [a](std::span<const double> x) { return manufactured_alpha(x[0], x[1], x[2], a).determinant(); });
    return torus::TorusProblem(3, MatrixField::constant(shape, Eigen::MatrixXd::Identity(3, 3)), std::move(f), opt);
}

/// Sup-norm distance after removing the additive gauge (mean difference).
inline double gauge_distance(const GridField& u, const GridField& v) {
    const double shift = (u - v).mean();
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i] - shift));
    return d;
}

/// Smallest convergence-order estimate log(r_{k+1}/r_k)/log(r_k/r_{k-1})
/// over the last three residuals that sit above `floor`.
inline double tail_order(const std::vector<double>& history, double floor = 1e-12) {
    std::vector<double> h;
    for (double r : history) {
        if (r > floor) h.push_back(r);
    }
    if (h.size() < 3) return 0.0;
    const std::size_t m = h.size();
    return std::log(h[m - 1] / h[m - 2]) / std::log(h[m - 2] / h[m - 3]);
}

}  // namespace n1ma::oracle
