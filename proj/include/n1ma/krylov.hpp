#pragma once

#include <Eigen/Dense>

#include <functional>

namespace n1ma {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Right-preconditioned GMRES without restarts, started from x = 0.
/// Stops when ||b - A x|| <= rel_tol * ||b|| or after max_iterations.
[[nodiscard]] GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, const Eigen::VectorXd& b,
                                double rel_tol, int max_iterations);

}  // namespace n1ma
