#pragma once

// The (n-1)-Monge-Ampere equation
//   det(Gamma + ((tr H_u) I - H_u)/(n-1)) = c f,   sup u = 0,
// on the flat real n-torus, where H_u = (1/4) Hess u is the complex Hessian of
// a function of Re z only.

#include "n1ma/grid_field.hpp"

#include <string>
#include <vector>

namespace n1ma::torus {

struct SolverOptions {
    double tolerance = 1e-10;       // sup-norm residual target
    int max_iterations = 50;        // Newton iterations per solve
    double damping_floor = 0x1p-40; // smallest accepted line-search step
    double epsilon = 0.0;           // positivity floor; 0 selects 1e-6 * min eig Gamma
    double krylov_tolerance = 1e-10;
    int krylov_max_iterations = 200;
    int continuation_steps = 8;
};

class TorusProblem {
public:
    /// Throws DomainError unless n >= 3, the grid has n axes (each even, >= 8),
    /// gamma is n x n and positive definite everywhere, f > 0 and finite.
    TorusProblem(int n, MatrixField gamma, GridField f, SolverOptions options = {});

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<int>& shape() const noexcept { return f_.shape(); }
    [[nodiscard]] const MatrixField& gamma() const noexcept { return gamma_; }
    [[nodiscard]] const GridField& f() const noexcept { return f_; }
    [[nodiscard]] const SolverOptions& options() const noexcept { return options_; }
    /// Effective positivity floor.
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] double min_gamma_eigenvalue() const noexcept { return min_gamma_eig_; }

    /// Same problem with density replaced by `f`.
    [[nodiscard]] TorusProblem with_density(GridField f) const;

private:
    int n_;
    MatrixField gamma_;
    GridField f_;
    SolverOptions options_;
    double min_gamma_eig_ = 0.0;
    double epsilon_ = 0.0;
};

enum class SolveStatus { Converged, ConeExit, MaxIterations };

[[nodiscard]] const char* to_string(SolveStatus s) noexcept;

struct SolveResult {
    GridField u;
    double c = 0.0;
    std::vector<double> residual_history;  // sup-norm residual per Newton iterate
    std::vector<double> ellipticity_history;  // min eig of the linearization tensor per iterate
    std::vector<int> krylov_iterations;
    double min_alpha_eig = 0.0;
    double grad_sup = 0.0;
    double hess_sup = 0.0;
    double osc = 0.0;
    int iterations = 0;
    int continuation_steps = 0;  // 0 when Newton from u = 0 succeeded directly
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterations;
    std::string message;
};

/// Gamma + ((tr H_u) I - H_u)/(n-1) at every node.
[[nodiscard]] MatrixField alpha_field(const TorusProblem& problem, const GridField& u);

/// log det alpha_u - log_c - log f. Throws PositivityError if alpha_u is not
/// positive definite at some node.
[[nodiscard]] GridField residual(const TorusProblem& problem, const GridField& u, double log_c);

/// Frechet derivative of log det alpha_u in direction v:
/// tr(B H_v) with B = (tr(alpha^{-1}) I - alpha^{-1})/(n-1).
[[nodiscard]] GridField linearized_apply(const TorusProblem& problem, const GridField& u, const GridField& v);

/// Damped Newton-Krylov solve from u = 0, with density continuation when
/// the first attempt leaves the cone. The returned u has sup u = 0 and the
/// diagnostics filled in.
[[nodiscard]] SolveResult newton_solve(const TorusProblem& problem);

/// Fills grad_sup = max |grad u|/2, hess_sup = max spectral norm of H_u,
/// osc = -min u and min_alpha_eig for result.u.
[[nodiscard]] SolveResult diagnostics(const TorusProblem& problem, SolveResult result);

}  // namespace n1ma::torus
