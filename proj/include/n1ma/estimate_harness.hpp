#pragma once

// A-posteriori audits of solver output: the trace-form constant bound, the
// mass identity, pointwise AM-GM, C^2 ratios, domination consistency and
// uniformity along deformation families.

#include "n1ma/eigencone.hpp"
#include "n1ma/torus_solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace n1ma::harness {

struct CBound {
    double bound = 0.0;
    bool satisfied = false;
};

/// bound = (mean tr Gamma / (n mean f^{1/n}))^n on the unit-volume torus;
/// satisfied iff c <= bound + slack.
[[nodiscard]] CBound c_upper_bound(const torus::TorusProblem& problem, const torus::SolveResult& result,
                                   double slack = 1e-9);

struct MassCheck {
    double mass = 0.0;       // mean of tr(Gamma + H_u)
    double reference = 0.0;  // mean of tr(Gamma)
    bool holds = false;
};

/// Compares the grid quadrature of tr(Gamma + H_u) with that of tr(Gamma).
/// Holds for any periodic u, solution or not.
[[nodiscard]] MassCheck mass_identity_check(const torus::TorusProblem& problem, const GridField& u, double tolerance);

/// min over the grid of tr(Gamma + H_u) - n (c f)^{1/n}.
[[nodiscard]] double amgm_pointwise_audit(const torus::TorusProblem& problem, const torus::SolveResult& result);

/// hess_sup / (grad_sup^2 + 1).
[[nodiscard]] double c2_ratio(const torus::SolveResult& result);

/// Runs domination_witness on two solves sharing Gamma, with u = first,
/// v = second and the Monge-Ampere measures det alpha of each.
[[nodiscard]] eigencone::DominationVerdict domination_consistency(const torus::TorusProblem& first_problem,
                                                                  const torus::SolveResult& first,
                                                                  const torus::TorusProblem& second_problem,
                                                                  const torus::SolveResult& second, double c,
                                                                  double tolerance = 1e-9);

struct EstimateRow {
    double t = 0.0;
    bool converged = false;
    torus::SolveStatus status = torus::SolveStatus::MaxIterations;
    int iterations = 0;
    double c = 0.0;
    double c_upper = 0.0;
    bool c_bound_ok = false;
    double mass = 0.0;
    bool mass_ok = false;
    double amgm_min_gap = 0.0;
    double c2_ratio = 0.0;
    double grad_sup = 0.0;
    double hess_sup = 0.0;
    double osc = 0.0;
    double min_alpha_eig = 0.0;
};

/// All audits for one solve. Audits that need a converged result are left at
/// zero when the solve failed.
[[nodiscard]] EstimateRow analyze(const torus::TorusProblem& problem, const torus::SolveResult& result, double t = 0.0);

struct DeclaredBounds {
    double c_beta_omega = 0.0;  // C^{-1} Gamma_t <= I <= C Gamma_t
    double g_beta = 1.0;
    double volume = 1.0;
    double budget = 0.0;        // allowed sup_t (c_t + 1/c_t + osc_t)
};

/// Gamma_t = (1-t) Gamma0 + t Gamma1, f_t = f0^{1-t} f1^t, t in [0, 1/2].
class FamilySpec {
public:
    /// Throws DomainError if an endpoint is not positive definite or positive,
    /// a t lies outside [0, 1/2], or the declared C_{beta,omega} fails to
    /// bound the eigenvalues of some Gamma_t from both sides.
    FamilySpec(torus::TorusProblem base, MatrixField gamma1, GridField f1, std::vector<double> t_grid,
               DeclaredBounds bounds);

    [[nodiscard]] const torus::TorusProblem& base() const noexcept { return base_; }
    [[nodiscard]] const std::vector<double>& t_grid() const noexcept { return t_grid_; }
    [[nodiscard]] const DeclaredBounds& bounds() const noexcept { return bounds_; }

    [[nodiscard]] torus::TorusProblem fiber(double t) const;

private:
    torus::TorusProblem base_;
    MatrixField gamma1_;
    GridField log_f0_;
    GridField log_f1_;
    std::vector<double> t_grid_;
    DeclaredBounds bounds_;
};

struct EstimateReport {
    std::vector<EstimateRow> rows;  // ordered by t
    double uniformity = 0.0;        // sup over converged fibers of c + 1/c + osc
    double budget = 0.0;
    bool within_budget = false;
    int failed_fibers = 0;
};

[[nodiscard]] EstimateReport family_run(const FamilySpec& spec);

/// CSV with columns t,c,c_upper,mass,min_gap,c2_ratio,grad_sup,osc,converged.
void write_csv(std::ostream& out, const std::vector<EstimateRow>& rows);

/// Human-readable summary of a family report.
[[nodiscard]] std::string summary(const EstimateReport& report);

}  // namespace n1ma::harness
