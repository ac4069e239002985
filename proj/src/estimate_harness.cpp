#include "n1ma/estimate_harness.hpp"

#include "n1ma/error.hpp"
#include "n1ma/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace n1ma::harness {

namespace {

constexpr const char* kModule = "estimate_harness";

GridField trace_field(const MatrixField& m) {
    GridField t(m.shape());
    for (std::size_t i = 0; i < m.points(); ++i) t[i] = m.at(i).trace();
    return t;
}

// tr(Gamma + H_u) pointwise.
GridField total_trace(const torus::TorusProblem& problem, const GridField& u) {
    return trace_field(problem.gamma()) + trace_field(complex_hessian(u));
}

void require_grid(const torus::TorusProblem& problem, const GridField& u, const char* op) {
    if (u.shape() != problem.shape()) throw DomainError(kModule, op, "grid mismatch");
}

}  // namespace

CBound c_upper_bound(const torus::TorusProblem& problem, const torus::SolveResult& result, double slack) {
    const int n = problem.n();
    double root_mass = 0.0;
    for (double v : problem.f().data()) root_mass += std::pow(v, 1.0 / n);
    root_mass /= static_cast<double>(problem.f().size());
    const double bound = std::pow(trace_field(problem.gamma()).mean() / (n * root_mass), n);
    return {bound, result.c <= bound + slack};
}

MassCheck mass_identity_check(const torus::TorusProblem& problem, const GridField& u, double tolerance) {
    require_grid(problem, u, "mass_identity_check");
    MassCheck m;
    m.mass = total_trace(problem, u).mean();
    m.reference = trace_field(problem.gamma()).mean();
    m.holds = std::abs(m.mass - m.reference) <= tolerance;
    return m;
}

double amgm_pointwise_audit(const torus::TorusProblem& problem, const torus::SolveResult& result) {
    require_grid(problem, result.u, "amgm_pointwise_audit");
    const GridField tr = total_trace(problem, result.u);
    const int n = problem.n();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tr.size(); ++i) {
        gap = std::min(gap, tr[i] - n * std::pow(result.c * problem.f()[i], 1.0 / n));
    }
    return gap;
}

double c2_ratio(const torus::SolveResult& result) {
    return result.hess_sup / (result.grad_sup * result.grad_sup + 1.0);
}

eigencone::DominationVerdict domination_consistency(const torus::TorusProblem& first_problem,
                                                    const torus::SolveResult& first,
                                                    const torus::TorusProblem& second_problem,
                                                    const torus::SolveResult& second, double c, double tolerance) {
    require_grid(first_problem, first.u, "domination_consistency");
    require_grid(second_problem, second.u, "domination_consistency");
    if (first_problem.shape() != second_problem.shape()) {
        throw DomainError(kModule, "domination_consistency", "solves live on different grids");
    }
    const auto ma = [](const torus::TorusProblem& p, const GridField& u) {
        const MatrixField a = torus::alpha_field(p, u);
        GridField d(u.shape());
        for (std::size_t i = 0; i < a.points(); ++i) d[i] = a.at(i).determinant();
        return d;
    };
    return eigencone::domination_witness(first.u, second.u, c, ma(first_problem, first.u),
                                         ma(second_problem, second.u), tolerance);
}

EstimateRow analyze(const torus::TorusProblem& problem, const torus::SolveResult& result, double t) {
    EstimateRow row;
    row.t = t;
    row.converged = result.converged;
    row.status = result.status;
    row.iterations = result.iterations;
    row.c = result.c;
    row.grad_sup = result.grad_sup;
    row.hess_sup = result.hess_sup;
    row.osc = result.osc;
    row.min_alpha_eig = result.min_alpha_eig;
    row.c2_ratio = c2_ratio(result);
    const CBound b = c_upper_bound(problem, result);
    row.c_upper = b.bound;
    const double scale = std::max(1.0, std::abs(trace_field(problem.gamma()).mean()));
    const MassCheck m = mass_identity_check(problem, result.u, 1e-10 * scale);
    row.mass = m.mass;
    row.mass_ok = m.holds;
    if (result.converged) {
        row.c_bound_ok = b.satisfied;
        row.amgm_min_gap = amgm_pointwise_audit(problem, result);
    }
    return row;
}

FamilySpec::FamilySpec(torus::TorusProblem base, MatrixField gamma1, GridField f1, std::vector<double> t_grid,
                       DeclaredBounds bounds)
    : base_(std::move(base)), gamma1_(std::move(gamma1)), t_grid_(std::move(t_grid)), bounds_(bounds) {
    const char* op = "FamilySpec";
    if (gamma1_.n() != base_.n() || gamma1_.shape() != base_.shape() || f1.shape() != base_.shape()) {
        throw DomainError(kModule, op, "endpoint fields must share the base grid and dimension");
    }
    if (!(gamma1_.min_eigenvalue() > 0.0)) throw DomainError(kModule, op, "Gamma1 is not positive definite");
    for (double v : f1.data()) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(kModule, op, "f1 must be positive and finite");
    }
    if (t_grid_.empty()) throw DomainError(kModule, op, "empty t grid");
    for (double t : t_grid_) {
        if (!(t >= 0.0 && t <= 0.5)) throw DomainError(kModule, op, "t must lie in [0, 1/2]");
    }
    std::sort(t_grid_.begin(), t_grid_.end());
    if (!(bounds_.c_beta_omega >= 1.0) || !(bounds_.g_beta > 0.0) || !(bounds_.volume > 0.0) ||
        !(bounds_.budget > 0.0)) {
        throw DomainError(kModule, op, "declared bounds need C >= 1 and positive G, volume and budget");
    }

    log_f0_ = base_.f();
    for (double& v : log_f0_.data()) v = std::log(v);
    log_f1_ = std::move(f1);
    for (double& v : log_f1_.data()) v = std::log(v);

    // C^{-1} Gamma_t <= I <= C Gamma_t  <=>  spec(Gamma_t) in [1/C, C].
    const double C = bounds_.c_beta_omega;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(base_.n());
    for (double t : t_grid_) {
        for (std::size_t i = 0; i < gamma1_.points(); ++i) {
            es.compute((1.0 - t) * base_.gamma().at(i) + t * gamma1_.at(i), Eigen::EigenvaluesOnly);
            const auto& ev = es.eigenvalues();
            if (ev(0) < 1.0 / C || ev(ev.size() - 1) > C) {
                throw DomainError(kModule, op,
                                  fmt::format("declared C_beta_omega = {} does not bound Gamma_t at t = {}", C, t));
            }
        }
    }
}

torus::TorusProblem FamilySpec::fiber(double t) const {
    MatrixField gamma(base_.shape(), base_.n());
    for (std::size_t i = 0; i < gamma.points(); ++i) {
        gamma.at(i) = (1.0 - t) * base_.gamma().at(i) + t * gamma1_.at(i);
    }
    GridField f = (1.0 - t) * log_f0_ + t * log_f1_;
    for (double& v : f.data()) v = std::exp(v);
    return torus::TorusProblem(base_.n(), std::move(gamma), std::move(f), base_.options());
}

EstimateReport family_run(const FamilySpec& spec) {
    EstimateReport report;
    report.budget = spec.bounds().budget;
    double sup = 0.0;
    for (double t : spec.t_grid()) {
        const torus::TorusProblem p = spec.fiber(t);
        const torus::SolveResult r = torus::newton_solve(p);
        report.rows.push_back(analyze(p, r, t));
        if (r.converged) {
            sup = std::max(sup, r.c + 1.0 / r.c + r.osc);
        } else {
            ++report.failed_fibers;
        }
    }
    report.uniformity = sup;
    report.within_budget = report.failed_fibers == 0 && sup <= report.budget;
    return report;
}

void write_csv(std::ostream& out, const std::vector<EstimateRow>& rows) {
    out << "t,c,c_upper,mass,min_gap,c2_ratio,grad_sup,osc,converged\n";
    for (const auto& r : rows) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.t, r.c,
                           r.c_upper, r.mass, r.amgm_min_gap, r.c2_ratio, r.grad_sup, r.osc, r.converged ? 1 : 0);
    }
}

std::string summary(const EstimateReport& report) {
    std::string s = fmt::format("fibers: {}\nfailed: {}\n", report.rows.size(), report.failed_fibers);
    for (const auto& r : report.rows) {
        s += fmt::format("t={:<6g} status={:<14} c={:.12g} c_upper={:.12g} bound_ok={} mass_ok={} "
                         "min_gap={:.3e} c2_ratio={:.6g} osc={:.6g}\n",
                         r.t, torus::to_string(r.status), r.c, r.c_upper, r.c_bound_ok, r.mass_ok, r.amgm_min_gap,
                         r.c2_ratio, r.osc);
    }
    s += fmt::format("sup_t(c + 1/c + osc) = {:.12g}\nbudget = {:.12g}\nwithin_budget = {}\n", report.uniformity,
                     report.budget, report.within_budget);
    return s;
}

}  // namespace n1ma::harness
