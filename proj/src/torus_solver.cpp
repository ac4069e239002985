#include "n1ma/torus_solver.hpp"

#include "n1ma/error.hpp"
#include "n1ma/krylov.hpp"
#include "n1ma/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace n1ma::torus {

namespace {

constexpr const char* kModule = "torus_solver";

// Pointwise quantities of alpha_u needed by one Newton iterate.
struct State {
    GridField log_det;
    MatrixField coeff;  // B = (tr(alpha^{-1}) I - alpha^{-1})/(n-1)
    double min_alpha_eig = 0.0;
    double min_ellipticity = 0.0;
    bool positive = false;
};

class Workspace {
public:
    explicit Workspace(const TorusProblem& problem)
        : problem_(problem), ops_(problem.shape()), n_(problem.n()), points_(problem.f().size()) {}

    SpectralOps& ops() { return ops_; }

    MatrixField alpha(const GridField& u) {
        MatrixField a = ops_.complex_hessian(u);
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_, n_);
        for (std::size_t i = 0; i < points_; ++i) {
            auto h = a.at(i);
            const double tr = h.trace();
            h = problem_.gamma().at(i) + (tr * I - h) / (n_ - 1.0);
        }
        return a;
    }

    State evaluate(const GridField& u) {
        State s;
        MatrixField a = alpha(u);
        s.log_det = GridField(problem_.shape());
        s.coeff = MatrixField(problem_.shape(), n_);
        s.min_alpha_eig = std::numeric_limits<double>::infinity();
        s.min_ellipticity = std::numeric_limits<double>::infinity();
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_, n_);
        Eigen::LLT<Eigen::MatrixXd> llt(n_);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n_);
        for (std::size_t i = 0; i < points_; ++i) {
            const auto ai = a.at(i);
            es.compute(ai, Eigen::EigenvaluesOnly);
            const Eigen::VectorXd mu = es.eigenvalues();
            s.min_alpha_eig = std::min(s.min_alpha_eig, mu(0));
            llt.compute(ai);
            if (mu(0) <= 0.0 || llt.info() != Eigen::Success) {
                s.positive = false;
                return s;
            }
            s.log_det[i] = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
            const Eigen::MatrixXd inv = llt.solve(I);
            s.coeff.at(i) = (inv.trace() * I - inv) / (n_ - 1.0);
            // Eigenvalues of B are (sum_j 1/mu_j - 1/mu_i)/(n-1); the smallest drops 1/mu_min.
            const double inv_sum = mu.cwiseInverse().sum();
            s.min_ellipticity = std::min(s.min_ellipticity, (inv_sum - 1.0 / mu(0)) / (n_ - 1.0));
        }
        s.positive = true;
        return s;
    }

    GridField apply_linearization(const MatrixField& coeff, const GridField& v) {
        const auto v_hat = ops_.forward(v);
        GridField out(problem_.shape());
        for (int i = 0; i < n_; ++i) {
            for (int j = i; j < n_; ++j) {
                const GridField d = ops_.second_derivative(v_hat, i, j);
                const double w = (i == j ? 0.25 : 0.5);
                for (std::size_t p = 0; p < points_; ++p) out[p] += w * coeff.at(p)(i, j) * d[p];
            }
        }
        return out;
    }

    // Newton step for (u, log c): L delta - s = -r, mean(delta) = 0.
    std::optional<GridField> newton_step(const State& state, const GridField& r, int& krylov_iterations) {
        const auto N = static_cast<Eigen::Index>(points_);
        const double inv_points = 1.0 / static_cast<double>(points_);

        Eigen::MatrixXd mean_coeff = Eigen::MatrixXd::Zero(n_, n_);
        for (std::size_t p = 0; p < points_; ++p) mean_coeff += state.coeff.at(p);
        mean_coeff *= inv_points;
        std::vector<double> symbol(ops_.spectrum_size(), 0.0);
        for (std::size_t m = 0; m < symbol.size(); ++m) {
            double q = 0.0;
            for (int i = 0; i < n_; ++i) {
                for (int j = 0; j < n_; ++j) {
                    if (i != j && (ops_.nyquist(m, i) || ops_.nyquist(m, j))) continue;
                    q += mean_coeff(i, j) * ops_.wavenumber(m, i) * ops_.wavenumber(m, j);
                }
            }
            symbol[m] = -0.25 * q;
        }

        GridField scratch(problem_.shape());
        const auto to_field = [&](const Eigen::VectorXd& x) {
            std::copy(x.data(), x.data() + N, scratch.data().begin());
            return scratch;
        };

        const LinearMap apply = [&](const Eigen::VectorXd& x) {
            const GridField lx = apply_linearization(state.coeff, to_field(x));
            Eigen::VectorXd y(N + 1);
            for (Eigen::Index p = 0; p < N; ++p) y(p) = lx[static_cast<std::size_t>(p)] - x(N);
            y(N) = x.head(N).mean();
            return y;
        };
        const LinearMap precondition = [&](const Eigen::VectorXd& y) {
            auto r_hat = ops_.forward(to_field(y));
            Eigen::VectorXd x(N + 1);
            x(N) = -r_hat[0].real() * inv_points;
            r_hat[0] = y(N) * static_cast<double>(points_);
            for (std::size_t m = 1; m < r_hat.size(); ++m) r_hat[m] /= symbol[m];
            const GridField d = ops_.inverse(r_hat);
            std::copy(d.data().begin(), d.data().end(), x.data());
            return x;
        };

        Eigen::VectorXd b(N + 1);
        for (Eigen::Index p = 0; p < N; ++p) b(p) = -r[static_cast<std::size_t>(p)];
        b(N) = 0.0;
        const auto& opt = problem_.options();
        const GmresResult g = gmres(apply, precondition, b, opt.krylov_tolerance, opt.krylov_max_iterations);
        krylov_iterations = g.iterations;
        if (!std::isfinite(g.x.norm())) return std::nullopt;
        return to_field(g.x);
    }

private:
    const TorusProblem& problem_;
    SpectralOps ops_;
    int n_;
    std::size_t points_;
};

double l2_norm(const GridField& r) {
    double s = 0.0;
    for (double v : r.data()) s += v * v;
    return std::sqrt(s / static_cast<double>(r.size()));
}

struct Stage {
    GridField u;
    double log_c = 0.0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::string message;
};

// Newton iteration for log det alpha_u - log c = log_f from u0.
Stage run_newton(Workspace& ws, const TorusProblem& problem, const GridField& log_f, GridField u0,
                 SolveResult& record) {
    const auto& opt = problem.options();
    Stage st;
    st.u = std::move(u0);
    State state = ws.evaluate(st.u);
    if (!state.positive || state.min_alpha_eig < problem.epsilon()) {
        st.status = SolveStatus::ConeExit;
        st.message = "initial iterate is outside the positivity floor";
        return st;
    }

    const auto centred_residual = [&](const State& s, double& log_c) {
        GridField r = s.log_det - log_f;
        log_c = r.mean();
        r += -log_c;
        return r;
    };

    GridField r = centred_residual(state, st.log_c);
    for (int it = 0;; ++it) {
        const double sup = r.sup_norm();
        record.residual_history.push_back(sup);
        record.ellipticity_history.push_back(state.min_ellipticity);
        if (!(state.min_ellipticity > 0.0)) {
            throw PositivityError(kModule, "newton_solve", "linearization lost ellipticity");
        }
        if (sup <= opt.tolerance) {
            st.status = SolveStatus::Converged;
            return st;
        }
        if (it >= opt.max_iterations) {
            st.status = SolveStatus::MaxIterations;
            st.message = "no convergence within " + std::to_string(opt.max_iterations) + " Newton iterations";
            return st;
        }

        int kit = 0;
        const auto delta = ws.newton_step(state, r, kit);
        record.krylov_iterations.push_back(kit);
        ++record.iterations;
        if (!delta) {
            st.status = SolveStatus::MaxIterations;
            st.message = "Krylov solve produced a non-finite step";
            return st;
        }

        const double norm0 = l2_norm(r);
        bool hit_floor = false;
        bool accepted = false;
        for (double t = 1.0; t >= opt.damping_floor; t *= 0.5) {
            GridField trial = st.u + t * *delta;
            State ts = ws.evaluate(trial);
            if (!ts.positive || ts.min_alpha_eig < problem.epsilon()) {
                hit_floor = true;
                continue;
            }
            double trial_log_c = 0.0;
            GridField tr = centred_residual(ts, trial_log_c);
            if (l2_norm(tr) <= (1.0 - 1e-4 * t) * norm0) {
                st.u = std::move(trial);
                st.log_c = trial_log_c;
                state = std::move(ts);
                r = std::move(tr);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            st.status = hit_floor ? SolveStatus::ConeExit : SolveStatus::MaxIterations;
            st.message = hit_floor ? "line search could not keep alpha_u above the positivity floor"
                                   : "line search found no residual decrease";
            return st;
        }
    }
}

GridField log_of(const GridField& f) {
    GridField out = f;
    for (double& v : out.data()) v = std::log(v);
    return out;
}

}  // namespace

TorusProblem::TorusProblem(int n, MatrixField gamma, GridField f, SolverOptions options)
    : n_(n), gamma_(std::move(gamma)), f_(std::move(f)), options_(options) {
    if (n_ < 3) throw DomainError(kModule, "TorusProblem", "n must be >= 3, got " + std::to_string(n_));
    validate_shape(f_.shape());
    if (f_.n_dim() != n_) {
        throw DomainError(kModule, "TorusProblem", "grid must have n = " + std::to_string(n_) + " axes");
    }
    if (gamma_.n() != n_ || gamma_.shape() != f_.shape()) {
        throw DomainError(kModule, "TorusProblem", "gamma must be an n x n field on the density grid");
    }
    for (double v : f_.data()) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(kModule, "TorusProblem", "density must be positive and finite");
        }
    }
    min_gamma_eig_ = gamma_.min_eigenvalue();
    if (!(min_gamma_eig_ > 0.0)) {
        throw DomainError(kModule, "TorusProblem", "gamma must be positive definite at every node");
    }
    if (!(options_.tolerance > 0.0) || options_.max_iterations < 0 || !(options_.damping_floor > 0.0) ||
        options_.epsilon < 0.0 || !(options_.krylov_tolerance > 0.0) || options_.krylov_max_iterations < 1 ||
        options_.continuation_steps < 1) {
        throw DomainError(kModule, "TorusProblem", "invalid solver options");
    }
    epsilon_ = options_.epsilon > 0.0 ? options_.epsilon : 1e-6 * min_gamma_eig_;
}

TorusProblem TorusProblem::with_density(GridField f) const {
    return TorusProblem(n_, gamma_, std::move(f), options_);
}

const char* to_string(SolveStatus s) noexcept {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::ConeExit: return "cone-exit";
        case SolveStatus::MaxIterations: return "max-iterations";
    }
    return "max-iterations";
}

MatrixField alpha_field(const TorusProblem& problem, const GridField& u) {
    if (u.shape() != problem.shape()) throw DomainError(kModule, "alpha_field", "grid mismatch");
    Workspace ws(problem);
    return ws.alpha(u);
}

GridField residual(const TorusProblem& problem, const GridField& u, double log_c) {
    if (u.shape() != problem.shape()) throw DomainError(kModule, "residual", "grid mismatch");
    Workspace ws(problem);
    const State s = ws.evaluate(u);
    if (!s.positive) throw PositivityError(kModule, "residual", "alpha_u is not positive definite");
    GridField r = s.log_det - log_of(problem.f());
    r += -log_c;
    return r;
}

GridField linearized_apply(const TorusProblem& problem, const GridField& u, const GridField& v) {
    if (u.shape() != problem.shape() || v.shape() != problem.shape()) {
        throw DomainError(kModule, "linearized_apply", "grid mismatch");
    }
    Workspace ws(problem);
    const State s = ws.evaluate(u);
    if (!s.positive) throw PositivityError(kModule, "linearized_apply", "alpha_u is not positive definite");
    return ws.apply_linearization(s.coeff, v);
}

SolveResult newton_solve(const TorusProblem& problem) {
    Workspace ws(problem);
    const GridField log_f = log_of(problem.f());
    SolveResult result;

    Stage st = run_newton(ws, problem, log_f, GridField(problem.shape()), result);
    if (st.status == SolveStatus::ConeExit) {
        // Homotopy from the density det(Gamma), whose solution is u = 0.
        GridField log_det_gamma(problem.shape());
        for (std::size_t i = 0; i < log_det_gamma.size(); ++i) {
            log_det_gamma[i] = std::log(problem.gamma().at(i).determinant());
        }
        const int steps = problem.options().continuation_steps;
        GridField u(problem.shape());
        for (int k = 1; k <= steps; ++k) {
            const double s = static_cast<double>(k) / steps;
            GridField log_fs = s * log_f + (1.0 - s) * log_det_gamma;
            st = run_newton(ws, problem, log_fs, u, result);
            result.continuation_steps = k;
            if (st.status != SolveStatus::Converged) {
                st.message = "continuation step " + std::to_string(k) + ": " + st.message;
                break;
            }
            u = st.u;
        }
    }

    result.u = std::move(st.u);
    result.u += -result.u.max();
    result.c = std::exp(st.log_c);
    result.status = st.status;
    result.converged = st.status == SolveStatus::Converged;
    result.message = st.message;
    return diagnostics(problem, std::move(result));
}

SolveResult diagnostics(const TorusProblem& problem, SolveResult result) {
    const GridField& u = result.u;
    if (u.shape() != problem.shape()) throw DomainError(kModule, "diagnostics", "grid mismatch");
    Workspace ws(problem);
    const int n = problem.n();

    std::vector<GridField> grad;
    for (int a = 0; a < n; ++a) grad.push_back(ws.ops().derivative(u, a));
    double grad_sup = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double s = 0.0;
        for (const auto& g : grad) s += g[i] * g[i];
        grad_sup = std::max(grad_sup, std::sqrt(s));
    }
    result.grad_sup = 0.5 * grad_sup;

    const MatrixField h = ws.ops().complex_hessian(u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n);
    double hess_sup = 0.0;
    for (std::size_t i = 0; i < h.points(); ++i) {
        es.compute(h.at(i), Eigen::EigenvaluesOnly);
        hess_sup = std::max(hess_sup, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    result.hess_sup = hess_sup;
    result.osc = u.max() - u.min();
    result.min_alpha_eig = ws.alpha(u).min_eigenvalue();
    return result;
}

}  // namespace n1ma::torus
