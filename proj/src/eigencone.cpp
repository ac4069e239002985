#include "n1ma/eigencone.hpp"

#include "n1ma/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace n1ma::eigencone {

namespace {

constexpr const char* kModule = "eigencone";

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 3) {
        throw DomainError(kModule, "Spectrum", "n must be >= 3, got " + std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError(kModule, "Spectrum", "non-finite eigenvalue");
    }
}

Spectrum hat_transform(const Spectrum& lambda) {
    const auto v = lambda.values();
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    std::vector<double> hat(v.size());
    std::transform(v.begin(), v.end(), hat.begin(), [total](double x) { return total - x; });
    return Spectrum(std::move(hat));
}

double sigma_k(const Spectrum& lambda, int k) {
    const int n = lambda.n();
    if (k < 1 || k > n) {
        throw DomainError(kModule, "sigma_k",
                          "k = " + std::to_string(k) + " outside 1.." + std::to_string(n));
    }
    // e[j] after processing i values holds e_j(lambda_1..lambda_i).
    std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    for (double x : lambda.values()) {
        for (int j = k; j >= 1; --j) e[j] += x * e[j - 1];
    }
    return e[static_cast<std::size_t>(k)];
}

bool cone_membership(const Spectrum& lambda, const Cone& cone, double tolerance) {
    return std::visit(
        overloaded{
            [&](const cone::Psh&) { return min_of(lambda.values()) >= -tolerance; },
            [&](const cone::Sh& sh) {
                if (sh.m < 1 || sh.m > lambda.n()) {
                    throw DomainError(kModule, "cone_membership",
                                      "SH_m requires 1 <= m <= n, got m = " + std::to_string(sh.m));
                }
                for (int k = 1; k <= sh.m; ++k) {
                    if (sigma_k(lambda, k) < -tolerance) return false;
                }
                return true;
            },
            [&](const cone::PshN1&) { return min_of(hat_transform(lambda).values()) >= -tolerance; },
            [&](const cone::QuasiPshN1& q) {
                const auto& gamma = q.params.gamma;
                if (static_cast<int>(gamma.size()) != lambda.n()) {
                    throw DomainError(kModule, "cone_membership", "gamma has wrong length");
                }
                if (std::any_of(gamma.begin(), gamma.end(), [](double g) { return !(g > 0.0); })) {
                    throw DomainError(kModule, "cone_membership", "gamma entries must be positive");
                }
                const auto hat = hat_transform(lambda);
                const double shift = lambda.n() - 1;
                for (int i = 0; i < lambda.n(); ++i) {
                    if (hat[i] < -shift * gamma[i] - tolerance) return false;
                }
                return true;
            },
        },
        cone);
}

double ma_hat(const Spectrum& lambda) {
    const Spectrum hat = hat_transform(lambda);
    return std::accumulate(hat.values().begin(), hat.values().end(), 1.0, std::multiplies<>());
}

Eigen::VectorXd alpha_relative_eigenvalues(const HermitianPoint& point) {
    const int n = point.n();
    if (n < 3 || point.beta.rows() != n || point.beta.cols() != n || point.hess.rows() != n ||
        point.hess.cols() != n || point.omega.cols() != n) {
        throw DomainError(kModule, "ma_n1", "beta, omega, hess must be n x n with n >= 3");
    }
    const Eigen::LLT<Eigen::MatrixXcd> llt(point.omega);
    if (llt.info() != Eigen::Success) {
        throw DomainError(kModule, "ma_n1", "omega is not positive definite");
    }
    const Eigen::MatrixXcd L = llt.matrixL();
    const auto reduce = [&](const Eigen::MatrixXcd& m) -> Eigen::MatrixXcd {
        const Eigen::MatrixXcd x = L.triangularView<Eigen::Lower>().solve(m);
        return L.triangularView<Eigen::Lower>().solve(x.adjoint()).adjoint();
    };
    // In the omega-orthonormal frame omega becomes the identity.
    const Eigen::MatrixXcd h = reduce(point.hess);
    const Eigen::MatrixXcd b = reduce(point.beta);
    const double laplacian = h.trace().real();
    Eigen::MatrixXcd alpha = b + (laplacian * Eigen::MatrixXcd::Identity(n, n) - h) / (n - 1.0);
    alpha = 0.5 * (alpha + alpha.adjoint()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(alpha, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double ma_n1(const HermitianPoint& point) {
    return alpha_relative_eigenvalues(point).prod();
}

double amgm_trace_gap(const HermitianPoint& point) {
    const Eigen::VectorXd mu = alpha_relative_eigenvalues(point);
    const double scale = std::max(1.0, mu.cwiseAbs().maxCoeff());
    if (mu.minCoeff() < -1e-12 * scale) {
        throw DomainError(kModule, "amgm_trace_gap", "alpha_u is not positive semidefinite");
    }
    const int n = point.n();
    const Eigen::LLT<Eigen::MatrixXcd> llt(point.omega);
    // tr_omega(beta + hess) = trace(omega^{-1} (beta + hess)).
    const double trace = llt.solve(point.beta + point.hess).trace().real();
    const double det = std::max(0.0, mu.prod());
    return trace - n * std::pow(det, 1.0 / n);
}

double psh_product_gap(const Spectrum& lambda) {
    const int n = lambda.n();
    for (double l : lambda.values()) {
        if (1.0 + l < 0.0) {
            throw DomainError(kModule, "psh_product_gap", "requires 1 + lambda_i >= 0");
        }
    }
    const auto hat = hat_transform(lambda);
    double lhs = 1.0;
    double rhs = 1.0;
    for (int i = 0; i < n; ++i) {
        lhs *= 1.0 + hat[i] / (n - 1.0);
        rhs *= 1.0 + lambda[i];
    }
    return lhs - rhs;
}

DominationVerdict domination_witness(const GridField& u, const GridField& v, double c,
                                     const GridField& ma_u, const GridField& ma_v, double tolerance) {
    if (!u.same_grid(v) || !u.same_grid(ma_u) || !u.same_grid(ma_v)) {
        throw DomainError(kModule, "domination_witness", "fields are not on the same grid");
    }
    if (!(c >= 0.0 && c < 1.0)) {
        throw DomainError(kModule, "domination_witness", "c must lie in [0, 1)");
    }
    bool any = false;
    bool hypothesis = true;
    std::size_t worst = 0;
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double gap = u[i] - v[i];
        if (gap >= -tolerance) continue;
        any = true;
        if (ma_u[i] > c * ma_v[i] + tolerance) hypothesis = false;
        if (gap < worst_gap) {
            worst_gap = gap;
            worst = i;
        }
    }
    if (!any) return {DominationVerdict::Kind::HypothesisVoid, std::nullopt};
    if (!hypothesis) return {DominationVerdict::Kind::Consistent, std::nullopt};
    return {DominationVerdict::Kind::Counterexample, worst};
}

}  // namespace n1ma::eigencone
