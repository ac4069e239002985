#pragma once

// Pointwise eigenvalue calculus for the (n-1)-plurisubharmonic cone
// hierarchy and the (n-1)-Monge-Ampere operators.

#include "n1ma/grid_field.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace n1ma::eigencone {

/// Eigenvalues of a complex Hessian at one point. Holds n >= 3 finite values.
class Spectrum {
public:
    explicit Spectrum(std::vector<double> values);
    Spectrum(std::initializer_list<double> values) : Spectrum(std::vector<double>(values)) {}

    [[nodiscard]] int n() const noexcept { return static_cast<int>(values_.size()); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    std::vector<double> values_;
};

/// Eigenvalues of beta relative to omega at a point; all strictly positive.
struct ConeParams {
    std::vector<double> gamma;
    double tolerance = 0.0;
};

namespace cone {
struct Psh {};
/// Gamma_m: e_1..e_m >= 0.
struct Sh {
    int m;
};
struct PshN1 {};
struct QuasiPshN1 {
    ConeParams params;
};
}  // namespace cone

using Cone = std::variant<cone::Psh, cone::Sh, cone::PshN1, cone::QuasiPshN1>;

/// lambda_hat_i = sum_{k != i} lambda_k.
[[nodiscard]] Spectrum hat_transform(const Spectrum& lambda);

/// Elementary symmetric polynomial e_k(lambda), 1 <= k <= n.
[[nodiscard]] double sigma_k(const Spectrum& lambda, int k);

[[nodiscard]] bool cone_membership(const Spectrum& lambda, const Cone& cone, double tolerance);

/// prod_i lambda_hat_i.
[[nodiscard]] double ma_hat(const Spectrum& lambda);

/// (beta, omega, dd^c u) at one point. beta and omega Hermitian positive
/// definite, hess Hermitian; all n x n with n >= 3.
struct HermitianPoint {
    Eigen::MatrixXcd beta;
    Eigen::MatrixXcd omega;
    Eigen::MatrixXcd hess;

    [[nodiscard]] int n() const noexcept { return static_cast<int>(omega.rows()); }
};

/// Eigenvalues of omega^{-1} alpha_u, ascending, where
/// alpha_u = beta + ((tr_omega hess) omega - hess) / (n - 1). Computed on the
/// Cholesky-congruence L^{-1} alpha_u L^{-*} with omega = L L^*.
[[nodiscard]] Eigen::VectorXd alpha_relative_eigenvalues(const HermitianPoint& point);

/// MA_{n-1}(beta, omega, u) = det(omega^{-1} alpha_u).
[[nodiscard]] double ma_n1(const HermitianPoint& point);

/// tr_omega(beta + hess) - n * ma_n1^{1/n}; nonnegative whenever alpha_u >= 0.
[[nodiscard]] double amgm_trace_gap(const HermitianPoint& point);

/// prod(1 + lambda_hat_i / (n-1)) - prod(1 + lambda_i); requires 1 + lambda_i >= 0.
[[nodiscard]] double psh_product_gap(const Spectrum& lambda);

struct DominationVerdict {
    enum class Kind { HypothesisVoid, Consistent, Counterexample };
    Kind kind = Kind::HypothesisVoid;
    /// Flat grid index where u < v - tol while the hypothesis held on all of {u < v - tol}.
    std::optional<std::size_t> index;
};

/// Checks grid data against the domination principle: if
/// ma_u <= c * ma_v on {u < v - tol} with c in [0, 1), then u >= v - tol.
/// A nonempty {u < v - tol} on which the hypothesis holds everywhere is a
/// counterexample.
[[nodiscard]] DominationVerdict domination_witness(const GridField& u, const GridField& v, double c,
                                                   const GridField& ma_u, const GridField& ma_v,
                                                   double tolerance);

}  // namespace n1ma::eigencone
