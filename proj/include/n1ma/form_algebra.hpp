#pragma once

// Constant-coefficient (p,q)-forms on C^n.
//
// Basis: dz^I ^ dzbar^J with I, J increasing index sets, all holomorphic
// differentials first. A Hermitian matrix h corresponds to the real (1,1)-form
// (i/2) sum_{jk} h_{jk} dz^j ^ dzbar^k, so the identity gives the Euclidean
// Kahler form and omega^n / n! is the Euclidean volume form.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace n1ma::forms {

using Complex = std::complex<double>;
using IndexSet = std::uint32_t;  // bitmask, bit k <-> coordinate z_{k+1}

inline constexpr int kMaxDimension = 6;

class PQForm {
public:
    PQForm(int n, int p, int q);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int p() const noexcept { return p_; }
    [[nodiscard]] int q() const noexcept { return q_; }

    /// Coefficient of dz^I ^ dzbar^J for increasing I, J.
    [[nodiscard]] Complex coeff(IndexSet I, IndexSet J) const;
    void set(IndexSet I, IndexSet J, Complex value);
    void add(IndexSet I, IndexSet J, Complex value);

    /// Coefficient of dz^{i_1} ^ ... ^ dzbar^{j_1} ^ ... for arbitrary index
    /// sequences (0-based), applying the antisymmetry sign.
    [[nodiscard]] Complex coeff(const std::vector<int>& I, const std::vector<int>& J) const;

    [[nodiscard]] const std::vector<IndexSet>& holomorphic_sets() const noexcept { return sets_p_; }
    [[nodiscard]] const std::vector<IndexSet>& antiholomorphic_sets() const noexcept { return sets_q_; }
    [[nodiscard]] const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

    /// Complex conjugate, a (q,p)-form.
    [[nodiscard]] PQForm conjugate() const;
    [[nodiscard]] bool is_real(double tolerance) const;

    /// Largest coefficient modulus of (*this - other).
    [[nodiscard]] double max_abs_diff(const PQForm& other) const;

    PQForm& operator+=(const PQForm& other);
    PQForm& operator-=(const PQForm& other);
    PQForm& operator*=(Complex s);
    friend PQForm operator+(PQForm a, const PQForm& b) { return a += b; }
    friend PQForm operator-(PQForm a, const PQForm& b) { return a -= b; }
    friend PQForm operator*(Complex s, PQForm a) { return a *= s; }

private:
    [[nodiscard]] std::size_t slot(IndexSet I, IndexSet J) const;
    void require_same_type(const PQForm& other, const char* op) const;

    int n_;
    int p_;
    int q_;
    std::vector<IndexSet> sets_p_;
    std::vector<IndexSet> sets_q_;
    std::vector<int> rank_p_;
    std::vector<int> rank_q_;
    std::vector<Complex> coeffs_;
};

/// Increasing index sets of size k in {0..n-1}, lexicographic.
[[nodiscard]] std::vector<IndexSet> index_sets(int n, int k);

[[nodiscard]] PQForm wedge(const PQForm& a, const PQForm& b);

/// a^k (k >= 0); a^0 is the constant 1.
[[nodiscard]] PQForm power(const PQForm& a, int k);

/// (i/2) sum h_{jk} dz^j ^ dzbar^k.
[[nodiscard]] PQForm hermitian_form(const Eigen::MatrixXcd& h);

/// omega^n / n! for the metric h.
[[nodiscard]] PQForm volume_form(const Eigen::MatrixXcd& metric);

/// Pointwise Hermitian inner product induced by the metric, linear in the
/// first argument.
[[nodiscard]] Complex inner_product(const PQForm& a, const PQForm& b, const Eigen::MatrixXcd& metric);

/// Hodge star, fixed by phi ^ *conj(psi) = <phi, psi> omega^n / n!. It
/// commutes with conjugation and sends (p,q)-forms to (n-q, n-p)-forms.
[[nodiscard]] PQForm hodge_star(const PQForm& a, const Eigen::MatrixXcd& metric);

/// Max-norm difference between (1/(n-1)!) *(H ^ omega^{n-2}) and
/// ((tr H) omega - H) / (n - 1) for the Euclidean metric.
[[nodiscard]] double hat_identity_residual(const Eigen::MatrixXcd& H, int n);

/// Minimum over sampled complex hyperplanes V of Psi|_V / vol_V for a real
/// (n-1,n-1)-form Psi. Each frame is an orthonormal basis of the orthogonal
/// complement of a unit normal; the best few samples get a short
/// gradient-descent refinement over the normal. Nonnegative means weakly
/// positive up to sampling confidence.
[[nodiscard]] double weak_positivity_margin(const PQForm& psi, int samples,
                                            std::uint64_t seed = 0x5eed);

/// Psi|_V / vol_V for the hyperplane with unit normal `normal`.
[[nodiscard]] double restricted_ratio(const PQForm& psi, const Eigen::VectorXcd& normal);

struct EquivalenceReport {
    double min_hat = 0.0;              // (1): min_i lambda_hat_i
    double hyperplane_analytic = 0.0;  // (2): sum of the n-1 smallest eigenvalues
    double hyperplane_sampled = 0.0;   // (2): min sampled compressed trace
    double weak_margin = 0.0;          // (3): margin of H ^ omega^{n-2}, divided by (n-2)!
    bool eigenvalue_verdict = false;
    bool hyperplane_verdict = false;
    bool hyperplane_sampled_verdict = false;
    bool weak_positivity_verdict = false;

    /// (1), (2-analytic) and (3) agree.
    [[nodiscard]] bool agree() const noexcept {
        return eigenvalue_verdict == hyperplane_verdict &&
               hyperplane_verdict == weak_positivity_verdict;
    }
};

/// Evaluates the eigenvalue, hyperplane and weak-positivity characterizations
/// of (n-1)-plurisubharmonicity for the quadratic with complex Hessian H.
[[nodiscard]] EquivalenceReport equivalence_suite(const Eigen::MatrixXcd& H, int n, double tolerance,
                                                  int samples = 24, std::uint64_t seed = 0x5eed);

}  // namespace n1ma::forms
