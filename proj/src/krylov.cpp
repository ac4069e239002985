#include "n1ma/krylov.hpp"

#include <cmath>
#include <vector>

namespace n1ma {

GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, const Eigen::VectorXd& b, double rel_tol,
                  int max_iterations) {
    GmresResult out;
    out.x = Eigen::VectorXd::Zero(b.size());
    const double beta = b.norm();
    if (beta == 0.0) {
        out.converged = true;
        return out;
    }

    const int m = max_iterations;
    std::vector<Eigen::VectorXd> V;
    V.reserve(static_cast<std::size_t>(m) + 1);
    V.push_back(b / beta);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    g(0) = beta;

    int k = 0;
    double res = beta;
    while (k < m) {
        Eigen::VectorXd w = apply(precondition(V[k]));
        // Modified Gram-Schmidt with one reorthogonalization pass.
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j <= k; ++j) {
                const double h = V[j].dot(w);
                H(j, k) += h;
                w -= h * V[j];
            }
        }
        H(k + 1, k) = w.norm();

        for (int j = 0; j < k; ++j) {
            const double t = cs(j) * H(j, k) + sn(j) * H(j + 1, k);
            H(j + 1, k) = -sn(j) * H(j, k) + cs(j) * H(j + 1, k);
            H(j, k) = t;
        }
        const double r = std::hypot(H(k, k), H(k + 1, k));
        cs(k) = H(k, k) / r;
        sn(k) = H(k + 1, k) / r;
        const double hk1 = H(k + 1, k);
        H(k, k) = r;
        H(k + 1, k) = 0.0;
        g(k + 1) = -sn(k) * g(k);
        g(k) = cs(k) * g(k);
        res = std::abs(g(k + 1));
        ++k;
        if (res <= rel_tol * beta || hk1 == 0.0) break;
        V.push_back(w / hk1);
    }

    const Eigen::VectorXd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Eigen::VectorXd z = Eigen::VectorXd::Zero(b.size());
    for (int j = 0; j < k; ++j) z += y(j) * V[j];
    out.x = precondition(z);
    out.iterations = k;
    out.relative_residual = res / beta;
    out.converged = res <= rel_tol * beta;
    return out;
}

}  // namespace n1ma
