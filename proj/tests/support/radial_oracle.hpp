#pragma once

// Stress profiles and a finite-difference complex Hessian of z -> chi(G(|z|)),
// shared by the radial unit tests and the acceptance suite.

#include "n1ma/radial_lab.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace n1ma::oracle {

inline std::vector<radial::RadialProfile> stress_profiles() {
    using radial::RadialProfile;
    static constexpr double pts[] = {-5.0, -1.0, -0.2};
    std::vector<RadialProfile> out;
    const auto add = [&](const char* name, auto f, auto f1, auto f2) { out.emplace_back(name, f, f1, f2, pts); };
    add("t", [](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; });
    add("-t", [](double t) { return -t; }, [](double) { return -1.0; }, [](double) { return 0.0; });
    add("t^2", [](double t) { return t * t; }, [](double t) { return 2 * t; }, [](double) { return 2.0; });
    add("-t^2", [](double t) { return -t * t; }, [](double t) { return -2 * t; }, [](double) { return -2.0; });
    add("exp(t)", [](double t) { return std::exp(t); }, [](double t) { return std::exp(t); },
        [](double t) { return std::exp(t); });
    add("-exp(t)", [](double t) { return -std::exp(t); }, [](double t) { return -std::exp(t); },
        [](double t) { return -std::exp(t); });
    add("exp(2t)", [](double t) { return std::exp(2 * t); }, [](double t) { return 2 * std::exp(2 * t); },
        [](double t) { return 4 * std::exp(2 * t); });
    add("-log(-t)", [](double t) { return -std::log(-t); }, [](double t) { return -1.0 / t; },
        [](double t) { return 1.0 / (t * t); });
    add("log(-t)", [](double t) { return std::log(-t); }, [](double t) { return 1.0 / t; },
        [](double t) { return -1.0 / (t * t); });
    add("-sqrt(-t)", [](double t) { return -std::sqrt(-t); }, [](double t) { return 0.5 / std::sqrt(-t); },
        [](double t) { return 0.25 * std::pow(-t, -1.5); });
    add("sqrt(-t)", [](double t) { return std::sqrt(-t); }, [](double t) { return -0.5 / std::sqrt(-t); },
        [](double t) { return -0.25 * std::pow(-t, -1.5); });
    add("-(-t)^1.5", [](double t) { return -std::pow(-t, 1.5); }, [](double t) { return 1.5 * std::sqrt(-t); },
        [](double t) { return -0.75 / std::sqrt(-t); });
    add("-1/t", [](double t) { return -1.0 / t; }, [](double t) { return 1.0 / (t * t); },
        [](double t) { return -2.0 / (t * t * t); });
    add("t^3", [](double t) { return t * t * t; }, [](double t) { return 3 * t * t; },
        [](double t) { return 6 * t; });
    add("log(1+exp(t))", [](double t) { return std::log1p(std::exp(t)); },
        [](double t) { return 1.0 / (1.0 + std::exp(-t)); },
        [](double t) {
            const double s = 1.0 / (1.0 + std::exp(-t));
            return s * (1.0 - s);
        });
    add("sin(t)", [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
        [](double t) { return -std::sin(t); });
    add("t+sin(t)/2", [](double t) { return t + 0.5 * std::sin(t); }, [](double t) { return 1 + 0.5 * std::cos(t); },
        [](double t) { return -0.5 * std::sin(t); });
    add("atan(t)", [](double t) { return std::atan(t); }, [](double t) { return 1.0 / (1 + t * t); },
        [](double t) { return -2 * t / ((1 + t * t) * (1 + t * t)); });
    add("-log(1-t)", [](double t) { return -std::log(1 - t); }, [](double t) { return 1.0 / (1 - t); },
        [](double t) { return 1.0 / ((1 - t) * (1 - t)); });
    add("t*exp(t)", [](double t) { return t * std::exp(t); }, [](double t) { return (1 + t) * std::exp(t); },
        [](double t) { return (2 + t) * std::exp(t); });
    return out;
}

/// Random positive combination of exp(b t) and -log(1 - t): increasing and convex on t < 0.
inline radial::RadialProfile random_convex_increasing(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(0.2, 2.0);
    const double a1 = coef(rng), b1 = coef(rng), a2 = coef(rng), b2 = coef(rng), a3 = coef(rng);
    static constexpr double pts[] = {-5.0, -1.0, -0.2};
    return radial::RadialProfile(
        "random convex increasing",
        [=](double t) { return a1 * std::exp(b1 * t) + a2 * std::exp(b2 * t) - a3 * std::log(1 - t); },
        [=](double t) { return a1 * b1 * std::exp(b1 * t) + a2 * b2 * std::exp(b2 * t) + a3 / (1 - t); },
        [=](double t) {
            return a1 * b1 * b1 * std::exp(b1 * t) + a2 * b2 * b2 * std::exp(b2 * t) + a3 / ((1 - t) * (1 - t));
        },
        pts);
}

/// Complex Hessian u_{j kbar} of u(z) = chi(G(|z|)) at z, from 5-point
/// second differences along coordinate directions and their sums/differences.
inline Eigen::MatrixXcd fd_complex_hessian(const radial::RadialProfile& profile, const Eigen::VectorXcd& z, int n,
                                           double h) {
    const int m = 2 * n;
    Eigen::VectorXd x(m);
    for (int j = 0; j < n; ++j) {
        x(2 * j) = z(j).real();
        x(2 * j + 1) = z(j).imag();
    }
    const auto u = [&](const Eigen::VectorXd& p) { return profile.value(radial::g_profile(p.norm(), n)); };
    const auto d2 = [&](const Eigen::VectorXd& dir) {
        return (-u(x + 2 * h * dir) + 16 * u(x + h * dir) - 30 * u(x) + 16 * u(x - h * dir) - u(x - 2 * h * dir)) /
               (12 * h * h);
    };
    Eigen::MatrixXd R(m, m);
    for (int a = 0; a < m; ++a) {
        const Eigen::VectorXd ea = Eigen::VectorXd::Unit(m, a);
        R(a, a) = d2(ea);
        for (int b = 0; b < a; ++b) {
            const Eigen::VectorXd eb = Eigen::VectorXd::Unit(m, b);
            R(a, b) = R(b, a) = (d2(ea + eb) - d2(ea - eb)) / 4.0;
        }
    }
    Eigen::MatrixXcd H(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
            H(j, k) = 0.25 * std::complex<double>(R(xj, xk) + R(yj, yk), R(xj, yk) - R(yj, xk));
        }
    }
    return H;
}

/// Sorted hat eigenvalues of a Hermitian matrix.
inline std::vector<double> sorted_hat(const Eigen::MatrixXcd& H) {
    const Eigen::MatrixXcd sym = 0.5 * (H + H.adjoint());
    const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
    std::vector<double> hat(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) hat[i] = lam.sum() - lam(i);
    std::sort(hat.begin(), hat.end());
    return hat;
}

/// Random point of norm r with all coordinates nonzero.
inline Eigen::VectorXcd off_axis_point(std::mt19937_64& rng, int n, double r) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd z(n);
    for (int j = 0; j < n; ++j) z(j) = {g(rng) + 0.3, g(rng) - 0.3};
    return r * z / z.norm();
}

struct OracleComparison {
    double hat_error = 0.0;  // max |closed - fd| / max |closed| over the hat spectrum
    double ma_error = 0.0;   // |closed - fd| / max |closed hat|^n
    std::vector<double> fd_hat;
};

/// Best agreement over a sweep of step sizes.
inline OracleComparison compare_with_fd(const radial::RadialProfile& profile, const Eigen::VectorXcd& z, int n) {
    const double r = z.norm();
    const auto closed = radial::radial_hat_eigenvalues(profile, r, n);
    std::vector<double> expected(n, closed.tangential);
    expected[0] = closed.radial;
    std::sort(expected.begin(), expected.end());
    const double closed_ma = radial::radial_ma_hat(profile, r, n);
    double scale = 0.0;
    for (double e : expected) scale = std::max(scale, std::abs(e));
    scale = std::max(scale, 1e-300);

    OracleComparison best{INFINITY, INFINITY, {}};
    for (double rel_h : {1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4}) {
        const auto hat = sorted_hat(fd_complex_hessian(profile, z, n, rel_h * r));
        double err = 0.0;
        double prod = 1.0;
        for (int i = 0; i < n; ++i) {
            err = std::max(err, std::abs(hat[i] - expected[i]) / scale);
            prod *= hat[i];
        }
        const double ma_err = std::abs(prod - closed_ma) / std::pow(scale, n);
        if (err < best.hat_error) best = {err, ma_err, hat};
    }
    return best;
}

}  // namespace n1ma::oracle
