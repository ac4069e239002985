#include "n1ma/eigencone.hpp"
#include "n1ma/error.hpp"
#include "n1ma/krylov.hpp"
#include "n1ma/spectral.hpp"
#include "n1ma/torus_solver.hpp"
#include "support/torus_cases.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace n1ma;
using namespace n1ma::torus;

namespace {

const std::vector<int> kShape{16, 16, 16};

MatrixField identity_gamma(const std::vector<int>& shape, int n = 3) {
    return MatrixField::constant(shape, Eigen::MatrixXd::Identity(n, n));
}

TorusProblem flat_problem(const std::vector<int>& shape, double f = 1.0) {
    return TorusProblem(3, identity_gamma(shape), GridField(shape, f));
}

double max_abs_diff(const GridField& a, const GridField& b) { return (a - b).sup_norm(); }

// Random trigonometric polynomial with wavenumbers |k_i| <= 3.
GridField random_band_limited(const std::vector<int>& shape, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> k(-3, 3);
    struct Mode {
        int k[3];
        double a, b;
    };
    std::vector<Mode> modes(8);
    for (auto& m : modes) m = {{k(rng), k(rng), k(rng)}, g(rng), g(rng)};
    return GridField::sample(shape, [&](std::span<const double> x) {
        double s = 0.0;
        for (const auto& m : modes) {
            const double ph = m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2];
            s += m.a * std::cos(ph) + m.b * std::sin(ph);
        }
        return s;
    });
}

// Periodic 4th-order centered second difference along axes i, j.
GridField fd_second(const GridField& u, int i, int j) {
    const auto& shape = u.shape();
    const int N = shape[0];
    const double h = 2.0 * std::numbers::pi / N;
    const auto at = [&](int a, int b, int c) {
        const auto w = [N](int v) { return ((v % N) + N) % N; };
        return u[(static_cast<std::size_t>(w(a)) * N + w(b)) * N + w(c)];
    };
    const auto d1 = [&](int axis, int a, int b, int c) {
        int e[3] = {0, 0, 0};
        e[axis] = 1;
        const auto s = [&](int m) { return at(a + m * e[0], b + m * e[1], c + m * e[2]); };
        return (-s(2) + 8 * s(1) - 8 * s(-1) + s(-2)) / (12 * h);
    };
    GridField out(shape);
    for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; ++b) {
            for (int c = 0; c < N; ++c) {
                double v;
                if (i == j) {
                    int e[3] = {0, 0, 0};
                    e[i] = 1;
                    const auto s = [&](int m) { return at(a + m * e[0], b + m * e[1], c + m * e[2]); };
                    v = (-s(2) + 16 * s(1) - 30 * s(0) + 16 * s(-1) - s(-2)) / (12 * h * h);
                } else {
                    int e[3] = {0, 0, 0};
                    e[j] = 1;
                    const auto s = [&](int m) { return d1(i, a + m * e[0], b + m * e[1], c + m * e[2]); };
                    v = (-s(2) + 8 * s(1) - 8 * s(-1) + s(-2)) / (12 * h);
                }
                out[(static_cast<std::size_t>(a) * N + b) * N + c] = v;
            }
        }
    }
    return out;
}

}  // namespace

TEST(ComplexHessian, SingleMode) {
    const GridField u = GridField::sample(kShape, [](std::span<const double> x) { return std::cos(x[0]); });
    const MatrixField h = complex_hessian(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = u.coordinates(i);
        Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
        expect(0, 0) = -0.25 * std::cos(x[0]);
        ASSERT_LE((h.at(i) - expect).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(ComplexHessian, ProductMode) {
    const GridField u =
        GridField::sample(kShape, [](std::span<const double> x) { return std::cos(x[0]) * std::cos(x[1]); });
    const MatrixField h = complex_hessian(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = u.coordinates(i);
        Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
        expect(0, 0) = expect(1, 1) = -0.25 * std::cos(x[0]) * std::cos(x[1]);
        expect(0, 1) = expect(1, 0) = 0.25 * std::sin(x[0]) * std::sin(x[1]);
        ASSERT_LE((h.at(i) - expect).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(ComplexHessian, MatchesFourthOrderDifferences) {
    std::mt19937_64 rng(3);
    double prev_err = 0.0;
    for (int N : {16, 32}) {
        const std::vector<int> shape{N, N, N};
        std::mt19937_64 local = rng;
        const GridField u = random_band_limited(shape, local);
        const MatrixField h = complex_hessian(u);
        double err = 0.0;
        double scale = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                GridField fd = fd_second(u, i, j);
                fd *= 0.25;
                err = std::max(err, max_abs_diff(fd, h.component(i, j)));
                scale = std::max(scale, h.component(i, j).sup_norm());
            }
        }
        if (N == 32) {
            // Fourth order: halving h divides the error by about 16.
            EXPECT_GT(prev_err / err, 12.0);
            EXPECT_LT(err, 5e-3 * scale);
        }
        prev_err = err;
    }
}

TEST(AlphaField, Examples) {
    const TorusProblem p = flat_problem(kShape);
    const MatrixField a0 = alpha_field(p, GridField(kShape));
    for (std::size_t i = 0; i < a0.points(); ++i) ASSERT_EQ(a0.at(i), Eigen::MatrixXd::Identity(3, 3));

    // H = diag(-1, 1, 1) at the origin.
    const GridField u = GridField::sample(
        kShape, [](std::span<const double> x) { return 4 * std::cos(x[0]) - 4 * std::cos(x[1]) - 4 * std::cos(x[2]); });
    const MatrixField a = alpha_field(p, u);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a.at(0)).eigenvalues();
    EXPECT_NEAR(ev(0), 1.0, 1e-13);
    EXPECT_NEAR(ev(1), 1.0, 1e-13);
    EXPECT_NEAR(ev(2), 2.0, 1e-13);

    const MatrixField hess = complex_hessian(u);
    eigencone::HermitianPoint pt{Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Identity(3, 3),
                                 hess.at(0).cast<std::complex<double>>()};
    EXPECT_NEAR(eigencone::ma_n1(pt), a.at(0).determinant(), 1e-12);
}

TEST(AlphaField, AffineInU) {
    std::mt19937_64 rng(8);
    const TorusProblem p = flat_problem(kShape);
    const GridField u = random_band_limited(kShape, rng);
    const GridField v = random_band_limited(kShape, rng);
    const MatrixField auv = alpha_field(p, u + v);
    const MatrixField au = alpha_field(p, u);
    const MatrixField av = alpha_field(p, v);
    const MatrixField a0 = alpha_field(p, GridField(kShape));
    for (std::size_t i = 0; i < auv.points(); ++i) {
        ASSERT_LE(((auv.at(i) - au.at(i)) - (av.at(i) - a0.at(i))).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Residual, Examples) {
    EXPECT_EQ(residual(flat_problem(kShape), GridField(kShape), 0.0).sup_norm(), 0.0);
    const GridField r2 = residual(flat_problem(kShape, 2.0), GridField(kShape), 0.0);
    EXPECT_NEAR(r2.max(), -std::log(2.0), 1e-15);
    EXPECT_NEAR(r2.min(), -std::log(2.0), 1e-15);

    const TorusProblem m = oracle::manufactured_problem(16);
    EXPECT_LE(residual(m, oracle::manufactured_u(m.shape()), 0.0).sup_norm(), 1e-12);

    const GridField big = GridField::sample(kShape, [](std::span<const double> x) { return 40 * std::cos(x[0]); });
    EXPECT_THROW((void)residual(flat_problem(kShape), big, 0.0), PositivityError);
}

TEST(Residual, GaugeInvariant) {
    const TorusProblem m = oracle::manufactured_problem(16);
    const GridField u = oracle::manufactured_u(m.shape());
    GridField shifted = u;
    shifted += 3.25;
    EXPECT_LE(max_abs_diff(residual(m, u, 0.1), residual(m, shifted, 0.1)), 1e-13);
}

TEST(Linearization, FourierSymbolAndConstants) {
    const TorusProblem p = flat_problem(kShape);
    const GridField v = GridField::sample(kShape, [](std::span<const double> x) { return std::cos(x[0]); });
    const GridField lv = linearized_apply(p, GridField(kShape), v);
    // alpha = I gives B = I, so L(cos x1) = (1/4) d^2/dx1^2 cos x1.
    GridField expect = v;
    expect *= -0.25;
    EXPECT_LE(max_abs_diff(lv, expect), 1e-14);

    const TorusProblem m = oracle::manufactured_problem(16);
    EXPECT_LE(linearized_apply(m, oracle::manufactured_u(m.shape()), GridField(m.shape(), 7.0)).sup_norm(), 1e-12);
}

TEST(Linearization, MatchesFrechetDifferenceQuotient) {
    std::mt19937_64 rng(21);
    const TorusProblem m = oracle::manufactured_problem(16);
    GridField u = oracle::manufactured_u(m.shape());
    u *= 0.5;
    GridField v = random_band_limited(m.shape(), rng);
    v *= 0.1;
    const GridField lv = linearized_apply(m, u, v);
    double prev = 0.0;
    for (double h : {1e-2, 5e-3}) {
        GridField fd = residual(m, u + h * v, 0.0) - residual(m, u - (h * v), 0.0);
        fd *= 1.0 / (2 * h);
        const double err = max_abs_diff(fd, lv);
        if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.5);
        EXPECT_LT(err, 1e-3 * lv.sup_norm());
        prev = err;
    }
}

TEST(Linearization, EllipticCoefficientsAlongSolve) {
    const TorusProblem m = oracle::manufactured_problem(16);
    const SolveResult r = newton_solve(m);
    ASSERT_TRUE(r.converged);
    ASSERT_EQ(r.ellipticity_history.size(), r.residual_history.size());
    for (double e : r.ellipticity_history) EXPECT_GT(e, 0.0);
}

TEST(Gmres, SolvesNonsymmetricSystem) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    const int n = 40;
    Eigen::MatrixXd A = 4.0 * Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) A(i, j) += 0.3 * g(rng) / std::sqrt(n);
    }
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = g(rng);
    const Eigen::VectorXd d = A.diagonal();
    const auto res = gmres([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x; },
                           [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseQuotient(d); }, b,
                           1e-12, 200);
    EXPECT_TRUE(res.converged);
    EXPECT_LE((A * res.x - b).norm(), 1e-11 * b.norm());
    EXPECT_LE(res.iterations, n);
}

TEST(NewtonSolve, FlatProblemIsImmediate) {
    const SolveResult r = newton_solve(flat_problem(kShape));
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.u.sup_norm(), 0.0);
    EXPECT_DOUBLE_EQ(r.c, 1.0);
    EXPECT_EQ(r.grad_sup, 0.0);
    EXPECT_EQ(r.hess_sup, 0.0);
    EXPECT_EQ(r.osc, 0.0);
    EXPECT_DOUBLE_EQ(r.min_alpha_eig, 1.0);
}

TEST(NewtonSolve, RecoversManufacturedSolution) {
    const TorusProblem m = oracle::manufactured_problem(32);
    const SolveResult r = newton_solve(m);
    ASSERT_TRUE(r.converged) << r.message;
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_LE(r.residual_history.back(), 1e-10);
    EXPECT_LE(std::abs(r.c - 1.0), 1e-8);
    const GridField ustar = oracle::manufactured_u(m.shape());
    EXPECT_LE(oracle::gauge_distance(r.u, ustar), 1e-8);
    EXPECT_EQ(r.u.max(), 0.0);
    EXPECT_GE(oracle::tail_order(r.residual_history), 1.5);
    EXPECT_GE(r.min_alpha_eig, 0.25 - 1e-8);

    // Diagnostics against u*: grad |u*|/2 and the analytic complex Hessian.
    const double a = oracle::kManufacturedAmplitude;
    double grad = 0.0, hess = 0.0;
    for (std::size_t i = 0; i < ustar.size(); ++i) {
        const auto x = ustar.coordinates(i);
        const double g1 = -a * std::sin(x[0]);
        const double g2 = -a * std::sin(x[1]) * std::cos(x[2]);
        const double g3 = -a * std::cos(x[1]) * std::sin(x[2]);
        grad = std::max(grad, 0.5 * std::sqrt(g1 * g1 + g2 * g2 + g3 * g3));
        const Eigen::Matrix3d al = oracle::manufactured_alpha(x[0], x[1], x[2]);
        // H = tr(alpha - I) I/... recovered from alpha: alpha - I = (tr H I - H)/2.
        const Eigen::Matrix3d s = 2.0 * (al - Eigen::Matrix3d::Identity());
        const Eigen::Matrix3d h = (s.trace() / 2.0) * Eigen::Matrix3d::Identity() - s;
        hess = std::max(hess, Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(h).eigenvalues().cwiseAbs().maxCoeff());
    }
    EXPECT_NEAR(r.grad_sup, grad, 1e-6);
    EXPECT_NEAR(r.hess_sup, hess, 1e-6);
    EXPECT_NEAR(r.osc, ustar.max() - ustar.min(), 1e-6);
}

TEST(NewtonSolve, ScalingDensityRescalesConstant) {
    const TorusProblem m = oracle::manufactured_problem(16);
    GridField f2 = m.f();
    f2 *= 2.0;
    const SolveResult r1 = newton_solve(m);
    const SolveResult r2 = newton_solve(m.with_density(f2));
    ASSERT_TRUE(r1.converged && r2.converged);
    EXPECT_LE(max_abs_diff(r1.u, r2.u), 1e-8);
    // det alpha_u = c f is unchanged, so c absorbs the factor.
    EXPECT_NEAR(r2.c * 2.0, r1.c, 1e-8);
}

TEST(NewtonSolve, GridRefinementIsSpectrallyAccurate) {
    const SolveResult coarse = newton_solve(oracle::manufactured_problem(32));
    const SolveResult fine = newton_solve(oracle::manufactured_problem(64));
    ASSERT_TRUE(coarse.converged && fine.converged);
    EXPECT_LE(std::abs(coarse.c - fine.c), 1e-8);
    double d = 0.0;
    for (std::size_t i = 0; i < coarse.u.size(); ++i) {
        const auto x = coarse.u.coordinates(i);
        const std::size_t j = (static_cast<std::size_t>(std::lround(x[0] / (2 * std::numbers::pi) * 64)) * 64 +
                               std::lround(x[1] / (2 * std::numbers::pi) * 64)) * 64 +
                              std::lround(x[2] / (2 * std::numbers::pi) * 64);
        d = std::max(d, std::abs(coarse.u[i] - fine.u[j]));
    }
    EXPECT_LE(d, 1e-8);
}

TEST(NewtonSolve, NonFlatBackgroundAndDensity) {
    const std::vector<int> shape{16, 16, 16};
    MatrixField gamma(shape, 3);
    for (std::size_t i = 0; i < gamma.points(); ++i) {
        const auto x = GridField(shape).coordinates(i);
        Eigen::Matrix3d g;
        g << 2 + std::sin(x[0]), 0.3 * std::cos(x[1]), 0.0, 0.3 * std::cos(x[1]), 1.5, 0.2 * std::sin(x[2]), 0.0,
            0.2 * std::sin(x[2]), 1.0 + 0.5 * std::cos(x[0] + x[2]) * std::cos(x[0] + x[2]);
        gamma.at(i) = g;
    }
    GridField f = GridField::sample(shape, [](std::span<const double> x) {
        return std::exp(0.6 * std::cos(x[0]) * std::sin(x[1]) + 0.4 * std::cos(x[2]));
    });
    const TorusProblem p(3, std::move(gamma), std::move(f));
    const SolveResult r = newton_solve(p);
    ASSERT_TRUE(r.converged) << r.message;
    EXPECT_LE(residual(p, r.u, std::log(r.c)).sup_norm(), 1e-10);
    EXPECT_GE(r.min_alpha_eig, p.epsilon());
}

TEST(NewtonSolve, ContinuationRescuesHardDensity) {
    const std::vector<int> shape{16, 16, 16};
    GridField f = GridField::sample(shape, [](std::span<const double> x) {
        return std::exp(5.0 * std::cos(x[0]) + 3.75 * std::sin(x[1]) * std::cos(x[2]));
    });
    SolverOptions opt;
    opt.damping_floor = 0.25;
    const TorusProblem p(3, identity_gamma(shape), std::move(f), opt);
    const SolveResult r = newton_solve(p);
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_GT(r.continuation_steps, 0);
    EXPECT_LE(residual(p, r.u, std::log(r.c)).sup_norm(), 1e-10);
}

TEST(NewtonSolve, IterationBudgetIsReported) {
    SolverOptions opt;
    opt.max_iterations = 1;
    const SolveResult r = newton_solve(oracle::manufactured_problem(16, 3.0, opt));
    EXPECT_FALSE(r.converged);
    EXPECT_NE(r.status, SolveStatus::Converged);
    EXPECT_FALSE(r.residual_history.empty());
    EXPECT_EQ(r.u.max(), 0.0);
}

TEST(Diagnostics, CosineClosedForms) {
    const double a = 0.7;
    SolveResult r;
    r.u = GridField::sample(kShape, [a](std::span<const double> x) { return a * std::cos(x[0]) - a; });
    const SolveResult d = diagnostics(flat_problem(kShape), r);
    EXPECT_NEAR(d.grad_sup, a / 2, 1e-14);
    EXPECT_NEAR(d.hess_sup, a / 4, 1e-14);
    EXPECT_NEAR(d.osc, 2 * a, 1e-14);
}

TEST(TorusProblem, RejectsInvalidInput) {
    EXPECT_THROW(TorusProblem(3, identity_gamma(kShape), GridField(kShape, 0.0)), DomainError);
    EXPECT_THROW(TorusProblem(3, MatrixField::constant(kShape, -Eigen::MatrixXd::Identity(3, 3)), GridField(kShape, 1.0)),
                 DomainError);
    EXPECT_THROW(TorusProblem(4, identity_gamma(kShape, 4), GridField(kShape, 1.0)), DomainError);
    EXPECT_THROW(GridField({16, 16, 12 + 1}), DomainError);
    EXPECT_THROW(GridField({16, 16, 6}), DomainError);
    SolverOptions bad;
    bad.tolerance = 0.0;
    EXPECT_THROW(TorusProblem(3, identity_gamma(kShape), GridField(kShape, 1.0), bad), DomainError);
}
