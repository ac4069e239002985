#include "n1ma/radial_lab.hpp"

#include "n1ma/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace n1ma::radial {

namespace {

constexpr const char* kModule = "radial_lab";

void check_n(int n, const char* op) {
    if (n < 3) throw DomainError(kModule, op, "n must be >= 3, got " + std::to_string(n));
}

void check_radius(double r, const char* op) {
    if (r == 0.0) throw PoleError(kModule, op, "pole at the origin");
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw DomainError(kModule, op, "radius must be positive and finite");
    }
}

bool close(double approx, double exact, double scale) {
    return std::abs(approx - exact) <= 1e-4 * (std::abs(exact) + scale) + 1e-8;
}

}  // namespace

RadialProfile::RadialProfile(std::string description, Fn chi, Fn chi1, Fn chi2,
                             std::span<const double> check_points)
    : description_(std::move(description)), chi_(std::move(chi)), chi1_(std::move(chi1)), chi2_(std::move(chi2)) {
    if (!chi_ || !chi1_ || !chi2_) throw DomainError(kModule, "RadialProfile", "missing callable");
    for (double t : check_points) {
        if (!(t < 0.0)) throw DomainError(kModule, "RadialProfile", "check points must be negative");
        const double h = 1e-3 * std::max(1.0, std::abs(t));
        const double f0 = chi_(t);
        const double fp = chi_(t + h);
        const double fm = chi_(t - h);
        const double d1 = (fp - fm) / (2.0 * h);
        const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
        const double scale = std::abs(f0) / std::max(1.0, std::abs(t));
        if (!close(d1, chi1_(t), scale)) {
            throw DomainError(kModule, "RadialProfile",
                              description_ + ": chi1 disagrees with finite differences at t = " + std::to_string(t));
        }
        if (!close(d2, chi2_(t), scale / std::max(1.0, std::abs(t)))) {
            throw DomainError(kModule, "RadialProfile",
                              description_ + ": chi2 disagrees with finite differences at t = " + std::to_string(t));
        }
    }
}

RadialProfile identity_profile() {
    static constexpr double pts[] = {-4.0, -1.0, -0.25};
    return RadialProfile(
        "t", [](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; }, pts);
}

RadialProfile logloglog_profile() {
    static constexpr double pts[] = {-20.0, -100.0, -1e4};
    return RadialProfile(
        "-log(log(log(-t)))",
        [](double t) { return -std::log(std::log(std::log(-t))); },
        [](double t) {
            const double s = -t;
            const double l1 = std::log(s);
            return 1.0 / (s * l1 * std::log(l1));
        },
        [](double t) {
            const double s = -t;
            const double l1 = std::log(s);
            const double l2 = std::log(l1);
            return (l1 * l2 + l2 + 1.0) / (s * s * l1 * l1 * l2 * l2);
        },
        pts);
}

double g_profile(double r, int n) {
    check_n(n, "g_profile");
    check_radius(r, "g_profile");
    return -std::pow(r, -2.0 * (n - 2));
}

HatEigenvalues radial_hat_eigenvalues(const RadialProfile& profile, double r, int n) {
    const double t = g_profile(r, n);
    return {(n - 1.0) * (n - 2.0) * std::pow(r, -2.0 * (n - 1)) * profile.first(t),
            (n - 2.0) * (n - 2.0) * std::pow(r, -2.0 * (2 * n - 3)) * profile.second(t)};
}

double radial_ma_hat(const RadialProfile& profile, double r, int n) {
    const double t = g_profile(r, n);
    return (n - 1.0) * std::pow(n - 2.0, 2 * n - 1) * std::pow(r, -4.0 * (n - 1) * (n - 1)) * profile.first(t) *
           std::pow(profile.second(t), n - 1);
}

bool radial_membership(const RadialProfile& profile, std::span<const double> t_samples, double tolerance) {
    return std::all_of(t_samples.begin(), t_samples.end(), [&](double t) {
        return profile.first(t) >= -tolerance && profile.second(t) >= -tolerance;
    });
}

double loglog_density(double r, int n) {
    check_n(n, "loglog_density");
    check_radius(r, "loglog_density");
    const double s = -std::log(r);
    if (!(s > std::exp(1.0))) {
        throw DomainError(kModule, "loglog_density", "requires -log r > e");
    }
    const double l1 = std::log(s);
    return std::exp(n * (2.0 * s - l1 - std::log(l1)));
}

const char* to_string(ThresholdVerdict v) noexcept {
    switch (v) {
        case ThresholdVerdict::Convergent: return "convergent";
        case ThresholdVerdict::Divergent: return "divergent";
        case ThresholdVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

ThresholdReport integral_threshold(const ShellIntegrand& spec, int refinement_levels) {
    check_n(spec.n, "integral_threshold");
    if (!(spec.p >= 0.0) || !std::isfinite(spec.p)) {
        throw DomainError(kModule, "integral_threshold", "p must be a nonnegative real");
    }
    if (!(spec.r_inner > 0.0 && spec.r_inner < spec.r_outer)) {
        throw DomainError(kModule, "integral_threshold", "radii must satisfy 0 < r_inner < r_outer");
    }
    if (!(spec.r_outer < std::exp(-1.0))) {
        throw DomainError(kModule, "integral_threshold", "r_outer must be below 1/e so that log log(1/r) > 0");
    }
    if (refinement_levels < 0) {
        throw DomainError(kModule, "integral_threshold", "refinement_levels must be >= 0");
    }

    const double k = 1.0 - spec.n + spec.p;
    const double n = spec.n;
    const auto log_integrand = [&](double L) { return k * L - n * std::log(L); };
    const auto integrand = [&](double L) { return std::exp(log_integrand(L)); };
    constexpr double kLogMax = 700.0;

    const double l_outer = std::log(-std::log(spec.r_outer));
    const double l_inner = std::log(-std::log(spec.r_inner));

    ThresholdReport report{spec, {}, ThresholdVerdict::Inconclusive};
    double partial = 0.0;
    double a = l_outer;
    double b = l_inner;
    for (int level = 0; level <= refinement_levels; ++level) {
        ThresholdLevel row;
        row.level = level;
        row.loglog_inv_r = b;
        // log_integrand is convex in L, so its maximum on [a, b] is at an endpoint.
        if (std::max(log_integrand(a), log_integrand(b)) > kLogMax || std::isinf(partial)) {
            row.overflow = true;
            row.increment = std::numeric_limits<double>::infinity();
        } else {
            double err = 0.0;
            row.increment =
                boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, 1e-12, &err);
            row.error_estimate = err;
            row.quadrature_ok = std::isfinite(row.increment) && err <= 1e-8 * std::abs(row.increment) + 1e-300;
        }
        partial += row.increment;
        row.partial = partial;
        report.levels.push_back(row);
        a = b;
        b *= 2.0;
    }

    const auto& lv = report.levels;
    if (lv.size() >= 3) {
        const double first = lv.front().increment;
        const std::size_t m = lv.size();
        const bool divergent = std::all_of(lv.end() - 3, lv.end(),
                                           [&](const ThresholdLevel& x) { return x.increment > 1e-3 * first; });
        const bool tail_decreasing = lv[m - 1].increment <= lv[m - 2].increment &&
                                     lv[m - 2].increment <= lv[m - 3].increment;
        if (divergent) {
            report.verdict = ThresholdVerdict::Divergent;
        } else if (lv.back().increment <= 1e-6 && tail_decreasing) {
            report.verdict = ThresholdVerdict::Convergent;
        }
    }
    return report;
}

}  // namespace n1ma::radial
