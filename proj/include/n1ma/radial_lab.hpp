#pragma once

// Radial (n-1)-psh functions u(z) = chi(G_{n-1}(z)) on C^n \ {0}, with
// G_{n-1}(z) = -|z|^{-2(n-2)}.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace n1ma::radial {

/// A profile chi on t < 0 with explicit first and second derivatives. The
/// derivatives are checked against centered differences of chi at the
/// construction-time check points.
class RadialProfile {
public:
    using Fn = std::function<double(double)>;

    RadialProfile(std::string description, Fn chi, Fn chi1, Fn chi2, std::span<const double> check_points);

    [[nodiscard]] double value(double t) const { return chi_(t); }
    [[nodiscard]] double first(double t) const { return chi1_(t); }
    [[nodiscard]] double second(double t) const { return chi2_(t); }
    [[nodiscard]] const std::string& description() const noexcept { return description_; }

private:
    std::string description_;
    Fn chi_;
    Fn chi1_;
    Fn chi2_;
};

/// chi(t) = t, so u = G_{n-1}.
[[nodiscard]] RadialProfile identity_profile();
/// chi(t) = -log(log(log(-t))), defined for -t > e^e.
[[nodiscard]] RadialProfile logloglog_profile();

/// G_{n-1}(r) = -r^{-2(n-2)}. Throws PoleError at r = 0.
[[nodiscard]] double g_profile(double r, int n);

struct HatEigenvalues {
    double radial;      // lambda_hat_1, multiplicity 1
    double tangential;  // lambda_hat_j, multiplicity n-1
};

/// lambda_hat_1 = (n-1)(n-2) r^{-2(n-1)} chi'(G),
/// lambda_hat_j = (n-2)^2 r^{-2(2n-3)} chi''(G).
[[nodiscard]] HatEigenvalues radial_hat_eigenvalues(const RadialProfile& profile, double r, int n);

/// (n-1)(n-2)^{2n-1} r^{-4(n-1)^2} chi'(G) chi''(G)^{n-1}.
[[nodiscard]] double radial_ma_hat(const RadialProfile& profile, double r, int n);

/// True iff chi' >= -tol and chi'' >= -tol at every sample.
[[nodiscard]] bool radial_membership(const RadialProfile& profile, std::span<const double> t_samples,
                                     double tolerance);

/// 1 / (r^{2n} (-log r)^n (log(-log r))^n), the density of the logloglog
/// example near the origin. Requires -log r > e.
[[nodiscard]] double loglog_density(double r, int n);

struct ShellIntegrand {
    double p = 0.0;
    int n = 3;
    double r_inner = 0.0;
    double r_outer = 0.0;
};

struct ThresholdLevel {
    int level = 0;
    double loglog_inv_r = 0.0;  // log log (1/r_k) of the inner cut-off
    double partial = 0.0;       // integral from r_k to r_outer
    double increment = 0.0;     // partial_k - partial_{k-1}; partial_0 for k = 0
    double error_estimate = 0.0;
    bool overflow = false;      // increment exceeds the double range
    bool quadrature_ok = true;
};

enum class ThresholdVerdict { Convergent, Divergent, Inconclusive };

[[nodiscard]] const char* to_string(ThresholdVerdict v) noexcept;

struct ThresholdReport {
    ShellIntegrand spec;
    std::vector<ThresholdLevel> levels;
    ThresholdVerdict verdict = ThresholdVerdict::Inconclusive;
};

/// Partial integrals of the asymptotic model ds / (s^{n-p} (log s)^n),
/// s = log(1/r), over inner cut-offs r_k -> 0 with log log (1/r_k) doubling
/// per level. Integrated in L = log s, where the integrand is
/// exp((1 - n + p) L) / L^n.
///
/// Verdict: Divergent when the last three increments each exceed 1e-3 times
/// the first; Convergent when the last increment is below 1e-6 and the last
/// three are nonincreasing; Inconclusive otherwise.
[[nodiscard]] ThresholdReport integral_threshold(const ShellIntegrand& spec, int refinement_levels);

}  // namespace n1ma::radial
