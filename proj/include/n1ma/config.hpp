#pragma once

// INI-style problem configuration.
//
//   [problem]       n (3), grid (32 or "32,32,32")
//   [beta]          bij = expression or bij_file = path, 1 <= i <= j <= n;
//                   missing entries default to the identity
//   [density]       f = expression or f_file = path
//   [manufactured]  u = expression; replaces [density] with f = det alpha_u
//   [solver]        tol, max_iter, epsilon, krylov_tol, krylov_max_iter,
//                   damping_floor, continuation_steps
//   [family]        t = comma-separated list in [0, 1/2]
//   [beta1]         Gamma at t = 1 (defaults to [beta])
//   [density1]      f at t = 1 (defaults to the base density)
//   [bounds]        c_beta_omega, g_beta, volume, budget
//
// '#' and ';' start comments. Relative file paths resolve against the config
// file's directory.

#include "n1ma/estimate_harness.hpp"
#include "n1ma/torus_solver.hpp"

#include <filesystem>
#include <optional>
#include <string_view>

namespace n1ma::config {

struct ProblemConfig {
    torus::TorusProblem problem;
    std::optional<GridField> manufactured_u;  // exact solution when [manufactured] is present
    std::optional<harness::DeclaredBounds> bounds;
    std::optional<harness::FamilySpec> family;
};

/// Throws ConfigError (line-numbered where a line is responsible) on syntax
/// errors, unknown or missing keys, a non-positive-definite Gamma sample, a
/// non-positive density, or declared bounds that fail to hold.
[[nodiscard]] ProblemConfig parse_config(const std::filesystem::path& path);
[[nodiscard]] ProblemConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = ".");

}  // namespace n1ma::config
