#include "cli.hpp"

#include "n1ma/config.hpp"
#include "n1ma/eigencone.hpp"
#include "n1ma/error.hpp"
#include "n1ma/estimate_harness.hpp"
#include "n1ma/field_io.hpp"
#include "n1ma/form_algebra.hpp"
#include "n1ma/radial_lab.hpp"
#include "n1ma/torus_solver.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fmt/ostream.h>

#include <cmath>
#include <array>
#include <complex>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace n1ma::cli {

namespace {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;

std::string rng_header(std::uint64_t seed) { return fmt::format("# rng=mt19937_64 seed={}\n", seed); }

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("run", "cannot write " + (dir / name).string());
    return f;
}

// Writes `body` to dir/name, or to `out` when dir is empty.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& name, const std::string& body) {
    if (cfg.output_dir.empty()) {
        out << "== " << name << "\n" << body;
        return;
    }
    open_output(cfg.output_dir, name) << body;
}

int status_code(torus::SolveStatus s) {
    switch (s) {
        case torus::SolveStatus::Converged: return kSuccess;
        case torus::SolveStatus::ConeExit: return kConeExit;
        case torus::SolveStatus::MaxIterations: return kNonConvergence;
    }
    return kNonConvergence;
}

std::string history_csv(const torus::SolveResult& r) {
    std::string s = "iteration,residual,min_ellipticity\n";
    for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
        const double e = k < r.ellipticity_history.size() ? r.ellipticity_history[k] : 0.0;
        s += fmt::format("{},{:.17g},{:.17g}\n", k, r.residual_history[k], e);
    }
    return s;
}

std::string rows_csv(const std::vector<harness::EstimateRow>& rows) {
    std::ostringstream os;
    harness::write_csv(os, rows);
    return os.str();
}

std::string field_csv(const GridField& f) {
    std::ostringstream os;
    io::write_field_csv(os, f);
    return os.str();
}

void print_solve(std::ostream& out, const torus::SolveResult& r, const harness::EstimateRow& row) {
    int krylov = 0;
    for (int k : r.krylov_iterations) krylov += k;
    fmt::print(out,
               "status              {}\n"
               "newton iterations   {}\n"
               "krylov iterations   {}\n"
               "continuation steps  {}\n"
               "final residual      {:.3e}\n"
               "c                   {:.15g}\n"
               "c upper bound       {:.15g}\n"
               "osc u               {:.15g}\n"
               "sup |grad u|        {:.6g}\n"
               "sup |hess u|        {:.6g}\n"
               "min eig alpha       {:.6g}\n",
               torus::to_string(r.status), r.iterations, krylov, r.continuation_steps,
               r.residual_history.empty() ? 0.0 : r.residual_history.back(), r.c, row.c_upper, r.osc, r.grad_sup,
               r.hess_sup, r.min_alpha_eig);
    if (!r.message.empty()) fmt::print(out, "message             {}\n", r.message);
}

void write_solution(const RunConfig& cfg, const torus::SolveResult& r, const harness::EstimateRow& row) {
    std::filesystem::create_directories(cfg.output_dir);
    io::write_field(cfg.output_dir / "u.n1ma", r.u);
    open_output(cfg.output_dir, "u.csv") << field_csv(r.u);
    open_output(cfg.output_dir, "history.csv") << history_csv(r);
    open_output(cfg.output_dir, "report.csv") << rows_csv({row});
}

torus::SolveResult solve_logged(const torus::TorusProblem& p, const RunConfig& cfg, std::ostream& err) {
    torus::SolveResult r = torus::newton_solve(p);
    if (cfg.verbosity > 0) {
        for (std::size_t k = 0; k < r.residual_history.size(); ++k) {
            fmt::print(err, "torus_solver::newton_solve: iterate {} residual {:.3e}\n", k, r.residual_history[k]);
        }
    }
    return r;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const config::ProblemConfig pc = config::parse_config(cfg.config_path);
    const torus::SolveResult r = solve_logged(pc.problem, cfg, err);
    const harness::EstimateRow row = harness::analyze(pc.problem, r);
    write_solution(cfg, r, row);
    print_solve(out, r, row);
    if (!r.converged) fmt::print(err, "torus_solver::newton_solve: {}\n", torus::to_string(r.status));
    return status_code(r.status);
}

// --- verify -----------------------------------------------------------------

struct Audit {
    std::string name;
    double value;
    double threshold;
    bool pass;
};

MatrixXcd random_pd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    return a * a.adjoint() / n + 0.1 * MatrixXcd::Identity(n, n);
}

MatrixXcd random_hermitian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    return 0.5 * (a + a.adjoint());
}

// Random point (beta, omega, hess) with alpha_u positive semidefinite.
eigencone::HermitianPoint random_cone_point(std::mt19937_64& rng, int n) {
    const MatrixXcd omega = random_pd(rng, n);
    const MatrixXcd beta = random_pd(rng, n);
    const MatrixXcd alpha = random_pd(rng, n);
    const Eigen::LLT<MatrixXcd> llt(omega);
    const MatrixXcd L = llt.matrixL();
    const MatrixXcd Linv = L.inverse();
    const MatrixXcd S = alpha - Linv * beta * Linv.adjoint();
    const MatrixXcd h = S.trace() * MatrixXcd::Identity(n, n) - (n - 1.0) * S;
    const MatrixXcd hess = L * h * L.adjoint();
    return {beta, omega, 0.5 * (hess + hess.adjoint())};
}

double gauge_distance(const GridField& u, const GridField& v) {
    GridField d = u - v;
    d += -d.mean();
    return d.sup_norm();
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const config::ProblemConfig pc = config::parse_config(cfg.config_path);
    const torus::TorusProblem& p = pc.problem;
    const torus::SolveResult r = solve_logged(p, cfg, err);
    const harness::EstimateRow row = harness::analyze(p, r);
    write_solution(cfg, r, row);
    print_solve(out, r, row);
    if (!r.converged) {
        fmt::print(err, "torus_solver::newton_solve: {}\n", torus::to_string(r.status));
        return status_code(r.status);
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<Audit> audits;
    const auto add = [&](std::string name, double value, double threshold, bool pass) {
        audits.push_back({std::move(name), value, threshold, pass});
    };

    const double res = r.residual_history.back();
    add("final_residual", res, p.options().tolerance, res <= p.options().tolerance);
    add("c_minus_c_upper", r.c - row.c_upper, 1e-9, row.c_bound_ok);
    const double scale = std::max(1.0, std::abs(harness::mass_identity_check(p, r.u, 0.0).reference));
    const harness::MassCheck mass = harness::mass_identity_check(p, r.u, 1e-10 * scale);
    add("mass_identity_error", std::abs(mass.mass - mass.reference), 1e-10 * scale, mass.holds);
    add("amgm_pointwise_gap", row.amgm_min_gap, -1e-9, row.amgm_min_gap >= -1e-9);

    if (pc.manufactured_u) {
        const double d = gauge_distance(r.u, *pc.manufactured_u);
        add("manufactured_u_error", d, 1e-8, d <= 1e-8);
        add("manufactured_c_error", std::abs(r.c - 1.0), 1e-8, std::abs(r.c - 1.0) <= 1e-8);
    }

    {
        GridField f2 = p.f();
        f2 *= 2.0;
        const torus::SolveResult r2 = torus::newton_solve(p.with_density(f2));
        const double du = r2.converged ? (r2.u - r.u).sup_norm() : INFINITY;
        const double dc = r2.converged ? std::abs(2.0 * r2.c - r.c) / r.c : INFINITY;
        add("density_scaling_u", du, 1e-9, du <= 1e-9);
        add("density_scaling_c", dc, 1e-9, dc <= 1e-9);
    }

    {
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        const double a = coef(rng), b = coef(rng);
        const int last = p.n() - 1;
        GridField f2 = p.f();
        for (std::size_t i = 0; i < f2.size(); ++i) {
            const auto x = f2.coordinates(i);
            f2[i] *= std::exp(0.3 * (a * std::sin(x[0] + x[1]) + b * std::cos(x[static_cast<std::size_t>(last)])));
        }
        const torus::TorusProblem p2 = p.with_density(f2);
        const torus::SolveResult r2 = torus::newton_solve(p2);
        int counterexamples = r2.converged ? 0 : 1;
        if (r2.converged) {
            for (double c : {0.0, 0.5, 0.9}) {
                using Kind = eigencone::DominationVerdict::Kind;
                counterexamples += harness::domination_consistency(p, r, p2, r2, c).kind == Kind::Counterexample;
                counterexamples += harness::domination_consistency(p2, r2, p, r, c).kind == Kind::Counterexample;
            }
        }
        add("domination_counterexamples", counterexamples, 0, counterexamples == 0);
    }

    {
        std::normal_distribution<double> g;
        double worst = 0.0;
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<double> k(static_cast<std::size_t>(p.n()));
            for (auto& v : k) v = std::round(3.0 * g(rng));
            const double amp = g(rng), phase = g(rng);
            const GridField u = GridField::sample(p.shape(), [&](std::span<const double> x) {
                double s = phase;
                for (std::size_t j = 0; j < x.size(); ++j) s += k[j] * x[j];
                return amp * std::sin(s);
            });
            const harness::MassCheck m = harness::mass_identity_check(p, u, 0.0);
            worst = std::max(worst, std::abs(m.mass - m.reference));
        }
        add("random_mass_identity_error", worst, 1e-10 * scale, worst <= 1e-10 * scale);
    }

    {
        double amgm = INFINITY, product = INFINITY;
        std::uniform_real_distribution<double> lam(-1.0, 3.0);
        for (int trial = 0; trial < 2000; ++trial) {
            const int n = 3 + trial % 3;
            amgm = std::min(amgm, eigencone::amgm_trace_gap(random_cone_point(rng, n)));
            std::vector<double> l(static_cast<std::size_t>(n));
            for (auto& v : l) v = lam(rng);
            product = std::min(product, eigencone::psh_product_gap(eigencone::Spectrum(l)));
        }
        add("random_amgm_trace_gap", amgm, -1e-12, amgm >= -1e-12);
        add("random_psh_product_gap", product, -1e-12, product >= -1e-12);
    }

    std::string csv = rng_header(cfg.seed) + "check,value,threshold,pass\n";
    bool ok = true;
    for (const Audit& a : audits) {
        csv += fmt::format("{},{:.17g},{:.17g},{}\n", a.name, a.value, a.threshold, a.pass ? 1 : 0);
        fmt::print(out, "{:<28} {:>12.4e}  {}\n", a.name, a.value, a.pass ? "PASS" : "FAIL");
        if (!a.pass) {
            fmt::print(err, "estimate_harness::verify: audit {} failed\n", a.name);
            ok = false;
        }
    }
    open_output(cfg.output_dir, "verify.csv") << csv;
    return ok ? kSuccess : kInvariantViolation;
}

// --- family -----------------------------------------------------------------

int cmd_family(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const config::ProblemConfig pc = config::parse_config(cfg.config_path);
    if (!pc.family) throw ConfigError("parse_config", "family needs a [family] section");
    const harness::EstimateReport rep = harness::family_run(*pc.family);
    const std::string text = harness::summary(rep);
    open_output(cfg.output_dir, "family.csv") << rows_csv(rep.rows);
    open_output(cfg.output_dir, "summary.txt") << text;
    out << text;

    int code = kSuccess;
    for (const auto& row : rep.rows) {
        if (!row.converged) {
            fmt::print(err, "torus_solver::newton_solve: fiber t={} {}\n", row.t, torus::to_string(row.status));
            if (code == kSuccess || row.status == torus::SolveStatus::ConeExit) code = status_code(row.status);
        }
    }
    if (code != kSuccess) return code;
    for (const auto& row : rep.rows) {
        if (!row.c_bound_ok || !row.mass_ok || row.amgm_min_gap < -1e-9) {
            fmt::print(err, "estimate_harness::family_run: audit failed at t={}\n", row.t);
            code = kInvariantViolation;
        }
    }
    if (!rep.within_budget) {
        fmt::print(err, "estimate_harness::family_run: uniformity {} exceeds budget {}\n", rep.uniformity, rep.budget);
        code = kInvariantViolation;
    }
    return code;
}

// --- radial -----------------------------------------------------------------

int cmd_radial(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.n < 3) throw ConfigError("radial", "n must be >= 3");
    if (cfg.levels < 3) throw ConfigError("radial", "levels must be >= 3");
    const radial::RadialProfile profile = radial::logloglog_profile();
    // The profile needs -G > e^e, i.e. r < exp(-e / (2(n-2))).
    const double r_max = std::exp(-std::numbers::e / (2.0 * (cfg.n - 2)));
    std::string csv = "r,lambda_hat_1,lambda_hat_j,ma_hat\n";
    for (int k = 0; k < 10; ++k) {
        const double r = 0.9 * r_max * std::ldexp(1.0, -k);
        const radial::HatEigenvalues h = radial::radial_hat_eigenvalues(profile, r, cfg.n);
        csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", r, h.radial, h.tangential,
                           radial::radial_ma_hat(profile, r, cfg.n));
    }
    emit(cfg, out, "radial.csv", csv);

    const radial::ShellIntegrand shell{cfg.p, cfg.n, std::exp(-std::exp(2.0)), std::exp(-std::exp(1.0))};
    const radial::ThresholdReport rep = radial::integral_threshold(shell, cfg.levels);
    const char* verdict = radial::to_string(rep.verdict);
    std::string table = "p,level,partial_integral,verdict\n";
    for (const auto& lv : rep.levels) table += fmt::format("{:.17g},{},{:.17g},{}\n", cfg.p, lv.level, lv.partial, verdict);
    emit(cfg, out, "threshold.csv", table);
    fmt::print(out, "p = {} n = {}: {} after {} levels\n", cfg.p, cfg.n, verdict, cfg.levels);
    return kSuccess;
}

// --- cones ------------------------------------------------------------------

int cmd_cones(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    using namespace eigencone;
    if (cfg.samples < 1) throw ConfigError("cones", "samples must be positive");
    const auto classify = [](const Spectrum& s) {
        return std::array<bool, 4>{cone_membership(s, cone::Psh{}, 0.0), cone_membership(s, cone::Sh{2}, 0.0),
                                   cone_membership(s, cone::PshN1{}, 0.0), cone_membership(s, cone::Sh{1}, 0.0)};
    };
    bool ok = true;

    std::string examples = "spectrum,psh,sh2,psh_n1,sh1\n";
    const Spectrum ex1{-1.0, 1.0, 1.0}, ex2{-1.5, 1.0, 1.0};
    for (const Spectrum* s : {&ex1, &ex2}) {
        const auto c = classify(*s);
        examples += fmt::format("\"({})\",{},{},{},{}\n", fmt::join(s->values(), ", "), int(c[0]), int(c[1]), int(c[2]),
                                int(c[3]));
    }
    const auto c1 = classify(ex1), c2 = classify(ex2);
    if (!(c1[2] && !c1[1]) || !(c2[3] && !c2[2])) {
        fmt::print(err, "eigencone::cone_membership: example spectra misclassified\n");
        ok = false;
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    std::string csv = rng_header(cfg.seed) + "n,samples,psh,sh2,psh_n1,sh1,chain_violations,min_psh_product_gap\n";
    for (int n = 3; n <= 5; ++n) {
        std::array<int, 4> count{};
        int violations = 0;
        double product = INFINITY;
        for (int k = 0; k < cfg.samples; ++k) {
            std::vector<double> l(static_cast<std::size_t>(n));
            for (auto& v : l) v = u(rng);
            const Spectrum s(l);
            const auto c = classify(s);
            for (int j = 0; j < 4; ++j) count[static_cast<std::size_t>(j)] += c[static_cast<std::size_t>(j)];
            violations += (c[0] && !c[1]) + (c[1] && !c[2]) + (c[2] && !c[3]);
            product = std::min(product, psh_product_gap(s));
        }
        csv += fmt::format("{},{},{},{},{},{},{},{:.17g}\n", n, cfg.samples, count[0], count[1], count[2], count[3],
                           violations, product);
        if (violations > 0 || product < -1e-12) {
            fmt::print(err, "eigencone::cone_membership: inclusion chain or product gap violated for n={}\n", n);
            ok = false;
        }
    }
    emit(cfg, out, "cones_examples.csv", examples);
    emit(cfg, out, "cones.csv", csv);
    if (!cfg.output_dir.empty()) out << examples << csv;
    return ok ? kSuccess : kInvariantViolation;
}

// --- forms-check ------------------------------------------------------------

int cmd_forms(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.n < 3 || cfg.n > 6) throw ConfigError("forms-check", "n must lie in 3..6");
    if (cfg.trials < 1) throw ConfigError("forms-check", "trials must be positive");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> shift(-1.0, 3.0);
    std::string csv = rng_header(cfg.seed) + "trial,hat_residual,min_hat,eigenvalue,hyperplane,weak_positivity,agree\n";
    double worst = 0.0;
    int disagreements = 0, members = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        const MatrixXcd H = random_hermitian(rng, cfg.n) + shift(rng) * MatrixXcd::Identity(cfg.n, cfg.n);
        const double res = forms::hat_identity_residual(H, cfg.n);
        const forms::EquivalenceReport r = forms::equivalence_suite(H, cfg.n, 1e-9, 24, rng());
        worst = std::max(worst, res);
        disagreements += !r.agree();
        members += r.eigenvalue_verdict;
        csv += fmt::format("{},{:.17g},{:.17g},{},{},{},{}\n", t, res, r.min_hat, int(r.eigenvalue_verdict),
                           int(r.hyperplane_verdict), int(r.weak_positivity_verdict), int(r.agree()));
    }
    emit(cfg, out, "forms.csv", csv);
    fmt::print(out, "n = {} trials = {}: max hat residual {:.3e}, disagreements {}, (n-1)-psh {}\n", cfg.n, cfg.trials,
               worst, disagreements, members);
    if (worst > 1e-12 || disagreements > 0) {
        fmt::print(err, "form_algebra::equivalence_suite: {} disagreements, residual {:.3e}\n", disagreements, worst);
        return kInvariantViolation;
    }
    return kSuccess;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&, std::ostream&)>> commands{
        {"solve", cmd_solve}, {"verify", cmd_verify}, {"family", cmd_family},
        {"radial", cmd_radial}, {"cones", cmd_cones}, {"forms-check", cmd_forms}};
    const auto it = commands.find(config.subcommand);
    if (it == commands.end()) {
        fmt::print(err, "cli::run: unknown subcommand '{}'\n", config.subcommand);
        return kBadConfig;
    }
    try {
        return it->second(config, out, err);
    } catch (const ConfigError& e) {
        fmt::print(err, "{}\n", e.what());
        return kBadConfig;
    } catch (const PositivityError& e) {
        fmt::print(err, "{}\n", e.what());
        return kConeExit;
    } catch (const DomainError& e) {
        fmt::print(err, "{}\n", e.what());
        return kBadConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(err, "cli::run: {}\n", e.what());
        return kBadConfig;
    }
}

}  // namespace n1ma::cli
