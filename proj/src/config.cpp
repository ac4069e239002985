#include "n1ma/config.hpp"

#include "n1ma/error.hpp"
#include "n1ma/expression.hpp"
#include "n1ma/field_io.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace n1ma::config {

namespace {

constexpr const char* kOp = "parse_config";

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

struct Section {
    int line = 0;
    std::map<std::string, Entry> keys;
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Ini {
public:
    Ini(std::string_view text, std::filesystem::path base) : base_(std::move(base)) {
        static const std::set<std::string> known{"problem", "beta",   "density", "manufactured", "solver",
                                                 "family",  "beta1",  "density1", "bounds"};
        std::istringstream in{std::string(text)};
        std::string raw;
        Section* current = nullptr;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string_view s = raw;
            if (const auto c = s.find_first_of("#;"); c != std::string_view::npos) s = s.substr(0, c);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') throw ConfigError(kOp, "unterminated section header", line);
                const std::string name(trim(s.substr(1, s.size() - 2)));
                if (!known.contains(name)) throw ConfigError(kOp, "unknown section [" + name + "]", line);
                if (sections_.contains(name)) throw ConfigError(kOp, "duplicate section [" + name + "]", line);
                current = &sections_[name];
                current->line = line;
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string_view::npos) throw ConfigError(kOp, "expected key = value", line);
            if (current == nullptr) throw ConfigError(kOp, "key outside any section", line);
            const std::string key(trim(s.substr(0, eq)));
            const std::string value(trim(s.substr(eq + 1)));
            if (key.empty()) throw ConfigError(kOp, "empty key", line);
            if (value.empty()) throw ConfigError(kOp, "empty value for " + key, line);
            if (!current->keys.emplace(key, Entry{value, line}).second) {
                throw ConfigError(kOp, "duplicate key " + key, line);
            }
        }
    }

    [[nodiscard]] bool has(const std::string& section) const { return sections_.contains(section); }

    [[nodiscard]] int section_line(const std::string& section) const {
        const auto it = sections_.find(section);
        return it == sections_.end() ? 0 : it->second.line;
    }

    [[nodiscard]] const Entry* find(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        const auto k = s->second.keys.find(key);
        if (k == s->second.keys.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    [[nodiscard]] const Entry& require(const std::string& section, const std::string& key) const {
        if (const Entry* e = find(section, key)) return *e;
        throw ConfigError(kOp, fmt::format("missing key {} in [{}]", key, section), section_line(section));
    }

    void reject_unused() const {
        for (const auto& [name, sec] : sections_) {
            for (const auto& [key, e] : sec.keys) {
                if (!e.used) throw ConfigError(kOp, fmt::format("unknown key {} in [{}]", key, name), e.line);
            }
        }
    }

    [[nodiscard]] std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_ / path;
    }

private:
    std::map<std::string, Section> sections_;
    std::filesystem::path base_;
};

double to_double(const Entry& e) {
    double v = 0.0;
    const char* end = e.value.data() + e.value.size();
    const auto [p, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) {
        throw ConfigError(kOp, "expected a number, got \"" + e.value + "\"", e.line);
    }
    return v;
}

int to_int(const Entry& e) {
    int v = 0;
    const char* end = e.value.data() + e.value.size();
    const auto [p, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || p != end) throw ConfigError(kOp, "expected an integer, got \"" + e.value + "\"", e.line);
    return v;
}

std::vector<double> to_list(const Entry& e) {
    std::vector<double> out;
    std::string_view rest = e.value;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        Entry item{std::string(trim(rest.substr(0, comma))), e.line};
        out.push_back(to_double(item));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return out;
}

// Expression or raw field file; nullopt when neither key is present.
std::optional<GridField> load_field(const Ini& ini, const std::string& section, const std::string& key, int n,
                                    const std::vector<int>& shape) {
    const Entry* expr = ini.find(section, key);
    const Entry* file = ini.find(section, key + "_file");
    if (expr != nullptr && file != nullptr) {
        throw ConfigError(kOp, fmt::format("both {} and {}_file given in [{}]", key, key, section), file->line);
    }
    if (expr != nullptr) {
        try {
            const Expression ex = Expression::parse(expr->value, n);
            return GridField::sample(shape, [&ex](std::span<const double> x) { return ex(x); });
        } catch (const ConfigError& err) {
            throw ConfigError(kOp, err.what(), expr->line);
        }
    }
    if (file != nullptr) {
        GridField f;
        try {
            f = io::read_field(ini.resolve(file->value));
        } catch (const ConfigError& err) {
            throw ConfigError(kOp, err.what(), file->line);
        }
        if (f.shape() != shape) throw ConfigError(kOp, "field file grid does not match [problem] grid", file->line);
        return f;
    }
    return std::nullopt;
}

void require_positive(const GridField& f, const std::string& what, int line) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0) || !std::isfinite(f[i])) {
            const auto x = f.coordinates(i);
            throw ConfigError(kOp, fmt::format("{} = {} is not positive at x = ({:.6g})", what, f[i], fmt::join(x, ", ")),
                              line);
        }
    }
}

MatrixField load_gamma(const Ini& ini, const std::string& section, int n, const std::vector<int>& shape) {
    MatrixField g = MatrixField::constant(shape, Eigen::MatrixXd::Identity(n, n));
    int first_line = ini.section_line(section);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const std::string key = fmt::format("b{}{}", i + 1, j + 1);
            if (auto f = load_field(ini, section, key, n, shape)) g.set_component(i, j, *f);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n);
    for (std::size_t p = 0; p < g.points(); ++p) {
        es.compute(g.at(p), Eigen::EigenvaluesOnly);
        if (!(es.eigenvalues()(0) > 0.0)) {
            GridField probe(shape);
            throw ConfigError(kOp,
                              fmt::format("[{}] is not positive definite at x = ({:.6g}), min eigenvalue {:.6g}",
                                          section, fmt::join(probe.coordinates(p), ", "), es.eigenvalues()(0)),
                              first_line);
        }
    }
    return g;
}

std::vector<int> parse_grid(const Entry& e, int n) {
    std::vector<int> shape;
    std::string_view rest = e.value;
    while (!rest.empty()) {
        const auto sep = rest.find_first_of(",x");
        shape.push_back(to_int(Entry{std::string(trim(rest.substr(0, sep))), e.line}));
        rest = sep == std::string_view::npos ? std::string_view{} : rest.substr(sep + 1);
    }
    if (shape.size() == 1) shape.assign(static_cast<std::size_t>(n), shape[0]);
    if (static_cast<int>(shape.size()) != n) throw ConfigError(kOp, "grid needs one size or n sizes", e.line);
    try {
        validate_shape(shape);
    } catch (const Error& err) {
        throw ConfigError(kOp, err.what(), e.line);
    }
    return shape;
}

torus::SolverOptions parse_solver(const Ini& ini) {
    torus::SolverOptions o;
    const std::string s = "solver";
    auto positive = [](const Entry& e, double v) {
        if (!(v > 0.0)) throw ConfigError(kOp, "value must be positive", e.line);
        return v;
    };
    if (const Entry* e = ini.find(s, "tol")) o.tolerance = positive(*e, to_double(*e));
    if (const Entry* e = ini.find(s, "max_iter")) o.max_iterations = static_cast<int>(positive(*e, to_int(*e)));
    if (const Entry* e = ini.find(s, "epsilon")) {
        o.epsilon = to_double(*e);
        if (o.epsilon < 0.0) throw ConfigError(kOp, "epsilon must be >= 0", e->line);
    }
    if (const Entry* e = ini.find(s, "krylov_tol")) o.krylov_tolerance = positive(*e, to_double(*e));
    if (const Entry* e = ini.find(s, "krylov_max_iter")) {
        o.krylov_max_iterations = static_cast<int>(positive(*e, to_int(*e)));
    }
    if (const Entry* e = ini.find(s, "damping_floor")) o.damping_floor = positive(*e, to_double(*e));
    if (const Entry* e = ini.find(s, "continuation_steps")) {
        o.continuation_steps = to_int(*e);
        if (o.continuation_steps < 0) throw ConfigError(kOp, "continuation_steps must be >= 0", e->line);
    }
    return o;
}

ProblemConfig parse_impl(std::string_view text, const std::filesystem::path& base_dir) {
    const Ini ini(text, base_dir);

    int n = 3;
    if (const Entry* e = ini.find("problem", "n")) {
        n = to_int(*e);
        if (n < 3) throw ConfigError(kOp, "n must be >= 3", e->line);
    }
    std::vector<int> shape(static_cast<std::size_t>(n), 32);
    if (const Entry* e = ini.find("problem", "grid")) shape = parse_grid(*e, n);
    const torus::SolverOptions options = parse_solver(ini);

    MatrixField gamma = load_gamma(ini, "beta", n, shape);

    std::optional<GridField> manufactured;
    GridField f;
    if (ini.has("manufactured")) {
        const Entry& ue = ini.require("manufactured", "u");
        manufactured = load_field(ini, "manufactured", "u", n, shape);
        if (ini.has("density")) {
            throw ConfigError(kOp, "[density] and [manufactured] are exclusive", ini.section_line("density"));
        }
        const torus::TorusProblem probe(n, gamma, GridField(shape, 1.0), options);
        const MatrixField alpha = torus::alpha_field(probe, *manufactured);
        f = GridField(shape);
        for (std::size_t i = 0; i < alpha.points(); ++i) f[i] = alpha.at(i).determinant();
        if (!(alpha.min_eigenvalue() > 0.0)) {
            throw ConfigError(kOp, "manufactured u leaves the positive cone", ue.line);
        }
    } else {
        auto loaded = load_field(ini, "density", "f", n, shape);
        if (!loaded) {
            throw ConfigError(kOp, "missing key f (or f_file) in [density]", ini.section_line("density"));
        }
        const Entry* e = ini.find("density", "f");
        require_positive(*loaded, "f", e != nullptr ? e->line : ini.require("density", "f_file").line);
        f = std::move(*loaded);
    }

    ProblemConfig out{torus::TorusProblem(n, gamma, f, options), std::move(manufactured), std::nullopt, std::nullopt};

    const Entry* c_entry = nullptr;
    if (ini.has("bounds")) {
        harness::DeclaredBounds b;
        c_entry = &ini.require("bounds", "c_beta_omega");
        b.c_beta_omega = to_double(*c_entry);
        if (const Entry* e = ini.find("bounds", "g_beta")) b.g_beta = to_double(*e);
        if (const Entry* e = ini.find("bounds", "volume")) b.volume = to_double(*e);
        b.budget = std::numeric_limits<double>::infinity();
        if (const Entry* e = ini.find("bounds", "budget")) b.budget = to_double(*e);
        if (!(b.c_beta_omega >= 1.0)) throw ConfigError(kOp, "c_beta_omega must be >= 1", c_entry->line);
        if (!(b.g_beta > 0.0) || !(b.volume > 0.0) || !(b.budget > 0.0)) {
            throw ConfigError(kOp, "g_beta, volume and budget must be positive", ini.section_line("bounds"));
        }
        // spec(Gamma) must lie in [1/C, C] at every node.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n);
        for (std::size_t p = 0; p < gamma.points(); ++p) {
            es.compute(gamma.at(p), Eigen::EigenvaluesOnly);
            const auto& ev = es.eigenvalues();
            if (ev(0) < 1.0 / b.c_beta_omega || ev(n - 1) > b.c_beta_omega) {
                throw ConfigError(kOp,
                                  fmt::format("declared c_beta_omega = {} does not bound Gamma (eigenvalues {:.6g}..{:.6g})",
                                              b.c_beta_omega, ev(0), ev(n - 1)),
                                  c_entry->line);
            }
        }
        out.bounds = b;
    }

    if (ini.has("family")) {
        const Entry& te = ini.require("family", "t");
        if (!out.bounds) throw ConfigError(kOp, "[family] needs a [bounds] section", ini.section_line("family"));
        if (!ini.find("bounds", "budget")) {
            throw ConfigError(kOp, "missing key budget in [bounds]", ini.section_line("bounds"));
        }
        MatrixField gamma1 = ini.has("beta1") ? load_gamma(ini, "beta1", n, shape) : gamma;
        GridField f1 = out.problem.f();
        if (ini.has("density1")) {
            auto loaded = load_field(ini, "density1", "f", n, shape);
            if (!loaded) throw ConfigError(kOp, "missing key f (or f_file) in [density1]", ini.section_line("density1"));
            require_positive(*loaded, "f", ini.section_line("density1"));
            f1 = std::move(*loaded);
        }
        const std::vector<double> ts = to_list(te);
        for (double t : ts) {
            if (!(t >= 0.0 && t <= 0.5)) throw ConfigError(kOp, fmt::format("t = {} outside [0, 1/2]", t), te.line);
        }
        try {
            out.family.emplace(out.problem, std::move(gamma1), std::move(f1), ts, *out.bounds);
        } catch (const DomainError& err) {
            throw ConfigError(kOp, err.what(), c_entry->line);
        }
    } else {
        for (const char* s : {"beta1", "density1"}) {
            if (ini.has(s)) throw ConfigError(kOp, fmt::format("[{}] needs a [family] section", s), ini.section_line(s));
        }
    }

    ini.reject_unused();
    return out;
}

}  // namespace

ProblemConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
    try {
        return parse_impl(text, base_dir);
    } catch (const DomainError& err) {
        throw ConfigError(kOp, err.what());
    }
}

ProblemConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(kOp, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace n1ma::config
