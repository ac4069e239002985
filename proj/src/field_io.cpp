#include "n1ma/field_io.hpp"

#include "n1ma/error.hpp"

#include <fmt/format.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace n1ma::io {

namespace {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

constexpr std::array<char, 4> kMagic{'N', '1', 'M', 'A'};
constexpr int kMaxDim = 5;

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

}  // namespace

void write_field(std::ostream& out, const GridField& f) {
    if (f.n_dim() > kMaxDim) throw ConfigError("write_field", fmt::format("n_dim {} exceeds {}", f.n_dim(), kMaxDim));
    out.write(kMagic.data(), 4);
    put_u32(out, kFieldVersion);
    put_u32(out, static_cast<std::uint32_t>(f.n_dim()));
    for (int k = 0; k < kMaxDim; ++k) put_u32(out, k < f.n_dim() ? static_cast<std::uint32_t>(f.shape()[k]) : 0u);
    const auto d = f.data();
    out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (!out) throw ConfigError("write_field", "write failed");
}

void write_field(const std::filesystem::path& path, const GridField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_field", "cannot open " + path.string());
    write_field(out, f);
}

GridField read_field(std::istream& in) {
    const char* op = "read_field";
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || magic != kMagic) throw ConfigError(op, "bad magic");
    const std::uint32_t version = get_u32(in);
    if (version != kFieldVersion) throw ConfigError(op, fmt::format("unsupported version {}", version));
    const std::uint32_t n_dim = get_u32(in);
    if (n_dim == 0 || n_dim > kMaxDim) throw ConfigError(op, fmt::format("bad n_dim {}", n_dim));
    std::vector<int> shape;
    for (int k = 0; k < kMaxDim; ++k) {
        const std::uint32_t s = get_u32(in);
        if (k < static_cast<int>(n_dim)) shape.push_back(static_cast<int>(s));
    }
    if (!in) throw ConfigError(op, "truncated header");
    try {
        validate_shape(shape);
    } catch (const Error& e) {
        throw ConfigError(op, e.what());
    }
    GridField f(shape);
    auto d = f.data();
    in.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(d.size() * sizeof(double))) {
        throw ConfigError(op, "truncated payload");
    }
    return f;
}

GridField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_field", "cannot open " + path.string());
    return read_field(in);
}

void write_field_csv(std::ostream& out, const GridField& f) {
    std::string line;
    for (int k = 0; k < f.n_dim(); ++k) line += fmt::format("x{},", k + 1);
    out << line << "value\n";
    std::vector<double> x(static_cast<std::size_t>(f.n_dim()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.coordinates(i, x);
        line.clear();
        for (double v : x) line += fmt::format("{:.17g},", v);
        out << line << fmt::format("{:.17g}\n", f[i]);
    }
}

}  // namespace n1ma::io
