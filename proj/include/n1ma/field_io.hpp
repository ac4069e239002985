#pragma once

// Raw field files: 32-byte little-endian header ("N1MA", u32 version,
// u32 n_dim, 5 x u32 shape with unused axes zero) followed by f64 samples
// in GridField order.

#include "n1ma/grid_field.hpp"

#include <filesystem>
#include <iosfwd>

namespace n1ma::io {

inline constexpr std::uint32_t kFieldVersion = 1;

void write_field(std::ostream& out, const GridField& f);
void write_field(const std::filesystem::path& path, const GridField& f);

/// Throws ConfigError on a bad magic, version, shape or truncated payload.
[[nodiscard]] GridField read_field(std::istream& in);
[[nodiscard]] GridField read_field(const std::filesystem::path& path);

/// CSV with columns x1..xn,value (17 significant digits).
void write_field_csv(std::ostream& out, const GridField& f);

}  // namespace n1ma::io
