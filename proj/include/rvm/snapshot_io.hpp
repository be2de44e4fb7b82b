#pragma once

// Field snapshot export: <stem>.bin holds the six staggered components as
// little-endian float64, component-major, then i, j, k with k fastest;
// <stem>.json is the sidecar describing shape, spacing, time and layout.

#include <filesystem>

#include "rvm/grid.hpp"

namespace rvm {

void write_field_snapshot(const FieldState& f, const std::filesystem::path& stem);

/// Reads a snapshot written by write_field_snapshot; validates the sidecar.
FieldState read_field_snapshot(const std::filesystem::path& stem);

}  // namespace rvm
