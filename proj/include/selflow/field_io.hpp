#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "selflow/field.hpp"

namespace selflow {

// Binary snapshot layout (little-endian):
//   16 bytes  magic "SELFLOW-FLD" followed by five NUL bytes
//   u32 k, u32 nx, u32 ny, u8 boundary code (Grid::bc_code)
//   k * nx * ny float64 values, node-major (x fastest), components innermost
//
// Domain lengths are not part of the format; readers supply them.

inline constexpr char snapshot_magic[16] = {'S', 'E', 'L', 'F', 'L', 'O', 'W', '-',
                                            'F', 'L', 'D', '\0', '\0', '\0', '\0', '\0'};

template <std::size_t K>
void write_snapshot(std::ostream& os, const Field<K>& f);

template <std::size_t K>
void write_snapshot(const std::filesystem::path& path, const Field<K>& f);

using AnyField = std::variant<ScalarField, VectorField, DirectorField>;

AnyField read_snapshot(std::istream& is, double lx = 1.0, double ly = 1.0);
AnyField read_snapshot(const std::filesystem::path& path, double lx = 1.0, double ly = 1.0);

/// Header `x,y,c0[,c1[,c2]]`, one row per node.
template <std::size_t K>
void write_csv(std::ostream& os, const Field<K>& f);

}  // namespace selflow
