#pragma once

#include <string>

#include "octdyn/octree.hpp"

namespace octdyn {

/// Mesh container: "OCTM" magic, version u32, a length-prefixed JSON header
/// (root_size, origin, coord_bits, counts, node id width, materials) and
/// little-endian binary arrays:
///   node coordinates  n_nodes x 3 float64
///   cell records      level u8, origin 3 x float64, material u16,
///                     canonical_id u8, transform_id u8, node ids (u32 or
///                     u64; the count follows from the cell's pattern)
/// Write -> read -> write reproduces the bytes exactly.
void write_mesh(const OctreeMesh& mesh, const std::string& path);
OctreeMesh read_mesh(const std::string& path);

}  // namespace octdyn
