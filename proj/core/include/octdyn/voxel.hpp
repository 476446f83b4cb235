#pragma once

#include <array>
#include <variant>
#include <vector>

#include "octdyn/types.hpp"

namespace octdyn {

/// Regular voxel image; label 0 marks void.  Storage is x-fastest.
struct VoxelGrid {
  std::array<int, 3> dims = {0, 0, 0};
  double spacing = 0.0;  ///< edge length of one voxel [m]
  Vec3 origin = Vec3::Zero();
  std::vector<std::uint16_t> labels;

  std::uint16_t at(int x, int y, int z) const {
    if (x < 0 || y < 0 || z < 0 || x >= dims[0] || y >= dims[1] || z >= dims[2]) return 0;
    return labels[static_cast<std::size_t>(x) +
                  static_cast<std::size_t>(dims[0]) *
                      (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z))];
  }

  void validate() const {
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw Error("voxel grid dims must be >= 1");
    if (!(spacing > 0.0)) throw Error("voxel spacing must be positive");
    if (labels.size() != static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
                             static_cast<std::size_t>(dims[2]))
      throw Error("voxel label array size mismatch");
  }
};

struct SpherePrimitive {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::uint16_t material = 0;
};

struct BoxPrimitive {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  std::uint16_t material = 0;
};

using Primitive = std::variant<SpherePrimitive, BoxPrimitive>;

/// Analytic geometry over a cubic root domain.  Later primitives paint over
/// earlier ones.
struct PrimitiveScene {
  Vec3 origin = Vec3::Zero();
  double root_size = 0.0;
  std::vector<Primitive> items;

  std::uint16_t label_at(const Vec3& p) const;

  /// Samples the scene at voxel centers on a 2^level grid.
  VoxelGrid voxelize(int level) const;
};

}  // namespace octdyn
