#include "octdyn/voxel.hpp"

namespace octdyn {

std::uint16_t PrimitiveScene::label_at(const Vec3& p) const {
  std::uint16_t label = 0;
  for (const auto& item : items) {
    if (std::holds_alternative<SpherePrimitive>(item)) {
      const auto& s = std::get<SpherePrimitive>(item);
      if ((p - s.center).squaredNorm() <= s.radius * s.radius) label = s.material;
    } else {
      const auto& b = std::get<BoxPrimitive>(item);
      if (p[0] >= b.lo[0] && p[0] <= b.hi[0] && p[1] >= b.lo[1] && p[1] <= b.hi[1] &&
          p[2] >= b.lo[2] && p[2] <= b.hi[2])
        label = b.material;
    }
  }
  return label;
}

VoxelGrid PrimitiveScene::voxelize(int level) const {
  if (!(root_size > 0.0)) throw Error("primitive scene root_size must be positive");
  if (level < 0 || level > 20) throw Error("voxelization level out of range");
  const int n = 1 << level;
  VoxelGrid grid;
  grid.dims = {n, n, n};
  grid.spacing = root_size / n;
  grid.origin = origin;
  grid.labels.resize(static_cast<std::size_t>(n) * n * n);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const Vec3 c = origin + grid.spacing * Vec3(x + 0.5, y + 0.5, z + 0.5);
        grid.labels[static_cast<std::size_t>(x) +
                    static_cast<std::size_t>(n) * (static_cast<std::size_t>(y) +
                                                   static_cast<std::size_t>(n) * static_cast<std::size_t>(z))] =
            label_at(c);
      }
  return grid;
}

}  // namespace octdyn
