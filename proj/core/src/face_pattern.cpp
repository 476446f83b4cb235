#include "octdyn/face_pattern.hpp"

namespace octdyn {

std::vector<FaceElement> face_discretization(const std::array<bool, 4>& half_edge) {
  std::vector<FaceElement> out;
  const bool any = half_edge[0] || half_edge[1] || half_edge[2] || half_edge[3];
  if (!any) {
    FaceElement quad;
    quad.quad = true;
    quad.nodes = {0, 1, 2, 3};
    out.push_back(quad);
    return out;
  }
  // Walk the boundary loop: corner k, then the mid-edge node of edge k when
  // present.  Each consecutive boundary pair spans one fan triangle with the
  // center node.
  std::vector<int> loop;
  for (int k = 0; k < 4; ++k) {
    loop.push_back(k);
    if (half_edge[static_cast<std::size_t>(k)]) loop.push_back(4 + k);
  }
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) {
    FaceElement tri;
    tri.nodes = {loop[static_cast<std::size_t>(i)], loop[static_cast<std::size_t>((i + 1) % n)], 8, -1};
    out.push_back(tri);
  }
  return out;
}

Eigen::Vector2d face_node_coord(int slot) {
  static const std::array<Eigen::Vector2d, 9> kCoords = {
      Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0),
      Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(1.0, 0.5),
      Eigen::Vector2d(0.5, 1.0), Eigen::Vector2d(0.0, 0.5), Eigen::Vector2d(0.5, 0.5)};
  if (slot < 0 || slot > 8) throw Error("face node slot out of range");
  return kCoords[static_cast<std::size_t>(slot)];
}

}  // namespace octdyn
