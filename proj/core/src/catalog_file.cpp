#include <cstring>
#include <fstream>

#include "octdyn/catalog.hpp"

namespace octdyn {

namespace {

constexpr char kMagic[4] = {'O', 'C', 'T', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("catalog cache truncated");
  return v;
}

void put_matrix(std::ostream& os, const MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put(os, m(i, j));
}

}  // namespace

void PatternCatalog::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, static_cast<std::uint64_t>(cells_.size()));
  for (const auto& [key, mc] : cells_) {
    put(os, static_cast<std::int32_t>(key.first));
    put(os, static_cast<std::int64_t>(key.second));
    put(os, static_cast<std::int32_t>(mc.n_nodes));
    put(os, mc.omega_max);
    put_matrix(os, mc.K);
    put_matrix(os, mc.Mcons);
    for (Eigen::Index i = 0; i < mc.Mdiag.size(); ++i) put(os, mc.Mdiag[i]);
  }
  if (!os) throw Error("write failure on " + path);
}

void PatternCatalog::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error(path + ": not a catalog cache");
  if (take<std::uint32_t>(is) != kVersion) throw Error(path + ": unsupported cache version");
  const auto count = take<std::uint64_t>(is);
  for (std::uint64_t k = 0; k < count; ++k) {
    MasterCell mc;
    mc.canonical_id = take<std::int32_t>(is);
    const auto nu_q = take<std::int64_t>(is);
    mc.nu = static_cast<double>(nu_q) * 1e-9;
    mc.n_nodes = take<std::int32_t>(is);
    mc.omega_max = take<double>(is);
    mc.edge_mask = canonical_mask(mc.canonical_id);
    const int n = 3 * mc.n_nodes;
    mc.K.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mc.K(i, j) = take<double>(is);
    mc.Mcons.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mc.Mcons(i, j) = take<double>(is);
    mc.Mdiag.resize(n);
    for (int i = 0; i < n; ++i) mc.Mdiag[i] = take<double>(is);
    cells_.insert_or_assign(std::make_pair(mc.canonical_id, nu_q), std::move(mc));
  }
}

}  // namespace octdyn
