#include "octdyn/verify_cube.hpp"

#include <algorithm>
#include <cmath>

#include "octdyn/boundary.hpp"
#include "octdyn/global_assembly.hpp"
#include "octdyn/lanczos.hpp"
#include "octdyn/solver_tables.hpp"

namespace octdyn {

std::vector<double> cube_eigenfrequencies(const CubeSpec& spec, int count) {
  if (count < 1) throw Error("cube_eigenfrequencies: count must be >= 1");
  const double base = spec.E * M_PI * M_PI / (spec.rho * (1.0 - spec.nu * spec.nu) * spec.L * spec.L);
  std::vector<double> omega;
  // Index bound: with gamma <= 1 the smallest count frequencies certainly lie
  // within l^2+m^2+n^2 <= cap after a generous margin.
  const int cap = 3 * static_cast<int>(std::ceil(std::pow(6.0 * count, 2.0 / 3.0))) + 16;
  const int lmax = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cap))));
  for (int l = 0; l <= lmax; ++l)
    for (int m = 0; m <= lmax; ++m)
      for (int n = 0; n <= lmax; ++n) {
        if (l == 0 && m == 0 && n == 0) continue;
        const int k2 = l * l + m * m + n * n;
        if (k2 > cap) continue;
        const int zeros = (l == 0) + (m == 0) + (n == 0);
        std::vector<double> gammas;
        if (zeros == 2)
          gammas = {1.0};
        else if (zeros == 1)
          gammas = {1.0, 0.5 * (1.0 - spec.nu)};
        else
          gammas = {1.0, 0.5 * (1.0 - spec.nu), 0.5 * (1.0 - spec.nu)};
        for (const double g : gammas) omega.push_back(std::sqrt(base * k2 * g));
      }
  std::sort(omega.begin(), omega.end());
  if (static_cast<int>(omega.size()) < count)
    throw Error("cube_eigenfrequencies: enumeration cap too small");
  omega.resize(static_cast<std::size_t>(count));
  return omega;
}

double modal_error(const std::vector<double>& num, const std::vector<double>& ref) {
  if (num.size() != ref.size()) throw Error("modal_error: length mismatch");
  double num2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    num2 += (num[i] - ref[i]) * (num[i] - ref[i]);
    ref2 += ref[i] * ref[i];
  }
  return std::sqrt(num2 / ref2);
}

OctreeMesh make_cube_mesh(const CubeSpec& spec, CubeMeshType type, int base_level) {
  MaterialTable materials;
  materials.set(1, {spec.E, spec.nu, spec.rho});
  OctreeMesh mesh = make_uniform_mesh(spec.L, Vec3::Zero(), base_level, 1, materials);

  if (type != CubeMeshType::Uniform) {
    std::vector<std::uint32_t> refine;
    for (std::uint32_t e = 0; e < mesh.cells.size(); ++e) {
      const Vec3 c = mesh.cell_center(mesh.cells[e]);
      bool inside = true;
      for (int a = 0; a < 3; ++a) {
        const double lo = type == CubeMeshType::OctantRefined ? 0.0 : 0.25 * spec.L;
        const double hi = type == CubeMeshType::OctantRefined ? 0.5 * spec.L : 0.75 * spec.L;
        if (!(c[a] > lo && c[a] < hi)) inside = false;
      }
      if (inside) refine.push_back(e);
    }
    refine_cells(mesh, refine);
    balance_octree(mesh);
  }
  enumerate_nodes(mesh);
  return mesh;
}

CubeModalCase cube_modal_case(const CubeSpec& spec, CubeMeshType type, int base_level,
                              int count, PatternCatalog& catalog) {
  OctreeMesh mesh = make_cube_mesh(spec, type, base_level);
  catalog.ensure(mesh);
  const SolverTables tables = build_solver_tables(mesh, catalog);

  // Roller supports: normal displacement fixed on every face.
  BoundaryConditions bcs;
  const double pad = 1e-9 * spec.L;
  for (NodeId n = 0; n < mesh.n_nodes(); ++n) {
    const Vec3& p = mesh.node_coords[n];
    for (int a = 0; a < 3; ++a)
      if (std::abs(p[a]) < pad || std::abs(p[a] - spec.L) < pad)
        bcs.fixed.push_back(3 * static_cast<DofId>(n) + static_cast<DofId>(a));
  }
  std::sort(bcs.fixed.begin(), bcs.fixed.end());
  bcs.fixed.erase(std::unique(bcs.fixed.begin(), bcs.fixed.end()), bcs.fixed.end());

  const GlobalSystem sys = assemble_global(tables, bcs.fixed);
  const StiffnessFactor Kinv(sys.K);
  const std::vector<double> ref = cube_eigenfrequencies(spec, count);
  const std::vector<double> lmm = smallest_frequencies(Kinv, diagonal_matrix(sys.Mdiag), count);
  const std::vector<double> cmm = smallest_frequencies(Kinv, sys.Mcons, count);

  CubeModalCase out;
  out.base_level = base_level;
  out.n_dof = mesh.n_dof();
  out.err_lmm = modal_error(lmm, ref);
  out.err_cmm = modal_error(cmm, ref);
  return out;
}

double fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& err) {
  if (n.size() != err.size() || n.size() < 2) throw Error("fit_loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(n[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace octdyn
