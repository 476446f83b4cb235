#pragma once

#include <vector>

#include "octdyn/catalog.hpp"
#include "octdyn/octree.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Cube with rollers on all faces (normal displacement fixed).
struct CubeSpec {
  double E = 1000.0;
  double nu = 0.3;
  double rho = 1.0;
  double L = 8.0;
};

/// Analytic eigenfrequencies omega = sqrt(E pi^2 / (rho (1-nu^2) L^2)
/// (l^2+m^2+n^2) gamma), sorted ascending with the gamma multiplicities; the
/// all-zero triple has no solution.
std::vector<double> cube_eigenfrequencies(const CubeSpec& spec, int count);

/// L2 norm of the relative frequency error:
/// sqrt(sum (w_num - w_ref)^2 / sum w_ref^2).
double modal_error(const std::vector<double>& num, const std::vector<double>& ref);

/// Mesh families for the convergence study: uniform cells, one refined
/// octant, and a refined center block (the latter two produce hanging-node
/// patterns).
enum class CubeMeshType { Uniform = 1, OctantRefined = 2, CenterRefined = 3 };

OctreeMesh make_cube_mesh(const CubeSpec& spec, CubeMeshType type, int base_level);

struct CubeModalCase {
  int base_level = 0;
  std::size_t n_dof = 0;
  double err_lmm = 0.0;
  double err_cmm = 0.0;
};

/// Numeric modal analysis (lumped and consistent mass) of one mesh against
/// the first `count` analytic frequencies.
CubeModalCase cube_modal_case(const CubeSpec& spec, CubeMeshType type, int base_level,
                              int count, PatternCatalog& catalog);

/// Least-squares slope of log(err) vs log(n_dof).
double fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& err);

}  // namespace octdyn
