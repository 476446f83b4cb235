#pragma once

#include <vector>

#include "octdyn/types.hpp"

namespace octdyn {

/// Surface element of a polyhedral cell boundary: a 4-node quadrilateral or a
/// 3-node triangle, referring to cell-local node slots.  Node loops are
/// oriented so the boundary normal points away from the scaling center.
struct SurfaceElement {
  bool quad = false;
  std::array<int, 4> nodes = {-1, -1, -1, -1};
  int size() const { return quad ? 4 : 3; }
};

/// Boundary discretization of one polyhedral element.  Node coordinates are
/// relative to the scaling center, which must see the whole boundary.
struct CellGeometry {
  std::vector<Vec3> nodes;  ///< centered coordinates
  std::vector<SurfaceElement> surface;
  int n_dof() const { return 3 * static_cast<int>(nodes.size()); }
};

/// Isotropic elasticity matrix, Voigt order (xx, yy, zz, yz, zx, xy) with
/// engineering shear strains.
Mat6 elasticity_matrix(double E, double nu);

/// Shape functions and local derivatives of a surface element.
/// Quads live on [-1,1]^2 (counter-clockwise corner order), triangles on the
/// unit reference triangle with area coordinates (1-eta-zeta, eta, zeta).
void shape_eval(bool quad, double eta, double zeta, double* N, double* dN_deta,
                double* dN_dzeta);

/// Strain operators of one surface element at a boundary point (rows in
/// Voigt order, 3 columns per element node).
struct StrainOperators {
  MatrixXd B1;
  MatrixXd B2;
  double detJ = 0.0;
};
StrainOperators strain_operators_at(const CellGeometry& geom, std::size_t element, double eta,
                                    double zeta);

/// Assembled coefficient matrices of one cell (all of size n_dof x n_dof).
struct CellCoefficients {
  MatrixXd E0;  ///< symmetric positive definite
  MatrixXd E1;
  MatrixXd E2;  ///< symmetric
  MatrixXd M0;  ///< symmetric positive definite boundary mass
};

/// Integrates and assembles E0, E1, E2 and M0 over the boundary tessellation.
/// Quadrature: 2x2 Gauss on quads, 3-point symmetric rule on triangles (both
/// exact for the flat faces of cubes).
CellCoefficients cell_coefficients(const CellGeometry& geom, const Mat6& D, double rho);

/// Modal solution of the radial differential equation.  `s` holds the
/// displacement exponents (u ~ xi^s on a bounded cell, Re(s) >= 0); the
/// columns of phi_u/phi_q are the displacement and internal-force modes.
struct RadialSolution {
  VectorXcd s;
  MatrixXcd phi_u;
  MatrixXcd phi_q;
  MatrixXd phi_u_real;  ///< conjugate pairs combined into (Re, Im) columns
  MatrixXd phi_q_real;
  double cond_phi_u = 0.0;
};

/// Reduces the second-order radial equation to first order and keeps the
/// 3n modes bounded at the scaling center.  Throws when the mode count is
/// wrong, conjugate pairing fails, or phi_u is near-defective (cond > 1e12).
RadialSolution radial_eigensolve(const CellCoefficients& coef);

/// Element stiffness from the force/displacement modes.  Symmetrized after
/// verifying the raw asymmetry stays below 1e-8 relative.
MatrixXd stiffness(const RadialSolution& sol);

/// Consistent mass via the analytically integrated modal mass
/// m_ij = (phi_u^T M0 phi_u)_ij / (s_i + s_j + 3).
MatrixXd consistent_mass(const RadialSolution& sol, const MatrixXd& M0);

/// Direction-wise row lumping: entries of rows sharing the coordinate
/// direction (dof index mod 3) are summed onto the diagonal.  Per-direction
/// totals are preserved exactly; nonpositive entries are an error.
VectorXd lump_mass(const MatrixXd& M);

/// Largest frequency of the (K, M_diag) pencil.
double element_max_frequency(const MatrixXd& K, const VectorXd& M_diag);

}  // namespace octdyn
