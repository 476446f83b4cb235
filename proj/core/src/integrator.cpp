#include "octdyn/integrator.hpp"

#include <cmath>

namespace octdyn {

VectorXd init_history(const VectorXd& U0, const VectorXd& V0, const VectorXd& A0, double dt) {
  if (U0.size() != V0.size() || U0.size() != A0.size())
    throw Error("init_history: vector length mismatch");
  return U0 - dt * V0 + (0.5 * dt * dt) * A0;
}

void cdm_update_range(double* Un, const double* Up, const double* Uc, const double* Rext,
                      const double* Rint, const double* Mdiag, double alpha, double dt,
                      std::size_t begin, std::size_t end) {
  const double dt2 = dt * dt;
  const double cp = 1.0 - 0.5 * alpha * dt;
  const double cn = 1.0 / (1.0 + 0.5 * alpha * dt);
  for (std::size_t i = begin; i < end; ++i) {
    const double a = dt2 * (Rext[i] - Rint[i]) / Mdiag[i];
    Un[i] = (a + 2.0 * Uc[i] - cp * Up[i]) * cn;
  }
}

void cdm_update_indices(double* Un, const double* Up, const double* Uc, const double* Rext,
                        const double* Rint, const double* Mdiag, double alpha, double dt,
                        const DofId* idx, std::size_t count) {
  const double dt2 = dt * dt;
  const double cp = 1.0 - 0.5 * alpha * dt;
  const double cn = 1.0 / (1.0 + 0.5 * alpha * dt);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = idx[k];
    const double a = dt2 * (Rext[i] - Rint[i]) / Mdiag[i];
    Un[i] = (a + 2.0 * Uc[i] - cp * Up[i]) * cn;
  }
}

VectorXd cdm_step(const VectorXd& Up, const VectorXd& Uc, const VectorXd& Rext,
                  const VectorXd& Rint, const VectorXd& Mdiag, double alpha, double dt) {
  const auto n = Up.size();
  if (Uc.size() != n || Rext.size() != n || Rint.size() != n || Mdiag.size() != n)
    throw Error("cdm_step: vector length mismatch");
  if (!(Mdiag.minCoeff() > 0.0)) throw Error("cdm_step: mass entries must be positive");
  VectorXd Un(n);
  cdm_update_range(Un.data(), Up.data(), Uc.data(), Rext.data(), Rint.data(), Mdiag.data(),
                   alpha, dt, 0, static_cast<std::size_t>(n));
  return Un;
}

double critical_time_step(const OctreeMesh& mesh, const PatternCatalog& catalog) {
  if (mesh.cells.empty()) throw Error("critical_time_step: empty mesh");
  double dt_cr = std::numeric_limits<double>::infinity();
  for (const auto& c : mesh.cells) {
    const Material& mat = mesh.materials.get(c.material);
    const MasterCell& master = catalog.get(c.canonical_id, mat.nu);
    const double L = mesh.cell_size(c);
    const double dte = std::sqrt(mat.rho / mat.E) * L * (2.0 / master.omega_max);
    dt_cr = std::min(dt_cr, dte);
  }
  return dt_cr;
}

void DivergenceGuard::check(const double* U, std::size_t n, int step) const {
  const double limit = 1e12 * scale_;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(U[i]) || std::abs(U[i]) > limit)
      throw DivergenceError(step, "divergence detected at step " + std::to_string(step) +
                                      " (dof " + std::to_string(i) + ")");
  }
}

}  // namespace octdyn
