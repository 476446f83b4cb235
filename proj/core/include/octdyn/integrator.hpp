#pragma once

#include "octdyn/catalog.hpp"
#include "octdyn/octree.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

struct TimeSettings {
  double dt = 0.0;       ///< fixed step [s]; 0 selects safety * dt_cr
  double duration = 0.0; ///< total simulated time [s]
  double alpha = 0.0;    ///< mass-proportional damping coefficient [1/s]
  double safety = 0.95;  ///< multiplier on the critical step when dt == 0
};

/// Raised when the divergence detector trips.
class DivergenceError : public Error {
 public:
  DivergenceError(int step, const std::string& what) : Error(what), step(step) {}
  int step;
};

/// Fictitious start-up point U_{-1} = U0 - dt V0 + dt^2/2 A0.
VectorXd init_history(const VectorXd& U0, const VectorXd& V0, const VectorXd& A0, double dt);

/// Central difference update on the index range [begin, end):
///   U_n = (dt^2 (R_ext - R_int) / M + 2 U_c - (1 - a dt/2) U_p) / (1 + a dt/2)
/// The expression is evaluated componentwise in a fixed order so arbitrary
/// range splits reproduce the serial result bitwise.
void cdm_update_range(double* Un, const double* Up, const double* Uc, const double* Rext,
                      const double* Rint, const double* Mdiag, double alpha, double dt,
                      std::size_t begin, std::size_t end);

/// Same update on a scattered index set.
void cdm_update_indices(double* Un, const double* Up, const double* Uc, const double* Rext,
                        const double* Rint, const double* Mdiag, double alpha, double dt,
                        const DofId* idx, std::size_t count);

/// Single-vector convenience wrapper.
VectorXd cdm_step(const VectorXd& Up, const VectorXd& Uc, const VectorXd& Rext,
                  const VectorXd& Rint, const VectorXd& Mdiag, double alpha, double dt);

/// Element-level critical-step estimate: min over elements of
/// sqrt(rho/E) * L * 2 / omega_max_unit.
double critical_time_step(const OctreeMesh& mesh, const PatternCatalog& catalog);

/// Divergence detector: trips on non-finite entries or when |U|_inf exceeds
/// 10^12 times the initial load scale.
class DivergenceGuard {
 public:
  void set_scale(double initial_scale) { scale_ = std::max(initial_scale, 1e-30); }
  double scale() const { return scale_; }
  void check(const double* U, std::size_t n, int step) const;

 private:
  double scale_ = 1.0;
};

}  // namespace octdyn
