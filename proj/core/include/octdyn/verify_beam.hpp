#pragma once

#include <functional>
#include <vector>

#include "octdyn/catalog.hpp"
#include "octdyn/signal.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Fixed-free rod under an end force F(t) at x = L: modal superposition with
/// Duhamel integrals per mode (semi-analytic reference for the beam case).
/// The quasi-static part of the response is carried by a closed-form term
/// (mode acceleration), so the series over the retained modes converges
/// rapidly despite the end load.
class RodReference {
 public:
  /// `force(t)` is the total axial end force [N] and `force_ddot` its second
  /// time derivative; modes are truncated at `cutoff_hz`.
  RodReference(double E, double rho, double area, double length,
               std::function<double(double)> force, std::function<double(double)> force_ddot,
               double cutoff_hz);

  int n_modes() const { return n_modes_; }

  /// Displacement and acceleration histories at positions xs over the time
  /// grid (both sized xs.size() x times.size(), row-major per position).
  void evaluate(const std::vector<double>& xs, const std::vector<double>& times,
                std::vector<std::vector<double>>& u, std::vector<std::vector<double>>& a) const;

 private:
  double E_, rho_, area_, length_;
  std::function<double(double)> force_;
  std::function<double(double)> force_ddot_;
  int n_modes_;
};

/// Closed-form second time derivative of a signal (available for the Ricker
/// wavelet; used by the rod reference's quasi-static acceleration term).
double signal_eval_ddot(const Signal& s, double t);

/// One beam convergence point: uniform mesh of size h, serial transient run,
/// L2 history errors of displacement and acceleration against the rod
/// reference over the four probe stations.
struct BeamCase {
  double h = 0.0;
  std::size_t n_dof = 0;
  double err_u = 0.0;
  double err_a = 0.0;
};

struct BeamSpec {
  double E = 1.0e4;   ///< 10 kPa
  double nu = 0.0;
  double rho = 1.0;
  double length = 16.0;
  double width = 1.0;
  Signal load{SignalKind::Ricker, 0.015, 1.0, 5};  ///< end pressure [Pa]
  double duration = 0.4;
  std::vector<double> probe_x = {4.0, 8.0, 12.0, 16.0};
};

BeamCase beam_case(const BeamSpec& spec, double h, PatternCatalog& catalog);

/// Builds the beam mesh (box primitive in a cubic root of size `length`).
OctreeMesh make_beam_mesh(const BeamSpec& spec, double h);

}  // namespace octdyn
