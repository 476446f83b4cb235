#include "octdyn/verify_beam.hpp"

#include <cmath>

#include "octdyn/boundary.hpp"
#include "octdyn/solver_tables.hpp"
#include "octdyn/spectrum.hpp"
#include "octdyn/transient.hpp"

namespace octdyn {

namespace {

constexpr double kGx[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                           0.0,
                           0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGw[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                           0.4179591836734694,
                           0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

}  // namespace

double signal_eval_ddot(const Signal& s, double t) {
  if (s.kind != SignalKind::Ricker)
    throw Error("signal_eval_ddot: closed form available for the Ricker wavelet only");
  const double tau = s.t1 / 5.0;
  const double x = (t - s.t1) / tau;
  return s.P0 * std::exp(-0.5 * x * x) * (-x * x * x * x + 6.0 * x * x - 3.0) / (tau * tau);
}

RodReference::RodReference(double E, double rho, double area, double length,
                           std::function<double(double)> force,
                           std::function<double(double)> force_ddot, double cutoff_hz)
    : E_(E),
      rho_(rho),
      area_(area),
      length_(length),
      force_(std::move(force)),
      force_ddot_(std::move(force_ddot)) {
  const double c = std::sqrt(E_ / rho_);
  // omega_k = (2k-1) pi c / (2L); keep modes below the cutoff.
  n_modes_ = static_cast<int>(std::floor((cutoff_hz * 4.0 * length_ / c + 1.0) / 2.0));
  n_modes_ = std::max(n_modes_, 8);
}

void RodReference::evaluate(const std::vector<double>& xs, const std::vector<double>& times,
                            std::vector<std::vector<double>>& u,
                            std::vector<std::vector<double>>& a) const {
  const double c = std::sqrt(E_ / rho_);
  const double Mk = rho_ * area_ * length_ / 2.0;  // modal mass (uniform for all modes)
  const std::size_t nt = times.size();
  const std::size_t nx = xs.size();

  // Quasi-static carrier F(t) x / (EA); the modal sum only carries the
  // deviation q_k - Q_k/(M w^2), which decays fast in k.
  u.assign(nx, std::vector<double>(nt, 0.0));
  a.assign(nx, std::vector<double>(nt, 0.0));
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t it = 0; it < nt; ++it) {
      u[ix][it] = force_(times[it]) * xs[ix] / (E_ * area_);
      a[ix][it] = force_ddot_(times[it]) * xs[ix] / (E_ * area_);
    }

  for (int k = 1; k <= n_modes_; ++k) {
    const double lam = (2.0 * k - 1.0) * M_PI / (2.0 * length_);
    const double om = lam * c;
    const double XL = std::sin(lam * length_);  // +-1 at the loaded end

    // Cumulative C(t) = int F cos(om tau), S(t) = int F sin(om tau) marched
    // over the output grid with oscillation-resolving Gauss panels.
    std::vector<double> q(nt, 0.0), qdd(nt, 0.0);
    double C = 0.0, S = 0.0;
    double prev_t = 0.0;
    for (std::size_t it = 0; it < nt; ++it) {
      const double t = times[it];
      if (t > prev_t) {
        const int panels = 1 + static_cast<int>(om * (t - prev_t) / 1.0);
        const double hseg = (t - prev_t) / panels;
        for (int p = 0; p < panels; ++p) {
          const double a0 = prev_t + p * hseg;
          const double mid = a0 + 0.5 * hseg;
          for (int g = 0; g < 7; ++g) {
            const double tau = mid + 0.5 * hseg * kGx[g];
            const double F = XL * force_(tau);
            const double w = 0.5 * hseg * kGw[g];
            C += w * F * std::cos(om * tau);
            S += w * F * std::sin(om * tau);
          }
        }
        prev_t = t;
      }
      const double conv = std::sin(om * t) * C - std::cos(om * t) * S;
      q[it] = conv / (Mk * om);
      qdd[it] = XL * force_(t) / Mk - om * om * q[it];
    }

    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double X = std::sin(lam * xs[ix]);
      for (std::size_t it = 0; it < nt; ++it) {
        const double Qk = XL * force_(times[it]);
        const double Qk_dd = XL * force_ddot_(times[it]);
        u[ix][it] += X * (q[it] - Qk / (Mk * om * om));
        a[ix][it] += X * (qdd[it] - Qk_dd / (Mk * om * om));
      }
    }
  }
}

OctreeMesh make_beam_mesh(const BeamSpec& spec, double h) {
  const int level = static_cast<int>(std::lround(std::log2(spec.length / h)));
  if (std::abs(spec.length / h - std::ldexp(1.0, level)) > 1e-9)
    throw Error("beam mesh size must divide the length dyadically");
  MaterialTable materials;
  materials.set(1, {spec.E, spec.nu, spec.rho});
  PrimitiveScene scene;
  scene.origin = Vec3::Zero();
  scene.root_size = spec.length;
  scene.items.push_back(BoxPrimitive{Vec3(0, 0, 0), Vec3(spec.length, spec.width, spec.width), 1});
  OctreeMesh mesh = build_octree(scene, materials, BuildCriteria{level, 0});
  balance_octree(mesh);
  enumerate_nodes(mesh);
  return mesh;
}

BeamCase beam_case(const BeamSpec& spec, double h, PatternCatalog& catalog) {
  OctreeMesh mesh = make_beam_mesh(spec, h);
  catalog.ensure(mesh);
  const SolverTables tables = build_solver_tables(mesh, catalog);

  TransientSetup setup;
  setup.tables = &tables;
  setup.bcs.signals.push_back(spec.load);
  fix_nodes_in_box(mesh, BoxRegion{Vec3(0, 0, 0), Vec3(0, spec.width, spec.width)}, 0x7,
                   setup.bcs);
  // Pressure on the free end acting along -x (compression), mirrored exactly
  // in the rod reference force.
  BoxRegion end{Vec3(spec.length, 0, 0), Vec3(spec.length, spec.width, spec.width)};
  const double area = apply_surface_traction(mesh, end, Vec3(-1.0, 0, 0), 0, setup.bcs);
  if (std::abs(area - spec.width * spec.width) > 1e-8 * spec.width * spec.width)
    throw Error("beam end face area mismatch");

  setup.time.duration = spec.duration;

  const double mid = 0.5 * spec.width;
  for (const double x : spec.probe_x) {
    Probe p;
    p.name = "x" + std::to_string(x);
    p.node = nearest_node(mesh, Vec3(x, mid, mid));
    setup.probes.push_back(p);
  }

  const TransientResult res = run_transient(setup);

  // Rod reference at the numerical output times.
  const Signal load = spec.load;
  const double A = spec.width * spec.width;
  auto force = [load, A](double t) { return -A * signal_eval(load, t); };
  auto force_ddot = [load, A](double t) { return -A * signal_eval_ddot(load, t); };
  const double f1 = critical_frequency(spec.load, 0.95);
  const RodReference rod(spec.E, spec.rho, A, spec.length, force, force_ddot, 20.0 * f1);
  std::vector<std::vector<double>> u_ref, a_ref;
  rod.evaluate(spec.probe_x, res.probes.front().t, u_ref, a_ref);

  double du2 = 0, u2 = 0, da2 = 0, a2 = 0;
  for (std::size_t p = 0; p < res.probes.size(); ++p)
    for (std::size_t it = 0; it < res.probes[p].t.size(); ++it) {
      const double un = res.probes[p].rows[it][0];  // u_x
      const double an = res.probes[p].rows[it][3];  // a_x
      du2 += (un - u_ref[p][it]) * (un - u_ref[p][it]);
      u2 += u_ref[p][it] * u_ref[p][it];
      da2 += (an - a_ref[p][it]) * (an - a_ref[p][it]);
      a2 += a_ref[p][it] * a_ref[p][it];
    }

  BeamCase out;
  out.h = h;
  out.n_dof = mesh.n_dof();
  out.err_u = std::sqrt(du2 / u2);
  out.err_a = std::sqrt(da2 / a2);
  return out;
}

}  // namespace octdyn
