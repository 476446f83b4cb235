#include "octdyn/spectrum.hpp"

#include <cmath>
#include <complex>

namespace octdyn {

namespace {

// 7-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGx[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                           0.0,
                           0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGw[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                           0.4179591836734694,
                           0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

template <typename F>
double gauss7(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += kGw[i] * f(c + h * kGx[i]);
  return h * s;
}

// Composite quadrature resolving the oscillation of exp(-2 pi i f t) over
// [0, t1] with the Hann-windowed sine carrier.
std::complex<double> burst_transform(const Signal& s, double f) {
  const int periods = static_cast<int>(std::ceil((std::abs(f) * s.t1 + s.n + 2) * 4.0));
  const int panels = std::max(periods, 16);
  std::complex<double> acc(0.0, 0.0);
  const double h = s.t1 / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    const double b = a + h;
    const double hh = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    for (int i = 0; i < 7; ++i) {
      const double t = c + hh * kGx[i];
      const double w = 2.0 * M_PI * f * t;
      acc += kGw[i] * hh * signal_eval(s, t) * std::complex<double>(std::cos(w), -std::sin(w));
    }
  }
  return acc;
}

// Upper integration limit, 50 central frequencies.  The slow 1/f^2 tail of
// the triangle spectrum makes its f1 mildly cutoff-dependent; this limit is
// part of the f1 definition.
double integration_limit(const Signal& s) { return 50.0 * central_frequency(s); }

}  // namespace

double spectrum_amplitude(const Signal& s, double f) {
  s.validate();
  if (f < 0.0) throw Error("spectrum frequency must be nonnegative");
  switch (s.kind) {
    case SignalKind::Ricker: {
      const double fm = central_frequency(s);
      const double x = f / fm;
      return (2.0 / std::sqrt(M_PI)) * x * x * std::exp(-x * x);
    }
    case SignalKind::Triangle: {
      const double x = M_PI * f * s.t1;
      if (x == 0.0) return 1.0;
      const double sc = std::sin(x) / x;
      return sc * sc;
    }
    case SignalKind::SineBurst:
      return std::abs(burst_transform(s, f)) / s.P0;
  }
  return 0.0;
}

double central_frequency(const Signal& s) {
  switch (s.kind) {
    case SignalKind::Ricker:
      return 5.0 / (std::sqrt(2.0) * M_PI * s.t1);
    case SignalKind::Triangle:
      return 1.0 / s.t1;
    case SignalKind::SineBurst:
      return static_cast<double>(s.n) / s.t1;
  }
  return 0.0;
}

double critical_frequency(const Signal& s, double energy_fraction) {
  s.validate();
  if (!(energy_fraction > 0.0 && energy_fraction < 1.0))
    throw Error("energy fraction must lie in (0,1)");

  const double fmax = integration_limit(s);
  const double df = 0.25 * central_frequency(s) > 0 ? 0.25 * central_frequency(s) : fmax / 400.0;
  const int panels = static_cast<int>(std::ceil(fmax / df));
  if (panels <= 0) throw Error("spectrum integration failed to converge");

  auto amp = [&](double f) { return spectrum_amplitude(s, f); };

  std::vector<double> panel_area(static_cast<std::size_t>(panels));
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * fmax / panels;
    const double b = (p + 1) * fmax / panels;
    panel_area[static_cast<std::size_t>(p)] = gauss7(amp, a, b);
    total += panel_area[static_cast<std::size_t>(p)];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error("spectrum integration failed to converge");

  const double target = energy_fraction * total;
  double cum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double next = cum + panel_area[static_cast<std::size_t>(p)];
    if (next >= target) {
      // Bisect the crossing inside this panel.
      double lo = p * fmax / panels;
      double hi = (p + 1) * fmax / panels;
      const double base = cum;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double part = base + gauss7(amp, p * fmax / panels, mid);
        (part >= target ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    cum = next;
  }
  throw Error("spectrum integration failed to converge");
}

WaveProperties wave_properties(double E, double nu, double rho, double f1) {
  if (!(E > 0.0) || !(rho > 0.0) || !(nu > -1.0 && nu < 0.5))
    throw Error("inadmissible material for wave speeds (nu=0.5 makes v_P singular)");
  if (!(f1 > 0.0)) throw Error("f1 must be positive");
  WaveProperties w;
  w.v_P = std::sqrt(E * (1.0 - nu) / (rho * (1.0 + nu) * (1.0 - 2.0 * nu)));
  w.v_S = std::sqrt(E / (2.0 * rho * (1.0 + nu)));
  w.f1 = f1;
  w.L_P = w.v_P / f1;
  w.L_S = w.v_S / f1;
  return w;
}

WaveProperties wave_properties(double E, double nu, double rho, const Signal& s,
                               double energy_fraction) {
  WaveProperties w = wave_properties(E, nu, rho, critical_frequency(s, energy_fraction));
  w.f_m = central_frequency(s);
  return w;
}

double recommended_element_size(const WaveProperties& w, int nodes_per_wavelength) {
  if (nodes_per_wavelength < 2) throw Error("nodes_per_wavelength must be >= 2");
  return std::min(w.L_P, w.L_S) / (nodes_per_wavelength - 1);
}

}  // namespace octdyn
