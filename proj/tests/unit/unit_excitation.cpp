#include <doctest.h>

#include <cmath>

#include "octdyn/signal.hpp"
#include "octdyn/spectrum.hpp"

using namespace octdyn;

namespace {
Signal ricker(double t1 = 0.015) { return {SignalKind::Ricker, t1, 1.0, 5}; }
Signal triangle(double t1 = 0.25) { return {SignalKind::Triangle, t1, 1.0, 5}; }
Signal burst(double t1 = 5e-5, int n = 5) { return {SignalKind::SineBurst, t1, 1.0, n}; }
}  // namespace

TEST_CASE("signal closed forms at characteristic points") {
  CHECK(signal_eval(ricker(), 0.015) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(signal_eval(triangle(), 0.5) == 0.0);
  CHECK(signal_eval(triangle(), 0.25) == doctest::Approx(1.0));
  CHECK(signal_eval(triangle(), 0.6) == 0.0);
  CHECK(signal_eval(burst(), 0.0) == doctest::Approx(0.0));
  CHECK(signal_eval(burst(), 5e-5) == doctest::Approx(0.0));
}

TEST_CASE("amplitudes never exceed P0") {
  for (const Signal& s : {ricker(), triangle(), burst()}) {
    for (int i = 0; i <= 2000; ++i) {
      const double t = 2.5 * s.t1 * i / 2000.0;
      CHECK(std::abs(signal_eval(s, t)) <= s.P0 * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("critical frequencies match the published rules within 5%") {
  const double t1r = 0.015;
  CHECK(critical_frequency(ricker(t1r), 0.95) ==
        doctest::Approx(2.2 / t1r).epsilon(0.05));

  const double t1t = 0.25;
  CHECK(critical_frequency(triangle(t1t), 0.95) ==
        doctest::Approx(1.8 / t1t).epsilon(0.05));

  const double t1b = 5e-5;
  CHECK(critical_frequency(burst(t1b, 5), 0.85) ==
        doctest::Approx(5.8 / t1b).epsilon(0.05));
}

TEST_CASE("Ricker spectrum peaks at the central frequency") {
  const Signal s = ricker(0.015);
  const double fm = central_frequency(s);
  CHECK(fm == doctest::Approx(5.0 / (std::sqrt(2.0) * M_PI * 0.015)));
  // Numeric maximization around fm.
  double best_f = 0.0, best_a = -1.0;
  for (int i = 1; i < 4000; ++i) {
    const double f = 3.0 * fm * i / 4000.0;
    const double a = spectrum_amplitude(s, f);
    CHECK(a >= 0.0);
    if (a > best_a) {
      best_a = a;
      best_f = f;
    }
  }
  CHECK(best_f == doctest::Approx(fm).epsilon(0.002));
}

TEST_CASE("wave speeds and wavelengths") {
  // Beam material: E=10 kPa, nu=0, rho=1 -> v_P = 100 m/s.
  const WaveProperties beam = wave_properties(1e4, 0.0, 1.0, 150.0);
  CHECK(beam.v_P == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(beam.L_P == doctest::Approx(100.0 / 150.0).epsilon(1e-12));
  CHECK(beam.v_P / beam.v_S == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // Frame material: E=17 GPa, nu=0.2, rho=2400.
  const WaveProperties frame = wave_properties(17e9, 0.2, 2400.0, 8.0);
  CHECK(frame.v_P == doctest::Approx(2805.0).epsilon(1e-3));
  CHECK(frame.v_S == doctest::Approx(1718.0).epsilon(1e-3));

  CHECK_THROWS_AS(wave_properties(1e9, 0.5, 1000.0, 1.0), Error);
}

TEST_CASE("element size recommendation") {
  WaveProperties w;
  w.L_P = 52.2;
  w.L_S = 36.9;
  // 10-elements-per-wavelength rule of thumb (11 nodes): ~3.7 m, paper used 4 m.
  CHECK(recommended_element_size(w, 11) == doctest::Approx(3.69).epsilon(0.01));
  // Degenerate bound: 2 nodes per wavelength -> h equals the wavelength.
  CHECK(recommended_element_size(w, 2) == doctest::Approx(36.9));
  CHECK_THROWS_AS(recommended_element_size(w, 1), Error);

  // Beam sizing: L = 0.67 m at 10 elements -> 0.067 m (paper's coarsest 0.0625).
  WaveProperties beam;
  beam.L_P = beam.L_S = 0.67;
  CHECK(recommended_element_size(beam, 11) == doctest::Approx(0.067).epsilon(0.01));
}

TEST_CASE("spectra stay nonnegative and integrable") {
  for (const Signal& s : {ricker(), triangle(), burst()}) {
    const double fm = central_frequency(s);
    for (int i = 0; i <= 200; ++i)
      CHECK(spectrum_amplitude(s, 10.0 * fm * i / 200.0) >= 0.0);
  }
  CHECK_THROWS_AS(critical_frequency(ricker(), 1.5), Error);
}
