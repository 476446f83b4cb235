#pragma once

#include "octdyn/signal.hpp"
#include "octdyn/types.hpp"

namespace octdyn {

/// Amplitude spectrum shape A(f) of a signal (normalization-free; only
/// cumulative-area ratios are consumed downstream).
/// Ricker and triangle use their closed forms, the sine burst is evaluated by
/// a numeric Fourier transform.
double spectrum_amplitude(const Signal& s, double f);

/// Central frequency: 5/(sqrt(2) pi t1) for the Ricker wavelet, n/t1 for the
/// sine burst, 1/t1 for the triangular pulse (scale parameter only).
double central_frequency(const Signal& s);

/// Smallest f1 such that the area under A(f) on [0, f1] reaches
/// `energy_fraction` of the total area.
double critical_frequency(const Signal& s, double energy_fraction);

/// Bulk wave speeds, wavelengths and frequency markers of a material/signal
/// combination.
struct WaveProperties {
  double v_P = 0.0;  ///< dilatational wave speed [m/s]
  double v_S = 0.0;  ///< shear wave speed [m/s]
  double L_P = 0.0;  ///< dilatational wavelength at f1 [m]
  double L_S = 0.0;  ///< shear wavelength at f1 [m]
  double f1 = 0.0;   ///< critical frequency [Hz]
  double f_m = 0.0;  ///< central frequency [Hz] (0 when no signal given)
};

WaveProperties wave_properties(double E, double nu, double rho, double f1);

/// Convenience overload deriving f1 from the signal spectrum.
WaveProperties wave_properties(double E, double nu, double rho, const Signal& s,
                               double energy_fraction);

/// Advisory mesh sizing: h_max = min(L_P, L_S) / (nodes_per_wavelength - 1)
/// for linear elements.
double recommended_element_size(const WaveProperties& w, int nodes_per_wavelength);

}  // namespace octdyn
