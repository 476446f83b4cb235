#pragma once

#include "octdyn/types.hpp"

namespace octdyn {

enum class SignalKind { Ricker, Triangle, SineBurst };

/// Transient excitation amplitude P(t).
///
/// Ricker wavelet:    P(t) = (1 - ((t-t1)/(t1/5))^2) exp(-((t-t1)/(t1/5))^2 / 2) P0
/// Triangular pulse:  P(t) = (1 - |t/t1 - 1|) P0 on [0, 2 t1], zero after
/// Sine burst:        P(t) = sin(2 pi n t / t1) sin^2(pi t / t1) P0 on [0, t1],
///                    zero after (Hann-windowed sine with n cycles)
struct Signal {
  SignalKind kind = SignalKind::Ricker;
  double t1 = 0.0;  ///< duration parameter [s]
  double P0 = 1.0;  ///< peak amplitude
  int n = 5;        ///< cycle count (sine burst only)

  void validate() const {
    if (!(t1 > 0.0)) throw Error("signal t1 must be positive");
    if (kind == SignalKind::SineBurst && n < 1) throw Error("sine burst needs n >= 1");
  }
};

double signal_eval(const Signal& s, double t);

SignalKind signal_kind_from_string(const std::string& kind);
std::string to_string(SignalKind kind);

}  // namespace octdyn
