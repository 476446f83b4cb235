#include "octdyn/signal.hpp"

#include <cmath>

namespace octdyn {

double signal_eval(const Signal& s, double t) {
  switch (s.kind) {
    case SignalKind::Ricker: {
      const double x = (t - s.t1) / (s.t1 / 5.0);
      return (1.0 - x * x) * std::exp(-0.5 * x * x) * s.P0;
    }
    case SignalKind::Triangle: {
      if (t < 0.0 || t > 2.0 * s.t1) return 0.0;
      return (1.0 - std::abs(t / s.t1 - 1.0)) * s.P0;
    }
    case SignalKind::SineBurst: {
      if (t < 0.0 || t > s.t1) return 0.0;
      const double w = std::sin(M_PI * t / s.t1);
      return std::sin(2.0 * M_PI * s.n * t / s.t1) * w * w * s.P0;
    }
  }
  return 0.0;
}

SignalKind signal_kind_from_string(const std::string& kind) {
  if (kind == "ricker") return SignalKind::Ricker;
  if (kind == "triangle") return SignalKind::Triangle;
  if (kind == "sine_burst") return SignalKind::SineBurst;
  throw Error("unknown signal kind: " + kind);
}

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Ricker: return "ricker";
    case SignalKind::Triangle: return "triangle";
    case SignalKind::SineBurst: return "sine_burst";
  }
  return "?";
}

}  // namespace octdyn
