#include "octdyn/timing.hpp"

#include <algorithm>
#include <cstdio>

namespace octdyn {

TimingReport TimingReport::from_clocks(std::vector<WorkerClock> clocks) {
  TimingReport r;
  r.n_workers = static_cast<int>(clocks.size());
  r.workers = std::move(clocks);
  if (r.workers.empty()) return r;
  double start = r.workers.front().start, end = r.workers.front().end;
  for (const auto& w : r.workers) {
    r.t_C += w.t_C;
    r.t_W += w.t_W;
    start = std::min(start, w.start);
    end = std::max(end, w.end);
  }
  r.t_C /= r.n_workers;
  r.t_W /= r.n_workers;
  r.t_T = end - start;
  return r;
}

std::string format2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string TimingReport::csv_header() { return "N,t_C,t_W,t_T,s,eta"; }

std::string TimingReport::csv_row(double t_T_1) const {
  const double s = speedup(t_T_1, t_T);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f", n_workers, t_C, t_W, t_T, s,
                efficiency(s, n_workers));
  return buf;
}

std::string TimingReport::table_header() {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%6s %12s %12s %12s %8s %6s", "N", "t_C [s]", "t_W [s]",
                "t_T [s]", "s", "eta");
  return buf;
}

std::string TimingReport::table_row(double t_T_1) const {
  const double s = speedup(t_T_1, t_T);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%6d %12.2f %12.2f %12.2f %8.2f %6.2f", n_workers, t_C, t_W,
                t_T, s, efficiency(s, n_workers));
  return buf;
}

}  // namespace octdyn
