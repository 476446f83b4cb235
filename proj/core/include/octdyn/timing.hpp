#pragma once

#include <string>
#include <vector>

namespace octdyn {

/// Wall-clock bookkeeping of one worker over the stepping loop
/// (initialization excluded).
struct WorkerClock {
  double t_C = 0.0;   ///< calculation time [s]
  double t_W = 0.0;   ///< waiting + communication time [s]
  double start = 0.0; ///< loop entry stamp [s]
  double end = 0.0;   ///< loop exit stamp [s]
};

/// Strong-scaling report following the paper's conventions: all workers are
/// taken to commence when the earliest starts and finish with the slowest;
/// t_C and t_W are averaged over workers.
struct TimingReport {
  int n_workers = 1;
  std::vector<WorkerClock> workers;
  double t_C = 0.0;
  double t_W = 0.0;
  double t_T = 0.0;

  static TimingReport from_clocks(std::vector<WorkerClock> clocks);

  static double speedup(double t_T_1, double t_T_N) { return t_T_1 / t_T_N; }
  static double efficiency(double s, int n) { return s / n; }

  /// "N,t_C,t_W,t_T,s,eta" CSV row; s and eta derive from the reference
  /// serial total time (pass t_T itself for the one-worker row).
  std::string csv_row(double t_T_1) const;
  static std::string csv_header();

  /// Human-readable table row with two-decimal formatting as in the paper's
  /// tables.
  std::string table_row(double t_T_1) const;
  static std::string table_header();
};

/// Two-decimal fixed formatting used by the report tables.
std::string format2(double x);

}  // namespace octdyn
