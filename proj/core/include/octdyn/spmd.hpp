#pragma once

#include "octdyn/exchange.hpp"
#include "octdyn/timing.hpp"
#include "octdyn/transient.hpp"

namespace octdyn {

/// Worker transports.  Both run the same bulk-synchronous step plan and
/// produce bitwise-identical results:
///   Sim  - in-process deterministic simulation (workers advance in lockstep
///          phases on one thread); the CI/testing backend.
///   Proc - forked OS processes over shared memory with one reduction
///          barrier per phase; the throughput backend.
enum class Backend { Sim, Proc };

Backend backend_from_string(const std::string& name);

struct SpmdResult {
  TransientResult result;
  TimingReport timing;
};

/// Bulk-synchronous SPMD run: per step every worker computes its local
/// forces, interface force sums are folded in canonical order, and each
/// worker updates its owned displacement chunk.  Probe output is bitwise
/// identical to run_transient for any worker count.
SpmdResult spmd_run(const TransientSetup& setup, const Partition& partition, int n_workers,
                    Backend backend, const StartState* resume = nullptr);

}  // namespace octdyn
