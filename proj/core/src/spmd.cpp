#include "octdyn/spmd.hpp"

#include <sys/mman.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

namespace octdyn {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Barrier usable from threads or forked processes (plain atomics in shared
// memory).  Waiters bail out when the error flag rises so a crashed worker
// cannot deadlock the rest.
struct SpinBarrier {
  std::atomic<int> arrived{0};
  std::atomic<int> generation{0};
  int parties = 1;

  bool wait(const std::atomic<int>& error_flag) {
    const int gen = generation.load(std::memory_order_acquire);
    if (arrived.fetch_add(1, std::memory_order_acq_rel) == parties - 1) {
      arrived.store(0, std::memory_order_relaxed);
      generation.fetch_add(1, std::memory_order_release);
      return true;
    }
    int spins = 0;
    while (generation.load(std::memory_order_acquire) == gen) {
      if (error_flag.load(std::memory_order_relaxed) != 0) return false;
      if (++spins > 2048) {
        std::this_thread::yield();
        spins = 0;
      }
    }
    return true;
  }
};

struct Control {
  std::atomic<int> abort{0};       // 1 = divergence
  std::atomic<int> abort_step{0};
  std::atomic<int> error{0};       // worker exception
  SpinBarrier barrier;
  char error_msg[2048] = {0};
};

struct StepPlan {
  const SolverTables* tables = nullptr;
  const ExchangePlan* plan = nullptr;
  const BoundaryConditions* bcs = nullptr;
  double dt = 0.0;
  double alpha = 0.0;
  double t0 = 0.0;
  int step0 = 0;
  int n_steps = 0;
  std::size_t n_dof = 0;
  double guard_scale = 1.0;
  // probe/snapshot spec (worker 0 only)
  const std::vector<Probe>* probes = nullptr;
  int probe_cadence = 1;
  int snapshot_cadence = 0;
  const std::function<void(int, double, const VectorXd&)>* snapshot_sink = nullptr;
  std::size_t probe_rows_cap = 0;
};

struct SharedBuffers {
  double* B[4] = {nullptr, nullptr, nullptr, nullptr};  // U ring + closing scratch
  double* slots = nullptr;
  double* probe_rows = nullptr;  // [probe][row][7]
  WorkerClock* clocks = nullptr;
  Control* control = nullptr;
};

struct WorkerScratch {
  VectorXd R;
  VectorXd Rext;
  std::vector<double> flat;
  std::size_t probe_row_count = 0;  // worker 0 only
};

void emit_row(const StepPlan& sp, const SharedBuffers& sh, WorkerScratch& ws, int step,
              bool closing) {
  const double* Up = sh.B[step % 3];
  const double* Uc = sh.B[(step + 1) % 3];
  const double* Un = closing ? sh.B[3] : sh.B[(step + 2) % 3];
  const double t = sp.t0 + step * sp.dt;
  if (sp.probes && !sp.probes->empty() && (closing || step % sp.probe_cadence == 0)) {
    const double inv_dt2 = 1.0 / (sp.dt * sp.dt);
    const std::size_t row = ws.probe_row_count++;
    if (row >= sp.probe_rows_cap) throw Error("probe row capacity exceeded");
    for (std::size_t p = 0; p < sp.probes->size(); ++p) {
      double* out = sh.probe_rows + (p * sp.probe_rows_cap + row) * 7;
      const DofId base = 3 * static_cast<DofId>((*sp.probes)[p].node);
      out[0] = t;
      for (int c = 0; c < 3; ++c) {
        out[1 + c] = Uc[base + static_cast<DofId>(c)];
        out[4 + c] = (Un[base + static_cast<DofId>(c)] - 2.0 * Uc[base + static_cast<DofId>(c)] +
                      Up[base + static_cast<DofId>(c)]) *
                     inv_dt2;
      }
    }
  }
  if (sp.snapshot_cadence > 0 && sp.snapshot_sink && *sp.snapshot_sink &&
      step % sp.snapshot_cadence == 0) {
    Eigen::Map<const VectorXd> U(Uc, static_cast<Eigen::Index>(sp.n_dof));
    (*sp.snapshot_sink)(sp.step0 + step, t, VectorXd(U));
  }
}

void phase_compute(const StepPlan& sp, const SharedBuffers& sh, WorkerScratch& ws, int w,
                   int step) {
  const auto& plan = *sp.plan;
  const std::size_t wi = static_cast<std::size_t>(w);
  const double* Uc = sh.B[(step + 1) % 3];

  // Worker 0 flushes the previous step's output while the buffers are still
  // intact (they are overwritten only in the update phase behind a barrier).
  if (w == 0 && step > 0) emit_row(sp, sh, ws, step - 1, false);

  ws.R.setZero();
  compute_element_forces(*sp.tables, Uc, plan.compute_elements[wi].data(),
                         plan.compute_offset[wi].data(), plan.compute_elements[wi].size(),
                         ws.flat.data());

  const auto& elems = plan.elements[wi];
  const auto& route = plan.scatter_route[wi];
  std::size_t pos = 0;
  for (std::size_t k = 0; k < elems.size(); ++k) {
    const ElementDofMap& map = sp.tables->maps[elems[k]];
    const double* f = ws.flat.data() + plan.flat_offset[wi][k];
    const int n = map.size();
    for (int i = 0; i < n; ++i, ++pos) {
      const double v = map.sign[static_cast<std::size_t>(i)] * f[i];
      const std::int64_t r = route[pos];
      if (r < 0)
        ws.R[static_cast<Eigen::Index>(map.dof[static_cast<std::size_t>(i)])] += v;
      else
        sh.slots[r] = v;
    }
  }
}

void phase_update(const StepPlan& sp, const SharedBuffers& sh, WorkerScratch& ws, int w,
                  int step, bool closing) {
  const auto& plan = *sp.plan;
  const std::size_t wi = static_cast<std::size_t>(w);
  const double* Up = sh.B[step % 3];
  const double* Uc = sh.B[(step + 1) % 3];
  double* Un = closing ? sh.B[3] : sh.B[(step + 2) % 3];

  // Interface force sums, folded in ascending-element slot order.
  for (const auto idx : plan.fold[wi]) {
    double sum = 0.0;
    for (std::uint32_t s = plan.slot_offset[idx]; s < plan.slot_offset[idx + 1]; ++s)
      sum += sh.slots[s];
    ws.R[static_cast<Eigen::Index>(plan.interface_dofs[idx])] = sum;
  }

  const double t = sp.t0 + step * sp.dt;
  const std::vector<double> sig = sp.bcs->signal_values(t);
  const auto& loads = plan.owned_loads[wi];
  for (const auto& l : loads) ws.Rext[static_cast<Eigen::Index>(l.dof)] = 0.0;
  for (const auto& l : loads)
    ws.Rext[static_cast<Eigen::Index>(l.dof)] +=
        l.amplitude * sig[static_cast<std::size_t>(l.signal)];

  const auto& owned = plan.owned[wi];
  cdm_update_indices(Un, Up, Uc, ws.Rext.data(), ws.R.data(), sp.tables->Mdiag.data(), sp.alpha,
                     sp.dt, owned.data(), owned.size());
  for (const auto d : plan.owned_fixed[wi]) Un[d] = 0.0;

  if (!closing) {
    const double limit = 1e12 * sp.guard_scale;
    for (const auto d : owned) {
      const double u = Un[d];
      if (!std::isfinite(u) || std::abs(u) > limit) {
        sh.control->abort.store(1);
        sh.control->abort_step.store(sp.step0 + step);
        break;
      }
    }
  }
}

// Full per-worker loop used by the Proc backend.
void worker_loop(const StepPlan& sp, const SharedBuffers& sh, int w) {
  WorkerScratch ws;
  ws.R = VectorXd::Zero(static_cast<Eigen::Index>(sp.n_dof));
  ws.Rext = VectorXd::Zero(static_cast<Eigen::Index>(sp.n_dof));
  ws.flat.resize(sp.plan->flat_size[static_cast<std::size_t>(w)]);

  Control& ctl = *sh.control;
  WorkerClock& clock = sh.clocks[w];
  clock.start = now_seconds();

  bool aborted = false;
  for (int step = 0; step < sp.n_steps; ++step) {
    double t0 = now_seconds();
    phase_compute(sp, sh, ws, w, step);
    double t1 = now_seconds();
    clock.t_C += t1 - t0;
    if (!ctl.barrier.wait(ctl.error)) return;
    double t2 = now_seconds();
    clock.t_W += t2 - t1;

    phase_update(sp, sh, ws, w, step, false);
    double t3 = now_seconds();
    clock.t_C += t3 - t2;
    if (!ctl.barrier.wait(ctl.error)) return;
    clock.t_W += now_seconds() - t3;

    if (ctl.abort.load() != 0) {
      aborted = true;
      break;
    }
  }

  if (!aborted) {
    // Closing evaluation: one extra force pass gives the acceleration of the
    // final probe row without advancing the state.
    phase_compute(sp, sh, ws, w, sp.n_steps);
    if (!ctl.barrier.wait(ctl.error)) return;
    phase_update(sp, sh, ws, w, sp.n_steps, true);
    if (!ctl.barrier.wait(ctl.error)) return;
    if (w == 0) emit_row(sp, sh, ws, sp.n_steps, true);
  }
  clock.end = now_seconds();
}

TransientResult assemble_result(const TransientSetup& setup, const StepPlan& sp,
                                const SharedBuffers& sh) {
  TransientResult res;
  res.dt = sp.dt;
  res.steps = sp.n_steps;
  res.probes.resize(setup.probes.size());
  const std::size_t rows = sp.probes->empty()
                               ? 0
                               : static_cast<std::size_t>((sp.n_steps - 1) / sp.probe_cadence) + 2;
  for (std::size_t p = 0; p < setup.probes.size(); ++p) {
    res.probes[p].name = setup.probes[p].name;
    res.probes[p].node = setup.probes[p].node;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = sh.probe_rows + (p * sp.probe_rows_cap + r) * 7;
      res.probes[p].t.push_back(row[0]);
      res.probes[p].rows.push_back(
          {row[1], row[2], row[3], row[4], row[5], row[6]});
    }
  }
  const auto n = static_cast<Eigen::Index>(sp.n_dof);
  res.final_state.Up = Eigen::Map<const VectorXd>(sh.B[sp.n_steps % 3], n);
  res.final_state.Uc = Eigen::Map<const VectorXd>(sh.B[(sp.n_steps + 1) % 3], n);
  res.final_state.step0 = sp.step0 + sp.n_steps;
  res.final_state.t0 = sp.t0 + sp.n_steps * sp.dt;
  return res;
}

}  // namespace

Backend backend_from_string(const std::string& name) {
  if (name == "sim") return Backend::Sim;
  if (name == "proc") return Backend::Proc;
  throw Error("unknown backend: " + name + " (expected sim or proc)");
}

SpmdResult spmd_run(const TransientSetup& setup, const Partition& partition, int n_workers,
                    Backend backend, const StartState* resume) {
  const SolverTables& tab = *setup.tables;
  const std::size_t n_dof = tab.n_dof;
  setup.bcs.validate(n_dof);

  const double dt = setup.time.dt > 0.0 ? setup.time.dt : setup.time.safety * tab.dt_cr;
  if (!(dt > 0.0)) throw Error("spmd_run: nonpositive time step");
  const int n_steps = static_cast<int>(std::ceil(setup.time.duration / dt - 1e-9));
  if (n_steps < 1) throw Error("spmd_run: duration shorter than one step");

  const ExchangePlan plan = plan_exchange(tab, partition, n_workers, setup.bcs);

  StepPlan sp;
  sp.tables = &tab;
  sp.plan = &plan;
  sp.bcs = &setup.bcs;
  sp.dt = dt;
  sp.alpha = setup.time.alpha;
  sp.n_steps = n_steps;
  sp.n_dof = n_dof;
  sp.probes = &setup.probes;
  sp.probe_cadence = setup.probe_cadence;
  sp.snapshot_cadence = setup.snapshot_cadence;
  sp.snapshot_sink = &setup.snapshot_sink;
  sp.probe_rows_cap =
      setup.probes.empty() ? 1 : static_cast<std::size_t>((n_steps - 1) / sp.probe_cadence) + 2;

  // Shared allocation (ordinary heap for Sim, one anonymous shared mapping
  // for Proc).
  const std::size_t probes_doubles = setup.probes.size() * sp.probe_rows_cap * 7;
  const std::size_t doubles_needed = 4 * n_dof + plan.n_slots() + probes_doubles;
  const std::size_t bytes = sizeof(Control) + 64 +
                            static_cast<std::size_t>(n_workers) * sizeof(WorkerClock) + 64 +
                            doubles_needed * sizeof(double) + 256;

  const bool is_proc = backend == Backend::Proc;
  void* mem = nullptr;
  if (is_proc) {
    mem = mmap(nullptr, bytes, PROT_READ | PROT_WRITE, MAP_SHARED | MAP_ANONYMOUS, -1, 0);
    if (mem == MAP_FAILED) throw Error("spmd_run: shared mapping failed");
  } else {
    mem = std::malloc(bytes);
    if (!mem) throw Error("spmd_run: allocation failed");
  }
  std::memset(mem, 0, bytes);

  auto align64 = [](char* p) {
    return reinterpret_cast<char*>((reinterpret_cast<std::uintptr_t>(p) + 63) & ~std::uintptr_t{63});
  };
  char* cursor = static_cast<char*>(mem);
  SharedBuffers sh;
  sh.control = new (cursor) Control();
  sh.control->barrier.parties = n_workers;
  cursor = align64(cursor + sizeof(Control));
  sh.clocks = reinterpret_cast<WorkerClock*>(cursor);
  for (int w = 0; w < n_workers; ++w) new (sh.clocks + w) WorkerClock();
  cursor = align64(cursor + static_cast<std::size_t>(n_workers) * sizeof(WorkerClock));
  double* dcursor = reinterpret_cast<double*>(cursor);
  for (int b = 0; b < 4; ++b) {
    sh.B[b] = dcursor;
    dcursor += n_dof;
  }
  sh.slots = dcursor;
  dcursor += plan.n_slots();
  sh.probe_rows = dcursor;

  // Initial state, shared verbatim with the serial driver.
  {
    VectorXd Up, Uc;
    if (resume) {
      if (resume->Uc.size() != static_cast<Eigen::Index>(n_dof))
        throw Error("resume state size mismatch");
      Up = resume->Up;
      Uc = resume->Uc;
      sp.step0 = resume->step0;
      sp.t0 = resume->t0;
      sp.guard_scale = std::max(1.0, Uc.cwiseAbs().maxCoeff());
    } else {
      InitialState init = make_initial_state(tab, setup.bcs, dt);
      Up = std::move(init.state.Up);
      Uc = std::move(init.state.Uc);
      sp.guard_scale = init.guard_scale;
    }
    std::memcpy(sh.B[0], Up.data(), n_dof * sizeof(double));
    std::memcpy(sh.B[1], Uc.data(), n_dof * sizeof(double));
  }

  auto cleanup = [&] {
    if (is_proc)
      munmap(mem, bytes);
    else
      std::free(mem);
  };

  try {
    if (!is_proc) {
      // Deterministic in-process simulation: lockstep phases, one worker at a
      // time.
      std::vector<WorkerScratch> ws(static_cast<std::size_t>(n_workers));
      for (int w = 0; w < n_workers; ++w) {
        ws[static_cast<std::size_t>(w)].R = VectorXd::Zero(static_cast<Eigen::Index>(n_dof));
        ws[static_cast<std::size_t>(w)].Rext = VectorXd::Zero(static_cast<Eigen::Index>(n_dof));
        ws[static_cast<std::size_t>(w)].flat.resize(plan.flat_size[static_cast<std::size_t>(w)]);
        sh.clocks[w].start = now_seconds();
      }
      bool aborted = false;
      for (int step = 0; step < n_steps && !aborted; ++step) {
        for (int w = 0; w < n_workers; ++w) {
          const double t0 = now_seconds();
          phase_compute(sp, sh, ws[static_cast<std::size_t>(w)], w, step);
          sh.clocks[w].t_C += now_seconds() - t0;
        }
        for (int w = 0; w < n_workers; ++w) {
          const double t0 = now_seconds();
          phase_update(sp, sh, ws[static_cast<std::size_t>(w)], w, step, false);
          sh.clocks[w].t_C += now_seconds() - t0;
        }
        if (sh.control->abort.load() != 0) aborted = true;
      }
      if (!aborted) {
        for (int w = 0; w < n_workers; ++w)
          phase_compute(sp, sh, ws[static_cast<std::size_t>(w)], w, n_steps);
        for (int w = 0; w < n_workers; ++w)
          phase_update(sp, sh, ws[static_cast<std::size_t>(w)], w, n_steps, true);
        emit_row(sp, sh, ws[0], n_steps, true);
      }
      for (int w = 0; w < n_workers; ++w) sh.clocks[w].end = now_seconds();
    } else {
      std::vector<pid_t> pids;
      for (int w = 0; w < n_workers; ++w) {
        const pid_t pid = fork();
        if (pid < 0) {
          sh.control->error.store(1);
          for (const auto p : pids) waitpid(p, nullptr, 0);
          throw Error("spmd_run: fork failed");
        }
        if (pid == 0) {
          try {
            worker_loop(sp, sh, w);
            _exit(0);
          } catch (const std::exception& e) {
            int expected = 0;
            if (sh.control->error.compare_exchange_strong(expected, 1))
              std::strncpy(sh.control->error_msg, e.what(), sizeof(sh.control->error_msg) - 1);
            _exit(1);
          }
        }
        pids.push_back(pid);
      }
      bool child_failed = false;
      for (const auto pid : pids) {
        int status = 0;
        waitpid(pid, &status, 0);
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) child_failed = true;
      }
      if (sh.control->error.load() != 0 || child_failed) {
        const std::string msg = sh.control->error_msg[0] ? sh.control->error_msg
                                                         : "worker failure aborted the run";
        throw Error("spmd_run: " + msg);
      }
    }

    if (sh.control->abort.load() != 0) {
      const int step = sh.control->abort_step.load();
      cleanup();
      throw DivergenceError(step, "divergence detected at step " + std::to_string(step));
    }

    SpmdResult out;
    out.result = assemble_result(setup, sp, sh);
    std::vector<WorkerClock> clocks(sh.clocks, sh.clocks + n_workers);
    out.timing = TimingReport::from_clocks(std::move(clocks));
    cleanup();
    return out;
  } catch (const DivergenceError&) {
    throw;
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace octdyn
