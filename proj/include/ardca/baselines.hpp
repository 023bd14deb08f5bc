#pragma once

#include "ardca/engine.hpp"

namespace ardca {

struct BaselineOptions {
  std::uint64_t seed = 0;       // rdca only
  std::uint64_t stream_id = 0;  // rdca only
  Tracer* tracer = nullptr;
};

/// Engine in fixed-theta mode (theta = 1/n_hat), K + 1 steps. The trace and
/// x_last report x^*(v^K); x_uniform carries the plain mean for diagnostics.
SolveReport rdca_run(const DualModel& model, const Vector& u0, std::int64_t K,
                     const BaselineOptions& options = {});

/// K proximal gradient steps on D with step 1/global_L. The primal output
/// x_avg is the uniform mean of x^*(u^k), k = 0..K-1. One trace record per
/// iteration (pass = iteration count).
SolveReport dga_run(const DualModel& model, const Vector& u0, std::int64_t K,
                    const BaselineOptions& options = {});

/// Accelerated proximal gradient on D: theta_0 = 1 with the theta_next
/// recurrence, v = (1 - theta) u + theta z, z+ = prox(z - grad/(theta L)),
/// u+ = (1 - theta) u + theta z+. x_avg is the 1/theta-weighted average of
/// x^*(v^k) over [K0, K-1] using the checkpoint rule of the coordinate engine
/// with n_hat = 1.
SolveReport adfga_run(const DualModel& model, const Vector& u0, std::int64_t K,
                      K0Policy k0 = K0Policy::checkpoint(), const BaselineOptions& options = {});

/// One prox step of the separable term on every coordinate with step tau.
Vector prox_all(const DualModel& model, const Vector& v, double tau);

}  // namespace ardca
