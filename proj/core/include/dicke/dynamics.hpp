#pragma once

// Direct integration of the three-level density-matrix equations along
// sampled trajectories, in the frame rotating with each field's local phase.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dicke/cpt.hpp"
#include "dicke/model.hpp"
#include "dicke/montecarlo.hpp"

namespace dicke {

/// Populations and slow coherences sigma_nm. `absorption_integral` is the
/// running integral of Im(sigma_31 / Omega_1) (zero when Omega_1 = 0).
struct DensityMatrixState
{
    double t = 0.0;
    double rho11 = 1.0;
    double rho22 = 0.0;
    double rho33 = 0.0;
    std::complex<double> rho21{};
    std::complex<double> rho31{};
    std::complex<double> rho32{};
    double absorption_integral = 0.0;

    double trace() const { return rho11 + rho22 + rho33; }
};

struct DynamicsOptions
{
    double delta_r = 0.0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-13;
    /// Extra times that must appear in the series (e.g. the end of burn-in).
    std::vector<double> breakpoints;
    /// Record every accepted step, not only segment boundaries.
    bool record_steps = false;
};

struct DensityMatrixSeries
{
    std::vector<DensityMatrixState> states;
    std::size_t steps = 0;
    double max_trace_drift = 0.0;
};

/// Starts from |1><1| at t = 0 and integrates to t_end (<= trajectory
/// duration) with an embedded Dormand-Prince 5(4) pair. Collisions are
/// breakpoints.
DensityMatrixSeries integrate_density_matrix(LambdaSystem const& sys,
                                             DriveParams const& drive,
                                             FieldGeometry const& geom,
                                             Trajectory const& traj,
                                             double t_end,
                                             DynamicsOptions const& opts = {});

/// Writes "# t,rho11,rho22,rho33,re21,im21,re31,im31,re32,im32".
void write_density_series(std::ostream& os, DensityMatrixSeries const& series);

struct Window
{
    double start = 0.0;
    double end = 0.0;
};

/// Time average of Im(sigma_31 / Omega_1) over the window.
double trajectory_absorption(DensityMatrixSeries const& series,
                             DriveParams const& drive, Window window);

struct EnsembleOptions
{
    double burn_in = 0.0;  // 0: ten lifetimes of the slowest coherence
    double window = 0.0;   // 0: twice the burn-in
    double rel_tol = 1e-8;
    double brownian_step = 0.0;
    std::size_t threads = 1;
};

/// Resolved (burn-in, window length) for the given parameters.
Window ensemble_window(CptParams const& p, EnsembleOptions const& opts);

/// Probe absorption averaged over n trajectories at every Delta_R.
Spectrum ensemble_absorption(CptParams const& p,
                             std::span<double const> delta_r, std::size_t n,
                             std::uint64_t seed,
                             EnsembleOptions const& opts = {});

/// Paired two-photon dip: absorption with the pump minus absorption without
/// it on the same trajectories. The pump-free run does not depend on
/// Delta_R and is integrated once per trajectory.
Spectrum ensemble_dip(CptParams const& p, std::span<double const> delta_r,
                      std::size_t n, std::uint64_t seed,
                      EnsembleOptions const& opts = {});

}  // namespace dicke
