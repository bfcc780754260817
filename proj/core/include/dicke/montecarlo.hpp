#pragma once

// Stochastic oracle: classical trajectories under the Brownian-motion and
// strong-collision models, Doppler phase factors, and spectra built from them.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dicke/cpt.hpp"
#include "dicke/model.hpp"
#include "dicke/rng.hpp"
#include "dicke/twolevel.hpp"

namespace dicke {

/// State at the start of a segment. The last event closes the trajectory.
struct TrajectoryEvent
{
    double t = 0.0;
    Vec3 u = Vec3::Zero();
    Vec3 r = Vec3::Zero();
};

/// Piecewise record of one atom. Strong collisions: the velocity is constant
/// between events (collisions). Brownian motion: events sit on a uniform grid
/// where (u, r) are exact joint samples of the process; inside a segment the
/// position is interpolated linearly.
struct Trajectory
{
    VelocityModel model = VelocityModel::StrongCollisions;
    std::vector<TrajectoryEvent> events;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    double duration() const { return events.back().t; }
    std::size_t segments() const { return events.size() - 1; }
    /// Index of the segment containing t (clamped to the record).
    std::size_t segment_at(double t) const;
    /// Velocity used to advance the segment (mean velocity for Brownian).
    Vec3 segment_velocity(std::size_t k) const;
    Vec3 position(double t) const;
};

struct TrajectoryOptions
{
    /// Brownian grid step; 0 selects 0.05 / gamma.
    double brownian_step = 0.0;
};

/// First velocity is Maxwell-Boltzmann; r(0) = 0.
Trajectory sample_trajectory(MotionParams const& motion, double duration,
                             std::uint64_t seed, std::uint64_t stream = 0,
                             TrajectoryOptions const& opts = {});

/// Samples (u, r) at sorted times >= 0, exactly in distribution for both
/// models.
struct MotionSample
{
    std::vector<Vec3> u;
    std::vector<Vec3> r;
};
MotionSample sample_motion_at(MotionParams const& motion,
                              std::span<double const> times, StreamRng& rng);

/// Writes "# t,ux,uy,uz,x,y,z" followed by one record per event.
void write_trajectory(std::ostream& os, Trajectory const& traj);

/// Exact one-axis Ornstein-Uhlenbeck step of (velocity, displacement).
struct OuStep
{
    double decay;        // exp(-gamma h)
    double drift;        // (1 - exp(-gamma h)) / gamma
    double sd_u;         // sqrt(Var u)
    double coupling;     // Cov(u, x) / sd_u
    double sd_x_cond;    // sqrt(Var x - Cov^2 / Var u)
};
OuStep ou_step(double v_th, double gamma, double h);

struct PhaseFactorOptions
{
    double time_origin = 0.0;
    std::size_t threads = 1;
};

struct PhaseFactorEstimate
{
    std::vector<double> tau_grid;
    std::vector<double> mean_re;
    std::vector<double> mean_im;
    std::vector<double> stderr_re;
    std::vector<double> stderr_im;
    std::size_t n_samples = 0;
};

/// <exp(i q.[r(t0 + tau) - r(t0)])> over n trajectories.
PhaseFactorEstimate phase_factor_estimate(Vec3 const& q,
                                          MotionParams const& motion,
                                          std::span<double const> tau_grid,
                                          std::size_t n, std::uint64_t seed,
                                          PhaseFactorOptions const& opts = {});

/// exp(-q^2 v^2 G(gamma tau) / gamma^2), the Gaussian closure.
double phase_factor_closure(double q_mag, MotionParams const& motion,
                            double tau);

struct AutocorrelationEstimate
{
    std::vector<double> lags;
    std::vector<double> mean;
    std::vector<double> stderr;
    std::size_t n_samples = 0;
};

/// (1/3) sum_a <u_a(0) u_a(t)> at each lag.
AutocorrelationEstimate velocity_autocorrelation_estimate(
    MotionParams const& motion, std::span<double const> lags, std::size_t n,
    std::uint64_t seed, std::size_t threads = 1);

struct McSpectrumOptions
{
    double duration = 0.0;    // 0: closure-based estimate
    double step = 0.0;        // 0: automatic
    double tail_level = 1e-3; // allowed |kernel| at the end of the grid
    std::size_t threads = 1;
};

/// Re int exp(-i Delta tau - Gamma tau) <exp(i Phi(tau))> by Simpson's rule
/// on a uniform grid, with jackknife errors.
Spectrum mc_two_level_spectrum(TwoLevelParams const& p,
                               std::span<double const> detunings,
                               std::size_t n, std::uint64_t seed,
                               McSpectrumOptions const& opts = {});

/// (tau, tau1, tau3)
using TauTriplet = std::array<double, 3>;

/// int int exp(-gamma |t2 - t1|) over the two phase intervals of K, i.e.
/// <Phi2 Phi1> / (q1.q2 v^2).
double cross_phase_integral(double gamma, double tau, double tau1, double tau3);

/// Gaussian-closure variance of K.
double k_variance(CptParams const& p, double tau, double tau1, double tau3);

struct CptKernelEstimate
{
    std::vector<TauTriplet> triplets;
    std::vector<double> mean_re;
    std::vector<double> mean_im;
    std::vector<double> stderr_re;
    std::vector<double> stderr_im;
    std::vector<double> closure;      // exp(-<K^2>/2)
    std::vector<double> cross_mean;   // <Phi2 Phi1>
    std::vector<double> cross_stderr;
    std::vector<double> cross_closed;
    std::size_t n_samples = 0;
};

/// Samples K = Phi2(t - tau3, tau) - Phi1(t, tau1 + tau) with
/// Phi_n(t, s) = q_n.[r(t) - r(t - s)].
CptKernelEstimate mc_cpt_kernel_estimate(CptParams const& p,
                                         std::span<TauTriplet const> triplets,
                                         std::size_t n, std::uint64_t seed,
                                         std::size_t threads = 1);

}  // namespace dicke
