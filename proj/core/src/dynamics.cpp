#include "dicke/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "dicke/ensemble.hpp"
#include "dicke/error.hpp"

namespace dicke {
namespace {

namespace odeint = boost::numeric::odeint;

// rho11, rho22, rho33, sigma21, sigma31, sigma32 (re, im), absorption integral
using State = std::array<double, 10>;
using cplx = std::complex<double>;

struct Rates
{
    double gamma1;
    double gamma2;
    double gamma_pop;
    double gamma_c;
    double gamma21;
};

struct Bloch
{
    Rates rates;
    cplx omega1;
    cplx omega2;
    double d1;   // Delta_1 + q1.u
    double d2;   // Delta_1 + Delta_R + q2.u
    double d21;  // -Delta_R + (q1 - q2).u
    double inv_probe_sq;

    void operator()(State const& x, State& dx, double) const
    {
        cplx const s21(x[3], x[4]);
        cplx const s31(x[5], x[6]);
        cplx const s32(x[7], x[8]);
        double const r11 = x[0];
        double const r22 = x[1];
        double const r33 = x[2];
        constexpr cplx i(0.0, 1.0);

        cplx const ds31 = -i * omega1 * (r33 - r11) + i * omega2 * s21
                          - cplx(rates.gamma_c, d1) * s31;
        cplx const ds32 = -i * omega2 * (r33 - r22) + i * omega1 * std::conj(s21)
                          - cplx(rates.gamma_c, d2) * s32;
        cplx const ds21 = i * std::conj(omega2) * s31
                          - i * omega1 * std::conj(s32)
                          - cplx(rates.gamma21, d21) * s21;
        double const pump1 = 2.0 * (std::conj(omega1) * s31).imag();
        double const pump2 = 2.0 * (std::conj(omega2) * s32).imag();
        double const exchange = rates.gamma_pop * (r22 - r11);

        dx[0] = -pump1 + rates.gamma1 * r33 + exchange;
        dx[1] = -pump2 + rates.gamma2 * r33 - exchange;
        dx[2] = pump1 + pump2 - (rates.gamma1 + rates.gamma2) * r33;
        dx[3] = ds21.real();
        dx[4] = ds21.imag();
        dx[5] = ds31.real();
        dx[6] = ds31.imag();
        dx[7] = ds32.real();
        dx[8] = ds32.imag();
        dx[9] = (s31 * std::conj(omega1)).imag() * inv_probe_sq;
    }
};

DensityMatrixState to_state(double t, State const& x)
{
    DensityMatrixState s;
    s.t = t;
    s.rho11 = x[0];
    s.rho22 = x[1];
    s.rho33 = x[2];
    s.rho21 = {x[3], x[4]};
    s.rho31 = {x[5], x[6]};
    s.rho32 = {x[7], x[8]};
    s.absorption_integral = x[9];
    return s;
}

}  // namespace

DensityMatrixSeries integrate_density_matrix(LambdaSystem const& sys,
                                             DriveParams const& drive,
                                             FieldGeometry const& geom,
                                             Trajectory const& traj,
                                             double t_end,
                                             DynamicsOptions const& opts)
{
    sys.validate();
    if (traj.events.size() < 2)
        throw DomainError("trajectory has no segments");
    if (!(t_end > 0.0) || t_end > traj.duration() * (1.0 + 1e-12))
        throw DomainError("t_end must lie in (0, trajectory duration]");

    Bloch bloch{{sys.gamma1, sys.gamma2, sys.gamma_pop, sys.coherence_decay(),
                 sys.ground_decay()},
                std::polar(drive.omega1, drive.phase1),
                std::polar(drive.omega2, drive.phase2),
                0.0,
                0.0,
                0.0,
                drive.omega1 != 0.0 ? 1.0 / (drive.omega1 * drive.omega1) : 0.0};

    // segment boundaries: collisions, requested breakpoints, t_end
    std::vector<double> cuts;
    for (std::size_t k = 1; k < traj.events.size(); ++k)
        if (traj.events[k].t < t_end)
            cuts.push_back(traj.events[k].t);
    for (double b : opts.breakpoints)
        if (b > 0.0 && b < t_end)
            cuts.push_back(b);
    cuts.push_back(t_end);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                           odeint::runge_kutta_dopri5<State>());
    State x{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    DensityMatrixSeries series;
    series.states.push_back(to_state(0.0, x));

    double t = 0.0;
    double dt = 0.0;
    for (double cut : cuts)
    {
        double const mid = 0.5 * (t + cut);
        Vec3 const u = traj.segment_velocity(traj.segment_at(mid));
        bloch.d1 = drive.delta1 + geom.q1.dot(u);
        bloch.d2 = drive.delta1 + opts.delta_r + geom.q2.dot(u);
        bloch.d21 = -opts.delta_r + geom.q1.dot(u) - geom.q2.dot(u);
        double const fastest = std::abs(bloch.d1) + std::abs(bloch.d2)
                               + std::abs(bloch.d21) + bloch.rates.gamma_c
                               + bloch.rates.gamma21 + bloch.rates.gamma1
                               + bloch.rates.gamma2 + std::abs(drive.omega1)
                               + std::abs(drive.omega2) + 1e-300;
        if (!(dt > 0.0))
            dt = 0.05 / fastest;

        std::size_t failures = 0;
        while (t < cut)
        {
            double const remaining = cut - t;
            bool const clipped = dt >= remaining;
            double step = clipped ? remaining : dt;
            auto const res = stepper.try_step(bloch, x, t, step);
            if (res == odeint::fail)
            {
                dt = step;
                if (++failures > 200 || !(step > 1e-14 * std::max(1.0, t)))
                {
                    std::ostringstream msg;
                    msg << "density-matrix integration failed at t = " << t
                        << " (step " << step << ", " << failures
                        << " rejected steps)";
                    throw ConvergenceError(msg.str());
                }
                continue;
            }
            failures = 0;
            ++series.steps;
            if (clipped)
            {
                t = cut;  // avoid round-off drift at the boundary
                dt = std::max(dt, step);
            }
            else
            {
                dt = step;
            }
            series.max_trace_drift = std::max(
                series.max_trace_drift, std::abs(x[0] + x[1] + x[2] - 1.0));
            if (opts.record_steps && t < cut)
                series.states.push_back(to_state(t, x));
        }
        series.states.push_back(to_state(t, x));
    }
    return series;
}

void write_density_series(std::ostream& os, DensityMatrixSeries const& series)
{
    os << "# t,rho11,rho22,rho33,re21,im21,re31,im31,re32,im32\n";
    auto const old = os.precision(17);
    for (auto const& s : series.states)
    {
        os << s.t << ',' << s.rho11 << ',' << s.rho22 << ',' << s.rho33 << ','
           << s.rho21.real() << ',' << s.rho21.imag() << ',' << s.rho31.real()
           << ',' << s.rho31.imag() << ',' << s.rho32.real() << ','
           << s.rho32.imag() << '\n';
    }
    os.precision(old);
}

double trajectory_absorption(DensityMatrixSeries const& series,
                             DriveParams const& drive, Window window)
{
    if (drive.omega1 == 0.0)
        throw DomainError("absorption is undefined for a zero probe");
    if (series.states.size() < 2)
        throw DomainError("series is empty");
    if (!(window.end > window.start) || window.start < series.states.front().t
        || window.end > series.states.back().t * (1.0 + 1e-12))
        throw DomainError("absorption window is not covered by the series");

    auto integral_at = [&](double t) {
        auto const& s = series.states;
        auto it = std::lower_bound(
            s.begin(), s.end(), t,
            [](DensityMatrixState const& a, double v) { return a.t < v; });
        if (it == s.end())
            return s.back().absorption_integral;
        if (it->t == t || it == s.begin())
            return it->absorption_integral;
        auto const prev = std::prev(it);
        double const f = (t - prev->t) / (it->t - prev->t);
        return prev->absorption_integral
               + f * (it->absorption_integral - prev->absorption_integral);
    };
    return (integral_at(window.end) - integral_at(window.start))
           / (window.end - window.start);
}

Window ensemble_window(CptParams const& p, EnsembleOptions const& opts)
{
    double burn = opts.burn_in;
    if (!(burn > 0.0))
    {
        double slow = p.system.coherence_decay();
        double const g21 = p.gamma21();
        if (g21 > 0.0)
            slow = std::min(slow, g21);
        if (!(slow > 0.0))
            throw DomainError("no relaxation: set the burn-in explicitly");
        burn = 10.0 / slow;
    }
    double const window = opts.window > 0.0 ? opts.window : 2.0 * burn;
    return {burn, burn + window};
}

namespace {

template<class PerTrajectory>
Spectrum run_ensemble(CptParams const& p, std::span<double const> delta_r,
                      std::size_t n, std::uint64_t seed,
                      EnsembleOptions const& opts, PerTrajectory&& per,
                      char const* source)
{
    p.validate();
    check_grid(delta_r);
    if (n < 2)
        throw DomainError("ensemble needs at least 2 trajectories");
    if (p.drive.omega1 == 0.0)
        throw DomainError("absorption is undefined for a zero probe");
    Window const win = ensemble_window(p, opts);
    TrajectoryOptions topts;
    topts.brownian_step = opts.brownian_step;

    std::size_t const nd = delta_r.size();
    auto sums = accumulate_blocks(n, nd, opts.threads,
                                  [&](std::size_t i, double* acc) {
        auto const traj = sample_trajectory(p.motion, win.end, seed, i, topts);
        per(traj, win, acc);
    });

    Spectrum out;
    out.detunings.assign(delta_r.begin(), delta_r.end());
    out.values = sums.mean();
    out.std_errors = sums.standard_errors();
    out.meta.source = source;
    out.meta.params = {{"n", static_cast<double>(n)},
                       {"seed", static_cast<double>(seed)},
                       {"burn_in", win.start},
                       {"t_end", win.end},
                       {"Gamma_C", p.system.coherence_decay()},
                       {"Gamma_21", p.gamma21()},
                       {"Omega1", p.drive.omega1},
                       {"Omega2", p.drive.omega2}};
    out.meta.flags = p.flags();
    out.meta.flags.push_back("model=" + to_string(p.motion.model));
    return out;
}

double absorption_on(CptParams const& p, DriveParams const& drive,
                     Trajectory const& traj, Window win, double delta_r,
                     double rel_tol)
{
    DynamicsOptions dopts;
    dopts.delta_r = delta_r;
    dopts.rel_tol = rel_tol;
    dopts.breakpoints = {win.start};
    auto const series
        = integrate_density_matrix(p.system, drive, p.geom, traj, win.end, dopts);
    return trajectory_absorption(series, drive, win);
}

}  // namespace

Spectrum ensemble_absorption(CptParams const& p,
                             std::span<double const> delta_r, std::size_t n,
                             std::uint64_t seed, EnsembleOptions const& opts)
{
    return run_ensemble(
        p, delta_r, n, seed, opts,
        [&](Trajectory const& traj, Window win, double* acc) {
            if (p.drive.omega2 == 0.0)
            {
                // no two-photon structure: one integration serves every point
                double const a
                    = absorption_on(p, p.drive, traj, win, 0.0, opts.rel_tol);
                for (std::size_t k = 0; k < delta_r.size(); ++k)
                    acc[k] += a;
                return;
            }
            for (std::size_t k = 0; k < delta_r.size(); ++k)
                acc[k] += absorption_on(p, p.drive, traj, win, delta_r[k],
                                        opts.rel_tol);
        },
        "dynamics.absorption");
}

Spectrum ensemble_dip(CptParams const& p, std::span<double const> delta_r,
                      std::size_t n, std::uint64_t seed,
                      EnsembleOptions const& opts)
{
    DriveParams bare = p.drive;
    bare.omega2 = 0.0;
    return run_ensemble(
        p, delta_r, n, seed, opts,
        [&](Trajectory const& traj, Window win, double* acc) {
            double const base
                = absorption_on(p, bare, traj, win, 0.0, opts.rel_tol);
            for (std::size_t k = 0; k < delta_r.size(); ++k)
                acc[k] += absorption_on(p, p.drive, traj, win, delta_r[k],
                                        opts.rel_tol)
                          - base;
        },
        "dynamics.dip");
}

}  // namespace dicke
