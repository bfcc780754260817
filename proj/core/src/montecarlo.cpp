#include "dicke/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "dicke/ensemble.hpp"
#include "dicke/error.hpp"

namespace dicke {
namespace {

class MotionSampler
{
  public:
    MotionSampler(MotionParams const& motion, StreamRng& rng)
        : motion_(motion), rng_(rng)
    {
        u_ = thermal();
        if (motion.model == VelocityModel::StrongCollisions)
            next_collision_ = waiting_time();
    }

    Vec3 const& u() const { return u_; }
    Vec3 const& r() const { return r_; }
    double t() const { return t_; }

    /// Advances to time t (>= current), exactly in distribution.
    void advance(double t)
    {
        if (motion_.model == VelocityModel::StrongCollisions)
        {
            while (next_collision_ <= t)
            {
                r_ += u_ * (next_collision_ - t_);
                t_ = next_collision_;
                u_ = thermal();
                next_collision_ = t_ + waiting_time();
            }
            r_ += u_ * (t - t_);
            t_ = t;
            return;
        }
        double const h = t - t_;
        if (h <= 0.0)
            return;
        auto const step = ou_step(motion_.v_th, motion_.gamma, h);
        for (int a = 0; a < 3; ++a)
        {
            double const z1 = normal_(rng_);
            double const z2 = normal_(rng_);
            double const u0 = u_[a];
            u_[a] = step.decay * u0 + step.sd_u * z1;
            r_[a] += step.drift * u0 + step.coupling * z1 + step.sd_x_cond * z2;
        }
        t_ = t;
    }

    /// Next collision time (strong collisions only).
    double next_collision() const { return next_collision_; }

  private:
    Vec3 thermal()
    {
        Vec3 v;
        for (int a = 0; a < 3; ++a)
            v[a] = motion_.v_th * normal_(rng_);
        return v;
    }

    double waiting_time()
    {
        if (!(motion_.gamma > 0.0))
            return std::numeric_limits<double>::infinity();
        return std::exponential_distribution<double>(motion_.gamma)(rng_);
    }

    MotionParams motion_;
    StreamRng& rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    Vec3 u_ = Vec3::Zero();
    Vec3 r_ = Vec3::Zero();
    double t_ = 0.0;
    double next_collision_ = std::numeric_limits<double>::infinity();
};

void require_sorted(std::span<double const> times, char const* what)
{
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i]))
            throw DomainError(std::string(what) + " must be finite and >= 0");
        if (i > 0 && times[i] < times[i - 1])
            throw DomainError(std::string(what) + " must be non-decreasing");
    }
}

}  // namespace

OuStep ou_step(double v_th, double gamma, double h)
{
    if (!(h >= 0.0))
        throw DomainError("OU step needs h >= 0");
    if (gamma == 0.0)
        return {1.0, h, 0.0, 0.0, 0.0};
    double const x = gamma * h;
    double const m = -std::expm1(-x);
    double const var_u = -std::expm1(-2.0 * x);
    // Var x - Cov^2 / Var u in units of v^2 / gamma^2
    double cond;
    if (x < 1e-2)
    {
        double const x2 = x * x;
        cond = x * x2 * (1.0 / 6.0 - x2 * (1.0 / 60.0 - x2 * 17.0 / 10080.0));
    }
    else
    {
        cond = 2.0 * memory_g(x) - m * m - m * m * m * m / var_u;
    }
    OuStep s;
    s.decay = std::exp(-x);
    s.drift = m / gamma;
    s.sd_u = v_th * std::sqrt(var_u);
    s.coupling = var_u > 0.0 ? v_th * m * m / (gamma * std::sqrt(var_u)) : 0.0;
    s.sd_x_cond = v_th / gamma * std::sqrt(std::max(cond, 0.0));
    return s;
}

std::size_t Trajectory::segment_at(double t) const
{
    auto it = std::upper_bound(
        events.begin(), events.end(), t,
        [](double value, TrajectoryEvent const& e) { return value < e.t; });
    std::size_t k = it == events.begin()
                        ? 0
                        : static_cast<std::size_t>(it - events.begin()) - 1;
    return std::min(k, segments() - 1);
}

Vec3 Trajectory::segment_velocity(std::size_t k) const
{
    if (model == VelocityModel::StrongCollisions)
        return events[k].u;
    double const dt = events[k + 1].t - events[k].t;
    return (events[k + 1].r - events[k].r) / dt;
}

Vec3 Trajectory::position(double t) const
{
    std::size_t const k = segment_at(t);
    return events[k].r + segment_velocity(k) * (t - events[k].t);
}

Trajectory sample_trajectory(MotionParams const& motion, double duration,
                             std::uint64_t seed, std::uint64_t stream,
                             TrajectoryOptions const& opts)
{
    motion.validate();
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw DomainError("trajectory duration must be > 0");
    StreamRng rng(seed, stream);
    MotionSampler sampler(motion, rng);
    Trajectory traj;
    traj.model = motion.model;
    traj.seed = seed;
    traj.stream = stream;
    traj.events.push_back({0.0, sampler.u(), sampler.r()});

    if (motion.model == VelocityModel::StrongCollisions)
    {
        while (sampler.next_collision() < duration)
        {
            sampler.advance(sampler.next_collision());
            traj.events.push_back({sampler.t(), sampler.u(), sampler.r()});
        }
        sampler.advance(duration);
        traj.events.push_back({duration, sampler.u(), sampler.r()});
        return traj;
    }

    double step = opts.brownian_step;
    if (!(step > 0.0))
        step = motion.gamma > 0.0 ? 0.05 / motion.gamma : duration;
    double const steps = std::ceil(duration / step);
    if (steps > 5e7)
        throw DomainError("Brownian trajectory needs too many steps");
    auto const n = static_cast<std::size_t>(std::max(1.0, steps));
    traj.events.reserve(n + 1);
    for (std::size_t k = 1; k <= n; ++k)
    {
        double const t = k == n ? duration
                                : duration * static_cast<double>(k)
                                      / static_cast<double>(n);
        sampler.advance(t);
        traj.events.push_back({t, sampler.u(), sampler.r()});
    }
    return traj;
}

MotionSample sample_motion_at(MotionParams const& motion,
                              std::span<double const> times, StreamRng& rng)
{
    require_sorted(times, "sample times");
    MotionSampler sampler(motion, rng);
    MotionSample out;
    out.u.reserve(times.size());
    out.r.reserve(times.size());
    for (double t : times)
    {
        sampler.advance(t);
        out.u.push_back(sampler.u());
        out.r.push_back(sampler.r());
    }
    return out;
}

void write_trajectory(std::ostream& os, Trajectory const& traj)
{
    os << "# model=" << to_string(traj.model) << " seed=" << traj.seed
       << " stream=" << traj.stream << '\n';
    os << "# t,ux,uy,uz,x,y,z\n";
    auto const old = os.precision(17);
    for (auto const& e : traj.events)
    {
        os << e.t << ',' << e.u.x() << ',' << e.u.y() << ',' << e.u.z() << ','
           << e.r.x() << ',' << e.r.y() << ',' << e.r.z() << '\n';
    }
    os.precision(old);
}

double phase_factor_closure(double q_mag, MotionParams const& motion,
                            double tau)
{
    return std::exp(-0.5 * phase_variance(q_mag, motion, tau));
}

PhaseFactorEstimate phase_factor_estimate(Vec3 const& q,
                                          MotionParams const& motion,
                                          std::span<double const> tau_grid,
                                          std::size_t n, std::uint64_t seed,
                                          PhaseFactorOptions const& opts)
{
    motion.validate();
    if (n < 100)
        throw DomainError("phase_factor_estimate needs n >= 100");
    if (tau_grid.empty())
        throw DomainError("tau grid is empty");
    require_sorted(tau_grid, "tau grid");
    if (!(opts.time_origin >= 0.0))
        throw DomainError("time origin must be >= 0");

    std::size_t const nt = tau_grid.size();
    std::vector<double> times;
    times.reserve(nt + 1);
    times.push_back(opts.time_origin);
    for (double tau : tau_grid)
        times.push_back(opts.time_origin + tau);

    auto sums = accumulate_blocks(n, 2 * nt, opts.threads,
                                  [&](std::size_t i, double* acc) {
        StreamRng rng(seed, i);
        auto const s = sample_motion_at(motion, times, rng);
        for (std::size_t j = 0; j < nt; ++j)
        {
            double const phi = q.dot(s.r[j + 1] - s.r[0]);
            acc[2 * j] += std::cos(phi);
            acc[2 * j + 1] += std::sin(phi);
        }
    });

    auto const mean = sums.mean();
    auto const se = sums.standard_errors();
    PhaseFactorEstimate out;
    out.tau_grid.assign(tau_grid.begin(), tau_grid.end());
    out.n_samples = n;
    for (std::size_t j = 0; j < nt; ++j)
    {
        out.mean_re.push_back(mean[2 * j]);
        out.mean_im.push_back(mean[2 * j + 1]);
        out.stderr_re.push_back(se[2 * j]);
        out.stderr_im.push_back(se[2 * j + 1]);
    }
    return out;
}

AutocorrelationEstimate velocity_autocorrelation_estimate(
    MotionParams const& motion, std::span<double const> lags, std::size_t n,
    std::uint64_t seed, std::size_t threads)
{
    motion.validate();
    if (lags.empty())
        throw DomainError("lag grid is empty");
    require_sorted(lags, "lags");
    std::vector<double> times{0.0};
    times.insert(times.end(), lags.begin(), lags.end());

    auto sums = accumulate_blocks(n, lags.size(), threads,
                                  [&](std::size_t i, double* acc) {
        StreamRng rng(seed, i);
        auto const s = sample_motion_at(motion, times, rng);
        for (std::size_t j = 0; j < lags.size(); ++j)
            acc[j] += s.u[0].dot(s.u[j + 1]) / 3.0;
    });
    AutocorrelationEstimate out;
    out.lags.assign(lags.begin(), lags.end());
    out.mean = sums.mean();
    out.stderr = sums.standard_errors();
    out.n_samples = n;
    return out;
}

Spectrum mc_two_level_spectrum(TwoLevelParams const& p,
                               std::span<double const> detunings,
                               std::size_t n, std::uint64_t seed,
                               McSpectrumOptions const& opts)
{
    p.validate();
    check_grid(detunings);
    if (n < 100)
        throw DomainError("mc_two_level_spectrum needs n >= 100");
    double const gd = p.doppler_width();
    double const rate = std::max(p.gamma, gd);
    if (!(rate > 0.0))
        throw DomainError("kernel does not decay: Gamma and Gamma_D are both 0");

    double duration = opts.duration;
    if (!(duration > 0.0))
    {
        duration = decay_time([&](double tau) { return two_level_kernel(p, tau); },
                              1e-9, 1.0 / rate);
    }
    double max_freq = 0.0;
    for (double d : detunings)
        max_freq = std::max(max_freq, std::abs(d));
    double step = opts.step;
    if (!(step > 0.0))
    {
        step = 0.05 / rate;
        if (max_freq > 0.0)
            step = std::min(step, kPi / 16.0 / max_freq);
    }
    auto intervals = static_cast<std::size_t>(std::ceil(duration / step));
    intervals += intervals % 2;
    intervals = std::max<std::size_t>(intervals, 2);
    if (intervals > 2'000'000)
        throw DomainError("Monte Carlo tau grid is too fine");
    double const h = duration / static_cast<double>(intervals);
    std::size_t const nt = intervals + 1;
    std::vector<double> times(nt);
    for (std::size_t j = 0; j < nt; ++j)
        times[j] = h * static_cast<double>(j);
    times.back() = duration;

    Vec3 const q = p.geom.q1;
    auto sums = accumulate_blocks(n, 2 * nt, opts.threads,
                                  [&](std::size_t i, double* acc) {
        StreamRng rng(seed, i);
        auto const s = sample_motion_at(p.motion, times, rng);
        for (std::size_t j = 0; j < nt; ++j)
        {
            double const phi = q.dot(s.r[j] - s.r[0]);
            acc[2 * j] += std::cos(phi);
            acc[2 * j + 1] += std::sin(phi);
        }
    });

    // Simpson weights folded with the homogeneous decay
    std::vector<double> w(nt);
    for (std::size_t j = 0; j < nt; ++j)
    {
        double const simpson = (j == 0 || j + 1 == nt) ? 1.0
                               : (j % 2 == 1)          ? 4.0
                                                       : 2.0;
        w[j] = simpson * h / 3.0 * std::exp(-p.gamma * times[j]);
    }
    std::size_t const nd = detunings.size();
    std::vector<double> cos_t(nd * nt);
    std::vector<double> sin_t(nd * nt);
    for (std::size_t k = 0; k < nd; ++k)
        for (std::size_t j = 0; j < nt; ++j)
        {
            cos_t[k * nt + j] = w[j] * std::cos(detunings[k] * times[j]);
            sin_t[k * nt + j] = w[j] * std::sin(detunings[k] * times[j]);
        }
    auto transform = [&](std::vector<double> const& m) {
        std::vector<double> s(nd, 0.0);
        for (std::size_t k = 0; k < nd; ++k)
        {
            double acc = 0.0;
            for (std::size_t j = 0; j < nt; ++j)
                acc += m[2 * j] * cos_t[k * nt + j]
                       + m[2 * j + 1] * sin_t[k * nt + j];
            s[k] = acc;
        }
        return s;
    };

    auto const mean = sums.mean();
    auto const se = sums.standard_errors();
    double const tail_re = std::exp(-p.gamma * duration) * mean[2 * (nt - 1)];
    double const tail_im = std::exp(-p.gamma * duration) * mean[2 * nt - 1];
    double const tail_se = std::exp(-p.gamma * duration)
                           * std::hypot(se[2 * (nt - 1)], se[2 * nt - 1]);
    if (std::hypot(tail_re, tail_im) > opts.tail_level + 3.0 * tail_se)
    {
        std::ostringstream msg;
        msg << "Monte Carlo tau grid too short: kernel is "
            << std::hypot(tail_re, tail_im) << " at tau = " << duration
            << "; suggested duration " << 2.0 * duration;
        throw DomainError(msg.str());
    }

    Spectrum out;
    out.detunings.assign(detunings.begin(), detunings.end());
    out.values = transform(mean);
    out.std_errors = sums.jackknife(transform);
    out.meta.source = "montecarlo.two_level";
    out.meta.params = {{"Gamma", p.gamma},
                       {"Gamma_D", gd},
                       {"gamma", p.motion.gamma},
                       {"n", static_cast<double>(n)},
                       {"seed", static_cast<double>(seed)},
                       {"duration", duration},
                       {"step", h}};
    out.meta.flags.push_back("model=" + to_string(p.motion.model));
    return out;
}

double cross_phase_integral(double gamma, double tau, double tau1, double tau3)
{
    if (!(tau >= 0.0) || !(tau1 >= 0.0) || !(tau3 >= 0.0) || tau3 > tau1)
        throw DomainError("need tau, tau1 >= 0 and 0 <= tau3 <= tau1");
    return 2.0 * relaxed_square(gamma, tau)
           + relaxed_time(gamma, tau)
                 * (relaxed_time(gamma, tau1 - tau3) + relaxed_time(gamma, tau3));
}

double k_variance(CptParams const& p, double tau, double tau1, double tau3)
{
    double const v2 = p.motion.v_th * p.motion.v_th;
    double const g = p.motion.gamma;
    return 2.0 * p.geom.q2.squaredNorm() * v2 * relaxed_square(g, tau)
           + 2.0 * p.geom.q1.squaredNorm() * v2 * relaxed_square(g, tau1 + tau)
           - 2.0 * p.cross_rate_sq() * cross_phase_integral(g, tau, tau1, tau3);
}

CptKernelEstimate mc_cpt_kernel_estimate(CptParams const& p,
                                         std::span<TauTriplet const> triplets,
                                         std::size_t n, std::uint64_t seed,
                                         std::size_t threads)
{
    p.motion.validate();
    if (n < 1000)
        throw DomainError("mc_cpt_kernel_estimate needs n >= 1000");
    if (triplets.empty())
        throw DomainError("triplet grid is empty");
    double horizon = 0.0;
    for (auto const& [tau, tau1, tau3] : triplets)
    {
        if (!(tau >= 0.0) || !(tau1 >= 0.0) || !(tau3 >= 0.0) || tau3 > tau1)
            throw DomainError("need tau, tau1 >= 0 and 0 <= tau3 <= tau1");
        horizon = std::max(horizon, tau1 + tau);
    }

    // K is evaluated at t = horizon; the four instants per triplet are
    // T - tau1 - tau, T - tau3 - tau, T - tau3, T.
    std::vector<double> times;
    for (auto const& [tau, tau1, tau3] : triplets)
    {
        times.push_back(horizon - tau1 - tau);
        times.push_back(horizon - tau3 - tau);
        times.push_back(horizon - tau3);
    }
    times.push_back(horizon);
    for (auto& t : times)
        t = std::max(t, 0.0);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    auto index_of = [&](double t) {
        t = std::max(t, 0.0);
        return static_cast<std::size_t>(
            std::lower_bound(times.begin(), times.end(), t) - times.begin());
    };
    struct Slots
    {
        std::size_t a1, a2, b2, b1;
    };
    std::vector<Slots> slots;
    for (auto const& [tau, tau1, tau3] : triplets)
    {
        slots.push_back({index_of(horizon - tau1 - tau),
                         index_of(horizon - tau3 - tau), index_of(horizon - tau3),
                         index_of(horizon)});
    }

    Vec3 const q1 = p.geom.q1;
    Vec3 const q2 = p.geom.q2;
    std::size_t const nk = triplets.size();
    auto sums = accumulate_blocks(n, 3 * nk, threads,
                                  [&](std::size_t i, double* acc) {
        StreamRng rng(seed, i);
        auto const s = sample_motion_at(p.motion, times, rng);
        for (std::size_t k = 0; k < nk; ++k)
        {
            double const phi2 = q2.dot(s.r[slots[k].b2] - s.r[slots[k].a2]);
            double const phi1 = q1.dot(s.r[slots[k].b1] - s.r[slots[k].a1]);
            double const kk = phi2 - phi1;
            acc[3 * k] += std::cos(kk);
            acc[3 * k + 1] += std::sin(kk);
            acc[3 * k + 2] += phi2 * phi1;
        }
    });

    auto const mean = sums.mean();
    auto const se = sums.standard_errors();
    CptKernelEstimate out;
    out.triplets.assign(triplets.begin(), triplets.end());
    out.n_samples = n;
    for (std::size_t k = 0; k < nk; ++k)
    {
        auto const& [tau, tau1, tau3] = triplets[k];
        out.mean_re.push_back(mean[3 * k]);
        out.mean_im.push_back(mean[3 * k + 1]);
        out.stderr_re.push_back(se[3 * k]);
        out.stderr_im.push_back(se[3 * k + 1]);
        out.cross_mean.push_back(mean[3 * k + 2]);
        out.cross_stderr.push_back(se[3 * k + 2]);
        out.cross_closed.push_back(
            p.cross_rate_sq()
            * cross_phase_integral(p.motion.gamma, tau, tau1, tau3));
        out.closure.push_back(std::exp(-0.5 * k_variance(p, tau, tau1, tau3)));
    }
    return out;
}

}  // namespace dicke
