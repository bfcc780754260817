#include "dicke/cpt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dicke/error.hpp"

namespace dicke {
namespace {

double sq(double x)
{
    return x * x;
}

// Exponent of the double integral F at fixed m_tau = (1 - exp(-gamma tau)) /
// gamma. All motion terms are combined before exponentiation: the positive
// cross term and the negative Doppler terms are individually huge in the far
// Doppler regime.
struct KernelExponent
{
    double gamma1;
    double gamma_c;  // collision rate
    double gd_sq;
    double cross;    // q1 . q2 v^2
    double m_tau;

    double tau1_part(double tau1) const
    {
        return -gamma1 * tau1
               - gd_sq
                     * (relaxed_square(gamma_c, tau1)
                        + relaxed_time(gamma_c, tau1) * m_tau);
    }

    double operator()(double tau1_part_value, double tau1, double tau3) const
    {
        return tau1_part_value
               + cross * m_tau
                     * (relaxed_time(gamma_c, tau1 - tau3)
                        + relaxed_time(gamma_c, tau3));
    }
};

class KernelEvaluator
{
  public:
    KernelEvaluator(CptParams const& p, CptOptions const& opts)
        : p_(p), opts_(opts)
    {
        gd_ = p.doppler_width();
        gres_ = p.residual_doppler_width();
        cross_ = p.cross_rate_sq();
        gamma1_ = p.system.gamma1;
        gamma_c_ = p.motion.gamma;
        if (gamma1_ == 0.0 && gd_ == 0.0)
            throw DomainError(
                "CPT kernel diverges: Gamma_1 and Gamma_D are both 0");
        scale_ = 1.0 / sq(gamma1_ + gd_);
        double const tail_rate
            = std::max(gamma1_, sq(gd_) / (gamma_c_ + gd_));
        level_ = opts.truncation * scale_ * tail_rate;
        if (gamma_c_ > 0.0)
        {
            m_inf_ = relaxed_time(gamma_c_, std::numeric_limits<double>::max());
            f_inf_ = evaluate(m_inf_);
        }
    }

    std::complex<double> at_tau(double tau) const
    {
        double const m = relaxed_time(gamma_c_, tau);
        if (gamma_c_ > 0.0 && m == m_inf_)
            return f_inf_;
        return evaluate(m);
    }

    std::complex<double> evaluate(double m_tau) const
    {
        KernelExponent const ex{gamma1_, gamma_c_, sq(gd_), cross_, m_tau};
        double const t_max = tau1_cutoff(m_tau);
        double const fast = std::max({gamma1_, gd_, std::abs(cross_) * m_tau});
        auto const seeds
            = geometric_breakpoints(0.0, t_max, 0.125 / std::max(fast, 1e-300));

        auto inner = [&](double tau1) {
            if (tau1 <= 0.0)
                return 0.0;
            double const base = ex.tau1_part(tau1);
            double const half = 0.5 * tau1;
            double const edge_rate = std::abs(cross_) * m_tau;
            double const first = edge_rate * half > 8.0 ? 0.125 / edge_rate
                                                        : half;
            auto const bp = geometric_breakpoints(0.0, half, first);
            QuadratureOptions qo;
            qo.rel_tol = opts_.inner_rel_tol;
            auto const r = integrate_adaptive(
                [&](double tau3) { return std::exp(ex(base, tau1, tau3)); }, bp,
                qo);
            return 2.0 * r.value;
        };

        QuadratureOptions qo;
        qo.rel_tol = opts_.outer_rel_tol;
        double const delta1 = p_.drive.delta1;
        if (delta1 == 0.0)
            return {integrate_adaptive(inner, seeds, qo).value, 0.0};
        double const re = integrate_adaptive(
            [&](double t) { return std::cos(delta1 * t) * inner(t); }, seeds, qo)
                              .value;
        qo.abs_tol = opts_.outer_rel_tol * std::abs(re);
        double const im = integrate_adaptive(
            [&](double t) { return -std::sin(delta1 * t) * inner(t); }, seeds,
            qo)
                              .value;
        return {re, im};
    }

  private:
    // Rigorous envelope of the tau1 integrand: the phase variance of the full
    // two-photon phase is non-negative, and the cross term is bounded by
    // 2 |q1.q2| v^2 m_tau M(tau1 / 2).
    double envelope(double tau1, double m_tau) const
    {
        double const g = relaxed_square(gamma_c_, tau1);
        double const bound_a
            = -gamma1_ * tau1 + (gres_ > 0.0 ? sq(gres_) * g_tau(m_tau) : 0.0);
        double const bound_b
            = -gamma1_ * tau1
              - sq(gd_) * (g + relaxed_time(gamma_c_, tau1) * m_tau)
              + 2.0 * std::abs(cross_) * m_tau
                    * relaxed_time(gamma_c_, 0.5 * tau1);
        return tau1 * std::exp(std::min(bound_a, bound_b));
    }

    // G(gamma tau)/gamma^2 recovered from m_tau.
    double g_tau(double m_tau) const
    {
        if (gamma_c_ == 0.0)
            return 0.5 * m_tau * m_tau;
        double const x = m_tau * gamma_c_;
        if (x >= 1.0)
            return std::numeric_limits<double>::infinity();
        double const tau = -std::log1p(-x) / gamma_c_;
        return relaxed_square(gamma_c_, tau);
    }

    double tau1_cutoff(double m_tau) const
    {
        double t = 1.0 / std::max({gamma1_, gd_, 1e-300});
        for (int it = 0;; ++it)
        {
            double const here = envelope(t, m_tau);
            if (here < level_ && envelope(2.0 * t, m_tau) <= here)
                break;
            t *= 2.0;
            if (it > 2000 || !std::isfinite(t))
                throw ConvergenceError("CPT kernel: tau1 envelope never decays");
        }
        double lo = 0.5 * t;
        double hi = t;
        for (int it = 0; it < 60; ++it)
        {
            double const mid = 0.5 * (lo + hi);
            if (envelope(mid, m_tau) < level_)
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    }

    CptParams const& p_;
    CptOptions opts_;
    double gd_ = 0.0;
    double gres_ = 0.0;
    double cross_ = 0.0;
    double gamma1_ = 0.0;
    double gamma_c_ = 0.0;
    double scale_ = 0.0;
    double level_ = 0.0;
    double m_inf_ = -1.0;
    std::complex<double> f_inf_{};
};

double lorentzian(double x, double w)
{
    return w / (x * x + w * w);
}

Spectrum lorentzian_dip(CptParams const& p, std::span<double const> delta_r,
                        double amplitude, std::string source)
{
    check_grid(delta_r);
    double const w = cpt_predicted_hwhm(p);
    if (!(w > 0.0))
        throw DomainError("CPT dip width vanishes: Gamma_21 and eta are 0");
    Spectrum out;
    out.detunings.assign(delta_r.begin(), delta_r.end());
    out.values.reserve(delta_r.size());
    double const scale = -sq(p.drive.omega2) * amplitude;
    for (double d : delta_r)
        out.values.push_back(scale * lorentzian(d, w));
    out.meta.source = std::move(source);
    out.meta.params = {{"Gamma_21", p.gamma21()},
                       {"Gamma_D_res", p.residual_doppler_width()},
                       {"eta", p.eta()},
                       {"hwhm", w},
                       {"amplitude", amplitude}};
    out.meta.flags = p.flags();
    return out;
}

}  // namespace

double CptParams::eta() const
{
    double const gres = residual_doppler_width();
    if (gres == 0.0)
        return 0.0;
    if (!(motion.gamma > 0.0))
        throw DomainError("eta needs gamma > 0");
    return gres / motion.gamma;
}

double CptParams::cross_rate_sq() const
{
    return geom.q1.dot(geom.q2) * sq(motion.v_th);
}

double CptParams::amplitude_shift() const
{
    double const num = geom.q1.dot(geom.difference()) * sq(motion.v_th);
    if (num == 0.0)
        return 0.0;
    if (!(motion.gamma > 0.0))
        throw DomainError("the intermediate-regime amplitude needs gamma > 0");
    return num / motion.gamma;
}

void CptParams::validate() const
{
    system.validate();
    motion.validate();
    if (!std::isfinite(drive.omega1) || !std::isfinite(drive.omega2)
        || !std::isfinite(drive.delta1))
        throw DomainError("drive parameters must be finite");
    if (!(geom.q1.norm() > 0.0))
        throw DomainError("probe wave-vector must be non-zero");
}

std::vector<std::string> CptParams::flags() const
{
    std::vector<std::string> out;
    double const g21 = gamma21();
    double const g1 = system.gamma1;
    double const gd = doppler_width();
    double const gres = residual_doppler_width();
    double const gc = motion.gamma;
    if (sq(drive.omega2) >= 0.1 * g21 * g1)
        out.emplace_back("low_contrast_violated");
    if (std::abs(drive.omega1) >= 0.1 * std::abs(drive.omega2))
        out.emplace_back("weak_probe_violated");
    if (!(gd > 10.0 * g1))
        out.emplace_back("not_far_doppler_gamma1");
    if (!(gd > 10.0 * gc))
        out.emplace_back("not_far_doppler_collisions");
    if (gc < 10.0 * gres)
        out.emplace_back("not_dicke_residual");
    if (!(gres >= 10.0 * g21))
        out.emplace_back("residual_below_ground_width");
    if (drive.delta1 != 0.0)
        out.emplace_back("delta1_nonzero_experimental");
    return out;
}

CptParams cpt_collinear_from_widths(double gamma1, double gamma21,
                                    double gamma_d, double gamma_d_res,
                                    double collision_rate, double omega2)
{
    if (!(gamma_d > gamma_d_res) || !(gamma_d_res >= 0.0))
        throw DomainError("need Gamma_D > Gamma_D^res >= 0");
    CptParams p;
    p.system.gamma1 = gamma1;
    p.system.gamma_ad = 0.5 * gamma21;
    p.drive.omega2 = omega2;
    p.drive.omega1 = 0.0;
    p.motion = {1.0, collision_rate, VelocityModel::BrownianMotion};
    p.geom.q1 = Vec3(gamma_d, 0.0, 0.0);
    p.geom.q2 = Vec3(gamma_d - gamma_d_res, 0.0, 0.0);
    return p;
}

Spectrum one_photon_spectrum(CptParams const& p,
                             std::span<double const> detunings1,
                             SpectrumOptions const& opts)
{
    p.validate();
    TwoLevelParams tl;
    tl.gamma = p.system.gamma1;
    tl.geom = p.geom;
    tl.motion = p.motion;
    auto out = spectrum_general(tl, detunings1, opts);
    out.meta.source = "cpt.one_photon";
    return out;
}

std::complex<double> cpt_kernel(CptParams const& p, double tau,
                                CptOptions const& opts)
{
    p.validate();
    if (!(tau >= 0.0))
        throw DomainError("cpt_kernel needs tau >= 0");
    KernelEvaluator const eval(p, opts);
    return eval.at_tau(tau);
}

Spectrum cpt_dip_general(CptParams const& p, std::span<double const> delta_r,
                         CptOptions const& opts)
{
    p.validate();
    check_grid(delta_r);
    double const g21 = p.gamma21();
    double const gres = p.residual_doppler_width();
    double const gc = p.motion.gamma;
    if (g21 == 0.0 && gres == 0.0)
        throw DomainError(
            "CPT dip does not decay: Gamma_21 and Gamma_D^res are both 0");

    KernelEvaluator const eval(p, opts);
    auto envelope = [&](double tau) {
        return std::exp(-g21 * tau - sq(gres) * relaxed_square(gc, tau));
    };
    double const slow = std::max(g21, gres);
    double const tau_max = decay_time(envelope, opts.truncation, 1.0 / slow);

    double max_freq = 0.0;
    for (double d : delta_r)
        max_freq = std::max(max_freq, std::abs(d));
    double const width_cap = max_freq > 0.0 ? 0.5 * kPi / max_freq : tau_max;
    double const fast = std::max({g21, gres, gc, p.doppler_width(),
                                  p.system.gamma1});
    auto const seeds = geometric_breakpoints(0.0, tau_max, 0.125 / fast);

    auto const transformed = fourier_half_line(
        [&](double tau) { return envelope(tau) * eval.at_tau(tau); },
        p.drive.delta1 == 0.0, seeds, width_cap, delta_r, opts.transform);

    Spectrum out;
    out.detunings.assign(delta_r.begin(), delta_r.end());
    out.values.reserve(delta_r.size());
    double const scale = -sq(p.drive.omega2);
    for (double v : transformed.values)
        out.values.push_back(scale * v);
    out.meta.source = "cpt.general";
    out.meta.params = {{"Gamma_1", p.system.gamma1},
                       {"Gamma_21", g21},
                       {"Gamma_D", p.doppler_width()},
                       {"Gamma_D_res", gres},
                       {"gamma", gc},
                       {"tau_max", tau_max},
                       {"kernel_evaluations",
                        static_cast<double>(transformed.kernel_evaluations)}};
    out.meta.flags = p.flags();
    return out;
}

double cpt_predicted_hwhm(CptParams const& p)
{
    return p.gamma21() + p.eta() * p.residual_doppler_width();
}

Spectrum cpt_dip_intermediate(CptParams const& p,
                              std::span<double const> delta_r)
{
    p.validate();
    double const denom = p.system.gamma1 + p.amplitude_shift();
    if (denom == 0.0)
        throw DomainError("intermediate-regime amplitude has a zero denominator");
    return lorentzian_dip(p, delta_r, 1.0 / sq(denom), "cpt.intermediate");
}

Spectrum cpt_dip_collinear(CptParams const& p, std::span<double const> delta_r)
{
    p.validate();
    double const angle = beam_angle(p.geom);
    if (!(angle < 1e-9))
    {
        std::ostringstream msg;
        msg << "collinear form needs parallel beams (angle " << angle
            << " rad)";
        throw DomainError(msg.str());
    }
    double const denom = p.system.gamma1 + p.eta() * p.doppler_width();
    if (denom == 0.0)
        throw DomainError("collinear amplitude has a zero denominator");
    return lorentzian_dip(p, delta_r, 1.0 / sq(denom), "cpt.collinear");
}

std::string to_string(DipMethod method)
{
    switch (method)
    {
        case DipMethod::General:
            return "general";
        case DipMethod::Intermediate:
            return "intermediate";
        case DipMethod::Collinear:
            return "collinear";
    }
    return "unknown";
}

DipMethod dip_method_from_string(std::string const& name)
{
    if (name == "general")
        return DipMethod::General;
    if (name == "intermediate")
        return DipMethod::Intermediate;
    if (name == "collinear")
        return DipMethod::Collinear;
    throw DomainError("unknown dip method '" + name
                      + "' (expected general, intermediate or collinear)");
}

Spectrum cpt_dip(CptParams const& p, std::span<double const> delta_r,
                 DipMethod method, CptOptions const& opts)
{
    switch (method)
    {
        case DipMethod::General:
            return cpt_dip_general(p, delta_r, opts);
        case DipMethod::Intermediate:
            return cpt_dip_intermediate(p, delta_r);
        case DipMethod::Collinear:
            return cpt_dip_collinear(p, delta_r);
    }
    throw DomainError("unknown dip method");
}

Spectrum full_probe_spectrum(CptParams const& p,
                             std::span<double const> delta_r,
                             DipMethod method, CptOptions const& opts)
{
    p.validate();
    check_grid(delta_r);
    double const d1[] = {p.drive.delta1};
    SpectrumOptions so;
    so.truncation = opts.truncation;
    so.transform = opts.transform;
    double const s1 = one_photon_spectrum(p, d1, so).values.front();

    Spectrum out;
    out.detunings.assign(delta_r.begin(), delta_r.end());
    if (p.drive.omega2 == 0.0)
    {
        out.values.assign(delta_r.size(), s1);
    }
    else
    {
        auto const dip = cpt_dip(p, delta_r, method, opts);
        out.values.reserve(delta_r.size());
        for (double v : dip.values)
            out.values.push_back(s1 + v);
        out.meta.params = dip.meta.params;
    }
    out.meta.source = "cpt.full." + to_string(method);
    out.meta.params["S1"] = s1;
    out.meta.flags = p.flags();
    return out;
}

}  // namespace dicke
