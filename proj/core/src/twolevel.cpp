#include "dicke/twolevel.hpp"

#include <algorithm>
#include <cmath>

#include "dicke/error.hpp"

namespace dicke {

void TwoLevelParams::validate() const
{
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw DomainError("Gamma must be finite and >= 0");
    motion.validate();
}

TwoLevelParams two_level_from_widths(double gamma, double doppler_width,
                                     double collision_rate, VelocityModel model)
{
    TwoLevelParams p;
    p.gamma = gamma;
    p.motion = {1.0, collision_rate, model};
    p.geom.q1 = Vec3(doppler_width, 0.0, 0.0);
    p.geom.q2 = Vec3::Zero();
    return p;
}

double two_level_kernel(TwoLevelParams const& p, double tau)
{
    double const gd = p.doppler_width();
    return std::exp(-p.gamma * tau
                    - gd * gd * relaxed_square(p.motion.gamma, tau));
}

Spectrum spectrum_general(TwoLevelParams const& p,
                          std::span<double const> detunings,
                          SpectrumOptions const& opts)
{
    p.validate();
    check_grid(detunings);
    double const gd = p.doppler_width();
    if (p.gamma == 0.0 && gd == 0.0)
        throw DomainError("kernel does not decay: Gamma and Gamma_D are both 0");

    double const rate = std::max(p.gamma, gd);
    auto envelope = [&](double tau) { return two_level_kernel(p, tau); };
    double const tau_max = decay_time(envelope, opts.truncation, 1.0 / rate);

    double max_freq = 0.0;
    for (double d : detunings)
        max_freq = std::max(max_freq, std::abs(d));
    double const width_cap = max_freq > 0.0 ? 0.25 * (2.0 * kPi / max_freq)
                                            : tau_max;
    auto const seeds = geometric_breakpoints(0.0, tau_max, 0.125 / rate);

    auto const transformed = fourier_half_line(
        [&](double tau) { return std::complex<double>(envelope(tau), 0.0); },
        true, seeds, width_cap, detunings, opts.transform);

    Spectrum out;
    out.detunings.assign(detunings.begin(), detunings.end());
    out.values = transformed.values;
    out.meta.source = "twolevel.general";
    out.meta.params = {{"Gamma", p.gamma},
                       {"Gamma_D", gd},
                       {"gamma", p.motion.gamma},
                       {"tau_max", tau_max}};
    return out;
}

Spectrum spectrum_doppler_limit(TwoLevelParams const& p,
                                std::span<double const> detunings)
{
    check_grid(detunings);
    double const gd = p.doppler_width();
    if (!(gd > 0.0))
        throw DomainError("Doppler limit needs Gamma_D > 0");
    Spectrum out;
    out.detunings.assign(detunings.begin(), detunings.end());
    out.values.reserve(detunings.size());
    double const norm = std::sqrt(0.5 * kPi) / gd;
    for (double d : detunings)
        out.values.push_back(norm * std::exp(-d * d / (2.0 * gd * gd)));
    out.meta.source = "twolevel.doppler";
    out.meta.params = {{"Gamma_D", gd}};
    return out;
}

double dicke_limit_width(TwoLevelParams const& p)
{
    if (!(p.motion.gamma > 0.0))
        throw DomainError("Dicke limit needs gamma > 0");
    double const gd = p.doppler_width();
    return p.gamma + gd * gd / p.motion.gamma;
}

Spectrum spectrum_dicke_limit(TwoLevelParams const& p,
                              std::span<double const> detunings)
{
    check_grid(detunings);
    double const w = dicke_limit_width(p);
    if (!(w > 0.0))
        throw DomainError("Dicke limit width vanishes");
    Spectrum out;
    out.detunings.assign(detunings.begin(), detunings.end());
    out.values.reserve(detunings.size());
    for (double d : detunings)
        out.values.push_back(w / (d * d + w * w));
    out.meta.source = "twolevel.dicke";
    out.meta.params = {{"Gamma", p.gamma},
                       {"Gamma_D", p.doppler_width()},
                       {"gamma", p.motion.gamma},
                       {"width", w}};
    return out;
}

std::string to_string(Regime regime)
{
    switch (regime)
    {
        case Regime::Doppler:
            return "doppler";
        case Regime::Dicke:
            return "dicke";
        case Regime::Intermediate:
            return "intermediate";
    }
    return "unknown";
}

Regime regime_classify(TwoLevelParams const& p, double r_lo, double r_hi)
{
    double const gd = p.doppler_width();
    if (p.motion.gamma < r_lo * gd)
        return Regime::Doppler;
    if (p.motion.gamma > r_hi * gd)
        return Regime::Dicke;
    return Regime::Intermediate;
}

}  // namespace dicke
