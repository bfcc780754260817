#pragma once

// Two-level absorption line shape with Doppler broadening and
// collision-induced (Dicke) narrowing.

#include <span>
#include <string>

#include "dicke/model.hpp"
#include "dicke/quadrature.hpp"

namespace dicke {

struct TwoLevelParams
{
    double gamma = 0.0;  // homogeneous width
    FieldGeometry geom;  // q2 ignored
    MotionParams motion;

    double doppler_width() const { return dicke::doppler_width(geom.q1, motion); }
    void validate() const;
};

/// Convenience constructor for dimensionless runs: v_th = 1 and |q| equal to
/// the requested Doppler width.
TwoLevelParams two_level_from_widths(double gamma, double doppler_width,
                                     double collision_rate,
                                     VelocityModel model
                                     = VelocityModel::BrownianMotion);

/// exp(-Gamma tau - Gamma_D^2 G(gamma tau) / gamma^2), the phase-averaged
/// coherence decay.
double two_level_kernel(TwoLevelParams const& p, double tau);

struct SpectrumOptions
{
    double truncation = 1e-12;  // relative kernel level where tau is cut
    TransformOptions transform{};
};

/// Numerical half-line cosine transform of two_level_kernel.
Spectrum spectrum_general(TwoLevelParams const& p,
                          std::span<double const> detunings,
                          SpectrumOptions const& opts = {});

/// sqrt(pi/2) / Gamma_D exp(-Delta^2 / (2 Gamma_D^2)).
Spectrum spectrum_doppler_limit(TwoLevelParams const& p,
                                std::span<double const> detunings);

/// Lorentzian of half width Gamma + Gamma_D^2 / gamma.
Spectrum spectrum_dicke_limit(TwoLevelParams const& p,
                              std::span<double const> detunings);

/// Gamma + Gamma_D^2 / gamma (equivalently Gamma + (2 pi Lambda / lambda) Gamma_D).
double dicke_limit_width(TwoLevelParams const& p);

enum class Regime
{
    Doppler,
    Dicke,
    Intermediate,
};

std::string to_string(Regime regime);

/// Doppler if gamma < r_lo Gamma_D, Dicke if gamma > r_hi Gamma_D.
Regime regime_classify(TwoLevelParams const& p, double r_lo = 0.1,
                       double r_hi = 10.0);

}  // namespace dicke
