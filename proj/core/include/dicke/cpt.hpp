#pragma once

// CPT two-photon dip of a Lambda atom with thermal motion and velocity
// changing collisions, plus the one-photon background.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "dicke/model.hpp"
#include "dicke/quadrature.hpp"
#include "dicke/twolevel.hpp"

namespace dicke {

struct CptParams
{
    LambdaSystem system;
    DriveParams drive;
    FieldGeometry geom;
    MotionParams motion;

    double gamma21() const { return system.ground_decay(); }
    double doppler_width() const { return dicke::doppler_width(geom.q1, motion); }
    double residual_doppler_width() const
    {
        return dicke::residual_doppler_width(geom, motion);
    }
    /// Gamma_D^res / gamma (0 when gamma == 0 and there is no residual width).
    double eta() const;
    /// q1 . q2 v_th^2
    double cross_rate_sq() const;
    /// q1 . (q1 - q2) v_th^2 / gamma
    double amplitude_shift() const;

    void validate() const;
    /// Validity flags of the perturbative and intermediate-regime results.
    std::vector<std::string> flags() const;
};

/// Dimensionless builder: v_th = 1, probe wave-vector along x with length
/// gamma_d, pump wave-vector collinear with length gamma_d - gamma_d_res.
CptParams cpt_collinear_from_widths(double gamma1, double gamma21,
                                    double gamma_d, double gamma_d_res,
                                    double collision_rate, double omega2);

struct CptOptions
{
    double inner_rel_tol = 1e-10;
    double outer_rel_tol = 1e-9;
    double truncation = 1e-12;
    TransformOptions transform{};
};

/// Small-signal one-photon spectrum versus Delta_1.
Spectrum one_photon_spectrum(CptParams const& p,
                             std::span<double const> detunings1,
                             SpectrumOptions const& opts = {});

/// Inner double integral of the general dip. Real for Delta_1 = 0.
std::complex<double> cpt_kernel(CptParams const& p, double tau,
                                CptOptions const& opts = {});

/// General dip: -|Omega_2|^2 Re int exp((i Delta_R - Gamma_21) tau
/// - Gamma_res^2 G(gamma tau)/gamma^2) F(tau) dtau.
Spectrum cpt_dip_general(CptParams const& p, std::span<double const> delta_r,
                         CptOptions const& opts = {});

/// Lorentzian closed form of the intermediate regime.
Spectrum cpt_dip_intermediate(CptParams const& p,
                              std::span<double const> delta_r);

/// Closed form for parallel beams; throws DomainError otherwise.
Spectrum cpt_dip_collinear(CptParams const& p, std::span<double const> delta_r);

/// Gamma_21 + eta Gamma_D^res
double cpt_predicted_hwhm(CptParams const& p);

enum class DipMethod
{
    General,
    Intermediate,
    Collinear,
};

std::string to_string(DipMethod method);
DipMethod dip_method_from_string(std::string const& name);

Spectrum cpt_dip(CptParams const& p, std::span<double const> delta_r,
                 DipMethod method, CptOptions const& opts = {});

/// S1(Delta_1) + S2(Delta_R) on the Raman grid at the drive's Delta_1.
Spectrum full_probe_spectrum(CptParams const& p,
                             std::span<double const> delta_r,
                             DipMethod method = DipMethod::General,
                             CptOptions const& opts = {});

}  // namespace dicke
