#pragma once

// Line-shape metrics, Lorentzian fits and the narrowing report.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dicke/cpt.hpp"
#include "dicke/model.hpp"
#include "dicke/twolevel.hpp"

namespace dicke {

/// Baseline: mean of the medians of the outer `fraction` of points on each
/// side (at least one point per side).
double wing_baseline(Spectrum const& spec, double fraction = 0.1);

struct PeakInfo
{
    double position = 0.0;
    double value = 0.0;
    bool is_dip = false;
    std::size_t index = 0;
};

/// Extremum furthest from the wing baseline, refined by a parabola through
/// the neighbouring points. Throws if the spectrum is flat or the extremum
/// sits on the grid edge.
PeakInfo peak(Spectrum const& spec);

struct FwhmOptions
{
    std::optional<double> baseline;  // default: wing_baseline
};

/// Full width at half maximum (half depth for dips) from linearly
/// interpolated crossings. Throws DomainError naming the side ("left" or
/// "right") that never crosses.
double fwhm(Spectrum const& spec, FwhmOptions const& opts = {});

struct LorentzFit
{
    double center = 0.0;
    double hwhm = 0.0;
    double amplitude = 0.0;  // a in a w / ((x - c)^2 + w^2) + b
    double offset = 0.0;
    double rms_residual = 0.0;
    int iterations = 0;
};

struct FitOptions
{
    int max_evaluations = 2000;
    /// Fit only points with |x - x_peak| <= window (0: all points).
    double window = 0.0;
};

/// Levenberg-Marquardt fit of a w / ((x - c)^2 + w^2) + b.
LorentzFit fit_lorentzian(Spectrum const& spec, FitOptions const& opts = {});

/// Lorentzian model value.
double lorentzian_model(LorentzFit const& fit, double x);

struct LineMetrics
{
    double peak_position = 0.0;
    double peak_value = 0.0;
    bool is_dip = false;
    double fwhm = 0.0;
    std::optional<LorentzFit> fit;
    std::optional<Regime> regime;
};

LineMetrics line_metrics(Spectrum const& spec, bool with_fit = true);

struct NarrowingReport
{
    double gamma_d = 0.0;
    double gamma_d_res = 0.0;
    double mean_free_path = 0.0;
    double cpt_wavelength = 0.0;
    double eta = 0.0;
    double gamma21 = 0.0;
    double predicted_hwhm = 0.0;
    double naive_width = 0.0;  // residual Doppler width without narrowing
    double narrowing_factor = 0.0;  // predicted broadening / naive width
    Regime one_photon_regime = Regime::Intermediate;
    std::vector<std::string> flags;
};

NarrowingReport narrowing_report(CptParams const& p);

/// "key = value" lines, 17 significant digits.
std::string to_key_values(NarrowingReport const& report);

/// Rb-87 D1 defaults: collinear beams split by the hyperfine frequency,
/// v_th = 240 m/s, gamma = v_th / mean_free_path.
struct RubidiumDefaults
{
    double hyperfine = 2.0 * kPi * 6.834682610904e9;  // rad/s
    double wavelength = 794.978851e-9;               // m
    double v_th = 240.0;                              // m/s
    double gamma1 = 2.0 * kPi * 2.875e6;              // rad/s
    double gamma2 = 2.0 * kPi * 2.875e6;
    double ground_width = 2.0 * kPi * 50.0;           // Gamma_21
    double omega1 = 2.0 * kPi * 1.0;
    double omega2 = 2.0 * kPi * 20.0;
};

CptParams rubidium_params(double mean_free_path,
                          RubidiumDefaults const& rb = {});

}  // namespace dicke
