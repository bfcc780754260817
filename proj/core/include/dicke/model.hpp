#pragma once

// Domain types and kinematic quantities shared by every line-shape module.
//
// Unit convention: rates, detunings and Rabi frequencies are angular
// quantities [rad/s], wave-vectors are [rad/m] and speeds [m/s]. Hz only
// appears at I/O boundaries (see the CLI config loader). A dimensionless run
// simply sets a reference rate to 1.

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dicke {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg

enum class VelocityModel
{
    BrownianMotion,
    StrongCollisions,
};

std::string to_string(VelocityModel model);
VelocityModel velocity_model_from_string(std::string const& name);

/// Thermal motion of the absorbers.
///
/// `v_th` is the per-axis RMS speed sqrt(k_B T / m). `gamma` is the velocity
/// relaxation rate (Brownian motion) or the collision rate (strong
/// collisions); both models share the correlation v_th^2 exp(-gamma |t|), so
/// the model selector only matters to the stochastic samplers.
struct MotionParams
{
    double v_th = 0.0;
    double gamma = 0.0;
    VelocityModel model = VelocityModel::BrownianMotion;

    /// Throws DomainError if v_th < 0 or gamma < 0.
    void validate() const;
    /// Mean free path v_th / gamma (infinite for gamma == 0).
    double mean_free_path() const;
};

/// Wave-vectors of the probe (q1) and pump (q2) fields.
struct FieldGeometry
{
    Vec3 q1 = Vec3::Zero();
    Vec3 q2 = Vec3::Zero();

    Vec3 difference() const { return q1 - q2; }
};

/// Relaxation and level structure of the Lambda atom.
///
/// Only the four primitive rates are stored; the optical coherence decay
/// Gamma_C and the ground-state coherence decay Gamma_21 are always derived.
struct LambdaSystem
{
    double gamma1 = 0.0;      // |3> -> |1> decay
    double gamma2 = 0.0;      // |3> -> |2> decay
    double gamma_pop = 0.0;   // ground population exchange |1> <-> |2>
    double gamma_ad = 0.0;    // adiabatic ground-state decoherence
    double omega21 = 0.0;     // ground splitting (bookkeeping only)

    void validate() const;
    /// (Gamma_1 + Gamma_2 + Gamma_pop + Gamma_ad) / 2
    double coherence_decay() const;
    /// Gamma_pop + 2 Gamma_ad
    double ground_decay() const;
};

/// Drive fields. Rabi frequencies are magnitudes; the optional phases only
/// rotate the field and must not change any observable.
struct DriveParams
{
    double omega1 = 0.0;  // probe
    double omega2 = 0.0;  // pump
    double delta1 = 0.0;  // one-photon detuning omega_31 - omega_1
    double phase1 = 0.0;
    double phase2 = 0.0;
};

/// Provenance attached to every spectrum.
struct SpectrumMeta
{
    std::string source;
    std::map<std::string, double> params;
    std::vector<std::string> flags;
};

/// Sampled line shape. Detunings are strictly increasing; `std_errors` is
/// present exactly when the producer is stochastic.
struct Spectrum
{
    std::vector<double> detunings;
    std::vector<double> values;
    std::optional<std::vector<double>> std_errors;
    SpectrumMeta meta;

    std::size_t size() const { return detunings.size(); }
    void validate() const;
};

/// Detunings are strictly increasing and non-empty; throws DomainError.
void check_grid(std::span<double const> detunings);

/// n evenly spaced points on [lo, hi], n >= 2.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// G(x) = x - 1 + exp(-x), x >= 0.
double memory_g(double x);

/// (1 - exp(-gamma t)) / gamma, with the gamma -> 0 limit t.
double relaxed_time(double gamma, double t);

/// G(gamma t) / gamma^2, with the gamma -> 0 limit t^2 / 2.
double relaxed_square(double gamma, double t);

/// <u_a(t) u_b(0)> = delta_ab v_th^2 exp(-gamma |t|). Axes are 0, 1, 2.
double velocity_autocorrelation(MotionParams const& motion, double t,
                                int axis_a, int axis_b);

/// Variance of the Doppler phase q . [r(tau) - r(0)] accumulated during tau.
double phase_variance(double q_mag, MotionParams const& motion, double tau);

/// |q| v_th.
double doppler_width(Vec3 const& q, MotionParams const& motion);

/// |q1 - q2| v_th.
double residual_doppler_width(FieldGeometry const& geom,
                              MotionParams const& motion);

struct DickeParameter
{
    double eta = 0.0;              // residual Doppler width / gamma
    double mean_free_path = 0.0;   // v_th / gamma
    double cpt_wavelength = 0.0;   // 2 pi / |q1 - q2|, +inf for q1 == q2
};

DickeParameter dicke_parameter(FieldGeometry const& geom,
                               MotionParams const& motion);

/// q1 along +x, q2 in the x-y plane at angle theta from q1.
FieldGeometry geometry_from_angle(double q_mag1, double q_mag2, double theta);

/// Angle between the two wave-vectors (0 if either vanishes).
double beam_angle(FieldGeometry const& geom);

/// sqrt(k_B T / m).
double thermal_velocity(double temperature_kelvin, double mass_kg);

}  // namespace dicke
