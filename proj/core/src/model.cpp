#include "dicke/model.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <limits>

#include "dicke/error.hpp"

namespace dicke {
namespace {

constexpr double kSeriesCrossover = 1e-3;

}  // namespace

std::string to_string(VelocityModel model)
{
    switch (model)
    {
        case VelocityModel::BrownianMotion:
            return "brownian";
        case VelocityModel::StrongCollisions:
            return "strong";
    }
    return "unknown";
}

VelocityModel velocity_model_from_string(std::string const& name)
{
    if (name == "brownian" || name == "BrownianMotion")
        return VelocityModel::BrownianMotion;
    if (name == "strong" || name == "StrongCollisions")
        return VelocityModel::StrongCollisions;
    throw DomainError("unknown velocity model '" + name
                      + "' (expected brownian or strong)");
}

void MotionParams::validate() const
{
    if (!(v_th >= 0.0) || !std::isfinite(v_th))
        throw DomainError("v_th must be finite and >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw DomainError("gamma must be finite and >= 0");
}

double MotionParams::mean_free_path() const
{
    if (gamma == 0.0)
        return std::numeric_limits<double>::infinity();
    return v_th / gamma;
}

void LambdaSystem::validate() const
{
    for (double rate : {gamma1, gamma2, gamma_pop, gamma_ad})
    {
        if (!(rate >= 0.0) || !std::isfinite(rate))
            throw DomainError("relaxation rates must be finite and >= 0");
    }
}

double LambdaSystem::coherence_decay() const
{
    return 0.5 * (gamma1 + gamma2 + gamma_pop + gamma_ad);
}

double LambdaSystem::ground_decay() const
{
    return gamma_pop + 2.0 * gamma_ad;
}

void check_grid(std::span<double const> detunings)
{
    if (detunings.empty())
        throw DomainError("detuning grid is empty");
    for (std::size_t i = 0; i < detunings.size(); ++i)
    {
        if (!std::isfinite(detunings[i]))
            throw DomainError("detuning grid contains a non-finite value");
        if (i > 0 && !(detunings[i] > detunings[i - 1]))
            throw DomainError("detuning grid must be strictly increasing");
    }
}

void Spectrum::validate() const
{
    check_grid(detunings);
    if (values.size() != detunings.size())
        throw DomainError("spectrum values and detunings differ in length");
    for (double v : values)
    {
        if (!std::isfinite(v))
            throw DomainError("spectrum contains a non-finite value");
    }
    if (std_errors && std_errors->size() != detunings.size())
        throw DomainError("spectrum errors and detunings differ in length");
}

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (n < 2)
        throw DomainError("linspace needs at least 2 points");
    std::vector<double> out(n);
    double const step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

double memory_g(double x)
{
    if (!(x >= 0.0))
        throw DomainError("memory_g requires x >= 0");
    if (x < kSeriesCrossover)
    {
        // x^2/2 - x^3/6 + x^4/24 - x^5/120
        return x * x
               * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)));
    }
    return x + std::expm1(-x);
}

double relaxed_time(double gamma, double t)
{
    if (gamma == 0.0)
        return t;
    return -std::expm1(-gamma * t) / gamma;
}

double relaxed_square(double gamma, double t)
{
    if (gamma == 0.0)
        return 0.5 * t * t;
    return memory_g(gamma * t) / (gamma * gamma);
}

double velocity_autocorrelation(MotionParams const& motion, double t,
                                int axis_a, int axis_b)
{
    if (axis_a != axis_b)
        return 0.0;
    return motion.v_th * motion.v_th * std::exp(-motion.gamma * std::abs(t));
}

double phase_variance(double q_mag, MotionParams const& motion, double tau)
{
    if (!(tau >= 0.0))
        throw DomainError("phase_variance requires tau >= 0");
    double const qv = q_mag * motion.v_th;
    return 2.0 * qv * qv * relaxed_square(motion.gamma, tau);
}

double doppler_width(Vec3 const& q, MotionParams const& motion)
{
    return q.norm() * motion.v_th;
}

double residual_doppler_width(FieldGeometry const& geom,
                              MotionParams const& motion)
{
    return geom.difference().norm() * motion.v_th;
}

DickeParameter dicke_parameter(FieldGeometry const& geom,
                               MotionParams const& motion)
{
    if (!(motion.gamma > 0.0))
        throw DomainError("the Dicke parameter needs gamma > 0");
    double const dq = geom.difference().norm();
    DickeParameter out;
    out.mean_free_path = motion.v_th / motion.gamma;
    out.eta = dq * motion.v_th / motion.gamma;
    out.cpt_wavelength = dq > 0.0 ? 2.0 * kPi / dq
                                  : std::numeric_limits<double>::infinity();
    return out;
}

FieldGeometry geometry_from_angle(double q_mag1, double q_mag2, double theta)
{
    if (!(q_mag1 > 0.0) || !(q_mag2 > 0.0))
        throw DomainError("wave-vector magnitudes must be > 0");
    if (!(theta >= 0.0 && theta <= kPi))
        throw DomainError("theta must lie in [0, pi]");
    FieldGeometry geom;
    geom.q1 = Vec3(q_mag1, 0.0, 0.0);
    geom.q2 = Vec3(q_mag2 * std::cos(theta), q_mag2 * std::sin(theta), 0.0);
    return geom;
}

double beam_angle(FieldGeometry const& geom)
{
    double const n1 = geom.q1.norm();
    double const n2 = geom.q2.norm();
    if (n1 == 0.0 || n2 == 0.0)
        return 0.0;
    // atan2 form stays accurate for nearly parallel beams
    return std::atan2(geom.q1.cross(geom.q2).norm(), geom.q1.dot(geom.q2));
}

double thermal_velocity(double temperature_kelvin, double mass_kg)
{
    if (!(temperature_kelvin >= 0.0) || !(mass_kg > 0.0))
        throw DomainError("temperature must be >= 0 and mass > 0");
    return std::sqrt(kBoltzmann * temperature_kelvin / mass_kg);
}

}  // namespace dicke
