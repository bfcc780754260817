#include "dicke/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>

#include "dicke/error.hpp"

namespace dicke {
namespace {

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    std::size_t const n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void require_points(Spectrum const& spec, std::size_t n, char const* what)
{
    spec.validate();
    if (spec.size() < n)
    {
        std::ostringstream msg;
        msg << what << " needs at least " << n << " points";
        throw DomainError(msg.str());
    }
}

// Normalised Lorentzian residuals: p = (a, c, w, b).
struct LorentzFunctor
{
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum
    {
        InputsAtCompileTime = Eigen::Dynamic,
        ValuesAtCompileTime = Eigen::Dynamic
    };

    std::vector<double> x;
    std::vector<double> y;

    int inputs() const { return 4; }
    int values() const { return static_cast<int>(x.size()); }

    int operator()(Eigen::VectorXd const& p, Eigen::VectorXd& f) const
    {
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            double const d = x[i] - p[1];
            f[i] = p[0] * p[2] / (d * d + p[2] * p[2]) + p[3] - y[i];
        }
        return 0;
    }

    int df(Eigen::VectorXd const& p, Eigen::MatrixXd& j) const
    {
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            double const d = x[i] - p[1];
            double const w = p[2];
            double const den = d * d + w * w;
            j(i, 0) = w / den;
            j(i, 1) = 2.0 * p[0] * w * d / (den * den);
            j(i, 2) = p[0] * (d * d - w * w) / (den * den);
            j(i, 3) = 1.0;
        }
        return 0;
    }
};

}  // namespace

double wing_baseline(Spectrum const& spec, double fraction)
{
    require_points(spec, 2, "wing_baseline");
    std::size_t const n = spec.size();
    auto const k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
    std::vector<double> left(spec.values.begin(), spec.values.begin() + k);
    std::vector<double> right(spec.values.end() - k, spec.values.end());
    return 0.5 * (median(left) + median(right));
}

PeakInfo peak(Spectrum const& spec)
{
    require_points(spec, 3, "peak");
    double const base = wing_baseline(spec);
    auto const& v = spec.values;
    std::size_t best = 0;
    double dev = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        double const d = std::abs(v[i] - base);
        if (d > dev)
        {
            dev = d;
            best = i;
        }
    }
    auto const [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi - *lo <= 1e-14 * std::max(std::abs(*hi), std::abs(*lo)))
        throw DomainError("spectrum is flat: no extremum");
    if (best == 0 || best + 1 == v.size())
        throw DomainError("no interior extremum (spectrum is monotone at the "
                          "edge of the grid)");

    PeakInfo out;
    out.index = best;
    out.is_dip = v[best] < base;
    // parabola through three (possibly unevenly spaced) points
    double const x0 = spec.detunings[best - 1];
    double const x1 = spec.detunings[best];
    double const x2 = spec.detunings[best + 1];
    double const y0 = v[best - 1];
    double const y1 = v[best];
    double const y2 = v[best + 1];
    double const d01 = (y1 - y0) / (x1 - x0);
    double const d12 = (y2 - y1) / (x2 - x1);
    double const curv = (d12 - d01) / (x2 - x0);
    if (curv == 0.0)
    {
        out.position = x1;
        out.value = y1;
        return out;
    }
    double const slope = d01 - curv * (x0 + x1);
    double xv = -slope / (2.0 * curv);
    xv = std::clamp(xv, x0, x2);
    out.position = xv;
    out.value = y1 + (xv - x1) * (d01 + curv * (xv - x0));
    return out;
}

double fwhm(Spectrum const& spec, FwhmOptions const& opts)
{
    auto const pk = peak(spec);
    double const base = opts.baseline ? *opts.baseline : wing_baseline(spec);
    double const half = base + 0.5 * (spec.values[pk.index] - base);
    auto const& x = spec.detunings;
    auto const& v = spec.values;
    auto beyond = [&](double value) {
        return pk.is_dip ? value >= half : value <= half;
    };
    auto crossing = [&](std::size_t inside, std::size_t outside) {
        double const f = (half - v[inside]) / (v[outside] - v[inside]);
        return x[inside] + f * (x[outside] - x[inside]);
    };

    std::optional<double> left;
    for (std::size_t i = pk.index; i > 0; --i)
    {
        if (beyond(v[i - 1]))
        {
            left = crossing(i, i - 1);
            break;
        }
    }
    if (!left)
        throw DomainError("no half-maximum crossing on the left side");
    std::optional<double> right;
    for (std::size_t i = pk.index; i + 1 < v.size(); ++i)
    {
        if (beyond(v[i + 1]))
        {
            right = crossing(i, i + 1);
            break;
        }
    }
    if (!right)
        throw DomainError("no half-maximum crossing on the right side");
    return *right - *left;
}

double lorentzian_model(LorentzFit const& fit, double x)
{
    double const d = x - fit.center;
    return fit.amplitude * fit.hwhm / (d * d + fit.hwhm * fit.hwhm) + fit.offset;
}

LorentzFit fit_lorentzian(Spectrum const& spec, FitOptions const& opts)
{
    require_points(spec, 5, "fit_lorentzian");
    auto const pk = peak(spec);
    double const base = wing_baseline(spec);
    double width;
    try
    {
        width = 0.5 * fwhm(spec);
    }
    catch (DomainError const&)
    {
        // second-moment fallback when a crossing is missing
        double m0 = 0.0;
        double m2 = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i)
        {
            double const y = std::abs(spec.values[i] - base);
            double const d = spec.detunings[i] - pk.position;
            m0 += y;
            m2 += y * d * d;
        }
        width = m0 > 0.0 ? std::sqrt(m2 / m0) : 1.0;
    }
    if (!(width > 0.0))
        width = spec.detunings.back() - spec.detunings.front();

    // work in units of the initial width and the initial height
    double const height = pk.value - base;
    if (height == 0.0)
        throw DomainError("spectrum is flat: nothing to fit");
    LorentzFunctor fn;
    for (std::size_t i = 0; i < spec.size(); ++i)
    {
        double const xi = spec.detunings[i];
        if (opts.window > 0.0 && std::abs(xi - pk.position) > opts.window)
            continue;
        fn.x.push_back((xi - pk.position) / width);
        fn.y.push_back((spec.values[i] - base) / height);
    }
    if (fn.x.size() < 5)
        throw DomainError("fit window keeps fewer than 5 points");

    Eigen::VectorXd p(4);
    p << 1.0, 0.0, 1.0, 0.0;
    Eigen::LevenbergMarquardt<LorentzFunctor> lm(fn);
    lm.parameters.maxfev = opts.max_evaluations;
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    auto const status = lm.minimize(p);
    if (status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation
        || status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters
        || !p.allFinite())
    {
        std::ostringstream msg;
        msg << "Lorentzian fit did not converge (status "
            << static_cast<int>(status) << ") last iterate: center "
            << pk.position + p[1] * width << ", hwhm " << std::abs(p[2]) * width;
        throw ConvergenceError(msg.str());
    }

    LorentzFit fit;
    double const w = std::abs(p[2]);
    fit.center = pk.position + p[1] * width;
    fit.hwhm = w * width;
    fit.amplitude = p[0] * height * width * (p[2] < 0.0 ? -1.0 : 1.0);
    fit.offset = base + p[3] * height;
    fit.iterations = static_cast<int>(lm.iter);
    double ss = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
    {
        double const r = lorentzian_model(fit, spec.detunings[i]) - spec.values[i];
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(spec.size()));
    return fit;
}

LineMetrics line_metrics(Spectrum const& spec, bool with_fit)
{
    LineMetrics m;
    auto const pk = peak(spec);
    m.peak_position = pk.position;
    m.peak_value = pk.value;
    m.is_dip = pk.is_dip;
    m.fwhm = fwhm(spec);
    if (with_fit)
        m.fit = fit_lorentzian(spec);
    return m;
}

NarrowingReport narrowing_report(CptParams const& p)
{
    NarrowingReport r;
    r.gamma_d = p.doppler_width();
    r.gamma_d_res = p.residual_doppler_width();
    auto const dp = dicke_parameter(p.geom, p.motion);
    r.mean_free_path = dp.mean_free_path;
    r.cpt_wavelength = dp.cpt_wavelength;
    r.eta = dp.eta;
    r.gamma21 = p.gamma21();
    r.predicted_hwhm = r.gamma21 + r.eta * r.gamma_d_res;
    r.naive_width = r.gamma_d_res;
    r.narrowing_factor = r.gamma_d_res > 0.0 ? r.eta : 0.0;
    TwoLevelParams tl;
    tl.gamma = p.system.gamma1;
    tl.geom = p.geom;
    tl.motion = p.motion;
    r.one_photon_regime = regime_classify(tl);
    r.flags = p.flags();
    return r;
}

std::string to_key_values(NarrowingReport const& r)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "gamma_d = " << r.gamma_d << '\n'
       << "gamma_d_res = " << r.gamma_d_res << '\n'
       << "mean_free_path = " << r.mean_free_path << '\n'
       << "cpt_wavelength = " << r.cpt_wavelength << '\n'
       << "eta = " << r.eta << '\n'
       << "gamma21 = " << r.gamma21 << '\n'
       << "predicted_hwhm = " << r.predicted_hwhm << '\n'
       << "naive_width = " << r.naive_width << '\n'
       << "narrowing_factor = " << r.narrowing_factor << '\n'
       << "one_photon_regime = " << to_string(r.one_photon_regime) << '\n';
    os << "flags = ";
    for (std::size_t i = 0; i < r.flags.size(); ++i)
        os << (i ? "," : "") << r.flags[i];
    os << '\n';
    return os.str();
}

CptParams rubidium_params(double mean_free_path, RubidiumDefaults const& rb)
{
    if (!(mean_free_path > 0.0))
        throw DomainError("mean free path must be > 0");
    CptParams p;
    double const q1 = 2.0 * kPi / rb.wavelength;
    double const q2 = q1 - rb.hyperfine / kSpeedOfLight;
    p.geom.q1 = Vec3(q1, 0.0, 0.0);
    p.geom.q2 = Vec3(q2, 0.0, 0.0);
    p.motion = {rb.v_th, rb.v_th / mean_free_path,
                VelocityModel::StrongCollisions};
    p.system.gamma1 = rb.gamma1;
    p.system.gamma2 = rb.gamma2;
    p.system.gamma_ad = 0.5 * rb.ground_width;
    p.system.omega21 = rb.hyperfine;
    p.drive.omega1 = rb.omega1;
    p.drive.omega2 = rb.omega2;
    return p;
}

}  // namespace dicke
