#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dicke::cli {
namespace {

using nlohmann::json;

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json metrics_json(LineMetrics const& m)
{
    json j;
    j["peak_position"] = number(m.peak_position);
    j["peak_value"] = number(m.peak_value);
    j["is_dip"] = m.is_dip;
    j["fwhm"] = number(m.fwhm);
    if (m.fit)
    {
        j["fit"] = {{"center", number(m.fit->center)},
                    {"hwhm", number(m.fit->hwhm)},
                    {"amplitude", number(m.fit->amplitude)},
                    {"offset", number(m.fit->offset)},
                    {"rms_residual", number(m.fit->rms_residual)}};
    }
    else
    {
        j["fit"] = nullptr;
    }
    return j;
}

// Peak, FWHM and Lorentzian fit; a failed fit leaves `fit` empty.
LineMetrics measure(Spectrum const& spec)
{
    LineMetrics m = line_metrics(spec, false);
    try
    {
        m.fit = fit_lorentzian(spec);
    }
    catch (ConvergenceError const&)
    {
    }
    return m;
}

// "# key = value" snapshot; output paths and the worker count do not change
// results and stay out so reruns produce identical files.
std::vector<std::string> snapshot(RunConfig const& cfg, std::string const& source)
{
    std::vector<std::string> out{"source = " + source,
                                 "command = " + to_string(cfg.command)};
    for (auto const& [key, value] : cfg.params.values())
    {
        if (key.starts_with("output.") || key == "run.threads")
            continue;
        out.push_back(key + " = " + value);
    }
    return out;
}

void add_flags(CommandOutput& out, std::vector<std::string> const& flags)
{
    for (auto const& f : flags)
    {
        out.flags.push_back(f);
        out.table.comments.push_back("flag = " + f);
    }
}

bool dimensionless(double reference_rate)
{
    return reference_rate == 1.0;
}

Curve curve_of(Spectrum const& s, std::string label, bool dashed = false)
{
    Curve c{std::move(label), s.detunings, s.values, {}, dashed};
    if (s.std_errors)
        c.err = *s.std_errors;
    return c;
}

CptOptions cpt_options(RunConfig const& cfg)
{
    CptOptions o;
    o.transform.threads = cfg.threads;
    return o;
}

SpectrumOptions spectrum_options(RunConfig const& cfg)
{
    SpectrumOptions o;
    o.transform.threads = cfg.threads;
    return o;
}

std::string detuning_label(double reference_rate, char const* what)
{
    return std::string(what)
           + (dimensionless(reference_rate) ? " (units of \xCE\x93)" : " [rad/s]");
}

// Map of the sweep variable onto the parameter keys for one sweep value.
ParamMap sweep_point(RunConfig const& cfg, double value)
{
    ParamMap p = cfg.params;
    auto const& var = cfg.sweep.variable;
    if (var == "theta")
    {
        p.set("geometry.theta", value);
    }
    else if (var == "gamma")
    {
        p.set("motion.gamma", value);
        p.set("motion.mean_free_path", "0");
    }
    else if (var == "pressure-proxy")
    {
        // collision rate proportional to buffer-gas pressure
        double const base = cfg.sweep.spectrum == "cpt" ? cfg.cpt.motion.gamma
                                                        : cfg.two_level.motion.gamma;
        p.set("motion.gamma", value * base);
        p.set("motion.mean_free_path", "0");
    }
    else if (var == "v_th")
    {
        // keep the wave-vectors fixed so the Doppler widths follow v_th
        Vec3 q1 = cfg.sweep.spectrum == "cpt" ? cfg.cpt.geom.q1 : cfg.two_level.geom.q1;
        Vec3 q2 = cfg.sweep.spectrum == "cpt" ? cfg.cpt.geom.q2 : q1;
        p.set("geometry.q1", q1.norm());
        p.set("geometry.q2", q2.norm());
        p.set("geometry.theta", beam_angle(FieldGeometry{q1, q2}));
        p.set("motion.v_th", value);
    }
    else if (var == "omega2")
    {
        p.set("drive.omega2", value);
    }
    return p;
}

}  // namespace

std::optional<double> loglog_slope(std::vector<double> const& x,
                                   std::vector<double> const& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
            continue;
        double const lx = std::log(x[i]);
        double const ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2)
        return std::nullopt;
    double const den = static_cast<double>(n) * sxx - sx * sx;
    if (den == 0.0)
        return std::nullopt;
    return (static_cast<double>(n) * sxy - sx * sy) / den;
}

CommandOutput run_two_level(RunConfig const& cfg)
{
    auto const& p = cfg.two_level;
    auto const grid = cfg.grid.values();
    Spectrum const spec = spectrum_general(p, grid, spectrum_options(cfg));

    CommandOutput out;
    out.source = spec.meta.source;
    out.table = spectrum_table(spec);
    out.table.comments = snapshot(cfg, out.source);

    LineMetrics const m = measure(spec);
    out.metrics = metrics_json(m);
    out.metrics["regime"] = to_string(regime_classify(p));
    out.metrics["doppler_width"] = number(p.doppler_width());
    if (p.motion.gamma > 0.0)
        out.metrics["dicke_limit_hwhm"] = number(dicke_limit_width(p));

    Plot plot;
    plot.title = "Two-level absorption";
    plot.xlabel = detuning_label(p.gamma, "detuning \xCE\x94");
    plot.ylabel = "S(\xCE\x94)";
    plot.curves.push_back(curve_of(spec, "general"));
    if (p.doppler_width() > 0.0)
        plot.curves.push_back(
            curve_of(spectrum_doppler_limit(p, grid), "Doppler limit", true));
    if (p.motion.gamma > 0.0)
        plot.curves.push_back(
            curve_of(spectrum_dicke_limit(p, grid), "Dicke limit", true));
    out.plot = std::move(plot);
    return out;
}

CommandOutput run_cpt(RunConfig const& cfg)
{
    auto const& p = cfg.cpt;
    auto const grid = cfg.grid.values();
    Spectrum const spec = cpt_dip(p, grid, cfg.method, cpt_options(cfg));

    CommandOutput out;
    out.source = spec.meta.source;
    out.table = spectrum_table(spec);
    out.table.comments = snapshot(cfg, out.source);
    add_flags(out, p.flags());

    LineMetrics const m = measure(spec);
    out.metrics = metrics_json(m);
    out.metrics["predicted_hwhm"] = number(cpt_predicted_hwhm(p));
    out.metrics["gamma21"] = number(p.gamma21());
    out.metrics["gamma_d_res"] = number(p.residual_doppler_width());
    if (p.motion.gamma > 0.0)
        out.metrics["eta"] = number(p.eta());

    Plot plot;
    plot.title = "CPT dip (" + to_string(cfg.method) + ")";
    plot.xlabel = detuning_label(p.gamma21(), "Raman detuning \xCE\x94R");
    plot.ylabel = "S2(\xCE\x94R)";
    plot.curves.push_back(curve_of(spec, to_string(cfg.method)));
    out.plot = std::move(plot);
    return out;
}

CommandOutput run_mc_validate(RunConfig const& cfg)
{
    auto const& p = cfg.two_level;
    std::size_t const n = cfg.samples > 0 ? cfg.samples : 20000;
    auto const grid = cfg.grid.values();
    double const q = p.geom.q1.norm();

    CommandOutput out;
    out.source = "montecarlo.validate";

    // phase factor against the Gaussian closure
    double tau_max = cfg.mc.tau_max;
    if (!(tau_max > 0.0))
    {
        double const scale = std::max({p.doppler_width(), p.motion.gamma, 1e-300});
        tau_max = decay_time(
            [&](double t) { return phase_factor_closure(q, p.motion, t); }, 1e-2,
            0.1 / scale, 1e6 / scale);
    }
    if (cfg.mc.tau_points < 1)
        throw ConfigError("mc.tau_points must be >= 1");
    std::vector<double> taus;
    for (std::size_t j = 1; j <= cfg.mc.tau_points; ++j)
        taus.push_back(tau_max * static_cast<double>(j)
                       / static_cast<double>(cfg.mc.tau_points));
    PhaseFactorOptions po;
    po.threads = cfg.threads;
    auto const pf = phase_factor_estimate(p.geom.q1, p.motion, taus, n, cfg.seed, po);
    double phase_z = 0.0;
    json phase_rows = json::array();
    for (std::size_t j = 0; j < taus.size(); ++j)
    {
        double const closed = phase_factor_closure(q, p.motion, taus[j]);
        double const z_re = pf.stderr_re[j] > 0.0
                                ? (pf.mean_re[j] - closed) / pf.stderr_re[j]
                                : 0.0;
        double const z_im = pf.stderr_im[j] > 0.0 ? pf.mean_im[j] / pf.stderr_im[j]
                                                  : 0.0;
        phase_z = std::max({phase_z, std::abs(z_re), std::abs(z_im)});
        phase_rows.push_back({{"tau", taus[j]},
                              {"mean", pf.mean_re[j]},
                              {"stderr", pf.stderr_re[j]},
                              {"closure", closed},
                              {"z", z_re}});
    }

    // spectrum against the deterministic transform
    McSpectrumOptions mo;
    mo.threads = cfg.threads;
    mo.duration = cfg.params.number("mc.duration");
    Spectrum const mc = mc_two_level_spectrum(p, grid, n, cfg.seed + 1, mo);
    Spectrum const ref = spectrum_general(p, grid, spectrum_options(cfg));
    double spec_z = 0.0;
    std::size_t beyond = 0;
    out.table = spectrum_table(mc);
    out.table.columns.insert(out.table.columns.end(), {"reference", "z"});
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        double const se = (*mc.std_errors)[i];
        double const z = se > 0.0 ? (mc.values[i] - ref.values[i]) / se : 0.0;
        spec_z = std::max(spec_z, std::abs(z));
        beyond += std::abs(z) > 3.0 ? 1 : 0;
        out.table.rows[i].push_back(format_number(ref.values[i]));
        out.table.rows[i].push_back(format_number(z));
    }
    out.table.comments = snapshot(cfg, out.source);

    out.metrics["samples"] = n;
    out.metrics["phase_max_abs_z"] = number(phase_z);
    out.metrics["phase_points"] = phase_rows;
    out.metrics["spectrum_max_abs_z"] = number(spec_z);
    out.metrics["spectrum_points_beyond_3sigma"] = beyond;
    try
    {
        out.metrics["fwhm_mc"] = number(fwhm(mc));
        out.metrics["fwhm_reference"] = number(fwhm(ref));
    }
    catch (DomainError const&)
    {
        out.metrics["fwhm_mc"] = nullptr;
        out.metrics["fwhm_reference"] = nullptr;
    }

    Plot plot;
    plot.title = "Monte Carlo vs transform (N = " + std::to_string(n) + ")";
    plot.xlabel = detuning_label(p.gamma, "detuning \xCE\x94");
    plot.ylabel = "S(\xCE\x94)";
    plot.curves.push_back(curve_of(mc, "Monte Carlo"));
    plot.curves.push_back(curve_of(ref, "transform", true));
    out.plot = std::move(plot);
    return out;
}

CommandOutput run_dynamics_validate(RunConfig const& cfg)
{
    auto const& p = cfg.cpt;
    std::size_t const n = cfg.samples > 0 ? cfg.samples : 200;
    auto const grid = cfg.grid.values();
    EnsembleOptions eo = cfg.dynamics.ensemble;
    eo.threads = cfg.threads;
    bool const dip = cfg.dynamics.mode == "dip";

    auto simulate = [&](CptParams const& q) {
        return dip ? ensemble_dip(q, grid, n, cfg.seed, eo)
                   : ensemble_absorption(q, grid, n, cfg.seed, eo);
    };
    Spectrum const spec = simulate(p);

    // The Bloch equations damp the optical coherence at Gamma_C, which plays
    // the role of Gamma_1 in the perturbative dip.
    CptParams ref_p = p;
    ref_p.system.gamma1 = p.system.coherence_decay();
    ref_p.system.gamma2 = 0.0;
    Spectrum const ref = cpt_dip_general(ref_p, grid, cpt_options(cfg));

    CommandOutput out;
    out.source = spec.meta.source;
    out.table = spectrum_table(spec);
    out.table.columns.push_back("reference");
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.table.rows[i].push_back(format_number(ref.values[i]));
    out.table.comments = snapshot(cfg, out.source);
    add_flags(out, p.flags());

    auto const window = ensemble_window(p, eo);
    out.metrics["samples"] = n;
    out.metrics["burn_in"] = number(window.start);
    out.metrics["window"] = number(window.end - window.start);
    out.metrics["predicted_hwhm"] = number(cpt_predicted_hwhm(p));

    LorentzFit const fit = fit_lorentzian(spec);
    double const depth = fit.amplitude / fit.hwhm;
    out.metrics["fit"] = {{"center", number(fit.center)},
                          {"hwhm", number(fit.hwhm)},
                          {"amplitude", number(fit.amplitude)},
                          {"offset", number(fit.offset)},
                          {"rms_residual", number(fit.rms_residual)}};
    out.metrics["hwhm_ratio"] = number(fit.hwhm / cpt_predicted_hwhm(p));
    out.metrics["depth"] = number(depth);
    try
    {
        LorentzFit const ref_fit = fit_lorentzian(ref);
        out.metrics["reference_hwhm"] = number(ref_fit.hwhm);
        out.metrics["reference_depth"] = number(ref_fit.amplitude / ref_fit.hwhm);
    }
    catch (ConvergenceError const&)
    {
        out.metrics["reference_hwhm"] = nullptr;
    }

    Plot plot;
    plot.title = std::string(dip ? "Paired CPT dip" : "Probe absorption")
                 + " from trajectories (N = " + std::to_string(n) + ")";
    plot.xlabel = detuning_label(p.gamma21(), "Raman detuning \xCE\x94R");
    plot.ylabel = dip ? "dip" : "absorption";
    plot.curves.push_back(curve_of(spec, "\xCE\xA9" "2"));

    double const factor = cfg.dynamics.omega2_factor;
    if (factor > 1.0)
    {
        CptParams strong = p;
        strong.drive.omega2 *= factor;
        Spectrum const s2 = simulate(strong);
        LorentzFit const fit2 = fit_lorentzian(s2);
        double const depth2 = fit2.amplitude / fit2.hwhm;
        out.metrics["omega2_factor"] = number(factor);
        out.metrics["depth_strong"] = number(depth2);
        out.metrics["hwhm_strong"] = number(fit2.hwhm);
        out.metrics["depth_ratio"] = number(depth2 / depth);
        out.metrics["depth_ratio_expected"] = number(factor * factor);
        plot.curves.push_back(curve_of(s2, format_number(factor) + " \xCE\xA9" "2"));
    }
    if (dip)
        plot.curves.push_back(curve_of(ref, "perturbative", true));
    out.plot = std::move(plot);
    return out;
}

CommandOutput run_sweep(RunConfig const& cfg)
{
    bool const cpt = cfg.sweep.spectrum == "cpt";
    if (cfg.sweep.variable == "theta" && !cpt)
        throw ConfigError("a theta sweep needs sweep.spectrum = cpt");
    if (cfg.sweep.variable == "omega2" && !cpt)
        throw ConfigError("an omega2 sweep needs sweep.spectrum = cpt");
    auto const grid = cfg.grid.values();

    CommandOutput out;
    out.source = cpt ? "sweep.cpt." + to_string(cfg.method) : "sweep.twolevel";
    out.table.comments = snapshot(cfg, out.source);
    out.table.columns = {cfg.sweep.variable, "peak_position", "peak_value",
                         "fwhm", "fit_hwhm", "fit_rms", "excess_hwhm",
                         "predicted_hwhm", "status"};

    Plot plot;
    plot.title = cpt ? "CPT dip versus " + cfg.sweep.variable
                     : "Two-level line versus " + cfg.sweep.variable;
    plot.ylabel = cpt ? "S2(\xCE\x94R)" : "S(\xCE\x94)";

    std::vector<double> xs;
    std::vector<double> excess;
    json rows = json::array();
    std::size_t failed = 0;
    for (double v : cfg.sweep.values)
    {
        std::vector<std::string> row{format_number(v)};
        json jr{{"value", v}};
        try
        {
            ParamMap const params = sweep_point(cfg, v);
            Spectrum spec;
            double base_width = 0.0;  // homogeneous part of the HWHM
            double predicted = std::numeric_limits<double>::quiet_NaN();
            double reference_rate = 1.0;
            if (cpt)
            {
                CptParams const p = cpt_params(params);
                spec = cpt_dip(p, grid, cfg.method, cpt_options(cfg));
                base_width = p.gamma21();
                predicted = cpt_predicted_hwhm(p);
                reference_rate = p.gamma21();
            }
            else
            {
                TwoLevelParams const p = two_level_params(params);
                spec = spectrum_general(p, grid, spectrum_options(cfg));
                base_width = p.gamma;
                if (p.motion.gamma > 0.0)
                    predicted = dicke_limit_width(p);
                reference_rate = p.gamma;
            }
            LineMetrics const m = measure(spec);
            double const hwhm = m.fit ? m.fit->hwhm : 0.5 * m.fwhm;
            double const ex = hwhm - base_width;
            row.insert(row.end(),
                       {format_number(m.peak_position), format_number(m.peak_value),
                        format_number(m.fwhm),
                        m.fit ? format_number(m.fit->hwhm) : "nan",
                        m.fit ? format_number(m.fit->rms_residual) : "nan",
                        format_number(ex), format_number(predicted), "ok"});
            jr["metrics"] = metrics_json(m);
            jr["excess_hwhm"] = number(ex);
            jr["predicted_hwhm"] = number(predicted);
            jr["status"] = "ok";
            xs.push_back(v);
            excess.push_back(ex);
            if (plot.xlabel.empty())
                plot.xlabel = detuning_label(
                    reference_rate, cpt ? "Raman detuning \xCE\x94R" : "detuning \xCE\x94");
            plot.curves.push_back(
                curve_of(spec, cfg.sweep.variable + " = " + format_number(v).substr(0, 8)));
        }
        catch (std::exception const& e)
        {
            ++failed;
            std::string msg = std::string("error: ") + e.what();
            row.resize(out.table.columns.size() - 1, "nan");
            row.push_back(msg);
            jr["status"] = msg;
        }
        out.table.rows.push_back(std::move(row));
        rows.push_back(std::move(jr));
    }

    out.metrics["variable"] = cfg.sweep.variable;
    out.metrics["rows"] = rows;
    out.metrics["failed_rows"] = failed;
    if (auto s = loglog_slope(xs, excess))
        out.metrics["loglog_slope"] = number(*s);
    else
        out.metrics["loglog_slope"] = nullptr;
    out.partial_failure = failed > 0;
    if (plot.xlabel.empty())
        plot.xlabel = "detuning";
    out.plot = std::move(plot);
    return out;
}

CommandOutput run_report(RunConfig const& cfg)
{
    NarrowingReport const r = narrowing_report(cfg.cpt);
    CommandOutput out;
    out.source = "analysis.narrowing_report";
    out.text = to_key_values(r);
    out.flags = r.flags;
    out.metrics = {{"gamma_d", number(r.gamma_d)},
                   {"gamma_d_res", number(r.gamma_d_res)},
                   {"mean_free_path", number(r.mean_free_path)},
                   {"cpt_wavelength", number(r.cpt_wavelength)},
                   {"eta", number(r.eta)},
                   {"gamma21", number(r.gamma21)},
                   {"predicted_hwhm", number(r.predicted_hwhm)},
                   {"naive_width", number(r.naive_width)},
                   {"narrowing_factor", number(r.narrowing_factor)},
                   {"one_photon_regime", to_string(r.one_photon_regime)}};
    return out;
}

CommandOutput dispatch(RunConfig const& cfg)
{
    switch (cfg.command)
    {
        case Command::TwoLevel:
            return run_two_level(cfg);
        case Command::Cpt:
            return run_cpt(cfg);
        case Command::McValidate:
            return run_mc_validate(cfg);
        case Command::DynamicsValidate:
            return run_dynamics_validate(cfg);
        case Command::Sweep:
            return run_sweep(cfg);
        case Command::Report:
            return run_report(cfg);
    }
    throw ConfigError("unknown command");
}

}  // namespace dicke::cli
