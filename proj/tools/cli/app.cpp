#include "app.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"
#include "output.hpp"

namespace dicke::cli {
namespace {

using nlohmann::json;

struct FlagSpec
{
    char const* flag;
    char const* key;
    char const* help;
};

constexpr FlagSpec kFlags[] = {
    {"--seed", "run.seed", "base seed"},
    {"--threads", "run.threads", "worker threads (0: all cores)"},
    {"-n,--samples", "run.samples", "trajectories for stochastic commands"},
    {"--method", "run.method", "general, intermediate or collinear"},
    {"--gamma", "twolevel.gamma", "two-level homogeneous width"},
    {"--gamma-d", "geometry.gamma_d", "Doppler width"},
    {"--gamma-d-res", "geometry.gamma_d_res", "residual Doppler width"},
    {"--q1", "geometry.q1", "probe wave-vector magnitude"},
    {"--q2", "geometry.q2", "pump wave-vector magnitude"},
    {"--theta", "geometry.theta", "beam angle [rad]"},
    {"--v-th", "motion.v_th", "thermal speed"},
    {"--collision-rate", "motion.gamma", "velocity relaxation / collision rate"},
    {"--mean-free-path", "motion.mean_free_path", "sets gamma = v_th / value"},
    {"--model", "motion.model", "brownian or strong"},
    {"--gamma1", "system.gamma1", "decay |3> -> |1>"},
    {"--gamma2", "system.gamma2", "decay |3> -> |2>"},
    {"--gamma-pop", "system.gamma_pop", "ground population exchange"},
    {"--gamma-ad", "system.gamma_ad", "adiabatic ground decoherence"},
    {"--omega1", "drive.omega1", "probe Rabi frequency"},
    {"--omega2", "drive.omega2", "pump Rabi frequency"},
    {"--delta1", "drive.delta1", "one-photon detuning"},
    {"--tau-points", "mc.tau_points", "phase-factor lags"},
    {"--tau-max", "mc.tau_max", "largest phase-factor lag"},
    {"--mode", "dynamics.mode", "dip or absorption"},
    {"--burn-in", "dynamics.burn_in", "discarded transient"},
    {"--window", "dynamics.window", "averaging window"},
    {"--omega2-factor", "dynamics.omega2_factor", "second pump strength"},
    {"--sweep-variable", "sweep.variable",
     "theta, gamma, v_th, omega2, pressure-proxy"},
    {"--sweep-values", "sweep.values", "comma separated values"},
    {"--sweep-from", "sweep.from", "first value"},
    {"--sweep-to", "sweep.to", "last value"},
    {"--sweep-points", "sweep.points", "number of values"},
    {"--sweep-scale", "sweep.scale", "lin or log"},
    {"--sweep-spectrum", "sweep.spectrum", "two-level or cpt"},
    {"--out", "output.csv", "result file (CSV, or text for report)"},
    {"--json", "output.json", "JSON summary"},
    {"--svg", "output.svg", "SVG plot"},
};

struct SubcommandInputs
{
    CLI::App* app = nullptr;
    Command command = Command::TwoLevel;
    std::vector<std::pair<CLI::Option*, std::string>> keyed;
    CLI::Option* config = nullptr;
    CLI::Option* preset = nullptr;
    CLI::Option* grid = nullptr;
    CLI::Option* set = nullptr;
};

std::string replace_extension(std::string const& path, std::string const& ext)
{
    std::filesystem::path p(path);
    p.replace_extension(ext);
    return p.string();
}

OutputPaths derive_paths(ParamMap const& params)
{
    OutputPaths o;
    o.csv = params.text("output.csv");
    o.json = params.text("output.json");
    o.svg = params.text("output.svg");
    if (!o.csv.empty())
    {
        if (o.json.empty())
            o.json = replace_extension(o.csv, ".json");
        if (o.svg.empty())
            o.svg = replace_extension(o.csv, ".svg");
        o.config = replace_extension(o.csv, ".config.ini");
    }
    else if (!o.json.empty())
    {
        o.config = replace_extension(o.json, ".config.ini");
    }
    return o;
}

std::string footer()
{
    std::string s =
        "Config files use [section] headers and `key = value` lines. Rate keys\n"
        "also accept `<key>_hz` (multiplied by 2 pi). Layering: command defaults,\n"
        "--preset, --config, DICKE_CPT_THREADS, --set, then explicit flags.\n"
        "Exit codes: 0 ok, 1 computation error, 2 usage or config error.\n\n"
        "Keys:\n";
    for (auto const& [key, help] : documented_keys())
        s += "  " + key + std::string(key.size() < 30 ? 30 - key.size() : 1, ' ')
             + help + "\n";
    return s;
}

void write_error_summary(std::string const& path, std::string const& command,
                         std::string const& kind, std::string const& message,
                         std::ostream& err)
{
    if (path.empty())
        return;
    json j{{"status", "error"},
           {"command", command},
           {"error", {{"kind", kind}, {"message", message}}}};
    try
    {
        write_text_file(path, j.dump(2) + "\n");
    }
    catch (std::exception const& e)
    {
        err << "warning: " << e.what() << '\n';
    }
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out,
        std::ostream& err)
{
    CLI::App app{"Dicke narrowing of two-level and CPT line shapes",
                 args.empty() ? "dicke-cpt" : args.front()};
    app.require_subcommand(1);
    app.footer(footer());

    // Storage shared by all subcommands; only one of them parses.
    std::map<std::string, std::string> flag_values;
    std::string config_path;
    std::string preset;
    std::string grid_text;
    std::vector<std::string> assignments;

    std::vector<SubcommandInputs> subs;
    std::pair<Command, char const*> const commands[] = {
        {Command::TwoLevel, "two-level absorption spectrum"},
        {Command::Cpt, "CPT two-photon dip"},
        {Command::McValidate, "Monte Carlo check of the closure and spectrum"},
        {Command::DynamicsValidate, "density-matrix ensemble versus analytic dip"},
        {Command::Sweep, "parameter sweep with line metrics per value"},
        {Command::Report, "narrowing report (key = value text)"},
    };
    for (auto const& [command, description] : commands)
    {
        SubcommandInputs in;
        in.command = command;
        in.app = app.add_subcommand(to_string(command), description);
        in.config = in.app->add_option("--config", config_path, "config file");
        in.preset = in.app->add_option("--preset", preset, "rubidium");
        in.grid = in.app->add_option("--grid", grid_text, "min:max:points");
        in.set = in.app->add_option("--set", assignments, "section.key=value")
                     ->allow_extra_args(false);
        for (auto const& f : kFlags)
            in.keyed.emplace_back(
                in.app->add_option(f.flag, flag_values[f.key], f.help), f.key);
        subs.push_back(std::move(in));
    }

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty())
            reversed.pop_back();
        app.parse(reversed);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    SubcommandInputs const* sub = nullptr;
    for (auto const& s : subs)
    {
        if (s.app->parsed())
            sub = &s;
    }
    Command const command = sub->command;
    std::string const command_name = to_string(command);
    std::string json_path;
    for (auto const& [opt, key] : sub->keyed)
    {
        if (key == "output.json" && opt->count())
            json_path = flag_values[key];
        if (key == "output.csv" && opt->count() && json_path.empty())
            json_path = replace_extension(flag_values[key], ".json");
    }

    RunConfig cfg;
    try
    {
        ParamMap params = defaults(command);
        if (sub->preset->count())
            apply_preset(params, preset);
        if (sub->config->count())
            apply_config_file(params, config_path);
        if (char const* env = std::getenv("DICKE_CPT_THREADS"); env && *env)
        {
            params.set("run.threads", std::string(env));
            params.integer("run.threads");
        }
        for (auto const& a : assignments)
            apply_assignment(params, a);
        for (auto const& [opt, key] : sub->keyed)
        {
            if (opt->count())
                params.set(key, flag_values[key]);
        }
        if (sub->grid->count())
        {
            GridSpec const g = parse_grid(grid_text);
            params.set("grid.min", g.min);
            params.set("grid.max", g.max);
            params.set("grid.points", static_cast<double>(g.points));
        }
        json_path = derive_paths(params).json;
        cfg = resolve(command, params);
        cfg.out = derive_paths(params);
    }
    catch (ConfigError const& e)
    {
        err << "error: " << e.what() << '\n';
        write_error_summary(json_path, command_name, "usage", e.what(), err);
        return kExitUsage;
    }

    auto const started = std::chrono::steady_clock::now();
    CommandOutput result;
    try
    {
        result = dispatch(cfg);
    }
    catch (ConfigError const& e)
    {
        err << "error: " << e.what() << '\n';
        write_error_summary(json_path, command_name, "usage", e.what(), err);
        return kExitUsage;
    }
    catch (ConvergenceError const& e)
    {
        err << "error: " << e.what() << '\n';
        write_error_summary(json_path, command_name, "convergence", e.what(), err);
        return kExitComputation;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        write_error_summary(json_path, command_name, "computation", e.what(), err);
        return kExitComputation;
    }
    double const elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - started)
                               .count();

    std::string const status = result.partial_failure ? "partial" : "ok";
    json summary{{"status", status},
                 {"command", command_name},
                 {"source", result.source},
                 {"metrics", result.metrics},
                 {"flags", result.flags}};
    try
    {
        std::string const body = result.text ? *result.text : to_csv(result.table);
        if (cfg.out.csv.empty())
            out << body;
        else
            write_text_file(cfg.out.csv, body);
        if (!cfg.out.svg.empty() && result.plot)
            write_text_file(cfg.out.svg, render_svg(*result.plot));
        if (!cfg.out.config.empty())
            write_text_file(cfg.out.config, to_config_text(cfg.params));
        if (!cfg.out.json.empty())
        {
            json full = summary;
            full["threads"] = resolve_threads(cfg.threads);
            full["elapsed_s"] = elapsed;
            full["seed"] = cfg.seed;
            full["params"] = cfg.params.values();
            full["outputs"] = {{"csv", cfg.out.csv},
                               {"svg", result.plot ? cfg.out.svg : ""},
                               {"config", cfg.out.config}};
            write_text_file(cfg.out.json, full.dump(2) + "\n");
        }
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }

    out << summary.dump() << '\n';
    if (result.partial_failure)
    {
        err << "error: some sweep points failed (see the status column)\n";
        return kExitComputation;
    }
    return kExitOk;
}

}  // namespace dicke::cli
