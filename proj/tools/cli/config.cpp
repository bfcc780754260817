#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dicke::cli {
namespace {

struct KeySpec
{
    char const* key;
    bool rate;
    char const* help;
};

// Rates, detunings and Rabi frequencies are angular; `<key>_hz` in a config
// file multiplies by 2 pi.
constexpr KeySpec kKeys[] = {
    {"run.seed", false, "base seed of every stochastic stream"},
    {"run.threads", false, "worker threads (0: available parallelism)"},
    {"run.samples", false, "trajectories (0: command default)"},
    {"run.method", false, "dip evaluation: general, intermediate, collinear"},
    {"output.csv", false, "result table"},
    {"output.json", false, "summary (default: next to the CSV)"},
    {"output.svg", false, "plot (default: next to the CSV)"},
    {"grid.min", true, "first detuning"},
    {"grid.max", true, "last detuning"},
    {"grid.points", false, "number of detunings (>= 2)"},
    {"twolevel.gamma", true, "homogeneous width of the two-level line"},
    {"geometry.gamma_d", true, "Doppler width |q1| v_th (used when q1 = 0)"},
    {"geometry.gamma_d_res", true, "residual Doppler width (used when q1 = 0)"},
    {"geometry.q1", false, "probe wave-vector magnitude [rad/m]"},
    {"geometry.q2", false, "pump wave-vector magnitude [rad/m]"},
    {"geometry.theta", false, "angle between the beams [rad]"},
    {"motion.v_th", false, "per-axis thermal speed"},
    {"motion.gamma", true, "velocity relaxation or collision rate"},
    {"motion.mean_free_path", false, "if > 0, gamma = v_th / mean_free_path"},
    {"motion.model", false, "brownian or strong"},
    {"system.gamma1", true, "upper-state decay to |1>"},
    {"system.gamma2", true, "upper-state decay to |2>"},
    {"system.gamma_pop", true, "ground population exchange"},
    {"system.gamma_ad", true, "adiabatic ground decoherence"},
    {"system.omega21", true, "ground splitting (bookkeeping)"},
    {"drive.omega1", true, "probe Rabi frequency"},
    {"drive.omega2", true, "pump Rabi frequency"},
    {"drive.delta1", true, "one-photon detuning"},
    {"drive.phase1", false, "probe phase [rad]"},
    {"drive.phase2", false, "pump phase [rad]"},
    {"mc.tau_points", false, "phase-factor test lags"},
    {"mc.tau_max", false, "largest lag (0: closure decays to 1e-2)"},
    {"mc.duration", false, "spectrum trajectory length (0: automatic)"},
    {"dynamics.mode", false, "dip (paired) or absorption"},
    {"dynamics.burn_in", false, "discarded transient (0: automatic)"},
    {"dynamics.window", false, "averaging window (0: automatic)"},
    {"dynamics.omega2_factor", false, "second pump strength for the depth law (<= 1: off)"},
    {"dynamics.rel_tol", false, "integrator relative tolerance"},
    {"dynamics.brownian_step", false, "Brownian grid step (0: automatic)"},
    {"sweep.variable", false, "theta, gamma, v_th, omega2, pressure-proxy"},
    {"sweep.values", false, "comma separated list (used when sweep.points = 0)"},
    {"sweep.from", false, "first value"},
    {"sweep.to", false, "last value"},
    {"sweep.points", false, "number of from/to values (0: use sweep.values)"},
    {"sweep.scale", false, "lin or log"},
    {"sweep.spectrum", false, "two-level or cpt"},
};

KeySpec const* find_key(std::string const& key)
{
    for (auto const& k : kKeys)
    {
        if (key == k.key)
            return &k;
    }
    return nullptr;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string s)
{
    auto const not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

double parse_number(std::string const& text, std::string const& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(text, &used);
    }
    catch (std::exception const&)
    {
        used = 0;
    }
    if (used == 0 || trim(text.substr(used)) != "" || !std::isfinite(v))
        throw ConfigError(what + ": '" + text + "' is not a finite number");
    return v;
}

// Stores key = value, translating the `_hz` spelling of rate keys.
void assign(ParamMap& params, std::string const& key, std::string const& value,
            std::string const& where)
{
    if (key.size() > 3 && key.ends_with("_hz"))
    {
        std::string const base = key.substr(0, key.size() - 3);
        if (auto const* spec = find_key(base); spec && spec->rate)
        {
            params.set(base, 2.0 * kPi * parse_number(value, where + " " + key));
            return;
        }
    }
    if (!find_key(key))
        throw ConfigError("unknown key '" + key + "'" + where);
    params.set(key, value);
}

std::vector<double> parse_list(std::string const& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(parse_number(item, "sweep.values"));
    }
    return out;
}

std::size_t positive_count(ParamMap const& params, std::string const& key)
{
    auto const v = params.integer(key);
    if (v < 0)
        throw ConfigError(key + " must be >= 0");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string to_string(Command command)
{
    switch (command)
    {
        case Command::TwoLevel:
            return "two-level";
        case Command::Cpt:
            return "cpt";
        case Command::McValidate:
            return "mc-validate";
        case Command::DynamicsValidate:
            return "dynamics-validate";
        case Command::Sweep:
            return "sweep";
        case Command::Report:
            return "report";
    }
    return "unknown";
}

Command command_from_string(std::string const& name)
{
    for (auto c : {Command::TwoLevel, Command::Cpt, Command::McValidate,
                   Command::DynamicsValidate, Command::Sweep, Command::Report})
    {
        if (to_string(c) == name)
            return c;
    }
    throw ConfigError("unknown command '" + name + "'");
}

void ParamMap::set(std::string const& key, std::string const& value)
{
    values_[key] = value;
}

void ParamMap::set(std::string const& key, double value)
{
    values_[key] = fmt(value);
}

bool ParamMap::contains(std::string const& key) const
{
    return values_.count(key) > 0;
}

std::string const& ParamMap::text(std::string const& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("missing key '" + key + "'");
    return it->second;
}

double ParamMap::number(std::string const& key) const
{
    return parse_number(text(key), key);
}

long long ParamMap::integer(std::string const& key) const
{
    double const v = number(key);
    if (v != std::floor(v) || std::abs(v) > 9e15)
        throw ConfigError(key + " must be an integer");
    return static_cast<long long>(v);
}

bool is_rate_key(std::string const& key)
{
    auto const* spec = find_key(key);
    return spec && spec->rate;
}

bool is_known_key(std::string const& key)
{
    return find_key(key) != nullptr;
}

std::vector<std::pair<std::string, std::string>> documented_keys()
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto const& k : kKeys)
        out.emplace_back(std::string(k.key) + (k.rate ? " (_hz)" : ""), k.help);
    return out;
}

ParamMap defaults(Command command)
{
    ParamMap p;
    p.set("run.seed", "1");
    p.set("run.threads", "0");
    p.set("run.samples", "0");
    p.set("run.method", "general");
    p.set("output.csv", "");
    p.set("output.json", "");
    p.set("output.svg", "");
    p.set("grid.min", "-10");
    p.set("grid.max", "10");
    p.set("grid.points", "201");
    p.set("twolevel.gamma", "1");
    p.set("geometry.gamma_d", "5");
    p.set("geometry.gamma_d_res", "0");
    p.set("geometry.q1", "0");
    p.set("geometry.q2", "0");
    p.set("geometry.theta", "0");
    p.set("motion.v_th", "1");
    p.set("motion.gamma", "5");
    p.set("motion.mean_free_path", "0");
    p.set("motion.model", "brownian");
    p.set("system.gamma1", "24");
    p.set("system.gamma2", "0");
    p.set("system.gamma_pop", "0");
    p.set("system.gamma_ad", "0.5");
    p.set("system.omega21", "0");
    p.set("drive.omega1", "0.001");
    p.set("drive.omega2", "0.25");
    p.set("drive.delta1", "0");
    p.set("drive.phase1", "0");
    p.set("drive.phase2", "0");
    p.set("mc.tau_points", "12");
    p.set("mc.tau_max", "0");
    p.set("mc.duration", "0");
    p.set("dynamics.mode", "dip");
    p.set("dynamics.burn_in", "0");
    p.set("dynamics.window", "0");
    p.set("dynamics.omega2_factor", "2");
    p.set("dynamics.rel_tol", "1e-8");
    p.set("dynamics.brownian_step", "0");
    p.set("sweep.variable", "gamma");
    p.set("sweep.values", "");
    p.set("sweep.from", "0");
    p.set("sweep.to", "0");
    p.set("sweep.points", "0");
    p.set("sweep.scale", "lin");
    p.set("sweep.spectrum", "two-level");

    // CPT commands default to a desk-scale intermediate-regime atom:
    // Gamma_D = 250, Gamma_D^res = 5, gamma = 25, Gamma_21 = 1.
    bool const cpt_like = command == Command::Cpt
                          || command == Command::DynamicsValidate
                          || command == Command::Report;
    if (cpt_like)
    {
        p.set("geometry.gamma_d", "250");
        p.set("geometry.gamma_d_res", "5");
        p.set("motion.gamma", "25");
        p.set("motion.model", "strong");
    }
    if (command == Command::DynamicsValidate)
    {
        p.set("grid.min", "-9");
        p.set("grid.max", "9");
        p.set("grid.points", "13");
    }
    if (command == Command::Sweep)
    {
        // family of two-level lines for Gamma_D / gamma from 20 down to 0.05
        p.set("grid.min", "-25");
        p.set("grid.max", "25");
        p.set("grid.points", "501");
        p.set("sweep.values", "0.25,0.5,1,2.5,5,10,25,50,100");
    }
    if (command == Command::McValidate)
    {
        p.set("grid.min", "-15");
        p.set("grid.max", "15");
        p.set("grid.points", "31");
    }
    return p;
}

void apply_preset(ParamMap& params, std::string const& preset)
{
    if (preset.empty() || preset == "none")
        return;
    if (preset != "rubidium")
        throw ConfigError("unknown preset '" + preset + "' (expected rubidium)");
    double const mfp = 1e-6;
    CptParams const rb = rubidium_params(mfp);
    params.set("geometry.q1", rb.geom.q1.norm());
    params.set("geometry.q2", rb.geom.q2.norm());
    params.set("geometry.theta", "0");
    params.set("motion.v_th", rb.motion.v_th);
    params.set("motion.gamma", rb.motion.gamma);
    params.set("motion.mean_free_path", mfp);
    params.set("motion.model", to_string(rb.motion.model));
    params.set("system.gamma1", rb.system.gamma1);
    params.set("system.gamma2", rb.system.gamma2);
    params.set("system.gamma_pop", rb.system.gamma_pop);
    params.set("system.gamma_ad", rb.system.gamma_ad);
    params.set("system.omega21", rb.system.omega21);
    params.set("drive.omega1", rb.drive.omega1);
    params.set("drive.omega2", rb.drive.omega2);
    params.set("grid.min", "-2000");
    params.set("grid.max", "2000");
    params.set("grid.points", "201");
}

void apply_config_text(ParamMap& params, std::string const& text,
                       std::string const& origin)
{
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        std::string const where = " at " + origin + ":" + std::to_string(lineno);
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError("malformed section header" + where);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'" + where);
        if (section.empty())
            throw ConfigError("key outside a section" + where);
        std::string value = trim(line.substr(eq + 1));
        if (auto hash = value.find(" #"); hash != std::string::npos)
            value = trim(value.substr(0, hash));
        assign(params, section + "." + trim(line.substr(0, eq)), value, where);
    }
}

void apply_config_file(ParamMap& params, std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(params, buf.str(), path);
}

void apply_assignment(ParamMap& params, std::string const& assignment)
{
    auto const eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects section.key=value, got '" + assignment
                          + "'");
    assign(params, trim(assignment.substr(0, eq)),
           trim(assignment.substr(eq + 1)), " in --set");
}

std::string to_config_text(ParamMap const& params)
{
    std::ostringstream out;
    std::string section;
    for (auto const& [key, value] : params.values())
    {
        auto const dot = key.find('.');
        std::string const sec = key.substr(0, dot);
        if (sec != section)
        {
            out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
            section = sec;
        }
        out << key.substr(dot + 1) << " = " << value << '\n';
    }
    return out.str();
}

std::vector<double> GridSpec::values() const
{
    return linspace(min, max, points);
}

GridSpec parse_grid(std::string const& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(item);
    if (parts.size() != 3)
        throw ConfigError("grid must look like min:max:points, got '" + text
                          + "'");
    GridSpec g;
    g.min = parse_number(parts[0], "grid min");
    g.max = parse_number(parts[1], "grid max");
    double const n = parse_number(parts[2], "grid points");
    if (n != std::floor(n) || n < 0)
        throw ConfigError("grid points must be a non-negative integer");
    g.points = static_cast<std::size_t>(n);
    return g;
}

TwoLevelParams two_level_params(ParamMap const& params)
{
    TwoLevelParams p;
    p.gamma = params.number("twolevel.gamma");
    p.motion.v_th = params.number("motion.v_th");
    p.motion.gamma = params.number("motion.gamma");
    p.motion.model = velocity_model_from_string(params.text("motion.model"));
    double const mfp = params.number("motion.mean_free_path");
    if (mfp > 0.0)
        p.motion.gamma = p.motion.v_th / mfp;
    double q1 = params.number("geometry.q1");
    if (!(q1 > 0.0))
    {
        double const gd = params.number("geometry.gamma_d");
        if (gd > 0.0 && !(p.motion.v_th > 0.0))
            throw ConfigError("geometry.gamma_d > 0 needs motion.v_th > 0 "
                              "(or give geometry.q1)");
        q1 = gd > 0.0 ? gd / p.motion.v_th : 0.0;
    }
    p.geom.q1 = Vec3(q1, 0.0, 0.0);
    p.validate();
    return p;
}

CptParams cpt_params(ParamMap const& params)
{
    CptParams p;
    p.system.gamma1 = params.number("system.gamma1");
    p.system.gamma2 = params.number("system.gamma2");
    p.system.gamma_pop = params.number("system.gamma_pop");
    p.system.gamma_ad = params.number("system.gamma_ad");
    p.system.omega21 = params.number("system.omega21");
    p.drive.omega1 = params.number("drive.omega1");
    p.drive.omega2 = params.number("drive.omega2");
    p.drive.delta1 = params.number("drive.delta1");
    p.drive.phase1 = params.number("drive.phase1");
    p.drive.phase2 = params.number("drive.phase2");
    p.motion.v_th = params.number("motion.v_th");
    p.motion.gamma = params.number("motion.gamma");
    p.motion.model = velocity_model_from_string(params.text("motion.model"));
    double const mfp = params.number("motion.mean_free_path");
    if (mfp > 0.0)
        p.motion.gamma = p.motion.v_th / mfp;

    double const q1 = params.number("geometry.q1");
    double const theta = params.number("geometry.theta");
    if (q1 > 0.0)
    {
        p.geom = geometry_from_angle(q1, params.number("geometry.q2"), theta);
    }
    else
    {
        if (theta != 0.0)
            throw ConfigError("geometry.theta needs explicit geometry.q1 and "
                              "geometry.q2");
        double const gd = params.number("geometry.gamma_d");
        double const gres = params.number("geometry.gamma_d_res");
        double const v = p.motion.v_th;
        if (gd > 0.0 && !(v > 0.0))
            throw ConfigError("geometry.gamma_d > 0 needs motion.v_th > 0 "
                              "(or give geometry.q1)");
        if (gres > gd || gres < 0.0)
            throw ConfigError("need 0 <= geometry.gamma_d_res <= geometry.gamma_d");
        if (v > 0.0)
        {
            p.geom.q1 = Vec3(gd / v, 0.0, 0.0);
            p.geom.q2 = Vec3((gd - gres) / v, 0.0, 0.0);
        }
    }
    p.validate();
    return p;
}

RunConfig resolve(Command command, ParamMap const& params)
{
    RunConfig cfg;
    cfg.command = command;
    cfg.params = params;
    for (auto const& [key, value] : params.values())
    {
        if (!is_known_key(key))
            throw ConfigError("unknown key '" + key + "'");
    }

    cfg.seed = static_cast<std::uint64_t>(params.integer("run.seed"));
    cfg.threads = positive_count(params, "run.threads");
    cfg.samples = positive_count(params, "run.samples");
    try
    {
        cfg.method = dip_method_from_string(params.text("run.method"));
        velocity_model_from_string(params.text("motion.model"));
    }
    catch (DomainError const& e)
    {
        throw ConfigError(e.what());
    }

    cfg.grid.min = params.number("grid.min");
    cfg.grid.max = params.number("grid.max");
    cfg.grid.points = positive_count(params, "grid.points");
    if (cfg.grid.points < 2)
        throw ConfigError("grid needs at least 2 points (got "
                          + std::to_string(cfg.grid.points) + ")");
    if (!(cfg.grid.max > cfg.grid.min))
        throw ConfigError("grid max must exceed grid min");

    cfg.out.csv = params.text("output.csv");
    cfg.out.json = params.text("output.json");
    cfg.out.svg = params.text("output.svg");

    cfg.mc.tau_points = positive_count(params, "mc.tau_points");
    cfg.mc.tau_max = params.number("mc.tau_max");

    cfg.dynamics.mode = params.text("dynamics.mode");
    if (cfg.dynamics.mode != "dip" && cfg.dynamics.mode != "absorption")
        throw ConfigError("dynamics.mode must be dip or absorption");
    cfg.dynamics.ensemble.burn_in = params.number("dynamics.burn_in");
    cfg.dynamics.ensemble.window = params.number("dynamics.window");
    cfg.dynamics.ensemble.rel_tol = params.number("dynamics.rel_tol");
    cfg.dynamics.ensemble.brownian_step = params.number("dynamics.brownian_step");
    cfg.dynamics.omega2_factor = params.number("dynamics.omega2_factor");

    cfg.sweep.variable = params.text("sweep.variable");
    cfg.sweep.spectrum = params.text("sweep.spectrum");
    if (command == Command::Sweep)
    {
        static constexpr char const* vars[] = {"theta", "gamma", "v_th",
                                               "omega2", "pressure-proxy"};
        if (std::find(std::begin(vars), std::end(vars), cfg.sweep.variable)
            == std::end(vars))
            throw ConfigError("unknown sweep variable '" + cfg.sweep.variable
                              + "' (theta, gamma, v_th, omega2, pressure-proxy)");
        if (cfg.sweep.spectrum != "two-level" && cfg.sweep.spectrum != "cpt")
            throw ConfigError("sweep.spectrum must be two-level or cpt");
        std::size_t const n = positive_count(params, "sweep.points");
        if (n == 0)
            cfg.sweep.values = parse_list(params.text("sweep.values"));
        else
        {
            double const from = params.number("sweep.from");
            double const to = params.number("sweep.to");
            std::string const scale = params.text("sweep.scale");
            if (n == 1)
                cfg.sweep.values = {from};
            else if (n >= 2 && scale == "lin")
                cfg.sweep.values = linspace(from, to, n);
            else if (n >= 2 && scale == "log")
            {
                if (!(from > 0.0 && to > 0.0))
                    throw ConfigError("log sweep needs positive bounds");
                for (double e : linspace(std::log(from), std::log(to), n))
                    cfg.sweep.values.push_back(std::exp(e));
            }
            else if (n >= 2)
                throw ConfigError("sweep.scale must be lin or log");
        }
        if (cfg.sweep.values.empty())
            throw ConfigError("sweep values are empty");
    }

    try
    {
        bool const cpt_like = command == Command::Cpt
                              || command == Command::DynamicsValidate
                              || command == Command::Report
                              || (command == Command::Sweep
                                  && cfg.sweep.spectrum == "cpt");
        if (cpt_like)
            cfg.cpt = cpt_params(params);
        else
            cfg.two_level = two_level_params(params);
    }
    catch (DomainError const& e)
    {
        throw ConfigError(e.what());
    }
    return cfg;
}

}  // namespace dicke::cli
