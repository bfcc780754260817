#pragma once

// Layered run configuration: built-in defaults, optional preset, config file,
// environment and command-line overrides, resolved into typed parameters.

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke/dicke.hpp"

namespace dicke::cli {

/// Usage or configuration problem (exit code 2).
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class Command
{
    TwoLevel,
    Cpt,
    McValidate,
    DynamicsValidate,
    Sweep,
    Report,
};

std::string to_string(Command command);
Command command_from_string(std::string const& name);

/// Flat "section.key" -> text map. Keys outside the registry are rejected.
class ParamMap
{
  public:
    void set(std::string const& key, std::string const& value);
    void set(std::string const& key, double value);
    bool contains(std::string const& key) const;
    std::string const& text(std::string const& key) const;
    double number(std::string const& key) const;
    long long integer(std::string const& key) const;
    std::map<std::string, std::string> const& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

/// True if `key` names a rate that also accepts a `<key>_hz` spelling.
bool is_rate_key(std::string const& key);
bool is_known_key(std::string const& key);
/// All registered keys with their one-line descriptions.
std::vector<std::pair<std::string, std::string>> documented_keys();

ParamMap defaults(Command command);
void apply_preset(ParamMap& params, std::string const& preset);
/// INI-style text: [section] headers, `key = value`, '#' or ';' comments.
void apply_config_text(ParamMap& params, std::string const& text,
                       std::string const& origin);
void apply_config_file(ParamMap& params, std::string const& path);
/// "section.key=value"
void apply_assignment(ParamMap& params, std::string const& assignment);

/// Resolved config as loadable INI text.
std::string to_config_text(ParamMap const& params);

struct GridSpec
{
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;

    std::vector<double> values() const;
};

/// "min:max:points"
GridSpec parse_grid(std::string const& text);

struct SweepSpec
{
    std::string variable;
    std::vector<double> values;
    std::string spectrum;  // "cpt" or "two-level"
};

struct OutputPaths
{
    std::string csv;
    std::string json;
    std::string svg;
    std::string config;
};

struct McSettings
{
    std::size_t tau_points = 12;
    double tau_max = 0.0;  // 0: closure decays to 1e-2
};

struct DynamicsSettings
{
    EnsembleOptions ensemble;
    std::string mode;       // "dip" or "absorption"
    double omega2_factor = 2.0;
};

struct RunConfig
{
    Command command = Command::TwoLevel;
    ParamMap params;
    GridSpec grid;
    SweepSpec sweep;
    OutputPaths out;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t samples = 0;
    DipMethod method = DipMethod::General;
    TwoLevelParams two_level;
    CptParams cpt;
    McSettings mc;
    DynamicsSettings dynamics;
};

/// Typed view of a fully layered parameter map. Throws ConfigError.
RunConfig resolve(Command command, ParamMap const& params);

/// Two-level and CPT parameters implied by a map (used per sweep point).
TwoLevelParams two_level_params(ParamMap const& params);
CptParams cpt_params(ParamMap const& params);

}  // namespace dicke::cli
