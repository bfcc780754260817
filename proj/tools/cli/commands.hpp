#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "output.hpp"

namespace dicke::cli {

struct CommandOutput
{
    std::string source;
    Table table;
    /// Plain text document written instead of the table (report).
    std::optional<std::string> text;
    /// Everything that must not depend on the thread count.
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::string> flags;
    std::optional<Plot> plot;
    /// Some sweep points failed; the rest of the table is valid.
    bool partial_failure = false;
};

CommandOutput run_two_level(RunConfig const& cfg);
CommandOutput run_cpt(RunConfig const& cfg);
CommandOutput run_mc_validate(RunConfig const& cfg);
CommandOutput run_dynamics_validate(RunConfig const& cfg);
CommandOutput run_sweep(RunConfig const& cfg);
CommandOutput run_report(RunConfig const& cfg);

CommandOutput dispatch(RunConfig const& cfg);

/// Least-squares slope of log(y) against log(x) over points with x, y > 0.
std::optional<double> loglog_slope(std::vector<double> const& x,
                                   std::vector<double> const& y);

}  // namespace dicke::cli
