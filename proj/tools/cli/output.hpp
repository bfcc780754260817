#pragma once

// CSV tables and static SVG line charts.

#include <string>
#include <vector>

#include "dicke/model.hpp"

namespace dicke::cli {

/// Shortest text that round-trips: 17 significant digits.
std::string format_number(double v);

struct Table
{
    std::vector<std::string> comments;  // written as "# ..." lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// detuning,value[,stderr]
Table spectrum_table(Spectrum const& spec);

std::string to_csv(Table const& table);

struct Curve
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;  // optional error bars
    bool dashed = false;
};

struct Plot
{
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Curve> curves;
};

std::string render_svg(Plot const& plot);

/// Writes `text` to `path`, creating parent directories. Throws on failure.
void write_text_file(std::string const& path, std::string const& text);

}  // namespace dicke::cli
