#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dicke::cli {
namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 190.0;
constexpr double kTop = 46.0;
constexpr double kBottom = 62.0;

constexpr char const* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf"};

std::string escape(std::string const& s)
{
    std::string out;
    for (char c : s)
    {
        switch (c)
        {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string short_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// 1, 2 or 5 times a power of ten, giving roughly `target` intervals
double nice_step(double span, int target)
{
    double const raw = span / target;
    double const mag = std::pow(10.0, std::floor(std::log10(raw)));
    double const f = raw / mag;
    double const nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

struct Axis
{
    double lo;
    double hi;
    double step;
};

Axis make_axis(double lo, double hi)
{
    if (!(hi > lo))
    {
        double const pad = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
        lo -= pad;
        hi += pad;
    }
    double const step = nice_step(hi - lo, 6);
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

}  // namespace

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Table spectrum_table(Spectrum const& spec)
{
    Table t;
    t.columns = {"detuning", "value"};
    if (spec.std_errors)
        t.columns.push_back("stderr");
    for (std::size_t i = 0; i < spec.size(); ++i)
    {
        std::vector<std::string> row{format_number(spec.detunings[i]),
                                     format_number(spec.values[i])};
        if (spec.std_errors)
            row.push_back(format_number((*spec.std_errors)[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string to_csv(Table const& table)
{
    std::ostringstream out;
    for (auto const& c : table.comments)
        out << "# " << c << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (auto const& row : table.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            std::string cell = row[i];
            if (cell.find_first_of(",\"\n") != std::string::npos)
            {
                std::string quoted = "\"";
                for (char c : cell)
                    quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
                cell = quoted + "\"";
            }
            out << (i ? "," : "") << cell;
        }
        out << '\n';
    }
    return out.str();
}

std::string render_svg(Plot const& plot)
{
    double xlo = std::numeric_limits<double>::infinity();
    double xhi = -xlo;
    double ylo = xlo;
    double yhi = -xlo;
    for (auto const& c : plot.curves)
    {
        for (std::size_t i = 0; i < c.x.size(); ++i)
        {
            double const e = i < c.err.size() ? c.err[i] : 0.0;
            xlo = std::min(xlo, c.x[i]);
            xhi = std::max(xhi, c.x[i]);
            ylo = std::min(ylo, c.y[i] - e);
            yhi = std::max(yhi, c.y[i] + e);
        }
    }
    if (!std::isfinite(xlo))
        xlo = ylo = 0.0, xhi = yhi = 1.0;
    Axis const ax{xlo, xhi, nice_step(std::max(xhi - xlo, 1e-300), 8)};
    Axis const ay = make_axis(ylo, yhi);

    double const pw = kWidth - kLeft - kRight;
    double const ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto sy = [&](double y) {
        return kTop + ph - (y - ay.lo) / (ay.hi - ay.lo) * ph;
    };

    std::ostringstream s;
    s.precision(6);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"26\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(plot.title) << "</text>\n";

    // ticks and grid
    double const x0 = std::ceil(ax.lo / ax.step - 1e-9) * ax.step;
    for (double x = x0; x <= ax.hi + 1e-9 * ax.step; x += ax.step)
    {
        double const px = sx(x);
        s << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px
          << "\" y2=\"" << kTop + ph << "\" stroke=\"#e6e6e6\"/>\n";
        s << "<text x=\"" << px << "\" y=\"" << kTop + ph + 18
          << "\" text-anchor=\"middle\">"
          << short_number(std::abs(x) < 1e-12 * ax.step ? 0.0 : x)
          << "</text>\n";
    }
    for (double y = ay.lo; y <= ay.hi + 1e-9 * ay.step; y += ay.step)
    {
        double const py = sy(y);
        s << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\""
          << kLeft + pw << "\" y2=\"" << py << "\" stroke=\"#e6e6e6\"/>\n";
        s << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\">"
          << short_number(std::abs(y) < 1e-12 * ay.step ? 0.0 : y)
          << "</text>\n";
    }
    s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18
      << "\" text-anchor=\"middle\">" << escape(plot.xlabel) << "</text>\n";
    s << "<text transform=\"translate(22," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.ylabel)
      << "</text>\n";

    for (std::size_t k = 0; k < plot.curves.size(); ++k)
    {
        auto const& c = plot.curves[k];
        char const* color = kPalette[k % std::size(kPalette)];
        s << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.6\"" << (c.dashed ? " stroke-dasharray=\"6 4\"" : "")
          << " points=\"";
        for (std::size_t i = 0; i < c.x.size(); ++i)
            s << (i ? " " : "") << sx(c.x[i]) << ',' << sy(c.y[i]);
        s << "\"/>\n";
        for (std::size_t i = 0; i < c.err.size() && i < c.x.size(); ++i)
        {
            s << "<line x1=\"" << sx(c.x[i]) << "\" y1=\"" << sy(c.y[i] - c.err[i])
              << "\" x2=\"" << sx(c.x[i]) << "\" y2=\"" << sy(c.y[i] + c.err[i])
              << "\" stroke=\"" << color << "\"/>\n";
        }
        double const ly = kTop + 14 + 18 * static_cast<double>(k);
        double const lx = kLeft + pw + 14;
        s << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"" << (c.dashed ? " stroke-dasharray=\"6 4\"" : "")
          << "/>\n";
        s << "<text x=\"" << lx + 30 << "\" y=\"" << ly << "\">" << escape(c.label)
          << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void write_text_file(std::string const& path, std::string const& text)
{
    std::filesystem::path const p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace dicke::cli
