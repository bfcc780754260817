// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [criterion numbers...] [--out DIR]
//
// With no numbers every criterion runs. Plots and CLI artifacts go to DIR
// (default: ./acceptance_out).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "dicke/dicke.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dicke;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20261019;

fs::path g_out = "acceptance_out";

struct Outcome
{
    bool pass = false;
    std::string detail;
};

class Stopwatch
{
  public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Runs the command-line tool in process and returns the parsed summary line.
json cli(std::vector<std::string> args, int* code = nullptr)
{
    args.insert(args.begin(), "dicke-cpt");
    std::ostringstream out;
    std::ostringstream err;
    int const rc = cli::run(args, out, err);
    if (code)
        *code = rc;
    std::string text = out.str();
    // the summary is the last line
    while (!text.empty() && text.back() == '\n')
        text.pop_back();
    auto const nl = text.rfind('\n');
    std::string const last = nl == std::string::npos ? text : text.substr(nl + 1);
    if (rc != 0 && last.empty())
        return json{{"status", "error"}, {"message", err.str()}};
    try
    {
        return json::parse(last);
    }
    catch (json::exception const&)
    {
        return json{{"status", "error"}, {"message", err.str()}};
    }
}

std::vector<double> sinh_grid(double half_span, std::size_t n, double a)
{
    std::vector<double> out;
    for (double u : linspace(-1.0, 1.0, n))
        out.push_back(half_span * std::sinh(a * u) / std::sinh(a));
    return out;
}

double trapezoid(std::vector<double> const& x, std::vector<double> const& y)
{
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

// Largest relative difference between two numeric JSON trees; structural
// mismatch counts as 1.
double json_distance(json const& a, json const& b)
{
    if (a.is_number() && b.is_number())
    {
        double const x = a.get<double>();
        double const y = b.get<double>();
        if (x == y)
            return 0.0;
        return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
    }
    if (a.is_object() && b.is_object())
    {
        if (a.size() != b.size())
            return 1.0;
        double d = 0.0;
        for (auto it = a.begin(); it != a.end(); ++it)
        {
            if (!b.contains(it.key()))
                return 1.0;
            d = std::max(d, json_distance(it.value(), b.at(it.key())));
        }
        return d;
    }
    if (a.is_array() && b.is_array())
    {
        if (a.size() != b.size())
            return 1.0;
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            d = std::max(d, json_distance(a[i], b[i]));
        return d;
    }
    return a == b ? 0.0 : 1.0;
}

Outcome doppler_limit()
{
    Stopwatch sw;
    auto const p = two_level_from_widths(0.02, 1.0, 0.01);
    auto const grid = linspace(-3.0, 3.0, 121);
    auto const s = spectrum_general(p, grid);
    auto const g = spectrum_doppler_limit(p, grid);
    double worst = 0.0;
    double worst_at = 0.0;
    double peak_norm = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        double const rel = std::abs(s.values[i] / g.values[i] - 1.0);
        if (rel > worst)
            worst = rel, worst_at = grid[i];
        peak_norm = std::max(peak_norm, std::abs(s.values[i] - g.values[i]) / g.values[60]);
    }
    double const t = sw.seconds();
    return {worst < 0.02 && t < 10.0,
            fmt("max pointwise deviation %.4g at Delta = %.3g Gamma_D (limit 0.02); "
                "deviation / peak %.3g; %.2f s",
                worst, worst_at, peak_norm, t)};
}

Outcome dicke_limit()
{
    Stopwatch sw;
    auto const p = two_level_from_widths(1.0, 5.0, 500.0);
    auto const grid = linspace(-20.0, 20.0, 801);
    auto const s = spectrum_general(p, grid);
    auto const l = spectrum_dicke_limit(p, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(s.values[i] / l.values[i] - 1.0));
    double const w = fwhm(s, {0.0});
    double const want = 2.0 * dicke_limit_width(p);
    double const werr = std::abs(w / want - 1.0);
    double const t = sw.seconds();
    return {worst < 0.02 && werr < 0.02 && t < 10.0,
            fmt("max pointwise deviation %.3g; FWHM %.6g vs %.6g (rel %.3g); %.2f s",
                worst, w, want, werr, t)};
}

Outcome fig2_family()
{
    Stopwatch sw;
    // Dicke parameter 2 pi Lambda / lambda = Gamma_D / gamma with Gamma_D = 5
    std::vector<double> const dicke{20, 10, 5, 2, 1, 0.5, 0.2, 0.1, 0.05};
    std::string values;
    for (double d : dicke)
        values += (values.empty() ? "" : ",") + fmt("%.17g", 5.0 / d);
    int code = 0;
    auto const s = cli({"sweep", "--gamma", "1", "--gamma-d", "5", "--grid", "-25:25:1001",
                        "--sweep-variable", "gamma", "--sweep-values", values, "--out",
                        (g_out / "fig2.csv").string(), "--threads", "1"},
                       &code);
    if (code != 0)
        return {false, "sweep failed: " + s.dump()};
    auto const& rows = s["metrics"]["rows"];
    bool height_up = true;
    bool width_down = true;
    std::string trace;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        double const h = rows[i]["metrics"]["peak_value"];
        double const w = rows[i]["metrics"]["fwhm"];
        trace += fmt("%s%.3g:%.3g/%.3g", i ? " " : "", dicke[i], h, w);
        if (i > 0)
        {
            height_up &= h > rows[i - 1]["metrics"]["peak_value"].get<double>();
            width_down &= w < rows[i - 1]["metrics"]["fwhm"].get<double>();
        }
    }
    double const t = sw.seconds();
    return {height_up && width_down && t < 60.0 && fs::exists(g_out / "fig2.svg"),
            fmt("height rises %s, FWHM falls %s; [Dicke parameter:height/FWHM] %s; "
                "plot %s; %.2f s",
                height_up ? "yes" : "no", width_down ? "yes" : "no", trace.c_str(),
                (g_out / "fig2.svg").c_str(), t)};
}

Outcome sum_rule()
{
    Stopwatch sw;
    struct Set
    {
        double gamma, gd, rate;
    };
    std::vector<Set> const sets{{0.02, 1.0, 0.01},   // Doppler
                                {0.5, 2.0, 0.2},     // Doppler side of intermediate
                                {1.0, 5.0, 5.0},     // intermediate
                                {1.0, 5.0, 500.0},   // Dicke
                                {1.0, 0.1, 1.0}};    // nearly homogeneous
    bool ok = true;
    std::string trace;
    for (auto const& s : sets)
    {
        auto const p = two_level_from_widths(s.gamma, s.gd, s.rate);
        // the Gamma / Delta^2 wing beyond the grid is below 0.07% of pi
        double const span = 1000.0 * s.gamma + 50.0 * s.gd;
        auto const grid = sinh_grid(span, 2001, 8.0);
        double const area = trapezoid(grid, spectrum_general(p, grid).values);
        double const rel = area / kPi - 1.0;
        ok &= std::abs(rel) < 0.005;
        trace += fmt("%s%.2e", trace.empty() ? "" : " ", rel);
    }
    return {ok, fmt("relative deviations from pi: %s (limit 0.005); %.2f s", trace.c_str(),
                    sw.seconds())};
}

Outcome closure()
{
    Stopwatch sw;
    std::size_t const n = 100000;
    double worst_z = 0.0;
    std::string trace;
    for (double r : {0.1, 1.0, 10.0})
    {
        MotionParams m{1.0, r, VelocityModel::BrownianMotion};
        std::vector<double> taus;
        for (int j = 1; j < 12; ++j)
            taus.push_back(j / std::max(1.0, r));
        auto const est = phase_factor_estimate(Vec3(1.0, 0, 0), m, taus, n, kSeed);
        double z = 0.0;
        for (std::size_t j = 0; j < taus.size(); ++j)
        {
            double const c = phase_factor_closure(1.0, m, taus[j]);
            z = std::max(z, std::abs(est.mean_re[j] - c) / est.stderr_re[j]);
            z = std::max(z, std::abs(est.mean_im[j]) / est.stderr_im[j]);
        }
        worst_z = std::max(worst_z, z);
        trace += fmt("%sr=%g:%.2f", trace.empty() ? "" : " ", r, z);
    }
    // strong collisions, gamma = 100 Gamma_D
    MotionParams strong{1.0, 100.0, VelocityModel::StrongCollisions};
    std::vector<double> taus;
    for (int j = 1; j <= 10; ++j)
        taus.push_back(5.0 * j);
    auto const est = phase_factor_estimate(Vec3(1.0, 0, 0), strong, taus, 20000, kSeed);
    double worst_rel = 0.0;
    for (std::size_t j = 0; j < taus.size(); ++j)
    {
        double const c = phase_factor_closure(1.0, strong, taus[j]);
        worst_rel = std::max(worst_rel, std::abs(est.mean_re[j] / c - 1.0));
    }
    double const t = sw.seconds();
    return {worst_z < 3.0 && worst_rel < 0.05 && t < 300.0,
            fmt("Brownian max |z| %s (limit 3); strong collisions max rel %.3g "
                "(limit 0.05); %.1f s",
                trace.c_str(), worst_rel, t)};
}

Outcome mc_spectrum()
{
    Stopwatch sw;
    auto const p = two_level_from_widths(1.0, 5.0, 5.0);
    auto const grid = linspace(-15.0, 15.0, 21);
    McSpectrumOptions o;
    o.threads = 0;
    auto const mc = mc_two_level_spectrum(p, grid, 100000, kSeed, o);
    auto const ref = spectrum_general(p, grid);
    double z = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        z = std::max(z, std::abs(mc.values[i] - ref.values[i]) / (*mc.std_errors)[i]);
    double const t = sw.seconds();
    return {z < 3.0 && t < 300.0, fmt("max |z| %.3f over %zu points (limit 3); %.1f s", z,
                                      grid.size(), t)};
}

Outcome cpt_closed_form()
{
    Stopwatch sw;
    auto const p = cpt_collinear_from_widths(300.0, 1.0, 3e4, 30.0, 900.0, 0.1);
    auto const grid = linspace(-20.0, 20.0, 401);
    CptOptions o;
    o.transform.threads = 0;
    auto const g = cpt_dip_general(p, grid, o);
    auto const c = cpt_dip_intermediate(p, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(g.values[i] / c.values[i] - 1.0));
    double const hg = 0.5 * fwhm(g, {0.0});
    double const hc = 0.5 * fwhm(c, {0.0});
    double const herr = std::abs(hg / 2.0 - 1.0);
    double const t = sw.seconds();
    bool const pointwise = worst < 0.05;
    bool const width = herr < 0.03;
    return {pointwise && width && t < 300.0,
            fmt("pointwise %s: max rel deviation %.4g (limit 0.05), depth ratio %.4g; "
                "HWHM %s: general %.5g, closed form %.5g, expected 2 (rel %.3g); %.2f s",
                pointwise ? "ok" : "FAIL", worst, g.values[200] / c.values[200],
                width ? "ok" : "FAIL", hg, hc, herr, t)};
}

Outcome resting_cpt()
{
    CptParams p;
    p.system.gamma1 = 3.0;
    p.system.gamma_ad = 0.4;
    p.drive.omega2 = 0.2;
    p.motion = {0.0, 2.0, VelocityModel::BrownianMotion};
    p.geom.q1 = Vec3(5.0, 0, 0);
    p.geom.q2 = Vec3(4.0, 0, 0);
    auto const grid = linspace(-5.0, 5.0, 41);
    double worst = 0.0;
    std::string trace;
    for (auto method : {DipMethod::General, DipMethod::Intermediate, DipMethod::Collinear})
    {
        auto const s = cpt_dip(p, grid, method);
        double w = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            double const g21 = p.gamma21();
            double const want = -0.04 * g21 / (9.0 * (grid[i] * grid[i] + g21 * g21));
            w = std::max(w, std::abs(s.values[i] / want - 1.0));
        }
        worst = std::max(worst, w);
        trace += fmt("%s%s %.2e", trace.empty() ? "" : ", ", to_string(method).c_str(), w);
    }
    return {worst < 1e-3, "max rel deviation " + trace + " (limit 1e-3)"};
}

Outcome theta_law()
{
    Stopwatch sw;
    int code = 0;
    auto const s = cli({"sweep", "--sweep-spectrum", "cpt", "--sweep-variable", "theta",
                        "--q1", "1000", "--q2", "1000", "--v-th", "1", "--gamma1", "50",
                        "--gamma-ad", "0.5", "--collision-rate", "100", "--model",
                        "brownian", "--grid", "-12:12:121", "--sweep-from", "1e-3",
                        "--sweep-to", "1e-2", "--sweep-points", "5", "--sweep-scale", "log",
                        "--method", "general", "--out", (g_out / "theta.csv").string()},
                       &code);
    if (code != 0 || s["metrics"]["loglog_slope"].is_null())
        return {false, "sweep failed: " + s.dump()};
    double const slope = s["metrics"]["loglog_slope"];
    double const t = sw.seconds();
    return {std::abs(slope - 2.0) <= 0.05 && t < 60.0,
            fmt("log-log slope of excess HWHM %.4f (2.00 +- 0.05); %.2f s", slope, t)};
}

Outcome rubidium_eta()
{
    bool ok = true;
    std::string trace;
    double lo = 1e300;
    double hi = 0.0;
    for (double e : linspace(std::log(0.3e-6), std::log(3e-6), 11))
    {
        double const mfp = std::exp(e);
        double const eta = narrowing_report(rubidium_params(mfp)).eta;
        lo = std::min(lo, eta);
        hi = std::max(hi, eta);
        bool const in = eta >= 0.5e-4 && eta <= 5e-4;
        ok &= in;
        if (!in)
            trace += fmt(" out of band at Lambda = %.3g um (eta %.3g);", mfp * 1e6, eta);
    }
    return {ok, fmt("eta over Lambda in [0.3, 3] um spans [%.3g, %.3g] (band [5e-5, 5e-4]);",
                    lo, hi) + trace};
}

Outcome dynamics_oracle()
{
    Stopwatch sw;
    int code = 0;
    auto const s = cli({"dynamics-validate", "-n", "500", "--seed", std::to_string(kSeed),
                        "--grid", "-9:9:13", "--omega2-factor", "2", "--out",
                        (g_out / "dynamics.csv").string()},
                       &code);
    if (code != 0)
        return {false, "dynamics-validate failed: " + s.dump()};
    auto const& m = s["metrics"];
    double const hwhm = m["fit"]["hwhm"];
    double const predicted = m["predicted_hwhm"];
    double const ratio = m["depth_ratio"];
    double const expected = m["depth_ratio_expected"];
    double const herr = std::abs(hwhm / predicted - 1.0);
    double const rerr = std::abs(ratio / expected - 1.0);
    double const t = sw.seconds();
    return {herr < 0.15 && rerr < 0.10 && t < 1800.0,
            fmt("HWHM %.4g vs %.4g (rel %.3g, limit 0.15); depth ratio %.4g vs %.4g "
                "(rel %.3g, limit 0.10); %.0f s",
                hwhm, predicted, herr, ratio, expected, rerr, t)};
}

Outcome determinism()
{
    Stopwatch sw;
    struct Case
    {
        std::vector<std::string> args;
    };
    std::vector<Case> const cases{
        {{"mc-validate", "-n", "20000", "--seed", "5"}},
        {{"dynamics-validate", "-n", "16", "--seed", "5", "--grid", "-6:6:5"}},
    };
    double worst = 0.0;
    std::string trace;
    for (auto const& c : cases)
    {
        auto one = c.args;
        one.insert(one.end(), {"--threads", "1"});
        auto many = c.args;
        many.insert(many.end(), {"--threads", "4"});
        auto const a = cli(one);
        auto const b = cli(many);
        if (a["status"] != "ok" || b["status"] != "ok")
            return {false, c.args[0] + " failed"};
        double const d = json_distance(a["metrics"], b["metrics"]);
        worst = std::max(worst, d);
        trace += fmt("%s%s %.1e", trace.empty() ? "" : ", ", c.args[0].c_str(), d);
    }
    return {worst < 1e-12,
            "max relative difference of summary metrics, threads 1 vs 4: " + trace
                + fmt(" (limit 1e-12); %.1f s", sw.seconds())};
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
    {
        std::string const a = argv[i];
        if (a == "--out" && i + 1 < argc)
            g_out = argv[++i];
        else
            selected.insert(std::stoi(a));
    }
    fs::create_directories(g_out);

    std::vector<std::pair<char const*, std::function<Outcome()>>> const criteria{
        {"Doppler-limit equivalence", doppler_limit},
        {"Dicke-limit equivalence", dicke_limit},
        {"family of narrowing curves", fig2_family},
        {"sum rule", sum_rule},
        {"cumulant closure", closure},
        {"Monte Carlo spectrum", mc_spectrum},
        {"CPT closed-form consistency", cpt_closed_form},
        {"CPT at rest", resting_cpt},
        {"theta^2 law", theta_law},
        {"eta order of magnitude", rubidium_eta},
        {"dynamics oracle", dynamics_oracle},
        {"thread determinism", determinism},
    };

    int failed = 0;
    int ran = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k)
    {
        int const id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id))
            continue;
        ++ran;
        Outcome o;
        try
        {
            o = criteria[k].second();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << id << " [" << (o.pass ? "PASS" : "FAIL") << "] "
                  << criteria[k].first << ": " << o.detail << std::endl;
    }
    std::cout << "acceptance: " << ran - failed << "/" << ran << " passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
