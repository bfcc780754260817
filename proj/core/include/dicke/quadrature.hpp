#pragma once

// Adaptive Gauss-Kronrod quadrature and the half-line Fourier transform used
// by every line-shape evaluation in the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "dicke/error.hpp"

namespace dicke {

namespace gk15 {
// Kronrod abscissae on [-1, 1] (positive half, descending); the Gauss
// 7-point rule uses the odd entries.
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// Node positions of one panel [a, b] in a fixed order: index 0..6 are the
/// left points (descending distance), 7 the centre, 8..14 the mirror images.
inline std::array<double, 15> panel_nodes(double a, double b)
{
    double const c = 0.5 * (a + b);
    double const h = 0.5 * (b - a);
    std::array<double, 15> x{};
    for (int j = 0; j < 7; ++j)
    {
        x[j] = c - h * kNodes[j];
        x[14 - j] = c + h * kNodes[j];
    }
    x[7] = c;
    return x;
}

/// Kronrod and Gauss sums of tabulated node values in panel_nodes order.
template<class T>
inline std::pair<T, T> panel_sums(std::array<T, 15> const& f, double half)
{
    T kronrod = f[7] * kKronrodWeights[7];
    T gauss = f[7] * kGaussWeights[3];
    for (int j = 0; j < 7; ++j)
    {
        T const pair = f[j] + f[14 - j];
        kronrod += pair * kKronrodWeights[j];
        if (j % 2 == 1)
            gauss += pair * kGaussWeights[j / 2];
    }
    return {kronrod * half, gauss * half};
}
}  // namespace gk15

struct QuadratureOptions
{
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    std::size_t max_panels = 4000;
    /// Throw ConvergenceError when the budget runs out; otherwise return the
    /// best estimate with `converged == false`.
    bool throw_on_failure = true;
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t panels = 0;
    bool converged = true;
};

namespace detail {

struct Panel
{
    double a;
    double b;
    double value;
    double error;
    bool operator<(Panel const& other) const { return error < other.error; }
};

template<class F>
Panel gk_panel(F& f, double a, double b)
{
    auto const x = gk15::panel_nodes(a, b);
    std::array<double, 15> fx{};
    for (int j = 0; j < 15; ++j)
        fx[j] = f(x[j]);
    double const half = 0.5 * (b - a);
    auto const [kronrod, gauss] = gk15::panel_sums(fx, half);

    // QUADPACK error heuristic
    double const mean = 0.5 * kronrod / half;
    double resasc = std::abs(fx[7] - mean) * gk15::kKronrodWeights[7];
    double resabs = std::abs(fx[7]) * gk15::kKronrodWeights[7];
    for (int j = 0; j < 7; ++j)
    {
        resasc += gk15::kKronrodWeights[j]
                  * (std::abs(fx[j] - mean) + std::abs(fx[14 - j] - mean));
        resabs += gk15::kKronrodWeights[j]
                  * (std::abs(fx[j]) + std::abs(fx[14 - j]));
    }
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = std::abs(kronrod - gauss);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return {a, b, kronrod, err};
}

}  // namespace detail

/// Globally adaptive G7-K15 integration over the union of the intervals
/// delimited by `breakpoints` (sorted, at least two entries). The panel with
/// the largest error is bisected until the summed error estimate drops below
/// max(abs_tol, rel_tol * |I|).
template<class F>
QuadratureResult integrate_adaptive(F&& f, std::span<double const> breakpoints,
                                    QuadratureOptions const& opts = {})
{
    if (breakpoints.size() < 2)
        throw DomainError("integrate_adaptive needs at least two breakpoints");

    std::priority_queue<detail::Panel> heap;
    QuadratureResult result;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    {
        if (!(breakpoints[i + 1] > breakpoints[i]))
            continue;
        auto panel = detail::gk_panel(f, breakpoints[i], breakpoints[i + 1]);
        total += panel.value;
        total_err += panel.error;
        result.evaluations += 15;
        heap.push(panel);
    }

    auto target = [&] {
        return std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    };
    while (!heap.empty() && total_err > target())
    {
        if (heap.size() >= opts.max_panels)
        {
            result.converged = false;
            break;
        }
        auto worst = heap.top();
        double const mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            // round-off floor: the panel cannot be split further
            result.converged = false;
            break;
        }
        heap.pop();
        auto left = detail::gk_panel(f, worst.a, mid);
        auto right = detail::gk_panel(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // re-sum in a fixed order to drop the drift of the running updates
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty())
    {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](auto const& l, auto const& r) { return l.a < r.a; });
    result.value = 0.0;
    result.error = 0.0;
    for (auto const& p : panels)
    {
        result.value += p.value;
        result.error += p.error;
    }
    result.panels = panels.size();
    if (!result.converged && opts.throw_on_failure
        && result.error > target())
    {
        std::ostringstream msg;
        msg << "adaptive quadrature did not converge: estimate "
            << result.value << ", error " << result.error << " after "
            << result.panels << " panels";
        throw ConvergenceError(msg.str());
    }
    return result;
}

/// Breakpoints lo, lo + s, lo + 2s, lo + 4s, ... clipped at hi; resolves
/// integrands whose structure sits near lo while the support extends far.
std::vector<double> geometric_breakpoints(double lo, double hi, double first);

struct TransformOptions
{
    /// Accepted panels satisfy err <= tol * width / tau_max with
    /// tol = max(abs_tol, rel_tol * integral of |kernel|).
    double abs_tol = 0.0;
    double rel_tol = 1e-9;
    std::size_t max_panels = 4'000'000;
    std::size_t threads = 1;
};

struct TransformResult
{
    std::vector<double> values;
    std::size_t kernel_evaluations = 0;
    std::size_t panels = 0;
    double tolerance = 0.0;
};

using ComplexKernel = std::function<std::complex<double>(double)>;

/// Re int_0^tau_max exp(i w tau) k(tau) dtau for every w in `frequencies`.
///
/// The kernel is sampled once per Kronrod node and shared by all
/// frequencies. Panels start from `seed_breakpoints` (must contain 0 and
/// tau_max), are capped at `max_panel_width`, and are bisected until the
/// worst-frequency Kronrod/Gauss discrepancy meets the tolerance. Kernel
/// evaluations of one refinement level run in parallel; accumulation order is
/// fixed so results do not depend on the thread count.
TransformResult fourier_half_line(ComplexKernel const& kernel, bool real_kernel,
                                  std::span<double const> seed_breakpoints,
                                  double max_panel_width,
                                  std::span<double const> frequencies,
                                  TransformOptions const& opts);

/// Smallest tau in [0, limit] with envelope(tau) <= level for a
/// non-increasing envelope; returns limit if none.
double decay_time(std::function<double(double)> const& envelope, double level,
                  double first_guess, double limit = 1e300);

}  // namespace dicke
