#include "dicke/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "dicke/parallel.hpp"

namespace dicke {
namespace {

struct PendingPanel
{
    double a;
    double b;
};

constexpr std::size_t kChunk = 256;

}  // namespace

std::vector<double> geometric_breakpoints(double lo, double hi, double first)
{
    if (!(hi > lo))
        throw DomainError("geometric_breakpoints needs hi > lo");
    std::vector<double> out{lo};
    double step = first > 0.0 ? first : (hi - lo);
    double x = lo + step;
    while (x < hi)
    {
        out.push_back(x);
        x = lo + 2.0 * (x - lo);
    }
    out.push_back(hi);
    return out;
}

double decay_time(std::function<double(double)> const& envelope, double level,
                  double first_guess, double limit)
{
    if (envelope(0.0) <= level)
        return 0.0;
    double lo = 0.0;
    double hi = first_guess > 0.0 ? first_guess : 1.0;
    while (envelope(hi) > level)
    {
        lo = hi;
        hi *= 2.0;
        if (hi >= limit)
            return limit;
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it)
    {
        double const mid = 0.5 * (lo + hi);
        if (envelope(mid) > level)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

TransformResult fourier_half_line(ComplexKernel const& kernel, bool real_kernel,
                                  std::span<double const> seed_breakpoints,
                                  double max_panel_width,
                                  std::span<double const> frequencies,
                                  TransformOptions const& opts)
{
    if (seed_breakpoints.size() < 2)
        throw DomainError("transform needs at least one panel");
    double const tau_lo = seed_breakpoints.front();
    double const tau_hi = seed_breakpoints.back();
    double const span = tau_hi - tau_lo;
    if (!(span > 0.0))
        throw DomainError("transform range is empty");
    if (!(max_panel_width > 0.0))
        max_panel_width = span;

    std::vector<PendingPanel> pending;
    for (std::size_t i = 0; i + 1 < seed_breakpoints.size(); ++i)
    {
        double const a = seed_breakpoints[i];
        double const b = seed_breakpoints[i + 1];
        if (!(b > a))
            continue;
        auto const pieces = static_cast<std::size_t>(
            std::ceil((b - a) / max_panel_width - 1e-9));
        std::size_t const n = std::max<std::size_t>(1, pieces);
        for (std::size_t k = 0; k < n; ++k)
        {
            double const pa = a + (b - a) * static_cast<double>(k) / n;
            double const pb = (k + 1 == n)
                                  ? b
                                  : a + (b - a) * static_cast<double>(k + 1) / n;
            pending.push_back({pa, pb});
        }
    }

    std::size_t const nf = frequencies.size();
    TransformResult result;
    result.values.assign(nf, 0.0);
    double tol = -1.0;
    double const min_width = 1e-13 * std::max(std::abs(tau_hi), span);

    std::vector<std::array<std::complex<double>, 15>> samples;
    std::vector<double> chunk_k(kChunk * nf);
    std::vector<double> chunk_err(kChunk);

    while (!pending.empty())
    {
        if (result.panels + pending.size() > opts.max_panels)
            throw ConvergenceError("Fourier transform exceeded its panel budget");

        samples.assign(pending.size(), {});
        parallel_for(pending.size(), opts.threads, [&](std::size_t p) {
            auto const x = gk15::panel_nodes(pending[p].a, pending[p].b);
            for (int j = 0; j < 15; ++j)
                samples[p][j] = kernel(x[j]);
        });
        result.kernel_evaluations += 15 * pending.size();

        if (tol < 0.0)
        {
            // the first level covers [tau_lo, tau_hi] and fixes the tolerance
            double mass = 0.0;
            for (std::size_t p = 0; p < pending.size(); ++p)
            {
                std::array<double, 15> mag{};
                for (int j = 0; j < 15; ++j)
                    mag[j] = std::abs(samples[p][j]);
                mass += gk15::panel_sums(mag, 0.5 * (pending[p].b - pending[p].a))
                            .first;
            }
            tol = std::max(opts.abs_tol, opts.rel_tol * mass);
            result.tolerance = tol;
        }

        std::vector<PendingPanel> next;
        for (std::size_t start = 0; start < pending.size(); start += kChunk)
        {
            std::size_t const count = std::min(kChunk, pending.size() - start);
            parallel_for(count, opts.threads, [&](std::size_t c) {
                auto const& panel = pending[start + c];
                auto const x = gk15::panel_nodes(panel.a, panel.b);
                auto const& fx = samples[start + c];
                double const half = 0.5 * (panel.b - panel.a);
                double worst = 0.0;
                for (std::size_t w = 0; w < nf; ++w)
                {
                    std::array<double, 15> g{};
                    double const freq = frequencies[w];
                    for (int j = 0; j < 15; ++j)
                    {
                        double const phase = freq * x[j];
                        g[j] = real_kernel
                                   ? fx[j].real() * std::cos(phase)
                                   : fx[j].real() * std::cos(phase)
                                         - fx[j].imag() * std::sin(phase);
                    }
                    auto const [kronrod, gauss] = gk15::panel_sums(g, half);
                    chunk_k[c * nf + w] = kronrod;
                    worst = std::max(worst, std::abs(kronrod - gauss));
                }
                chunk_err[c] = worst;
            });

            for (std::size_t c = 0; c < count; ++c)
            {
                auto const& panel = pending[start + c];
                double const width = panel.b - panel.a;
                bool const accept = chunk_err[c] <= tol * width / span;
                if (accept || width < min_width)
                {
                    if (!accept)
                    {
                        std::ostringstream msg;
                        msg << "Fourier transform failed to converge on ["
                            << panel.a << ", " << panel.b << "]: error "
                            << chunk_err[c] << " exceeds "
                            << tol * width / span;
                        throw ConvergenceError(msg.str());
                    }
                    for (std::size_t w = 0; w < nf; ++w)
                        result.values[w] += chunk_k[c * nf + w];
                    ++result.panels;
                }
                else
                {
                    double const mid = 0.5 * (panel.a + panel.b);
                    next.push_back({panel.a, mid});
                    next.push_back({mid, panel.b});
                }
            }
        }
        pending = std::move(next);
    }
    return result;
}

}  // namespace dicke
