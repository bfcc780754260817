#include "doctest.h"

#include <cmath>

#include "dicke/analysis.hpp"
#include "dicke/error.hpp"
#include "dicke/twolevel.hpp"
#include "test_support.hpp"

using namespace dicke;

TEST_SUITE("twolevel")
{
    TEST_CASE("near the Doppler limit the peak is Gaussian")
    {
        auto const p = two_level_from_widths(1.0 / 50.0, 1.0, 0.01);
        std::vector<double> const grid{-0.5, 0.0, 0.5};
        auto const s = spectrum_general(p, grid);
        CHECK(std::abs(s.values[1] / std::sqrt(kPi / 2) - 1.0) < 0.02);
    }

    TEST_CASE("near the Dicke limit the half width is Gamma + Gamma_D^2 / gamma")
    {
        auto const p = two_level_from_widths(1.0, 5.0, 500.0);
        auto const grid = linspace(-20.0, 20.0, 801);
        auto const s = spectrum_general(p, grid);
        double const w = 0.5 * fwhm(s, {0.0});
        CHECK(std::abs(w / dicke_limit_width(p) - 1.0) < 0.02);
        auto const lim = spectrum_dicke_limit(p, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(s.values[i] / lim.values[i] - 1.0) < 0.02);
    }

    TEST_CASE("spectrum is even, positive and maximal at zero")
    {
        auto const p = two_level_from_widths(0.7, 3.0, 2.0);
        auto const grid = linspace(-12.0, 12.0, 241);
        auto const s = spectrum_general(p, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            CHECK(s.values[i] > 0.0);
            CHECK(s.values[i] <= s.values[120]);
            CHECK(s.values[i]
                  == doctest::Approx(s.values[grid.size() - 1 - i]).epsilon(1e-9));
        }
        CHECK(s.meta.source == "twolevel.general");
        CHECK_FALSE(s.std_errors.has_value());
    }

    TEST_CASE("closed forms")
    {
        auto const p = two_level_from_widths(1.0, 1.0, 0.0);
        std::vector<double> const grid{-3.0, 0.0, 3.0};
        auto const d = spectrum_doppler_limit(p, grid);
        CHECK(d.values[1] == doctest::Approx(1.2533141373155003).epsilon(1e-12));
        CHECK(d.values[2] == doctest::Approx(1.2533141373155003 * std::exp(-4.5)));
        CHECK(d.values[2] == doctest::Approx(0.013922).epsilon(1e-4));

        auto const q = two_level_from_widths(1.0, 5.0, 100.0);
        auto const l = spectrum_dicke_limit(q, grid);
        CHECK(l.values[1] == doctest::Approx(0.8));
        CHECK(2.0 * dicke_limit_width(q) == doctest::Approx(2.5));

        auto const natural = two_level_from_widths(1.0, 5.0, 1e12);
        auto const n = spectrum_dicke_limit(natural, grid);
        CHECK(n.values[0] == doctest::Approx(1.0 / 10.0).epsilon(1e-9));
    }

    TEST_CASE("regime labels")
    {
        CHECK(regime_classify(two_level_from_widths(1.0, 1.0, 0.001)) == Regime::Doppler);
        CHECK(regime_classify(two_level_from_widths(1.0, 1.0, 1000.0)) == Regime::Dicke);
        CHECK(regime_classify(two_level_from_widths(1.0, 1.0, 1.0))
              == Regime::Intermediate);
        CHECK(to_string(Regime::Dicke) == "dicke");
    }

    TEST_CASE("non-decaying kernel is rejected")
    {
        auto const p = two_level_from_widths(0.0, 0.0, 1.0);
        std::vector<double> const grid{0.0, 1.0};
        CHECK_THROWS_AS(spectrum_general(p, grid), DomainError);
    }

    TEST_CASE("FWHM narrows monotonically with the collision rate")
    {
        auto const grid = linspace(-25.0, 25.0, 501);
        double prev = 1e300;
        for (double r : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0})
        {
            auto const p = two_level_from_widths(1.0, 5.0, 5.0 * r);
            double const w = fwhm(spectrum_general(p, grid));
            CHECK(w <= prev * (1 + 1e-9));
            prev = w;
        }
    }

    TEST_CASE("sum rule")
    {
        for (auto const& [gamma, gd, rate] :
             {std::tuple{0.02, 1.0, 0.01}, std::tuple{1.0, 5.0, 5.0}})
        {
            auto const p = two_level_from_widths(gamma, gd, rate);
            double const span = 400.0 * (gamma + gd);
            auto const grid = testing::sinh_grid(span, 2001, 8.0);
            auto const s = spectrum_general(p, grid);
            // Lorentzian tail beyond the grid: 2 Gamma / span
            double const area = testing::trapezoid(grid, s.values) + 2.0 * gamma / span;
            CHECK(std::abs(area / kPi - 1.0) < 0.005);
        }
    }
}
