#include "doctest.h"

#include <cmath>

#include "dicke/analysis.hpp"
#include "dicke/cpt.hpp"
#include "dicke/error.hpp"

using namespace dicke;

namespace {

// Gamma1 = 2, |q1| v = 3, gamma = 1.5, with a chosen pump direction
CptParams small_atom(Vec3 q2)
{
    CptParams p;
    p.system.gamma1 = 2.0;
    p.system.gamma_ad = 0.25;
    p.drive.omega2 = 0.1;
    p.motion = {1.0, 1.5, VelocityModel::BrownianMotion};
    p.geom.q1 = Vec3(3.0, 0.0, 0.0);
    p.geom.q2 = q2;
    return p;
}

// intermediate-regime atom: Gamma21 = 1, Gamma_D^res = 30, gamma = 900,
// Gamma1 = 300, Gamma_D = 3e4
CptParams intermediate_atom(double omega2 = 0.1)
{
    return cpt_collinear_from_widths(300.0, 1.0, 3e4, 30.0, 900.0, omega2);
}

CptParams resting_atom()
{
    CptParams p = small_atom(Vec3(2.0, 1.0, 0.0));
    p.motion.v_th = 0.0;
    p.system.gamma_ad = 0.5;
    return p;
}

}  // namespace

TEST_SUITE("cpt")
{
    TEST_CASE("kernel at rest is 1 / Gamma1^2")
    {
        auto const p = resting_atom();
        for (double tau : {0.0, 0.3, 10.0})
            CHECK(cpt_kernel(p, tau).real()
                  == doctest::Approx(0.25).epsilon(1e-9));
    }

    TEST_CASE("kernel against nested quadrature")
    {
        // values from tests/oracles/cpt_kernel.py
        auto const ortho = small_atom(Vec3(0.0, 2.5, 0.0));
        CHECK(cpt_kernel(ortho, 0.0).real()
              == doctest::Approx(0.06304699915432467).epsilon(1e-8));
        CHECK(cpt_kernel(ortho, 0.7).real()
              == doctest::Approx(0.02410931329199438).epsilon(1e-8));
        CHECK(cpt_kernel(ortho, 5.0).real()
              == doctest::Approx(0.015635058570596123).epsilon(1e-8));

        auto const oblique = small_atom(Vec3(4.0 / 3.0, 1.0, 0.0));
        CHECK(oblique.cross_rate_sq() == doctest::Approx(4.0));
        CHECK(cpt_kernel(oblique, 0.0).real()
              == doctest::Approx(0.06304699915432467).epsilon(1e-8));
        CHECK(cpt_kernel(oblique, 0.7).real()
              == doctest::Approx(0.037732960950064814).epsilon(1e-8));
        CHECK(cpt_kernel(oblique, 5.0).real()
              == doctest::Approx(0.02919254224236038).epsilon(1e-8));
        CHECK(std::abs(cpt_kernel(oblique, 0.7).imag()) < 1e-15);
    }

    TEST_CASE("kernel plateau in the intermediate regime")
    {
        // independent dblquad values; the closed-form amplitude
        // 1/(Gamma1 + eta Gamma_D)^2 = 5.9e-7 is not reached (see notes)
        auto const p = intermediate_atom();
        CHECK(cpt_kernel(p, 0.0).real() == doctest::Approx(1.118e-9).epsilon(2e-3));
        double const plateau = cpt_kernel(p, 0.1).real();
        CHECK(plateau == doctest::Approx(1.6566e-9).epsilon(1e-3));
        CHECK(cpt_kernel(p, 1.0).real() == doctest::Approx(plateau).epsilon(1e-9));
    }

    TEST_CASE("dip at rest is the natural Lorentzian")
    {
        auto const p = resting_atom();
        auto const grid = linspace(-4.0, 4.0, 17);
        for (auto method : {DipMethod::General, DipMethod::Intermediate})
        {
            auto const s = cpt_dip(p, grid, method);
            for (std::size_t i = 0; i < grid.size(); ++i)
            {
                double const g21 = p.gamma21();
                double const want = -0.01 / 4.0 * g21
                                    / (grid[i] * grid[i] + g21 * g21);
                CHECK(std::abs(s.values[i] / want - 1.0) < 1e-3);
            }
        }
        CptParams c = p;
        c.geom.q2 = Vec3(1.0, 0.0, 0.0);
        auto const col = cpt_dip_collinear(c, grid);
        CHECK(col.values[8] == doctest::Approx(-0.01 / (4.0 * 1.0)).epsilon(1e-12));
    }

    TEST_CASE("intermediate closed form")
    {
        auto const p = intermediate_atom();
        CHECK(p.eta() == doctest::Approx(1.0 / 30.0));
        CHECK(cpt_predicted_hwhm(p) == doctest::Approx(2.0));
        auto const grid = linspace(-20.0, 20.0, 401);
        auto const s = cpt_dip_intermediate(p, grid);
        CHECK(fwhm(s, {0.0}) == doctest::Approx(4.0).epsilon(1e-3));
        double const amp = p.system.gamma1 + p.amplitude_shift();
        CHECK(s.values[200] == doctest::Approx(-0.01 / (amp * amp * 2.0)));

        auto const col = cpt_dip_collinear(p, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(col.values[i] == doctest::Approx(s.values[i]).epsilon(1e-13));
    }

    TEST_CASE("collinear broadening scales with v_th squared")
    {
        auto p = intermediate_atom();
        double const b1 = cpt_predicted_hwhm(p) - p.gamma21();
        p.motion.v_th *= 2.0;
        double const b2 = cpt_predicted_hwhm(p) - p.gamma21();
        CHECK(b2 == doctest::Approx(4.0 * b1));
        CptParams tilted = p;
        tilted.geom = geometry_from_angle(3e4, 3e4, 0.1);
        std::vector<double> const grid{0.0, 1.0};
        CHECK_THROWS_AS(cpt_dip_collinear(tilted, grid), DomainError);
    }

    TEST_CASE("general dip keeps the predicted width")
    {
        auto const p = intermediate_atom();
        auto const grid = linspace(-20.0, 20.0, 201);
        auto const s = cpt_dip_general(p, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            CHECK(s.values[i] <= 0.0);
            CHECK(s.values[i]
                  == doctest::Approx(s.values[grid.size() - 1 - i]).epsilon(1e-9));
        }
        double const w = 0.5 * fwhm(s, {0.0});
        CHECK(std::abs(w / 2.0 - 1.0) < 0.03);
    }

    TEST_CASE("full probe spectrum")
    {
        auto p = intermediate_atom(0.0);
        auto const grid = linspace(-10.0, 10.0, 21);
        auto const flat = full_probe_spectrum(p, grid);
        std::vector<double> const d1{0.0};
        double const s1 = one_photon_spectrum(p, d1).values[0];
        for (double v : flat.values)
            CHECK(v == doctest::Approx(s1).epsilon(1e-12));

        p.drive.omega2 = 0.05;
        auto const a = full_probe_spectrum(p, grid);
        p.drive.omega2 = 0.1;
        auto const b = full_probe_spectrum(p, grid);
        double const ratio = (b.values[10] - s1) / (a.values[10] - s1);
        CHECK(std::abs(ratio / 4.0 - 1.0) < 0.01);
        CHECK(peak(b).position == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(peak(b).is_dip);
    }

    TEST_CASE("one-photon spectrum is even")
    {
        auto const p = intermediate_atom();
        auto const grid = linspace(-9e4, 9e4, 31);
        auto const s = one_photon_spectrum(p, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(s.values[i] == doctest::Approx(s.values[30 - i]).epsilon(1e-9));
    }

    TEST_CASE("validity flags")
    {
        auto p = intermediate_atom(0.1);
        auto has = [](std::vector<std::string> const& f, char const* name) {
            return std::find(f.begin(), f.end(), name) != f.end();
        };
        CHECK_FALSE(has(p.flags(), "low_contrast_violated"));
        p.drive.omega2 = 6.0;  // 36 >= 0.1 * 1 * 300
        CHECK(has(p.flags(), "low_contrast_violated"));
        p.drive.omega1 = 1.0;
        CHECK(has(p.flags(), "weak_probe_violated"));
        CHECK(dip_method_from_string("collinear") == DipMethod::Collinear);
        CHECK_THROWS_AS(dip_method_from_string("fast"), DomainError);
    }
}
