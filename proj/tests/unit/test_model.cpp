#include "doctest.h"

#include <cmath>

#include "dicke/model.hpp"
#include "dicke/error.hpp"

using namespace dicke;

TEST_SUITE("model")
{
    TEST_CASE("memory_g values")
    {
        CHECK(memory_g(0.0) == 0.0);
        CHECK(memory_g(1.0) == doctest::Approx(0.3678794411714423).epsilon(1e-15));
        CHECK(memory_g(1e-8) == doctest::Approx(5.0e-17).epsilon(1e-6));
        CHECK_THROWS_AS(memory_g(-1.0), DomainError);
    }

    TEST_CASE("memory_g is continuous across the series crossover")
    {
        double const x = 1e-3;
        double const below = memory_g(std::nextafter(x, 0.0));
        double const above = memory_g(x);
        CHECK(std::abs(above - below) / above < 1e-10);
        // long double reference at the crossover
        long double const xl = 1e-3L;
        long double const ref = xl - 1.0L + std::exp(-xl);
        CHECK(std::abs((above - static_cast<double>(ref)) / above) < 1e-10);
    }

    TEST_CASE("memory_g shape")
    {
        double prev = 0.0;
        double prev_slope = 0.0;
        for (int i = 1; i <= 400; ++i)
        {
            double const x = 1e-5 * std::pow(1.05, i);
            double const gx = memory_g(x);
            CHECK(gx >= prev);
            CHECK(gx <= x);
            double const slope = (memory_g(x * 1.001) - gx) / (x * 0.001);
            CHECK(slope >= prev_slope * (1 - 1e-6));
            prev = gx;
            prev_slope = slope;
        }
    }

    TEST_CASE("velocity autocorrelation")
    {
        MotionParams m{200.0, 1e6, VelocityModel::BrownianMotion};
        CHECK(velocity_autocorrelation(m, 0.0, 0, 0) == doctest::Approx(4.0e4));
        CHECK(velocity_autocorrelation(m, 0.0, 0, 1) == 0.0);
        CHECK(velocity_autocorrelation(m, 1e-6, 2, 2)
              == doctest::Approx(1.4715177646857693e4).epsilon(1e-12));
        CHECK(velocity_autocorrelation(m, -1e-6, 1, 1)
              == velocity_autocorrelation(m, 1e-6, 1, 1));
    }

    TEST_CASE("phase variance limits")
    {
        MotionParams m{3.0, 2.0, VelocityModel::BrownianMotion};
        double const q = 1.5;
        CHECK(phase_variance(q, m, 0.0) == 0.0);
        double const tau_long = 20.0 / m.gamma;
        // diffusive asymptote including its constant offset
        double const linear = 2.0 * q * q * 9.0 * (tau_long / m.gamma - 1.0 / (m.gamma * m.gamma));
        CHECK(std::abs(phase_variance(q, m, tau_long) / linear - 1.0) < 1e-8);
        double const tau_short = 0.01 / m.gamma;
        double const quad = q * q * 9.0 * tau_short * tau_short;
        CHECK(std::abs(phase_variance(q, m, tau_short) / quad - 1.0) < 0.01);

        double prev = 0.0;
        for (int i = 1; i < 200; ++i)
        {
            double const tau = 0.05 * i;
            double const v = phase_variance(q, m, tau);
            CHECK(v >= prev);
            // between the diffusive asymptote and the ballistic parabola
            CHECK(v <= q * q * 9.0 * tau * tau * (1 + 1e-12));
            CHECK(v >= 2.0 * q * q * 9.0 * (tau / m.gamma - 1.0 / (m.gamma * m.gamma)));
            prev = v;
        }
    }

    TEST_CASE("residual Doppler width")
    {
        MotionParams m{240.0, 1.0, VelocityModel::StrongCollisions};
        FieldGeometry same{Vec3(1e7, 0, 0), Vec3(1e7, 0, 0)};
        CHECK(residual_doppler_width(same, m) == 0.0);

        double const dq = 2.0 * kPi * 6.834e9 / kSpeedOfLight;
        FieldGeometry rb{Vec3(7.9e6, 0, 0), Vec3(7.9e6 - dq, 0, 0)};
        CHECK(rb.difference().norm() == doctest::Approx(143.1).epsilon(2e-3));
        CHECK(residual_doppler_width(rb, m) == doctest::Approx(3.43e4).epsilon(3e-3));

        FieldGeometry counter{Vec3(5.0, 0, 0), Vec3(-5.0, 0, 0)};
        CHECK(residual_doppler_width(counter, m) == doctest::Approx(2.0 * 5.0 * 240.0));
    }

    TEST_CASE("Dicke parameter")
    {
        double const dq = 143.1;
        FieldGeometry g{Vec3(1000.0, 0, 0), Vec3(1000.0 - dq, 0, 0)};
        MotionParams m{240.0, 2.4e8, VelocityModel::StrongCollisions};
        auto const d = dicke_parameter(g, m);
        CHECK(d.eta == doctest::Approx(1.431e-4).epsilon(1e-9));
        CHECK(d.eta * m.gamma == residual_doppler_width(g, m));
        CHECK(d.mean_free_path == doctest::Approx(1e-6));

        MotionParams m2 = m;
        m2.gamma = 2.0 * m.gamma;
        CHECK(dicke_parameter(g, m2).eta == doctest::Approx(0.5 * d.eta));

        // Lambda = lambda_CPT / (2 pi) gives eta = 1
        MotionParams m3{240.0, 240.0 * dq, VelocityModel::StrongCollisions};
        CHECK(dicke_parameter(g, m3).eta == doctest::Approx(1.0));
        CHECK_THROWS_AS(dicke_parameter(g, MotionParams{240.0, 0.0}), DomainError);
    }

    TEST_CASE("geometry from angle")
    {
        double const q = 7.0;
        CHECK(geometry_from_angle(q, q, 0.0).difference().norm() == 0.0);
        CHECK(geometry_from_angle(q, q, kPi / 3).difference().norm()
              == doctest::Approx(q).epsilon(1e-14));
        double const th = 0.01;
        CHECK(std::abs(geometry_from_angle(q, q, th).difference().norm() / (q * th) - 1)
              < 1e-3);
        for (double t : {1e-6, 0.1, 1.0, 2.5, kPi})
        {
            double const d = geometry_from_angle(q, q, t).difference().norm();
            CHECK(d == doctest::Approx(2.0 * q * std::sin(0.5 * t)).epsilon(1e-14));
            CHECK(beam_angle(geometry_from_angle(q, 2 * q, t))
                  == doctest::Approx(t).epsilon(1e-12));
        }
        CHECK_THROWS_AS(geometry_from_angle(0.0, 1.0, 0.1), DomainError);
        CHECK_THROWS_AS(geometry_from_angle(1.0, 1.0, 4.0), DomainError);
    }

    TEST_CASE("spectrum and grid validation")
    {
        CHECK_THROWS_AS(check_grid(std::vector<double>{}), DomainError);
        CHECK_THROWS_AS(check_grid(std::vector<double>{1.0, 1.0}), DomainError);
        Spectrum s{{0.0, 1.0}, {1.0, std::nan("")}, std::nullopt, {}};
        CHECK_THROWS_AS(s.validate(), DomainError);
        auto const g = linspace(-1.0, 1.0, 5);
        CHECK(g[2] == 0.0);
        CHECK(g.back() == 1.0);
    }

    TEST_CASE("relaxation rates")
    {
        LambdaSystem s{2.0, 3.0, 0.4, 0.3, 0.0};
        CHECK(s.coherence_decay() == doctest::Approx(2.85));
        CHECK(s.ground_decay() == doctest::Approx(1.0));
        CHECK(thermal_velocity(300.0, 87 * kAtomicMassUnit)
              == doctest::Approx(169.3).epsilon(2e-3));
    }
}
