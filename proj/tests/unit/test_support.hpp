#pragma once

#include <cmath>
#include <vector>

#include "dicke/model.hpp"

namespace testing {

/// Points clustered near zero: x_i = L sinh(a u_i) / sinh(a), u in [-1, 1].
inline std::vector<double> sinh_grid(double half_span, std::size_t n, double a = 6.0)
{
    std::vector<double> out;
    for (double u : dicke::linspace(-1.0, 1.0, n))
        out.push_back(half_span * std::sinh(a * u) / std::sinh(a));
    return out;
}

inline double trapezoid(std::vector<double> const& x, std::vector<double> const& y)
{
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

inline double max_abs(std::vector<double> const& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

}  // namespace testing
