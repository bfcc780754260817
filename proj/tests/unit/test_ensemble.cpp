#include "doctest.h"

#include <cmath>

#include "dicke/ensemble.hpp"

using namespace dicke;

TEST_SUITE("ensemble")
{
    TEST_CASE("block layout covers every sample once")
    {
        BlockSums b(1003, 1);
        CHECK(b.blocks() == 200);
        std::size_t total = 0;
        for (std::size_t k = 0; k < b.blocks(); ++k)
            total += b.block_end(k) - b.block_begin(k);
        CHECK(total == 1003);
        CHECK(BlockSums(7, 2).blocks() == 7);
    }

    TEST_CASE("mean and jackknife of the mean")
    {
        auto const sums = accumulate_blocks(800, 2, 3, [](std::size_t i, double* acc) {
            acc[0] += static_cast<double>(i);
            acc[1] += static_cast<double>(i % 2);
        });
        auto const m = sums.mean();
        CHECK(m[0] == doctest::Approx(399.5));
        CHECK(m[1] == doctest::Approx(0.5));
        auto const se = sums.standard_errors();
        // alternating samples are balanced inside every 4-sample block
        CHECK(se[1] == doctest::Approx(0.0).epsilon(1e-12));
        auto const jk = sums.jackknife([](std::vector<double> const& mean) {
            return std::vector<double>{mean[0]};
        });
        CHECK(jk[0] == doctest::Approx(se[0]).epsilon(1e-12));
    }

    TEST_CASE("results do not depend on the worker count")
    {
        auto fn = [](std::size_t i, double* acc) { acc[0] += std::sin(0.37 * i); };
        auto const a = accumulate_blocks(5000, 1, 1, fn);
        auto const b = accumulate_blocks(5000, 1, 4, fn);
        CHECK(a.mean() == b.mean());
        CHECK(a.standard_errors() == b.standard_errors());
    }
}
