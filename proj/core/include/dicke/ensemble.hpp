#pragma once

// Block-structured ensemble averages with delete-one-block jackknife errors.
// Sample i always lands in block i * B / n, and blocks are reduced in index
// order, so every statistic is independent of the worker count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dicke/parallel.hpp"

namespace dicke {

class BlockSums
{
  public:
    BlockSums(std::size_t n_samples, std::size_t dim,
              std::size_t max_blocks = 200);

    std::size_t blocks() const { return counts_.size(); }
    std::size_t dim() const { return dim_; }
    std::size_t samples() const { return n_; }
    std::size_t block_begin(std::size_t b) const;
    std::size_t block_end(std::size_t b) const { return block_begin(b + 1); }

    double* block(std::size_t b) { return sums_.data() + b * dim_; }
    double const* block(std::size_t b) const { return sums_.data() + b * dim_; }
    std::size_t count(std::size_t b) const { return counts_[b]; }

    /// Ensemble mean of every component.
    std::vector<double> mean() const;
    /// Means with block b left out.
    std::vector<double> mean_without(std::size_t b) const;

    /// Jackknife standard error of a statistic of the component means.
    /// `stat` maps a mean vector to an output vector of fixed length.
    std::vector<double> jackknife(
        std::function<std::vector<double>(std::vector<double> const&)> const&
            stat) const;
    /// Jackknife standard errors of the means themselves.
    std::vector<double> standard_errors() const;

  private:
    std::size_t n_;
    std::size_t dim_;
    std::vector<std::size_t> counts_;
    std::vector<double> sums_;
};

/// Runs fn(sample_index, accumulator) for every sample; fn adds its
/// contribution to accumulator[0..dim). Blocks are the unit of parallel work.
template<class Fn>
BlockSums accumulate_blocks(std::size_t n_samples, std::size_t dim,
                            std::size_t threads, Fn&& fn,
                            std::size_t max_blocks = 200)
{
    BlockSums sums(n_samples, dim, max_blocks);
    parallel_for(sums.blocks(), threads, [&](std::size_t b) {
        double* acc = sums.block(b);
        for (std::size_t i = sums.block_begin(b); i < sums.block_end(b); ++i)
            fn(i, acc);
    });
    return sums;
}

}  // namespace dicke
