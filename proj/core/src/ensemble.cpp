#include "dicke/ensemble.hpp"

#include <algorithm>

#include "dicke/error.hpp"

namespace dicke {

BlockSums::BlockSums(std::size_t n_samples, std::size_t dim,
                     std::size_t max_blocks)
    : n_(n_samples), dim_(dim)
{
    if (n_samples < 2)
        throw DomainError("an ensemble needs at least 2 samples");
    std::size_t const b = std::clamp<std::size_t>(max_blocks, 2, n_samples);
    counts_.resize(b);
    for (std::size_t k = 0; k < b; ++k)
        counts_[k] = block_begin(k + 1) - block_begin(k);
    sums_.assign(b * dim, 0.0);
}

std::size_t BlockSums::block_begin(std::size_t b) const
{
    return b * n_ / counts_.size();
}

std::vector<double> BlockSums::mean() const
{
    std::vector<double> out(dim_, 0.0);
    for (std::size_t b = 0; b < blocks(); ++b)
        for (std::size_t d = 0; d < dim_; ++d)
            out[d] += block(b)[d];
    for (auto& v : out)
        v /= static_cast<double>(n_);
    return out;
}

std::vector<double> BlockSums::mean_without(std::size_t skip) const
{
    std::vector<double> out(dim_, 0.0);
    for (std::size_t b = 0; b < blocks(); ++b)
    {
        if (b == skip)
            continue;
        for (std::size_t d = 0; d < dim_; ++d)
            out[d] += block(b)[d];
    }
    double const n = static_cast<double>(n_ - counts_[skip]);
    for (auto& v : out)
        v /= n;
    return out;
}

std::vector<double> BlockSums::jackknife(
    std::function<std::vector<double>(std::vector<double> const&)> const& stat)
    const
{
    std::size_t const nb = blocks();
    std::vector<std::vector<double>> partial(nb);
    for (std::size_t b = 0; b < nb; ++b)
        partial[b] = stat(mean_without(b));
    std::size_t const m = partial.front().size();
    std::vector<double> avg(m, 0.0);
    for (auto const& row : partial)
        for (std::size_t k = 0; k < m; ++k)
            avg[k] += row[k] / static_cast<double>(nb);
    std::vector<double> var(m, 0.0);
    for (auto const& row : partial)
        for (std::size_t k = 0; k < m; ++k)
            var[k] += (row[k] - avg[k]) * (row[k] - avg[k]);
    double const factor = static_cast<double>(nb - 1) / static_cast<double>(nb);
    for (auto& v : var)
        v = std::sqrt(factor * v);
    return var;
}

std::vector<double> BlockSums::standard_errors() const
{
    return jackknife([](std::vector<double> const& m) { return m; });
}

}  // namespace dicke
