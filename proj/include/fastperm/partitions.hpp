#pragma once

#include <span>
#include <vector>

#include "fastperm/rng.hpp"

// Partition machinery for two-sample permutations. Partition m holds every
// permutation that exchanges exactly m observations between the groups; a
// uniformly drawn permutation lands in partition m with probability f(m)
// proportional to C(n_x,m) * C(n_y,m). All pmf handling is in log space so
// group sizes up to 1e5 work without overflow.

namespace fastperm {

struct PartitionWeights {
    int n_x = 0;
    int n_y = 0;
    int n_min = 0;
    int m_max = 0;                // mode of f; ties broken toward smaller m
    std::vector<double> log_f;   // indexed m = 0..n_min

    double log_f_at(int m) const { return log_f.at(static_cast<std::size_t>(m)); }

    // Index used when approximating the p-value trend in partitions beyond
    // the mode by its mirror image below the mode.
    int reflected_index(int m) const;
};

PartitionWeights partition_weights(int n_x, int n_y);

// Which elements of each group a permutation exchanges. Indices are 0-based
// into the x and y vectors; both sets have the same size m.
struct ExchangeSelection {
    std::vector<int> from_x;
    std::vector<int> from_y;

    int m() const { return static_cast<int>(from_x.size()); }
};

// Number of observations exchanged between the first n_x positions and the
// rest under `perm` (a 0-based permutation of 0..N-1). Validates that perm is
// a bijection.
int exchange_distance(std::span<const int> perm, int n_x);

// Draw uniformly among the C(n_x,m) * C(n_y,m) exchange pairs.
ExchangeSelection sample_exchange(RandomEngine& rng, int n_x, int n_y, int m);

// Same, reusing the selection's buffers (hot loop of the resampler).
void sample_exchange_into(RandomEngine& rng, int n_x, int n_y, int m, ExchangeSelection& out);

}  // namespace fastperm
