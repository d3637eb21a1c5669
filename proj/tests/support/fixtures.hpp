#pragma once

// Shared fixtures that do go through the library: all dist3 values of an
// instance (for picking thresholds) and triple-set helpers.

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "kgcjoin/baselines.hpp"
#include "kgcjoin/results.hpp"
#include "support/oracles.hpp"

namespace kgcjoin::testing {

/// Every dist3 value of the instance, ascending.
inline std::vector<double> sorted_distances(const EmbeddingMatrix& e, const EmbeddingMatrix& r,
                                            int p) {
    std::vector<double> all;
    all.reserve(e.rows() * e.rows() * r.rows());
    for_each_distance_block(
        e, r, MetricModel{ModelKind::TransE, p},
        [&](std::uint32_t, std::size_t, std::size_t hs, std::size_t, std::size_t ts,
            const double* d) { all.insert(all.end(), d, d + hs * ts); });
    std::sort(all.begin(), all.end());
    return all;
}

/// Threshold near the given quantile of the instance's distances, placed in
/// the widest nearby gap so it sits clear of every distance.
inline EpsChoice eps_at_quantile(const std::vector<double>& sorted, double q) {
    const auto target = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return eps_in_widest_gap(sorted, std::max<std::size_t>(target, 1));
}

/// Compares two result lists as triple sets and distances per triple.
inline ::testing::AssertionResult same_results(const std::vector<ResultTriple>& got,
                                               const std::vector<ResultTriple>& want,
                                               double rel_tol = 1e-5) {
    auto by_key = [](std::vector<ResultTriple> v) {
        std::sort(v.begin(), v.end(), [](const ResultTriple& a, const ResultTriple& b) {
            return a.key() < b.key();
        });
        return v;
    };
    const auto g = by_key(got);
    const auto w = by_key(want);
    if (g.size() != w.size()) {
        return ::testing::AssertionFailure() << "sizes differ: " << g.size() << " vs " << w.size();
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g[k].key() != w[k].key()) {
            return ::testing::AssertionFailure()
                   << "triple " << k << " differs: (" << g[k].head << "," << g[k].rel << ","
                   << g[k].tail << ") vs (" << w[k].head << "," << w[k].rel << "," << w[k].tail
                   << ")";
        }
        const double scale = std::max(1e-30, std::fabs(w[k].distance));
        if (std::fabs(g[k].distance - w[k].distance) > rel_tol * scale &&
            std::fabs(g[k].distance - w[k].distance) > 1e-12) {
            return ::testing::AssertionFailure() << "distance differs at triple " << k << ": "
                                                 << g[k].distance << " vs " << w[k].distance;
        }
    }
    return ::testing::AssertionSuccess();
}

}  // namespace kgcjoin::testing
