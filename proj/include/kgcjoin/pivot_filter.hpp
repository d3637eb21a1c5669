#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kgcjoin/matrix.hpp"

namespace kgcjoin {

/// dist(pivot, X_i, p) for every row, 64-bit.
std::vector<double> pivot_distances(const EmbeddingMatrix& x, std::span<const float> pivot,
                                    int p);

/// One side of the join after sorting by pivot distance.
struct SortedSide {
    std::vector<std::uint32_t> perm;        // sorted position -> original row
    std::vector<double> sorted_pivot_dist;  // non-decreasing
    EmbeddingMatrix reordered;              // row i == original row perm[i]

    std::size_t size() const noexcept { return perm.size(); }
};

/// Stable sort by pivot distance; ties keep original index order.
SortedSide sort_side(const EmbeddingMatrix& x, std::span<const double> pivot_dist);

/// Per-row candidate interval [s[i], e[i]] into the other sorted side.
/// s[i] > e[i] marks a row with no candidates.
struct RangeTable {
    std::vector<std::int64_t> s;
    std::vector<std::int64_t> e;

    std::size_t size() const noexcept { return s.size(); }
    bool empty_at(std::size_t i) const noexcept { return s[i] > e[i]; }
    std::int64_t width(std::size_t i) const noexcept {
        return empty_at(i) ? 0 : e[i] - s[i] + 1;
    }

    /// Sum of interval widths.
    std::uint64_t candidate_count() const noexcept;
};

/// Linear two-pointer scan over two non-decreasing lists. For each i the
/// interval holds exactly the j with |sa[i] - sb[j]| <= eps.
/// Throws Error{Parameter} for negative/NaN eps and Error{Precondition} when
/// either list is not non-decreasing.
RangeTable compute_range(std::span<const double> sa, std::span<const double> sb,
                         double eps);

}  // namespace kgcjoin
