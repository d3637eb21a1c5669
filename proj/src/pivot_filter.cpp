#include "kgcjoin/pivot_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kgcjoin/error.hpp"
#include "kgcjoin/metric_model.hpp"

namespace kgcjoin {

std::vector<double> pivot_distances(const EmbeddingMatrix& x, std::span<const float> pivot,
                                    int p) {
    if (x.rows() > 0 && pivot.size() != x.dim()) {
        fail(ErrorKind::Dimension, "pivot has length " + std::to_string(pivot.size()) +
                                       ", matrix dim is " + std::to_string(x.dim()));
    }
    std::vector<double> out(x.rows());
    // One pivot row against the whole matrix; rows x 1 keeps each kernel call
    // within budget for any matrix height.
    constexpr std::size_t kChunk = std::size_t{1} << 20;
    for (std::size_t start = 0; start < x.rows(); start += kChunk) {
        const std::size_t n = std::min(kChunk, x.rows() - start);
        batch_dist(pivot, 1, x.data().subspan(start * x.dim(), n * x.dim()), n, x.dim(), p,
                   std::span<double>(out).subspan(start, n));
    }
    return out;
}

SortedSide sort_side(const EmbeddingMatrix& x, std::span<const double> pivot_dist) {
    if (pivot_dist.size() != x.rows()) {
        fail(ErrorKind::Length, "sort_side: " + std::to_string(pivot_dist.size()) +
                                    " distances for " + std::to_string(x.rows()) + " rows");
    }
    SortedSide side;
    side.perm.resize(x.rows());
    std::iota(side.perm.begin(), side.perm.end(), 0u);
    std::stable_sort(side.perm.begin(), side.perm.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return pivot_dist[a] < pivot_dist[b]; });
    side.sorted_pivot_dist.resize(x.rows());
    for (std::size_t i = 0; i < side.perm.size(); ++i) {
        side.sorted_pivot_dist[i] = pivot_dist[side.perm[i]];
    }
    side.reordered = x.gather(side.perm);
    return side;
}

std::uint64_t RangeTable::candidate_count() const noexcept {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) total += static_cast<std::uint64_t>(width(i));
    return total;
}

namespace {

void require_non_decreasing(std::span<const double> v, const char* name) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i - 1] <= v[i])) {
            fail(ErrorKind::Precondition, std::string("compute_range: ") + name +
                                              " is not non-decreasing at index " +
                                              std::to_string(i));
        }
    }
}

}  // namespace

RangeTable compute_range(std::span<const double> sa, std::span<const double> sb, double eps) {
    if (!(eps >= 0.0)) fail(ErrorKind::Parameter, "eps must be >= 0");
    require_non_decreasing(sa, "sa");
    require_non_decreasing(sb, "sb");

    const std::size_t m = sa.size();
    const std::size_t n = sb.size();
    RangeTable t;
    t.s.resize(m);
    t.e.resize(m);

    // Both predicates are written as the rounded difference compared to eps,
    // the same expression as |sa[i] - sb[j]| <= eps. Rounded subtraction is
    // monotone in each argument, so both pointers only ever move forward.
    std::size_t j = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (j < n && sa[i] - sb[j] > eps) ++j;  // sb[j] below the window
        t.s[i] = static_cast<std::int64_t>(j);
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (k < n && sb[k] - sa[i] <= eps) ++k;  // sb[k] not above the window
        t.e[i] = static_cast<std::int64_t>(k) - 1;
    }
    return t;
}

}  // namespace kgcjoin
