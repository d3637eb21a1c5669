#pragma once

// Test-only reference computations. Nothing here calls into the library's
// distance code: each oracle recomputes from the raw floats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kgcjoin/matrix.hpp"
#include "kgcjoin/results.hpp"

namespace kgcjoin::testing {

/// Lp distance in long double with a plain loop.
inline double ref_dist(std::span<const float> a, std::span<const float> b, int p) {
    long double acc = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const long double diff = static_cast<long double>(a[k]) - static_cast<long double>(b[k]);
        acc += p == 1 ? std::fabs(diff) : diff * diff;
    }
    return static_cast<double>(p == 1 ? acc : std::sqrt(acc));
}

/// TransE score: connector1 is the float32 sum h + r, connector2 is t.
inline double ref_dist3(std::span<const float> h, std::span<const float> r,
                        std::span<const float> t, int p) {
    std::vector<float> hr(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) hr[k] = h[k] + r[k];
    return ref_dist(hr, t, p);
}

/// Every (h, rel, t) with dist3 <= eps by a triple loop, sorted by key.
inline std::vector<Triple> ref_triples(const EmbeddingMatrix& e, const EmbeddingMatrix& r,
                                       int p, double eps) {
    std::vector<Triple> out;
    for (std::uint32_t rel = 0; rel < r.rows(); ++rel) {
        for (std::uint32_t h = 0; h < e.rows(); ++h) {
            for (std::uint32_t t = 0; t < e.rows(); ++t) {
                if (ref_dist3(e.row(h), r.row(rel), e.row(t), p) <= eps) {
                    out.push_back({h, rel, t});
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// O(mn) candidate interval: smallest and largest j with |sa[i]-sb[j]| <= eps.
struct RefRange {
    bool empty = true;
    std::int64_t s = 0;
    std::int64_t e = -1;
};

inline std::vector<RefRange> ref_ranges(std::span<const double> sa, std::span<const double> sb,
                                        double eps) {
    std::vector<RefRange> out(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        for (std::size_t j = 0; j < sb.size(); ++j) {
            if (std::fabs(sa[i] - sb[j]) <= eps) {
                if (out[i].empty) out[i].s = static_cast<std::int64_t>(j);
                out[i].empty = false;
                out[i].e = static_cast<std::int64_t>(j);
            }
        }
    }
    return out;
}

inline EmbeddingMatrix random_matrix(std::size_t rows, std::size_t dim, std::uint64_t seed,
                                     float lo = 0.0f, float hi = 1.0f) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(lo, hi);
    std::vector<float> v(rows * dim);
    for (auto& x : v) x = u(rng);
    return EmbeddingMatrix(rows, dim, std::move(v));
}

/// A threshold placed in the middle of a gap in a sorted distance list.
struct EpsChoice {
    double eps = 0.0;
    /// Distance from eps to the nearest listed distance.
    double margin = 0.0;
    /// Number of listed distances <= eps.
    std::size_t rank = 0;
};

/// Searches ranks within [target*(1-slack), target*(1+slack)] for the widest
/// gap between consecutive sorted distances and returns its midpoint.
inline EpsChoice eps_in_widest_gap(std::span<const double> sorted, std::size_t target,
                                   double slack = 0.25) {
    EpsChoice best;
    if (sorted.empty()) return best;
    const auto lo = static_cast<std::size_t>(std::max(1.0, target * (1.0 - slack)));
    const auto hi = std::min<std::size_t>(sorted.size() - 1,
                                          static_cast<std::size_t>(target * (1.0 + slack)) + 1);
    double widest = -1.0;
    for (std::size_t k = lo; k <= hi && k < sorted.size(); ++k) {
        const double gap = sorted[k] - sorted[k - 1];
        if (gap > widest) {
            widest = gap;
            best.eps = sorted[k - 1] + gap / 2.0;
            best.margin = gap / 2.0;
            best.rank = k;
        }
    }
    return best;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("kgcjoin_test_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace kgcjoin::testing
