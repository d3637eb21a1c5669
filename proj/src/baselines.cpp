#include "kgcjoin/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "kgcjoin/error.hpp"
#include "kgcjoin/join_engine.hpp"

namespace kgcjoin {

// ---------------------------------------------------------------------------
// Straightforward all-pairs sweep

void for_each_distance_block(const EmbeddingMatrix& entities, const EmbeddingMatrix& relations,
                             const MetricModel& model, const DistanceBlockFn& fn,
                             const NaiveOptions& opts) {
    model.validate();
    if (relations.rows() > 0 && relations.dim() != entities.dim()) {
        fail(ErrorKind::Dimension, "relation dim does not match entity dim");
    }
    const std::size_t n = entities.rows();
    const std::size_t dim = entities.dim();
    if (n == 0) return;

    // Shrink the block until one kernel call fits the budget; tails are split
    // too when a single row would not fit.
    const std::size_t budget = std::max<std::size_t>(opts.budget, 1);
    std::size_t block = std::max<std::size_t>(opts.block_rows, 1);
    std::size_t tail_block = n;
    while (block * tail_block > budget) {
        if (block > 1) {
            block /= 2;
        } else {
            tail_block = budget;
        }
    }

    const EmbeddingMatrix* shared_b = nullptr;
    EmbeddingMatrix b_once;
    if (!model.connector2_uses_relation()) {
        b_once = apply_connector2(entities, std::vector<float>(dim, 0.0f), model);
        shared_b = &b_once;
    }

    parallel_for_relations(relations.rows(), opts.threads, [&](std::size_t rel) {
        const auto r = relations.row(rel);
        const EmbeddingMatrix a = apply_connector1(entities, r, model);
        EmbeddingMatrix b_local;
        const EmbeddingMatrix* b = shared_b;
        if (b == nullptr) {
            b_local = apply_connector2(entities, r, model);
            b = &b_local;
        }
        std::vector<double> buf(block * tail_block);
        for (std::size_t h0 = 0; h0 < n; h0 += block) {
            const std::size_t hs = std::min(block, n - h0);
            for (std::size_t t0 = 0; t0 < n; t0 += tail_block) {
                const std::size_t ts = std::min(tail_block, n - t0);
                batch_dist(a.data().subspan(h0 * dim, hs * dim), hs,
                           b->data().subspan(t0 * dim, ts * dim), ts, dim, model.p,
                           std::span<double>(buf.data(), hs * ts), budget);
                fn(static_cast<std::uint32_t>(rel), h0, hs, t0, ts, buf.data());
            }
        }
    });
}

std::vector<ResultTriple> naive_join(const EmbeddingMatrix& entities,
                                     const EmbeddingMatrix& relations, const MetricModel& model,
                                     double eps, const NaiveOptions& opts) {
    if (!(eps >= 0.0)) fail(ErrorKind::Parameter, "eps must be >= 0");
    std::vector<std::vector<ResultTriple>> per_rel(relations.rows());
    for_each_distance_block(
        entities, relations, model,
        [&](std::uint32_t rel, std::size_t h0, std::size_t hs, std::size_t t0, std::size_t ts,
            const double* d) {
            auto& out = per_rel[rel];
            for (std::size_t i = 0; i < hs; ++i) {
                for (std::size_t j = 0; j < ts; ++j) {
                    const double v = d[i * ts + j];
                    if (v <= eps) {
                        out.push_back({static_cast<std::uint32_t>(h0 + i), rel,
                                       static_cast<std::uint32_t>(t0 + j), v});
                    }
                }
            }
        },
        opts);
    std::vector<ResultTriple> all;
    for (auto& part : per_rel) {
        // Tail blocks may split a head row; restore (head, tail) order.
        std::sort(part.begin(), part.end(), [](const ResultTriple& x, const ResultTriple& y) {
            return x.head != y.head ? x.head < y.head : x.tail < y.tail;
        });
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

// ---------------------------------------------------------------------------
// Quickjoin

void QuickjoinParams::validate() const {
    if (small_threshold < 2) fail(ErrorKind::Parameter, "quickjoin small_threshold must be >= 2");
    if (max_depth < 1) fail(ErrorKind::Parameter, "quickjoin max_depth must be >= 1");
}

namespace {

// Host-side distance, deliberately separate from the batch kernels so the
// two can arbitrate each other. Four interleaved accumulators; the compiler
// vectorizes them, with an AVX2 clone picked at load time where available.
#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
__attribute__((target_clones("avx2", "default")))
#endif
double host_dist(const float* a, const float* b, std::size_t dim, int p) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = 0;
    if (p == 1) {
        for (; k + 4 <= dim; k += 4) {
            for (int u = 0; u < 4; ++u) {
                acc[u] += std::fabs(static_cast<double>(a[k + u]) - static_cast<double>(b[k + u]));
            }
        }
        for (; k < dim; ++k) acc[0] += std::fabs(static_cast<double>(a[k]) - static_cast<double>(b[k]));
        return (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    for (; k + 4 <= dim; k += 4) {
        for (int u = 0; u < 4; ++u) {
            const double diff = static_cast<double>(a[k + u]) - static_cast<double>(b[k + u]);
            acc[u] += diff * diff;
        }
    }
    for (; k < dim; ++k) {
        const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        acc[0] += diff * diff;
    }
    return std::sqrt((acc[0] + acc[1]) + (acc[2] + acc[3]));
}

class QuickjoinRunner {
public:
    QuickjoinRunner(const EmbeddingMatrix& a, const EmbeddingMatrix& b, int p, double eps,
                    const QuickjoinParams& params, std::vector<IndexPair>& out)
        : a_(a), b_(b), p_(p), eps_(eps), params_(params), rng_(params.rng_seed), out_(out) {}

    void run() {
        std::vector<std::uint32_t> ia(a_.rows());
        std::vector<std::uint32_t> ib(b_.rows());
        std::iota(ia.begin(), ia.end(), 0u);
        std::iota(ib.begin(), ib.end(), 0u);
        join(ia, ib, 0);
    }

private:
    // Objects from both sets share one index space for pivot selection:
    // [0, |A|) are A rows, [|A|, |A|+|B|) are B rows.
    const float* object(const std::vector<std::uint32_t>& ia, const std::vector<std::uint32_t>& ib,
                        std::size_t k) const {
        return k < ia.size() ? a_.row_ptr(ia[k]) : b_.row_ptr(ib[k - ia.size()]);
    }

    double d(const float* x, const float* y) const { return host_dist(x, y, a_.dim(), p_); }

    std::size_t draw(std::size_t bound) {
        return static_cast<std::size_t>(rng_() % bound);
    }

    // Loops over the larger side in the inner loop.
    void nested_loop(const std::vector<std::uint32_t>& ia, const std::vector<std::uint32_t>& ib) {
        if (ia.size() <= ib.size()) {
            for (auto i : ia) {
                const float* x = a_.row_ptr(i);
                for (auto j : ib) {
                    const double v = d(x, b_.row_ptr(j));
                    if (v <= eps_) out_.push_back({i, j, v});
                }
            }
        } else {
            for (auto j : ib) {
                const float* y = b_.row_ptr(j);
                for (auto i : ia) {
                    const double v = d(a_.row_ptr(i), y);
                    if (v <= eps_) out_.push_back({i, j, v});
                }
            }
        }
    }

    struct Split {
        std::vector<std::uint32_t> lower, upper, lower_win, upper_win;
    };

    // Ball partition around p1 with radius r. lower_win holds lower members
    // within eps of the boundary; upper_win likewise for upper members. The
    // windows are widened by a rounding allowance; extra members only cost
    // distance evaluations, never duplicate output.
    Split partition(const std::vector<std::uint32_t>& idx, const EmbeddingMatrix& m,
                    const float* p1, double r) const {
        const double reach = eps_ + 1e-9 * std::max(1.0, r);
        Split s;
        for (auto i : idx) {
            const double v = d(p1, m.row_ptr(i));
            if (v < r) {
                s.lower.push_back(i);
                if (v >= r - reach) s.lower_win.push_back(i);
            } else {
                s.upper.push_back(i);
                if (v <= r + reach) s.upper_win.push_back(i);
            }
        }
        return s;
    }

    void join(const std::vector<std::uint32_t>& ia, const std::vector<std::uint32_t>& ib,
              std::size_t depth) {
        if (ia.empty() || ib.empty()) return;
        const std::size_t total = ia.size() + ib.size();
        if (total < params_.small_threshold || depth >= params_.max_depth) {
            nested_loop(ia, ib);
            return;
        }

        // Two distinct pivot objects at a positive distance; all-duplicate
        // inputs never yield one and fall back to the nested loop.
        const float* p1 = nullptr;
        double r = 0.0;
        for (int attempt = 0; attempt < 8 && r <= 0.0; ++attempt) {
            const std::size_t k1 = draw(total);
            std::size_t k2 = draw(total - 1);
            if (k2 >= k1) ++k2;
            p1 = object(ia, ib, k1);
            r = d(p1, object(ia, ib, k2));
        }
        if (r <= 0.0) {
            nested_loop(ia, ib);
            return;
        }

        Split sa = partition(ia, a_, p1, r);
        Split sb = partition(ib, b_, p1, r);
        // A pair split across the boundary has both members in the windows.
        join(sa.lower_win, sb.upper_win, depth + 1);
        join(sa.upper_win, sb.lower_win, depth + 1);
        sa.lower_win = {};
        sa.upper_win = {};
        sb.lower_win = {};
        sb.upper_win = {};
        join(sa.lower, sb.lower, depth + 1);
        join(sa.upper, sb.upper, depth + 1);
    }

    const EmbeddingMatrix& a_;
    const EmbeddingMatrix& b_;
    int p_;
    double eps_;
    QuickjoinParams params_;
    std::mt19937_64 rng_;
    std::vector<IndexPair>& out_;
};

}  // namespace

std::vector<IndexPair> quickjoin(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                                 const MetricModel& model, double eps,
                                 const QuickjoinParams& params) {
    model.validate();
    params.validate();
    if (!(eps >= 0.0)) fail(ErrorKind::Parameter, "eps must be >= 0");
    if (a.rows() > 0 && b.rows() > 0 && a.dim() != b.dim()) {
        fail(ErrorKind::Dimension, "quickjoin: operand dims differ");
    }
    std::vector<IndexPair> out;
    QuickjoinRunner(a, b, model.p, eps, params, out).run();
    return out;
}

std::vector<ResultTriple> quickjoin_complete_all(const EmbeddingMatrix& entities,
                                                 const EmbeddingMatrix& relations,
                                                 const MetricModel& model, double eps,
                                                 const QuickjoinParams& params) {
    if (relations.rows() > 0 && relations.dim() != entities.dim()) {
        fail(ErrorKind::Dimension, "relation dim does not match entity dim");
    }
    std::vector<ResultTriple> all;
    for (std::size_t rel = 0; rel < relations.rows(); ++rel) {
        const auto r = relations.row(rel);
        const EmbeddingMatrix a = apply_connector1(entities, r, model);
        const EmbeddingMatrix b = apply_connector2(entities, r, model);
        auto pairs = quickjoin(a, b, model, eps, params);
        std::sort(pairs.begin(), pairs.end(), [](const IndexPair& x, const IndexPair& y) {
            return x.a != y.a ? x.a < y.a : x.b < y.b;
        });
        for (const auto& pr : pairs) {
            all.push_back({pr.a, static_cast<std::uint32_t>(rel), pr.b, pr.distance});
        }
    }
    return all;
}

}  // namespace kgcjoin
