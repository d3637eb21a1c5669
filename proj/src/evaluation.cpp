#include "kgcjoin/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "kgcjoin/embeddings_io.hpp"
#include "kgcjoin/error.hpp"

namespace kgcjoin {

Top1Stats top1_stats(const EmbeddingMatrix& entities, const EmbeddingMatrix& relations,
                     const MetricModel& model, bool exclude_self, const NaiveOptions& opts) {
    struct Best {
        double value = std::numeric_limits<double>::infinity();
        Triple at;
    };
    std::vector<Best> per_rel(relations.rows());

    for_each_distance_block(
        entities, relations, model,
        [&](std::uint32_t rel, std::size_t h0, std::size_t hs, std::size_t t0, std::size_t ts,
            const double* d) {
            Best& best = per_rel[rel];
            for (std::size_t i = 0; i < hs; ++i) {
                for (std::size_t j = 0; j < ts; ++j) {
                    const std::size_t h = h0 + i;
                    const std::size_t t = t0 + j;
                    if (exclude_self && h == t) continue;
                    const double v = d[i * ts + j];
                    const Triple cand{static_cast<std::uint32_t>(h), rel,
                                      static_cast<std::uint32_t>(t)};
                    if (v < best.value || (v == best.value && cand < best.at)) {
                        best.value = v;
                        best.at = cand;
                    }
                }
            }
        },
        opts);

    Top1Stats stats;
    stats.top1 = std::numeric_limits<double>::infinity();
    for (const auto& b : per_rel) {
        if (b.value < stats.top1) {
            stats.top1 = b.value;
            stats.argmin = b.at;
        }
    }

    stats.dimension_ranges.assign(entities.dim(), 0.0);
    if (entities.rows() > 0) {
        for (std::size_t k = 0; k < entities.dim(); ++k) {
            double lo = entities.row(0)[k];
            double hi = lo;
            for (std::size_t i = 1; i < entities.rows(); ++i) {
                lo = std::min<double>(lo, entities.row(i)[k]);
                hi = std::max<double>(hi, entities.row(i)[k]);
            }
            stats.dimension_ranges[k] = hi - lo;
        }
        stats.max_range =
            *std::max_element(stats.dimension_ranges.begin(), stats.dimension_ranges.end());
    }
    return stats;
}

namespace {

std::uint64_t pair_key(std::uint32_t x, std::uint32_t y) {
    return (std::uint64_t{x} << 32) | y;
}

// Pessimistic rank of `truth` in row: every other kept candidate at a
// distance <= the true one ranks ahead of it.
std::size_t filtered_rank(std::span<const double> row, std::uint32_t truth,
                          const std::vector<std::uint32_t>* known) {
    const double target = row[truth];
    std::size_t ahead = 0;
    for (std::size_t y = 0; y < row.size(); ++y) {
        if (y != truth && row[y] <= target) ++ahead;
    }
    if (known != nullptr) {
        // Remove known positives (other than the truth) that were counted.
        for (auto y : *known) {
            if (y != truth && row[y] <= target) --ahead;
        }
    }
    return ahead + 1;
}

}  // namespace

RankMetrics filtered_rank_metrics(const EmbeddingMatrix& entities,
                                  const EmbeddingMatrix& relations, const MetricModel& model,
                                  const TripleList& test, const TripleList& total) {
    model.validate();
    check_triple_bounds(test, entities.rows(), relations.rows());
    check_triple_bounds(total, entities.rows(), relations.rows());
    if (relations.rows() > 0 && relations.dim() != entities.dim()) {
        fail(ErrorKind::Dimension, "relation dim does not match entity dim");
    }

    // Deduplicated known tails per (head, rel) and heads per (rel, tail).
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> tails_of, heads_of;
    {
        TripleList uniq = total;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (const auto& t : uniq) {
            tails_of[pair_key(t.head, t.rel)].push_back(t.tail);
            heads_of[pair_key(t.rel, t.tail)].push_back(t.head);
        }
    }

    std::vector<std::vector<std::size_t>> by_rel(relations.rows());
    for (std::size_t k = 0; k < test.size(); ++k) by_rel[test[k].rel].push_back(k);

    const std::size_t n = entities.rows();
    const std::size_t dim = entities.dim();
    double rr = 0.0;
    double h1 = 0.0, h3 = 0.0, h10 = 0.0;
    std::vector<double> row(n);

    auto accumulate = [&](std::size_t rank) {
        rr += 1.0 / static_cast<double>(rank);
        h1 += rank <= 1 ? 1.0 : 0.0;
        h3 += rank <= 3 ? 1.0 : 0.0;
        h10 += rank <= 10 ? 1.0 : 0.0;
    };
    auto lookup = [](const auto& map, std::uint64_t key) -> const std::vector<std::uint32_t>* {
        auto it = map.find(key);
        return it == map.end() ? nullptr : &it->second;
    };

    for (std::size_t rel = 0; rel < by_rel.size(); ++rel) {
        if (by_rel[rel].empty()) continue;
        const auto r = relations.row(rel);
        const EmbeddingMatrix a = apply_connector1(entities, r, model);
        const EmbeddingMatrix b = apply_connector2(entities, r, model);
        for (std::size_t k : by_rel[rel]) {
            const Triple& t = test[k];
            // Tail prediction: (h, r, ?) against every entity.
            batch_dist(a.data().subspan(t.head * dim, dim), 1, b.data(), n, dim, model.p, row);
            accumulate(filtered_rank(row, t.tail, lookup(tails_of, pair_key(t.head, t.rel))));
            // Head prediction: (?, r, t).
            batch_dist(a.data(), n, b.data().subspan(t.tail * dim, dim), 1, dim, model.p, row);
            accumulate(filtered_rank(row, t.head, lookup(heads_of, pair_key(t.rel, t.tail))));
        }
    }

    RankMetrics m;
    if (test.empty()) return m;
    const double denom = 2.0 * static_cast<double>(test.size());
    m.mrr = rr / denom;
    m.hits1 = h1 / denom;
    m.hits3 = h3 / denom;
    m.hits10 = h10 / denom;
    return m;
}

}  // namespace kgcjoin
