#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "kgcjoin/matrix.hpp"
#include "kgcjoin/metric_model.hpp"
#include "kgcjoin/results.hpp"

namespace kgcjoin {

struct NaiveOptions {
    /// Starting A-block height; halved until a block fits the kernel budget.
    std::size_t block_rows = 1024;
    std::size_t budget = kDefaultBatchBudget;
    unsigned threads = 1;
};

/// Visits every dist3 value via batched kernel calls. fn receives
/// (rel, first head, head count, first tail, tail count, distances) with
/// distances row-major over the head x tail block.
using DistanceBlockFn =
    std::function<void(std::uint32_t rel, std::size_t head0, std::size_t heads,
                       std::size_t tail0, std::size_t tails, const double* dists)>;

void for_each_distance_block(const EmbeddingMatrix& entities,
                             const EmbeddingMatrix& relations, const MetricModel& model,
                             const DistanceBlockFn& fn, const NaiveOptions& opts = {});

/// All |E| * |R| * |E| triples checked; keeps dist3 <= eps. Output is in
/// (rel, head, tail) order.
std::vector<ResultTriple> naive_join(const EmbeddingMatrix& entities,
                                     const EmbeddingMatrix& relations,
                                     const MetricModel& model, double eps,
                                     const NaiveOptions& opts = {});

struct QuickjoinParams {
    /// Below this many objects (both sides together) NestedLoop runs.
    std::size_t small_threshold = 256;
    std::uint64_t rng_seed = 1;
    std::size_t max_depth = 64;

    void validate() const;
};

struct IndexPair {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double distance = 0.0;
};

/// Metric-space join between two vector sets by recursive ball partitioning
/// with eps-windows around each partition boundary. Distances come from a
/// host-side loop that is independent of the batch kernels. Output order is
/// unspecified.
std::vector<IndexPair> quickjoin(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                                 const MetricModel& model, double eps,
                                 const QuickjoinParams& params = {});

/// quickjoin applied per relation to (connector1(E, r), connector2(E, r)).
/// Output sorted by (rel, head, tail).
std::vector<ResultTriple> quickjoin_complete_all(const EmbeddingMatrix& entities,
                                                 const EmbeddingMatrix& relations,
                                                 const MetricModel& model, double eps,
                                                 const QuickjoinParams& params = {});

}  // namespace kgcjoin
