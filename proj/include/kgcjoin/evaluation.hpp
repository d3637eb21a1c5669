#pragma once

#include <vector>

#include "kgcjoin/baselines.hpp"
#include "kgcjoin/matrix.hpp"
#include "kgcjoin/metric_model.hpp"

namespace kgcjoin {

struct Top1Stats {
    double top1 = 0.0;
    Triple argmin;
    /// Per-dimension (max - min) over the entity matrix.
    std::vector<double> dimension_ranges;
    double max_range = 0.0;
};

/// Exact minimum of dist3 over all triples (over head != tail when
/// exclude_self), found with the batched all-pairs sweep.
Top1Stats top1_stats(const EmbeddingMatrix& entities, const EmbeddingMatrix& relations,
                     const MetricModel& model, bool exclude_self,
                     const NaiveOptions& opts = {});

struct RankMetrics {
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
};

/// Filtered-setting MRR and Hits@{1,3,10} over both prediction directions
/// (tail and head), averaged over 2|test|. Candidates forming another known
/// triple in `total` are dropped before ranking. A candidate tied with the
/// true entity ranks ahead of it.
RankMetrics filtered_rank_metrics(const EmbeddingMatrix& entities,
                                  const EmbeddingMatrix& relations,
                                  const MetricModel& model, const TripleList& test,
                                  const TripleList& total);

}  // namespace kgcjoin
