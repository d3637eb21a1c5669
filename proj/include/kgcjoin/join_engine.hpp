#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "kgcjoin/matrix.hpp"
#include "kgcjoin/metric_model.hpp"
#include "kgcjoin/pivot_filter.hpp"
#include "kgcjoin/results.hpp"

namespace kgcjoin {

inline constexpr std::size_t kDefaultMaxGroupSize = 300'000;

struct JoinConfig {
    double eps = 0.0;
    /// Candidate-cell budget for one batched evaluation.
    std::size_t max_group_size = kDefaultMaxGroupSize;
    /// Rows per block in partitioned mode.
    std::size_t partition_rows = 4096;
    bool exclude_self = false;
    std::optional<TripleList> exclude_known;
    PivotKind pivot_kind = PivotKind::Zero;
    /// Worker threads over relations; 0 picks hardware concurrency.
    unsigned threads = 1;

    void validate() const;
};

/// Consecutive sorted-A rows evaluated against one B' window.
struct CandidateGroup {
    std::size_t a_start = 0;
    std::size_t a_count = 0;
    std::int64_t range_min = 0;
    std::int64_t range_max = -1;

    std::uint64_t cells() const noexcept {
        return static_cast<std::uint64_t>(range_max - range_min + 1) * a_count;
    }

    friend bool operator==(const CandidateGroup&, const CandidateGroup&) = default;
};

struct JoinStats {
    std::size_t relations = 0;
    /// Sum over rows of e[i] - s[i] + 1.
    std::uint64_t candidate_pairs = 0;
    /// Cells actually pushed through the kernel (groups are rectangular).
    std::uint64_t evaluated_cells = 0;
    /// Candidates within eps before exclusion filters.
    std::uint64_t verified_pairs = 0;
    std::uint64_t emitted = 0;
    /// A/B sides pairs processed (|A'| * |B'| per relation).
    std::uint64_t total_pairs = 0;
    double preprocess_ms = 0.0;
    double join_ms = 0.0;

    JoinStats& operator+=(const JoinStats& o);
};

/// Splits rows with non-empty ranges into groups whose rectangular
/// (range_max - range_min + 1) * a_count footprint fits max_group_size.
/// A single row wider than the budget forms a group by itself.
std::vector<CandidateGroup> group_candidates(const RangeTable& ranges,
                                             std::size_t max_group_size);

/// Post-verification exclusion filters shared by every algorithm.
class ExclusionFilter {
public:
    ExclusionFilter() = default;
    ExclusionFilter(bool exclude_self, const std::optional<TripleList>& known);

    bool rejects(std::uint32_t head, std::uint32_t rel, std::uint32_t tail) const {
        if (exclude_self_ && head == tail) return true;
        return !known_.empty() && known_.contains(Triple{head, rel, tail});
    }

private:
    bool exclude_self_ = false;
    std::unordered_set<Triple, TripleHash> known_;
};

/// Evaluates one group: kernel distances over the rectangle
/// A'[a_start, a_start+a_count) x B'[range_min, range_max], then keeps
/// (i, j) with j in [s[i], e[i]] and distance <= eps, un-permuted to
/// original ids. Over-budget single rows are sliced along B.
void evaluate_group(const CandidateGroup& g, const SortedSide& a_side,
                    const SortedSide& b_side, const RangeTable& ranges,
                    std::uint32_t rel_id, const MetricModel& model, const JoinConfig& cfg,
                    const ExclusionFilter& filter, std::vector<ResultTriple>& out,
                    JoinStats& stats);

/// The pivot-filtered completion engine over one entity matrix.
///
/// B-side artifacts (connector2 output, its pivot distances and sorted form)
/// are built once and shared by all relations whenever the model's
/// connector2 ignores the relation vector.
class CompletionEngine {
public:
    CompletionEngine(const EmbeddingMatrix& entities, MetricModel model, JoinConfig cfg);
    ~CompletionEngine();
    CompletionEngine(const CompletionEngine&) = delete;
    CompletionEngine& operator=(const CompletionEngine&) = delete;

    std::vector<ResultTriple> complete_relation(std::span<const float> r,
                                                std::uint32_t rel_id,
                                                JoinStats* stats = nullptr) const;

    /// Results in ascending rel_id, then ascending (sorted-A, sorted-B) order.
    JoinStats complete_all(const EmbeddingMatrix& relations, const ResultSink& sink) const;
    std::vector<ResultTriple> complete_all(const EmbeddingMatrix& relations,
                                           JoinStats* stats = nullptr) const;

    /// Block-pair execution; same result set and order as complete_all.
    JoinStats complete_all_partitioned(const EmbeddingMatrix& relations,
                                       const ResultSink& sink) const;
    std::vector<ResultTriple> complete_all_partitioned(const EmbeddingMatrix& relations,
                                                       JoinStats* stats = nullptr) const;

    const JoinConfig& config() const noexcept { return cfg_; }

private:
    struct RelationPlan;

    RelationPlan plan_relation(std::span<const float> r, JoinStats& stats) const;
    std::vector<ResultTriple> run_relation(std::span<const float> r, std::uint32_t rel_id,
                                           bool partitioned, JoinStats& stats) const;
    JoinStats run_all(const EmbeddingMatrix& relations, bool partitioned,
                      const ResultSink& sink) const;

    const EmbeddingMatrix& entities_;
    MetricModel model_;
    JoinConfig cfg_;
    ExclusionFilter filter_;
    Pivot shared_pivot_;
    std::shared_ptr<const SortedSide> shared_b_;
    double shared_prep_ms_ = 0.0;
};

std::vector<ResultTriple> complete_relation(const EmbeddingMatrix& entities,
                                            std::span<const float> r, std::uint32_t rel_id,
                                            const MetricModel& model, const JoinConfig& cfg);

std::vector<ResultTriple> complete_all(const EmbeddingMatrix& entities,
                                       const EmbeddingMatrix& relations,
                                       const MetricModel& model, const JoinConfig& cfg,
                                       JoinStats* stats = nullptr);

std::vector<ResultTriple> complete_all_partitioned(const EmbeddingMatrix& entities,
                                                   const EmbeddingMatrix& relations,
                                                   const MetricModel& model,
                                                   const JoinConfig& cfg,
                                                   JoinStats* stats = nullptr);

/// Runs fn(rel) for rel in [0, count) on up to `threads` workers (0 = hardware).
void parallel_for_relations(std::size_t count, unsigned threads,
                            const std::function<void(std::size_t)>& fn);

}  // namespace kgcjoin
