#include "kgcjoin/join_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "kgcjoin/error.hpp"

namespace kgcjoin {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Pivot distances are themselves rounded, so the triangle-inequality bound
// can be violated by a few ulps. Widening the filter window by far more than
// that keeps it a superset of the true candidates; verification still uses
// the exact eps.
double filter_slack(const SortedSide& a, const SortedSide& b) {
    double scale = 1.0;
    if (a.size() > 0) scale = std::max(scale, std::fabs(a.sorted_pivot_dist.back()));
    if (b.size() > 0) scale = std::max(scale, std::fabs(b.sorted_pivot_dist.back()));
    return 1e-9 * scale;
}

Pivot make_pivot(PivotKind kind, const EmbeddingMatrix& b) {
    switch (kind) {
        case PivotKind::Zero: return Pivot::zero(b.dim());
        case PivotKind::MeanOfB: return Pivot::mean_of(b);
        case PivotKind::Custom: break;
    }
    fail(ErrorKind::Parameter, "custom pivots are not configurable through JoinConfig");
}

SortedSide prepare_side(const EmbeddingMatrix& x, const Pivot& pivot, int p) {
    return sort_side(x, pivot_distances(x, pivot.vector, p));
}

std::vector<double>& scratch() {
    thread_local std::vector<double> buf;
    return buf;
}

// Core of evaluate_group. `ranges` rows are local to an A-block that starts
// at sorted-A row a_offset; B indices are global.
void evaluate_group_at(const CandidateGroup& g, std::size_t a_offset, const SortedSide& a_side,
                       const SortedSide& b_side, const RangeTable& ranges,
                       std::uint32_t rel_id, const MetricModel& model, const JoinConfig& cfg,
                       const ExclusionFilter& filter, std::vector<ResultTriple>& out,
                       JoinStats& stats) {
    if (g.a_count == 0 || g.range_min > g.range_max) return;
    if (g.a_start + g.a_count > ranges.size() || g.range_min < 0 ||
        static_cast<std::size_t>(g.range_max) >= b_side.size()) {
        fail(ErrorKind::Precondition, "evaluate_group: group outside the sorted sides");
    }

    const std::size_t dim = a_side.reordered.dim();
    const std::size_t width = static_cast<std::size_t>(g.range_max - g.range_min + 1);
    const std::size_t budget = std::max<std::size_t>(cfg.max_group_size, 1);
    // Over-budget single rows are sliced along B; everything else is one call.
    const std::size_t slice = (width * g.a_count <= budget) ? width : std::max<std::size_t>(budget / g.a_count, 1);

    auto& buf = scratch();
    for (std::size_t c0 = 0; c0 < width; c0 += slice) {
        const std::size_t cols = std::min(slice, width - c0);
        const std::int64_t lo = g.range_min + static_cast<std::int64_t>(c0);
        const std::int64_t hi = lo + static_cast<std::int64_t>(cols) - 1;
        const std::size_t cells = cols * g.a_count;
        if (buf.size() < cells) buf.resize(cells);

        const std::size_t a_row0 = a_offset + g.a_start;
        batch_dist(a_side.reordered.data().subspan(a_row0 * dim, g.a_count * dim), g.a_count,
                   b_side.reordered.data().subspan(static_cast<std::size_t>(lo) * dim, cols * dim),
                   cols, dim, model.p, std::span<double>(buf.data(), cells), cells);
        stats.evaluated_cells += cells;

        for (std::size_t r = 0; r < g.a_count; ++r) {
            const std::size_t local = g.a_start + r;
            if (ranges.empty_at(local)) continue;
            const std::int64_t j0 = std::max(ranges.s[local], lo);
            const std::int64_t j1 = std::min(ranges.e[local], hi);
            const double* row = buf.data() + r * cols;
            const std::uint32_t head = a_side.perm[a_offset + local];
            for (std::int64_t j = j0; j <= j1; ++j) {
                const double d = row[j - lo];
                if (!(d <= cfg.eps)) continue;
                ++stats.verified_pairs;
                const std::uint32_t tail = b_side.perm[static_cast<std::size_t>(j)];
                if (filter.rejects(head, rel_id, tail)) continue;
                out.push_back({head, rel_id, tail, d});
                ++stats.emitted;
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------

void JoinConfig::validate() const {
    if (!(eps >= 0.0)) fail(ErrorKind::Parameter, "eps must be >= 0");
    if (max_group_size < 1) fail(ErrorKind::Parameter, "max_group_size must be >= 1");
    if (partition_rows < 1) fail(ErrorKind::Parameter, "partition_rows must be >= 1");
    if (pivot_kind == PivotKind::Custom) {
        fail(ErrorKind::Parameter, "pivot kind must be zero or meanB");
    }
}

JoinStats& JoinStats::operator+=(const JoinStats& o) {
    relations += o.relations;
    candidate_pairs += o.candidate_pairs;
    evaluated_cells += o.evaluated_cells;
    verified_pairs += o.verified_pairs;
    emitted += o.emitted;
    total_pairs += o.total_pairs;
    preprocess_ms += o.preprocess_ms;
    join_ms += o.join_ms;
    return *this;
}

std::vector<CandidateGroup> group_candidates(const RangeTable& ranges,
                                             std::size_t max_group_size) {
    const std::uint64_t budget = std::max<std::size_t>(max_group_size, 1);
    std::vector<CandidateGroup> groups;
    const std::size_t m = ranges.size();
    std::size_t i = 0;
    while (i < m) {
        if (ranges.empty_at(i)) {
            ++i;
            continue;
        }
        CandidateGroup g{i, 1, ranges.s[i], ranges.e[i]};
        std::size_t last = i;
        if (g.cells() <= budget) {
            for (std::size_t j = i + 1; j < m; ++j) {
                if (ranges.empty_at(j)) continue;
                const std::int64_t lo = std::min(g.range_min, ranges.s[j]);
                const std::int64_t hi = std::max(g.range_max, ranges.e[j]);
                const std::uint64_t cells =
                    static_cast<std::uint64_t>(hi - lo + 1) * (j - g.a_start + 1);
                if (cells > budget) break;
                g.range_min = lo;
                g.range_max = hi;
                last = j;
            }
        }
        g.a_count = last - g.a_start + 1;
        groups.push_back(g);
        i = last + 1;
    }
    return groups;
}

ExclusionFilter::ExclusionFilter(bool exclude_self, const std::optional<TripleList>& known)
    : exclude_self_(exclude_self) {
    if (known) known_.insert(known->begin(), known->end());
}

void evaluate_group(const CandidateGroup& g, const SortedSide& a_side, const SortedSide& b_side,
                    const RangeTable& ranges, std::uint32_t rel_id, const MetricModel& model,
                    const JoinConfig& cfg, const ExclusionFilter& filter,
                    std::vector<ResultTriple>& out, JoinStats& stats) {
    evaluate_group_at(g, 0, a_side, b_side, ranges, rel_id, model, cfg, filter, out, stats);
}

void parallel_for_relations(std::size_t count, unsigned threads,
                            const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// CompletionEngine

struct CompletionEngine::RelationPlan {
    SortedSide a;
    std::shared_ptr<const SortedSide> b;
    RangeTable ranges;
};

CompletionEngine::CompletionEngine(const EmbeddingMatrix& entities, MetricModel model,
                                   JoinConfig cfg)
    : entities_(entities), model_(model), cfg_(std::move(cfg)),
      filter_(cfg_.exclude_self, cfg_.exclude_known) {
    model_.validate();
    cfg_.validate();
    if (cfg_.exclude_known) {
        for (const auto& t : *cfg_.exclude_known) {
            if (t.head >= entities_.rows() || t.tail >= entities_.rows()) {
                fail(ErrorKind::Data, "exclude_known triple references a missing entity");
            }
        }
    }
    if (!model_.connector2_uses_relation()) {
        const auto t0 = Clock::now();
        const std::vector<float> unused(entities_.dim(), 0.0f);
        const EmbeddingMatrix b = apply_connector2(entities_, unused, model_);
        shared_pivot_ = make_pivot(cfg_.pivot_kind, b);
        shared_b_ = std::make_shared<const SortedSide>(prepare_side(b, shared_pivot_, model_.p));
        shared_prep_ms_ = ms_since(t0);
    }
}

CompletionEngine::~CompletionEngine() = default;

CompletionEngine::RelationPlan CompletionEngine::plan_relation(std::span<const float> r,
                                                               JoinStats& stats) const {
    if (r.size() != entities_.dim()) {
        fail(ErrorKind::Dimension, "relation vector length " + std::to_string(r.size()) +
                                       " does not match entity dim " +
                                       std::to_string(entities_.dim()));
    }
    const auto t0 = Clock::now();
    RelationPlan plan;
    Pivot pivot = shared_pivot_;
    if (shared_b_) {
        plan.b = shared_b_;
    } else {
        const EmbeddingMatrix b = apply_connector2(entities_, r, model_);
        pivot = make_pivot(cfg_.pivot_kind, b);
        plan.b = std::make_shared<const SortedSide>(prepare_side(b, pivot, model_.p));
    }
    plan.a = prepare_side(apply_connector1(entities_, r, model_), pivot, model_.p);
    plan.ranges = compute_range(plan.a.sorted_pivot_dist, plan.b->sorted_pivot_dist,
                                cfg_.eps + filter_slack(plan.a, *plan.b));
    stats.candidate_pairs += plan.ranges.candidate_count();
    stats.total_pairs += static_cast<std::uint64_t>(plan.a.size()) * plan.b->size();
    stats.preprocess_ms += ms_since(t0);
    return plan;
}

std::vector<ResultTriple> CompletionEngine::run_relation(std::span<const float> r,
                                                         std::uint32_t rel_id, bool partitioned,
                                                         JoinStats& stats) const {
    RelationPlan plan = plan_relation(r, stats);
    const auto t0 = Clock::now();
    std::vector<ResultTriple> out;
    ++stats.relations;

    if (!partitioned) {
        for (const auto& g : group_candidates(plan.ranges, cfg_.max_group_size)) {
            evaluate_group_at(g, 0, plan.a, *plan.b, plan.ranges, rel_id, model_, cfg_, filter_,
                              out, stats);
        }
        stats.join_ms += ms_since(t0);
        return out;
    }

    const std::size_t m = plan.a.size();
    const std::size_t n = plan.b->size();
    const std::size_t block = cfg_.partition_rows;
    std::vector<std::uint32_t> pos_a(m);
    std::vector<std::uint32_t> pos_b(n);
    for (std::size_t i = 0; i < m; ++i) pos_a[plan.a.perm[i]] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < n; ++j) pos_b[plan.b->perm[j]] = static_cast<std::uint32_t>(j);

    RangeTable clamped;
    for (std::size_t a0 = 0; a0 < m; a0 += block) {
        const std::size_t a1 = std::min(m, a0 + block);
        const std::size_t block_begin = out.size();
        for (std::size_t b0 = 0; b0 < n; b0 += block) {
            const auto lo = static_cast<std::int64_t>(b0);
            const auto hi = static_cast<std::int64_t>(std::min(n, b0 + block)) - 1;
            // Clamp each row's window to this B block; rows whose window
            // misses the block become empty.
            clamped.s.assign(a1 - a0, 0);
            clamped.e.assign(a1 - a0, -1);
            bool any = false;
            for (std::size_t i = a0; i < a1; ++i) {
                if (plan.ranges.empty_at(i)) continue;
                const std::int64_t s = std::max(plan.ranges.s[i], lo);
                const std::int64_t e = std::min(plan.ranges.e[i], hi);
                if (s > e) continue;
                clamped.s[i - a0] = s;
                clamped.e[i - a0] = e;
                any = true;
            }
            if (!any) continue;
            for (const auto& g : group_candidates(clamped, cfg_.max_group_size)) {
                evaluate_group_at(g, a0, plan.a, *plan.b, clamped, rel_id, model_, cfg_,
                                  filter_, out, stats);
            }
        }
        // Each B block emits its rows in order; merge back to (sorted-A,
        // sorted-B) order so the output matches the unpartitioned engine.
        std::sort(out.begin() + static_cast<std::ptrdiff_t>(block_begin), out.end(),
                  [&](const ResultTriple& x, const ResultTriple& y) {
                      if (pos_a[x.head] != pos_a[y.head]) return pos_a[x.head] < pos_a[y.head];
                      return pos_b[x.tail] < pos_b[y.tail];
                  });
    }
    stats.join_ms += ms_since(t0);
    return out;
}

std::vector<ResultTriple> CompletionEngine::complete_relation(std::span<const float> r,
                                                              std::uint32_t rel_id,
                                                              JoinStats* stats) const {
    JoinStats local;
    auto out = run_relation(r, rel_id, false, local);
    if (stats) *stats += local;
    return out;
}

JoinStats CompletionEngine::run_all(const EmbeddingMatrix& relations, bool partitioned,
                                    const ResultSink& sink) const {
    if (relations.rows() > 0 && relations.dim() != entities_.dim()) {
        fail(ErrorKind::Dimension, "relation dim " + std::to_string(relations.dim()) +
                                       " does not match entity dim " +
                                       std::to_string(entities_.dim()));
    }
    JoinStats total;
    total.preprocess_ms += shared_prep_ms_;
    const std::size_t count = relations.rows();

    unsigned threads = cfg_.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : cfg_.threads;
    if (threads <= 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            auto out = run_relation(relations.row(k), static_cast<std::uint32_t>(k), partitioned,
                                    total);
            if (sink) sink(out);
        }
        return total;
    }

    std::vector<std::vector<ResultTriple>> per_rel(count);
    std::vector<JoinStats> per_stats(count);
    parallel_for_relations(count, threads, [&](std::size_t k) {
        per_rel[k] = run_relation(relations.row(k), static_cast<std::uint32_t>(k), partitioned,
                                  per_stats[k]);
    });
    for (std::size_t k = 0; k < count; ++k) {
        total += per_stats[k];
        if (sink) sink(per_rel[k]);
    }
    return total;
}

JoinStats CompletionEngine::complete_all(const EmbeddingMatrix& relations,
                                         const ResultSink& sink) const {
    return run_all(relations, false, sink);
}

std::vector<ResultTriple> CompletionEngine::complete_all(const EmbeddingMatrix& relations,
                                                         JoinStats* stats) const {
    std::vector<ResultTriple> all;
    auto s = run_all(relations, false, [&](std::span<const ResultTriple> part) {
        all.insert(all.end(), part.begin(), part.end());
    });
    if (stats) *stats += s;
    return all;
}

JoinStats CompletionEngine::complete_all_partitioned(const EmbeddingMatrix& relations,
                                                     const ResultSink& sink) const {
    return run_all(relations, true, sink);
}

std::vector<ResultTriple> CompletionEngine::complete_all_partitioned(
    const EmbeddingMatrix& relations, JoinStats* stats) const {
    std::vector<ResultTriple> all;
    auto s = run_all(relations, true, [&](std::span<const ResultTriple> part) {
        all.insert(all.end(), part.begin(), part.end());
    });
    if (stats) *stats += s;
    return all;
}

std::vector<ResultTriple> complete_relation(const EmbeddingMatrix& entities,
                                            std::span<const float> r, std::uint32_t rel_id,
                                            const MetricModel& model, const JoinConfig& cfg) {
    return CompletionEngine(entities, model, cfg).complete_relation(r, rel_id);
}

std::vector<ResultTriple> complete_all(const EmbeddingMatrix& entities,
                                       const EmbeddingMatrix& relations,
                                       const MetricModel& model, const JoinConfig& cfg,
                                       JoinStats* stats) {
    return CompletionEngine(entities, model, cfg).complete_all(relations, stats);
}

std::vector<ResultTriple> complete_all_partitioned(const EmbeddingMatrix& entities,
                                                   const EmbeddingMatrix& relations,
                                                   const MetricModel& model,
                                                   const JoinConfig& cfg, JoinStats* stats) {
    return CompletionEngine(entities, model, cfg).complete_all_partitioned(relations, stats);
}

}  // namespace kgcjoin
