#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kgcjoin/matrix.hpp"

namespace kgcjoin {

enum class ModelKind { TransE };

/// A ternary score that factors as dist(connector1(h, r), connector2(t, r))
/// with dist an Lp metric. Only TransE is realized; new kinds plug into the
/// switch statements in metric_model.cpp.
struct MetricModel {
    ModelKind kind = ModelKind::TransE;
    int p = 2;

    /// Throws Error{Parameter} unless p is 1 or 2.
    void validate() const;

    /// Whether connector2 reads the relation vector. When false, the B side
    /// of the join is identical for every relation and can be built once.
    bool connector2_uses_relation() const noexcept;
};

enum class PivotKind { Zero, MeanOfB, Custom };

struct Pivot {
    std::vector<float> vector;
    PivotKind kind = PivotKind::Zero;

    static Pivot zero(std::size_t dim);
    static Pivot mean_of(const EmbeddingMatrix& b);
    static Pivot custom(std::vector<float> v);
};

PivotKind parse_pivot_kind(const std::string& name);

/// TransE: h + r.
std::vector<float> connector1(std::span<const float> h, std::span<const float> r,
                              const MetricModel& model = {});
/// TransE: t.
std::vector<float> connector2(std::span<const float> t, std::span<const float> r,
                              const MetricModel& model = {});

/// Row-wise connectors over an entity matrix.
EmbeddingMatrix apply_connector1(const EmbeddingMatrix& entities,
                                 std::span<const float> r, const MetricModel& model);
EmbeddingMatrix apply_connector2(const EmbeddingMatrix& entities,
                                 std::span<const float> r, const MetricModel& model);

/// Canonical Lp distance, sequential 64-bit accumulation.
double dist(std::span<const float> a, std::span<const float> b, int p);

/// dist(connector1(h, r), connector2(t, r), model.p).
double dist3(std::span<const float> h, std::span<const float> r,
             std::span<const float> t, const MetricModel& model);

/// Row-major m x n matrix of 64-bit distances.
struct DistanceMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Default upper bound on m*n cells a single batch_dist call may produce.
inline constexpr std::size_t kDefaultBatchBudget = std::size_t{1} << 25;

/// All-pairs Lp distances through the runtime-selected SIMD kernel. Entry
/// (i,j) matches dist(A_i, B_j) to ~1e-12 relative; the value for a given
/// pair does not depend on the shapes it was batched with.
/// Throws Error{Dimension} on mismatched dims and Error{Resource} when
/// m*n exceeds budget.
DistanceMatrix batch_dist(const EmbeddingMatrix& a, const EmbeddingMatrix& b, int p,
                          std::size_t budget = kDefaultBatchBudget);

/// Span-based form used by the engines on row slices of larger matrices.
/// a holds m rows, b holds n rows, both of width dim; out has m*n entries.
void batch_dist(std::span<const float> a, std::size_t m, std::span<const float> b,
                std::size_t n, std::size_t dim, int p, std::span<double> out,
                std::size_t budget = kDefaultBatchBudget);

}  // namespace kgcjoin
