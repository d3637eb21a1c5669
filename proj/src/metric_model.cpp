#include "kgcjoin/metric_model.hpp"

#include <cmath>
#include <string>

#include "kgcjoin/error.hpp"
#include "kgcjoin/kernels/lp_distance.hpp"

namespace kgcjoin {

void MetricModel::validate() const {
    if (p != 1 && p != 2) fail(ErrorKind::Parameter, "norm order p must be 1 or 2, got " + std::to_string(p));
}

bool MetricModel::connector2_uses_relation() const noexcept {
    switch (kind) {
        case ModelKind::TransE: return false;
    }
    return true;
}

Pivot Pivot::zero(std::size_t dim) { return {std::vector<float>(dim, 0.0f), PivotKind::Zero}; }

Pivot Pivot::mean_of(const EmbeddingMatrix& b) {
    std::vector<double> sum(b.dim(), 0.0);
    for (std::size_t i = 0; i < b.rows(); ++i) {
        auto row = b.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) sum[k] += row[k];
    }
    std::vector<float> mean(b.dim(), 0.0f);
    if (b.rows() > 0) {
        for (std::size_t k = 0; k < mean.size(); ++k) {
            mean[k] = static_cast<float>(sum[k] / static_cast<double>(b.rows()));
        }
    }
    return {std::move(mean), PivotKind::MeanOfB};
}

Pivot Pivot::custom(std::vector<float> v) { return {std::move(v), PivotKind::Custom}; }

PivotKind parse_pivot_kind(const std::string& name) {
    if (name == "zero") return PivotKind::Zero;
    if (name == "meanB" || name == "mean") return PivotKind::MeanOfB;
    fail(ErrorKind::Parameter, "unknown pivot '" + name + "' (zero|meanB)");
}

namespace {

void check_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        fail(ErrorKind::Dimension, std::string(what) + ": length mismatch (" + std::to_string(a) +
                                       " vs " + std::to_string(b) + ")");
    }
}

}  // namespace

std::vector<float> connector1(std::span<const float> h, std::span<const float> r,
                              const MetricModel& model) {
    check_same_length(h.size(), r.size(), "connector1");
    std::vector<float> out(h.size());
    switch (model.kind) {
        case ModelKind::TransE:
            for (std::size_t k = 0; k < h.size(); ++k) out[k] = h[k] + r[k];
            break;
    }
    return out;
}

std::vector<float> connector2(std::span<const float> t, std::span<const float> r,
                              const MetricModel& model) {
    check_same_length(t.size(), r.size(), "connector2");
    switch (model.kind) {
        case ModelKind::TransE: return {t.begin(), t.end()};
    }
    return {};
}

EmbeddingMatrix apply_connector1(const EmbeddingMatrix& entities, std::span<const float> r,
                                 const MetricModel& model) {
    check_same_length(entities.dim(), r.size(), "connector1");
    EmbeddingMatrix out(entities.rows(), entities.dim());
    const std::size_t d = entities.dim();
    auto dst = out.mutable_data();
    auto src = entities.data();
    switch (model.kind) {
        case ModelKind::TransE:
            for (std::size_t i = 0; i < entities.rows(); ++i) {
                for (std::size_t k = 0; k < d; ++k) dst[i * d + k] = src[i * d + k] + r[k];
            }
            break;
    }
    return out;
}

EmbeddingMatrix apply_connector2(const EmbeddingMatrix& entities, std::span<const float> r,
                                 const MetricModel& model) {
    check_same_length(entities.dim(), r.size(), "connector2");
    switch (model.kind) {
        case ModelKind::TransE:
            return EmbeddingMatrix(entities.rows(), entities.dim(),
                                   std::vector<float>(entities.data().begin(), entities.data().end()));
    }
    return {};
}

double dist(std::span<const float> a, std::span<const float> b, int p) {
    check_same_length(a.size(), b.size(), "dist");
    if (p != 1 && p != 2) fail(ErrorKind::Parameter, "norm order p must be 1 or 2");
    double acc = 0.0;
    if (p == 1) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            acc += std::fabs(static_cast<double>(a[k]) - static_cast<double>(b[k]));
        }
        return acc;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

double dist3(std::span<const float> h, std::span<const float> r, std::span<const float> t,
             const MetricModel& model) {
    check_same_length(h.size(), t.size(), "dist3");
    return dist(connector1(h, r, model), connector2(t, r, model), model.p);
}

void batch_dist(std::span<const float> a, std::size_t m, std::span<const float> b,
                std::size_t n, std::size_t dim, int p, std::span<double> out,
                std::size_t budget) {
    if (p != 1 && p != 2) fail(ErrorKind::Parameter, "norm order p must be 1 or 2");
    if (a.size() != m * dim || b.size() != n * dim) {
        fail(ErrorKind::Dimension, "batch_dist: operand size does not match rows x dim");
    }
    if (m * n > budget) {
        fail(ErrorKind::Resource, "batch_dist: " + std::to_string(m) + " x " + std::to_string(n) +
                                      " exceeds the kernel budget of " + std::to_string(budget) +
                                      " cells");
    }
    if (out.size() < m * n) fail(ErrorKind::Length, "batch_dist: output buffer too small");
    if (m == 0 || n == 0) return;
    kernels::active_kernels().for_norm(p)(a.data(), m, b.data(), n, dim, out.data(), n);
}

DistanceMatrix batch_dist(const EmbeddingMatrix& a, const EmbeddingMatrix& b, int p,
                          std::size_t budget) {
    if (a.dim() != b.dim() && a.rows() > 0 && b.rows() > 0) {
        fail(ErrorKind::Dimension, "batch_dist: dims " + std::to_string(a.dim()) + " and " +
                                       std::to_string(b.dim()) + " differ");
    }
    DistanceMatrix out{a.rows(), b.rows(), {}};
    if (a.rows() * b.rows() > budget) {
        fail(ErrorKind::Resource, "batch_dist: " + std::to_string(a.rows()) + " x " +
                                      std::to_string(b.rows()) + " exceeds the kernel budget");
    }
    out.values.resize(a.rows() * b.rows());
    batch_dist(a.data(), a.rows(), b.data(), b.rows(), a.dim(), p, out.values, budget);
    return out;
}

}  // namespace kgcjoin
