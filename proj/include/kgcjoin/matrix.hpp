#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kgcjoin {

/// Dense row-major matrix of 32-bit reals. Rows are embedding vectors.
///
/// Labels are optional; when present there is exactly one per row and they
/// are unique. Hot loops only ever see integer row indices.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;

    /// Zero-filled rows x dim matrix.
    EmbeddingMatrix(std::size_t rows, std::size_t dim);

    /// Takes ownership of data; data.size() must equal rows * dim.
    EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data,
                    std::vector<std::string> labels = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<const float> data() const noexcept { return data_; }
    std::span<float> mutable_data() noexcept { return data_; }

    std::span<const float> row(std::size_t i) const noexcept {
        return {data_.data() + i * dim_, dim_};
    }
    std::span<float> mutable_row(std::size_t i) noexcept {
        return {data_.data() + i * dim_, dim_};
    }

    /// Pointer to the first value of row i (rows are contiguous).
    const float* row_ptr(std::size_t i) const noexcept { return data_.data() + i * dim_; }

    bool has_labels() const noexcept { return !labels_.empty(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    void set_labels(std::vector<std::string> labels);

    /// New matrix holding rows idx[0], idx[1], ... (labels follow their rows).
    EmbeddingMatrix gather(std::span<const std::uint32_t> idx) const;

    /// Bitwise comparison of shape, payload bytes and labels.
    friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<float> data_;
    std::vector<std::string> labels_;
};

struct Triple {
    std::uint32_t head = 0;
    std::uint32_t rel = 0;
    std::uint32_t tail = 0;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

using TripleList = std::vector<Triple>;

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = (std::uint64_t{t.head} << 32) ^ t.tail;
        h ^= std::uint64_t{t.rel} * 0x9e3779b97f4a7c15ULL;
        h ^= h >> 29;
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

}  // namespace kgcjoin
