#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "kgcjoin/matrix.hpp"

namespace kgcjoin {

/// One join output: indices refer to the original (unsorted) matrices.
struct ResultTriple {
    std::uint32_t head = 0;
    std::uint32_t rel = 0;
    std::uint32_t tail = 0;
    double distance = 0.0;

    Triple key() const noexcept { return {head, rel, tail}; }
};

/// Receives results one relation at a time, in ascending rel order.
using ResultSink = std::function<void(std::span<const ResultTriple>)>;

/// Sorted (head, rel, tail) keys, for set comparisons between algorithms.
std::vector<Triple> triple_set(std::span<const ResultTriple> results);

/// "head<TAB>rel<TAB>tail<TAB>distance" with 6 significant digits; labels
/// are used for entities/relations that have them.
void write_results_tsv(std::ostream& out, std::span<const ResultTriple> results,
                       const EmbeddingMatrix& entities, const EmbeddingMatrix& relations);

}  // namespace kgcjoin
