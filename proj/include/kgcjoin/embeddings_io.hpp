#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kgcjoin/matrix.hpp"

namespace kgcjoin {

// On-disk formats
//
//   kgj1 binary : ASCII header "kgj1 <rows> <dim>\n" followed by rows*dim
//                 little-endian IEEE-754 binary32 values, row-major, no
//                 padding. Optional sidecar "<path>.labels", one label per line.
//   TSV matrix  : one row per line, tab-separated decimal reals.
//   triples     : "head<TAB>rel<TAB>tail" per line, 0-based ids.

/// Loads a kgj1 or TSV matrix (sniffed from the first bytes) plus the
/// labels sidecar if one exists. Throws Error{Format|Data|Length|Io}.
EmbeddingMatrix load_matrix(const std::filesystem::path& path);

/// Writes kgj1 (and the labels sidecar when the matrix has labels).
void save_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path);

void save_matrix_tsv(const EmbeddingMatrix& m, const std::filesystem::path& path);

TripleList load_triples(const std::filesystem::path& path);
void save_triples(const TripleList& triples, const std::filesystem::path& path);

/// Throws Error{Data} if any id is outside [0, entities) / [0, relations).
void check_triple_bounds(const TripleList& triples, std::size_t entities,
                         std::size_t relations);

/// Row indices kept by subsample_entities: ceil(fraction * rows) rows picked
/// by a seeded Fisher-Yates shuffle, returned in ascending original order.
std::vector<std::uint32_t> subsample_indices(std::size_t rows, double fraction,
                                             std::uint64_t seed);

EmbeddingMatrix subsample_entities(const EmbeddingMatrix& entities, double fraction,
                                   std::uint64_t seed);

enum class SyntheticDistribution { Uniform, Clustered };

/// Uniform: each coordinate in [0,1). Clustered: ceil(sqrt(n)) uniform centers,
/// points are a random center plus N(0, 0.05^2) noise per coordinate.
EmbeddingMatrix generate_synthetic(std::size_t n, std::size_t d,
                                   SyntheticDistribution distribution,
                                   std::uint64_t seed);

SyntheticDistribution parse_distribution(const std::string& name);

}  // namespace kgcjoin
