#include "kgcjoin/results.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace kgcjoin {

std::vector<Triple> triple_set(std::span<const ResultTriple> results) {
    std::vector<Triple> keys;
    keys.reserve(results.size());
    for (const auto& r : results) keys.push_back(r.key());
    std::sort(keys.begin(), keys.end());
    return keys;
}

void write_results_tsv(std::ostream& out, std::span<const ResultTriple> results,
                       const EmbeddingMatrix& entities, const EmbeddingMatrix& relations) {
    char dist[32];
    for (const auto& r : results) {
        std::snprintf(dist, sizeof(dist), "%.6g", r.distance);
        if (entities.has_labels()) {
            out << entities.labels()[r.head];
        } else {
            out << r.head;
        }
        out << '\t';
        if (relations.has_labels()) {
            out << relations.labels()[r.rel];
        } else {
            out << r.rel;
        }
        out << '\t';
        if (entities.has_labels()) {
            out << entities.labels()[r.tail];
        } else {
            out << r.tail;
        }
        out << '\t' << dist << '\n';
    }
}

}  // namespace kgcjoin
