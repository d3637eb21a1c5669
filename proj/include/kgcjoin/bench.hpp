#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgcjoin/baselines.hpp"
#include "kgcjoin/embeddings_io.hpp"
#include "kgcjoin/metric_model.hpp"

namespace kgcjoin {

enum class Algorithm { Pivot, PivotPartitioned, Naive, Quickjoin };

const char* to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(const std::string& name);

/// Parameters for a generated dataset ("entities = synth" in a config).
struct SynthSpec {
    std::size_t n = 2000;
    std::size_t d = 64;
    std::size_t relations = 4;
    SyntheticDistribution distribution = SyntheticDistribution::Uniform;
    std::uint64_t seed = 1;
    /// Relation vectors are uniform [0,1)^d times this factor.
    double relation_scale = 1.0;
};

/// Experiment description. File form: one "key = value" per line, '#'
/// starts a comment, list values are comma-separated.
///
///   name            dataset tag in reports
///   entities        matrix path, or "synth"
///   relations       matrix path (ignored for synth)
///   synth.n / synth.d / synth.relations / synth.dist / synth.seed /
///   synth.relation_scale
///   algorithms      pivot, pivot-partitioned, naive, quickjoin
///   eps             list of thresholds
///   fractions       entity fractions in (0, 1]           (default 1.0)
///   group_sizes     MAX_GROUP_SIZE values for pivot runs (default 300000)
///   partition_rows  block height for pivot-partitioned   (default 4096)
///   p               norm order 1 or 2                    (default 2)
///   pivot           zero | meanB                         (default zero)
///   exclude_self    true | false                         (default false)
///   seed            subsampling seed                     (default 0)
///   threads         worker threads, 0 = all cores        (default 1)
///   quickjoin.small_threshold / quickjoin.max_depth / quickjoin.seed
///
/// Relative paths resolve against the config file's directory.
struct ExperimentConfig {
    std::string name = "experiment";
    std::filesystem::path entities;
    std::filesystem::path relations;
    std::optional<SynthSpec> synth;
    std::vector<Algorithm> algorithms;
    std::vector<double> eps;
    std::vector<double> fractions{1.0};
    std::vector<std::size_t> group_sizes{300'000};
    std::size_t partition_rows = 4096;
    int p = 2;
    PivotKind pivot = PivotKind::Zero;
    bool exclude_self = false;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    QuickjoinParams quickjoin;

    /// Throws Error{Usage} for missing algorithms/eps or bad values.
    void validate() const;
};

ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct BenchRecord {
    std::string dataset;
    Algorithm algorithm = Algorithm::Pivot;
    double eps = 0.0;
    double fraction = 1.0;
    std::size_t max_group_size = 0;  // 0: not applicable
    std::size_t partition_rows = 0;  // 0: not applicable
    std::uint64_t candidate_pairs = 0;
    std::uint64_t triples = 0;
    double wall_ms = 0.0;
    double preprocess_ms = 0.0;
    double join_ms = 0.0;
};

struct BenchReport {
    std::vector<BenchRecord> records;

    void write_tsv(std::ostream& out, bool time_breakdown = false) const;
    void write_table(std::ostream& out) const;
};

struct RunOptions {
    /// Compare triple sets across every record sharing (fraction, eps).
    bool verify = false;
    /// Progress lines, one per record; may be null.
    std::ostream* log = nullptr;
};

/// Runs algorithms x eps x fractions x group sizes (group sizes apply to the
/// pivot algorithms only). Wall time excludes model loading. Throws
/// Error{Verification} listing up to 20 differing triples when verify is set
/// and two algorithms disagree.
BenchReport run_experiment(const ExperimentConfig& config, const RunOptions& opts = {});

}  // namespace kgcjoin
