#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "kgcjoin/bench.hpp"
#include "kgcjoin/error.hpp"

#ifndef KGCJOIN_PRESET_DIR
#error "KGCJOIN_PRESET_DIR must point at presets/"
#endif

namespace kgcjoin {
namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_config(in, "/base");
}

ErrorKind kind_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Verification;
}

TEST(Config, ParsesEveryKey) {
    const auto cfg = parse(R"(
# comment line
name = demo
entities = data/e.kgj   # trailing comment
relations = /abs/r.kgj
algorithms = pivot, naive ,quickjoin, pivot-partitioned
eps = 0.5, 1
fractions = 0.2, 1.0
group_sizes = 1, 1000
partition_rows = 64
p = 1
pivot = meanB
exclude_self = true
seed = 9
threads = 2
quickjoin.small_threshold = 10
quickjoin.max_depth = 5
quickjoin.seed = 3
)");
    EXPECT_EQ(cfg.name, "demo");
    EXPECT_EQ(cfg.entities, std::filesystem::path("/base/data/e.kgj"));
    EXPECT_EQ(cfg.relations, std::filesystem::path("/abs/r.kgj"));
    EXPECT_EQ(cfg.algorithms, (std::vector<Algorithm>{Algorithm::Pivot, Algorithm::Naive,
                                                      Algorithm::Quickjoin,
                                                      Algorithm::PivotPartitioned}));
    EXPECT_EQ(cfg.eps, (std::vector<double>{0.5, 1.0}));
    EXPECT_EQ(cfg.fractions, (std::vector<double>{0.2, 1.0}));
    EXPECT_EQ(cfg.group_sizes, (std::vector<std::size_t>{1, 1000}));
    EXPECT_EQ(cfg.partition_rows, 64u);
    EXPECT_EQ(cfg.p, 1);
    EXPECT_EQ(cfg.pivot, PivotKind::MeanOfB);
    EXPECT_TRUE(cfg.exclude_self);
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.threads, 2u);
    EXPECT_EQ(cfg.quickjoin.small_threshold, 10u);
    EXPECT_EQ(cfg.quickjoin.max_depth, 5u);
    EXPECT_EQ(cfg.quickjoin.rng_seed, 3u);
    EXPECT_FALSE(cfg.synth);
}

TEST(Config, UsageErrors) {
    const std::string ok = "entities = synth\neps = 1\n";
    EXPECT_EQ(kind_of(ok), ErrorKind::Usage);  // no algorithms key
    EXPECT_EQ(kind_of(ok + "algorithms =\n"), ErrorKind::Usage);
    EXPECT_EQ(kind_of(ok + "algorithms = grid\n"), ErrorKind::Usage);
    EXPECT_EQ(kind_of(ok + "algorithms = pivot\nbogus = 1\n"), ErrorKind::Usage);
    EXPECT_EQ(kind_of(ok + "algorithms = pivot\nfractions = 0\n"), ErrorKind::Usage);
    EXPECT_EQ(kind_of(ok + "algorithms = pivot\neps = -1\n"), ErrorKind::Usage);
    EXPECT_EQ(kind_of(ok + "algorithms = pivot\np = 3\n"), ErrorKind::Usage);
    EXPECT_EQ(kind_of(ok + "algorithms = pivot\nno equals sign\n"), ErrorKind::Usage);
    EXPECT_EQ(kind_of("algorithms = pivot\neps = 1\n"), ErrorKind::Usage);  // no data
    EXPECT_EQ(kind_of(ok + "algorithms = pivot\n"), ErrorKind::Verification);  // parses
}

// The shipped presets carry the paper's eps schedules.
TEST(Presets, EpsSchedules) {
    const std::map<std::string, std::vector<double>> want{
        {"wn18", {0.33, 0.83, 1.33, 1.83, 2.33}},
        {"wn18rr", {1.02, 1.52, 2.02, 2.52, 3.02}},
        {"fb15k", {2.25, 2.75, 3.25, 3.75, 4.25}},
        {"fb15k-237", {0.01, 0.51, 1.01, 1.51, 2.01}},
    };
    for (const auto& [name, eps] : want) {
        const auto cfg = load_experiment_config(std::filesystem::path(KGCJOIN_PRESET_DIR) / (name + ".conf"));
        EXPECT_EQ(cfg.eps, eps) << name;
        EXPECT_EQ(cfg.fractions, (std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0})) << name;
        EXPECT_EQ(cfg.group_sizes, (std::vector<std::size_t>{300000})) << name;
    }
    EXPECT_NO_THROW(load_experiment_config(std::filesystem::path(KGCJOIN_PRESET_DIR) / "desk-synthetic.conf"));
}

ExperimentConfig small_synth() {
    ExperimentConfig cfg;
    cfg.name = "t";
    SynthSpec s;
    s.n = 300;
    s.d = 8;
    s.relations = 2;
    s.relation_scale = 0.1;
    s.seed = 4;
    cfg.synth = s;
    cfg.algorithms = {Algorithm::Pivot, Algorithm::Naive};
    cfg.eps = {0.2, 0.3, 0.4};
    return cfg;
}

TEST(RunExperiment, TwoAlgorithmsThreeEps) {
    RunOptions opts;
    opts.verify = true;
    const auto report = run_experiment(small_synth(), opts);
    ASSERT_EQ(report.records.size(), 6u);
    for (std::size_t k = 0; k < 6; k += 2) {
        EXPECT_EQ(report.records[k].algorithm, Algorithm::Pivot);
        EXPECT_EQ(report.records[k + 1].algorithm, Algorithm::Naive);
        EXPECT_EQ(report.records[k].eps, report.records[k + 1].eps);
        EXPECT_EQ(report.records[k].triples, report.records[k + 1].triples);
        EXPECT_LE(report.records[k].candidate_pairs, report.records[k + 1].candidate_pairs);
    }
    EXPECT_LT(report.records[0].triples, report.records[4].triples);
}

TEST(RunExperiment, FullCrossProductAndDeterminism) {
    auto cfg = small_synth();
    cfg.algorithms = {Algorithm::Pivot, Algorithm::PivotPartitioned, Algorithm::Naive,
                      Algorithm::Quickjoin};
    cfg.eps = {0.3};
    cfg.fractions = {0.5, 1.0};
    cfg.group_sizes = {1, 1000};
    cfg.partition_rows = 7;
    cfg.exclude_self = true;
    RunOptions opts;
    opts.verify = true;
    const auto a = run_experiment(cfg, opts);
    // Per fraction: 2 group sizes x 2 pivot algorithms + naive + quickjoin.
    ASSERT_EQ(a.records.size(), 12u);
    const auto b = run_experiment(cfg, opts);
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        EXPECT_EQ(a.records[k].triples, b.records[k].triples);
        EXPECT_EQ(a.records[k].candidate_pairs, b.records[k].candidate_pairs);
        EXPECT_EQ(a.records[k].fraction, b.records[k].fraction);
    }
}

TEST(RunExperiment, ReportsWriteHeaders) {
    auto cfg = small_synth();
    cfg.eps = {0.3};
    const auto report = run_experiment(cfg);
    std::ostringstream tsv, wide, table;
    report.write_tsv(tsv);
    report.write_tsv(wide, true);
    report.write_table(table);
    EXPECT_EQ(tsv.str().rfind("dataset\talgorithm\teps\tentity_fraction\tmax_group_size\t"
                              "partition_rows\tcandidate_pairs\ttriples\twall_ms\n", 0),
              0u);
    EXPECT_NE(wide.str().find("preprocess_ms\tjoin_ms"), std::string::npos);
    EXPECT_NE(table.str().find("naive"), std::string::npos);
    // Header plus one line per record.
    const std::string text = tsv.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(RunExperiment, MissingFilesAreIoErrors) {
    ExperimentConfig cfg;
    cfg.entities = "/nonexistent/e.kgj";
    cfg.relations = "/nonexistent/r.kgj";
    cfg.algorithms = {Algorithm::Pivot};
    cfg.eps = {1.0};
    try {
        run_experiment(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

}  // namespace
}  // namespace kgcjoin
