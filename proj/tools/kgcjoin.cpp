// kgcjoin: find every (head, relation, tail) whose TransE distance is within
// eps, plus the supporting benchmark / evaluation commands.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 verification failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "kgcjoin/baselines.hpp"
#include "kgcjoin/bench.hpp"
#include "kgcjoin/embeddings_io.hpp"
#include "kgcjoin/error.hpp"
#include "kgcjoin/evaluation.hpp"
#include "kgcjoin/join_engine.hpp"
#include "kgcjoin/kernels/lp_distance.hpp"

namespace {

using namespace kgcjoin;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerification = 3;

struct CompleteArgs {
    std::string entities, relations, out, exclude_known;
    double eps = -1.0;
    int p = 2;
    std::string algorithm = "pivot";
    std::size_t max_group_size = kDefaultMaxGroupSize;
    std::optional<std::size_t> partition_rows;
    bool exclude_self = false;
    std::string pivot = "zero";
    unsigned threads = 1;
    bool time_breakdown = false;
};

int run_complete(const CompleteArgs& a) {
    const MetricModel model{ModelKind::TransE, a.p};
    model.validate();
    const EmbeddingMatrix entities = load_matrix(a.entities);
    const EmbeddingMatrix relations = load_matrix(a.relations);
    if (relations.rows() > 0 && relations.dim() != entities.dim()) {
        fail(ErrorKind::Data, "entity dim " + std::to_string(entities.dim()) +
                                  " and relation dim " + std::to_string(relations.dim()) + " differ");
    }

    JoinConfig cfg;
    cfg.eps = a.eps;
    cfg.max_group_size = a.max_group_size;
    cfg.exclude_self = a.exclude_self;
    cfg.pivot_kind = parse_pivot_kind(a.pivot);
    cfg.threads = a.threads;
    if (a.partition_rows) cfg.partition_rows = *a.partition_rows;
    if (!a.exclude_known.empty()) {
        auto known = load_triples(a.exclude_known);
        check_triple_bounds(known, entities.rows(), relations.rows());
        cfg.exclude_known = std::move(known);
    }
    cfg.validate();

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out, std::ios::trunc);
        if (!file) fail(ErrorKind::Io, "cannot write " + a.out);
    }
    std::ostream& out = a.out.empty() ? std::cout : file;

    const auto t0 = std::chrono::steady_clock::now();
    JoinStats stats;
    auto sink = [&](std::span<const ResultTriple> part) {
        write_results_tsv(out, part, entities, relations);
    };

    if (a.algorithm == "pivot") {
        CompletionEngine engine(entities, model, cfg);
        stats = a.partition_rows ? engine.complete_all_partitioned(relations, sink)
                                 : engine.complete_all(relations, sink);
    } else if (a.algorithm == "naive" || a.algorithm == "quickjoin") {
        std::vector<ResultTriple> results;
        if (a.algorithm == "naive") {
            NaiveOptions no;
            no.threads = a.threads;
            results = naive_join(entities, relations, model, cfg.eps, no);
            stats.candidate_pairs =
                static_cast<std::uint64_t>(entities.rows()) * entities.rows() * relations.rows();
        } else {
            results = quickjoin_complete_all(entities, relations, model, cfg.eps);
        }
        stats.verified_pairs = results.size();
        const ExclusionFilter filter(cfg.exclude_self, cfg.exclude_known);
        std::erase_if(results, [&](const ResultTriple& r) {
            return filter.rejects(r.head, r.rel, r.tail);
        });
        stats.relations = relations.rows();
        stats.emitted = results.size();
        sink(results);
    } else {
        fail(ErrorKind::Usage, "unknown algorithm '" + a.algorithm + "'");
    }
    out.flush();
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::fprintf(stderr,
                 "relations=%zu candidate_pairs=%llu verified_pairs=%llu emitted=%llu "
                 "wall_ms=%.1f kernel=%s\n",
                 relations.rows(), static_cast<unsigned long long>(stats.candidate_pairs),
                 static_cast<unsigned long long>(stats.verified_pairs),
                 static_cast<unsigned long long>(stats.emitted), wall,
                 std::string(kernels::to_string(kernels::active_kernels().isa)).c_str());
    if (a.time_breakdown) {
        std::fprintf(stderr, "preprocess_ms=%.1f join_ms=%.1f\n", stats.preprocess_ms,
                     stats.join_ms);
    }
    return 0;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage:
        case ErrorKind::Parameter: return kExitUsage;
        case ErrorKind::Verification: return kExitVerification;
        default: return kExitData;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold knowledge-graph completion as a metric-space similarity join"};
    app.require_subcommand(1);

    CompleteArgs complete;
    auto* c = app.add_subcommand("complete", "Emit every triple with dist3 <= eps");
    c->add_option("--entities", complete.entities, "Entity matrix (kgj1 or TSV)")->required();
    c->add_option("--relations", complete.relations, "Relation matrix (kgj1 or TSV)")->required();
    c->add_option("--eps", complete.eps, "Distance threshold")->required();
    c->add_option("--p", complete.p, "Norm order")->check(CLI::IsMember({1, 2}));
    c->add_option("--algorithm", complete.algorithm)
        ->check(CLI::IsMember({"pivot", "naive", "quickjoin"}));
    c->add_option("--max-group-size", complete.max_group_size, "Cell budget per batch")
        ->check(CLI::PositiveNumber);
    c->add_option("--partition-rows", complete.partition_rows, "Block height (enables partitioned mode)")
        ->check(CLI::PositiveNumber);
    c->add_flag("--exclude-self", complete.exclude_self, "Drop head == tail triples");
    c->add_option("--exclude-known", complete.exclude_known, "Triple file of known edges to drop");
    c->add_option("--pivot", complete.pivot)->check(CLI::IsMember({"zero", "meanB"}));
    c->add_option("--out", complete.out, "Output TSV (default stdout)");
    c->add_option("--threads", complete.threads, "Worker threads over relations (0 = all cores)");
    c->add_flag("--time-breakdown", complete.time_breakdown, "Report preprocessing vs join time");

    std::string bench_config;
    bool bench_verify = false;
    bool bench_breakdown = false;
    std::string bench_out;
    auto* b = app.add_subcommand("bench", "Run an experiment config");
    b->add_option("--config", bench_config)->required();
    b->add_flag("--verify", bench_verify, "Require identical triple sets across algorithms");
    b->add_flag("--time-breakdown", bench_breakdown);
    b->add_option("--out", bench_out, "Also write the TSV report here");

    std::string t_entities, t_relations;
    bool t_exclude_self = false;
    int t_p = 2;
    auto* t = app.add_subcommand("top1", "Smallest dist3 over all triples");
    t->add_option("--entities", t_entities)->required();
    t->add_option("--relations", t_relations)->required();
    t->add_flag("--exclude-self", t_exclude_self);
    t->add_option("--p", t_p)->check(CLI::IsMember({1, 2}));

    std::string r_entities, r_relations, r_test, r_total;
    int r_p = 2;
    auto* r = app.add_subcommand("rank-metrics", "Filtered MRR and Hits@k");
    r->add_option("--entities", r_entities)->required();
    r->add_option("--relations", r_relations)->required();
    r->add_option("--test", r_test)->required();
    r->add_option("--total", r_total)->required();
    r->add_option("--p", r_p)->check(CLI::IsMember({1, 2}));

    std::size_t s_n = 0, s_d = 0;
    std::string s_dist = "uniform", s_out;
    std::uint64_t s_seed = 0;
    double s_scale = 1.0;
    bool s_tsv = false;
    auto* s = app.add_subcommand("synth", "Generate a synthetic embedding matrix");
    s->add_option("--n", s_n)->required();
    s->add_option("--d", s_d)->required()->check(CLI::PositiveNumber);
    s->add_option("--dist", s_dist)->check(CLI::IsMember({"uniform", "clustered"}));
    s->add_option("--seed", s_seed)->required();
    s->add_option("--out", s_out)->required();
    s->add_option("--scale", s_scale, "Multiply every value (e.g. for relation vectors)");
    s->add_flag("--tsv", s_tsv, "Write TSV instead of kgj1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (c->parsed()) return run_complete(complete);

        if (b->parsed()) {
            const auto cfg = load_experiment_config(bench_config);
            RunOptions opts;
            opts.verify = bench_verify;
            opts.log = &std::cerr;
            const auto report = run_experiment(cfg, opts);
            report.write_table(std::cout);
            if (!bench_out.empty()) {
                std::ofstream f(bench_out, std::ios::trunc);
                if (!f) fail(ErrorKind::Io, "cannot write " + bench_out);
                report.write_tsv(f, bench_breakdown);
            } else {
                std::cout << '\n';
                report.write_tsv(std::cout, bench_breakdown);
            }
            return 0;
        }

        if (t->parsed()) {
            const auto ents = load_matrix(t_entities);
            const auto rels = load_matrix(t_relations);
            const MetricModel model{ModelKind::TransE, t_p};
            const auto st = top1_stats(ents, rels, model, t_exclude_self);
            std::printf("top1\t%.6g\nargmin\t%u\t%u\t%u\nmax_range\t%.6g\n", st.top1,
                        st.argmin.head, st.argmin.rel, st.argmin.tail, st.max_range);
            return 0;
        }

        if (r->parsed()) {
            const auto ents = load_matrix(r_entities);
            const auto rels = load_matrix(r_relations);
            const MetricModel model{ModelKind::TransE, r_p};
            const auto m = filtered_rank_metrics(ents, rels, model, load_triples(r_test),
                                                 load_triples(r_total));
            std::printf("MRR\t%.6f\nHits@1\t%.6f\nHits@3\t%.6f\nHits@10\t%.6f\n", m.mrr, m.hits1,
                        m.hits3, m.hits10);
            return 0;
        }

        if (s->parsed()) {
            auto m = generate_synthetic(s_n, s_d, parse_distribution(s_dist), s_seed);
            if (s_scale != 1.0) {
                for (auto& v : m.mutable_data()) v = static_cast<float>(v * s_scale);
            }
            if (s_tsv) {
                save_matrix_tsv(m, s_out);
            } else {
                save_matrix(m, s_out);
            }
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "kgcjoin: %s: %s\n", to_string(e.kind()), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "kgcjoin: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
