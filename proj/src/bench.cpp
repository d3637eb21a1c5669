#include "kgcjoin/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include "kgcjoin/error.hpp"
#include "kgcjoin/join_engine.hpp"

namespace kgcjoin {

const char* to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::Pivot: return "pivot";
        case Algorithm::PivotPartitioned: return "pivot-partitioned";
        case Algorithm::Naive: return "naive";
        case Algorithm::Quickjoin: return "quickjoin";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    for (Algorithm a : {Algorithm::Pivot, Algorithm::PivotPartitioned, Algorithm::Naive,
                        Algorithm::Quickjoin}) {
        if (name == to_string(a)) return a;
    }
    fail(ErrorKind::Usage, "unknown algorithm '" + name +
                               "' (pivot|pivot-partitioned|naive|quickjoin)");
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) fail(ErrorKind::Usage, key + ": bad number '" + v + "'");
    return x;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    unsigned long long x = 0;
    try {
        x = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty() || v[0] == '-') {
        fail(ErrorKind::Usage, key + ": bad count '" + v + "'");
    }
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorKind::Usage, key + ": expected true/false, got '" + v + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (algorithms.empty()) fail(ErrorKind::Usage, "experiment lists no algorithms");
    if (eps.empty()) fail(ErrorKind::Usage, "experiment lists no eps values");
    if (fractions.empty()) fail(ErrorKind::Usage, "experiment lists no fractions");
    if (group_sizes.empty()) fail(ErrorKind::Usage, "experiment lists no group sizes");
    if (!synth && (entities.empty() || relations.empty())) {
        fail(ErrorKind::Usage, "experiment needs entities and relations (or entities = synth)");
    }
    for (double e : eps) {
        if (!(e >= 0.0)) fail(ErrorKind::Usage, "eps values must be >= 0");
    }
    for (double f : fractions) {
        if (!(f > 0.0) || f > 1.0) fail(ErrorKind::Usage, "fractions must be in (0, 1]");
    }
    for (auto g : group_sizes) {
        if (g < 1) fail(ErrorKind::Usage, "group sizes must be >= 1");
    }
    if (partition_rows < 1) fail(ErrorKind::Usage, "partition_rows must be >= 1");
    if (p != 1 && p != 2) fail(ErrorKind::Usage, "p must be 1 or 2");
    if (synth && synth->d == 0) fail(ErrorKind::Usage, "synth.d must be >= 1");
}

ExperimentConfig parse_experiment_config(std::istream& in, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    SynthSpec synth;
    bool want_synth = false;
    bool algorithms_set = false;
    std::string line;
    std::size_t line_no = 0;

    auto resolve = [&](const std::string& v) {
        std::filesystem::path p(v);
        return (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::Usage, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "name") {
            cfg.name = value;
        } else if (key == "entities") {
            if (value == "synth") {
                want_synth = true;
            } else {
                cfg.entities = resolve(value);
            }
        } else if (key == "relations") {
            cfg.relations = resolve(value);
        } else if (key == "synth.n") {
            synth.n = to_count(key, value);
        } else if (key == "synth.d") {
            synth.d = to_count(key, value);
        } else if (key == "synth.relations") {
            synth.relations = to_count(key, value);
        } else if (key == "synth.dist") {
            synth.distribution = parse_distribution(value);
        } else if (key == "synth.seed") {
            synth.seed = to_count(key, value);
        } else if (key == "synth.relation_scale") {
            synth.relation_scale = to_double(key, value);
        } else if (key == "algorithms") {
            algorithms_set = true;
            cfg.algorithms.clear();
            for (const auto& a : split_list(value)) cfg.algorithms.push_back(parse_algorithm(a));
        } else if (key == "eps") {
            cfg.eps.clear();
            for (const auto& v : split_list(value)) cfg.eps.push_back(to_double(key, v));
        } else if (key == "fractions") {
            cfg.fractions.clear();
            for (const auto& v : split_list(value)) cfg.fractions.push_back(to_double(key, v));
        } else if (key == "group_sizes") {
            cfg.group_sizes.clear();
            for (const auto& v : split_list(value)) cfg.group_sizes.push_back(to_count(key, v));
        } else if (key == "partition_rows") {
            cfg.partition_rows = to_count(key, value);
        } else if (key == "p") {
            cfg.p = static_cast<int>(to_count(key, value));
        } else if (key == "pivot") {
            cfg.pivot = parse_pivot_kind(value);
        } else if (key == "exclude_self") {
            cfg.exclude_self = to_bool(key, value);
        } else if (key == "seed") {
            cfg.seed = to_count(key, value);
        } else if (key == "threads") {
            cfg.threads = static_cast<unsigned>(to_count(key, value));
        } else if (key == "quickjoin.small_threshold") {
            cfg.quickjoin.small_threshold = to_count(key, value);
        } else if (key == "quickjoin.max_depth") {
            cfg.quickjoin.max_depth = to_count(key, value);
        } else if (key == "quickjoin.seed") {
            cfg.quickjoin.rng_seed = to_count(key, value);
        } else {
            fail(ErrorKind::Usage, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (want_synth) cfg.synth = synth;
    if (!algorithms_set) fail(ErrorKind::Usage, "experiment config has no 'algorithms' key");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    return parse_experiment_config(in, path.parent_path());
}

// ---------------------------------------------------------------------------
// Reports

void BenchReport::write_tsv(std::ostream& out, bool time_breakdown) const {
    out << "dataset\talgorithm\teps\tentity_fraction\tmax_group_size\tpartition_rows"
           "\tcandidate_pairs\ttriples\twall_ms";
    if (time_breakdown) out << "\tpreprocess_ms\tjoin_ms";
    out << '\n';
    auto opt = [](std::size_t v) { return v == 0 ? std::string("-") : std::to_string(v); };
    for (const auto& r : records) {
        out << r.dataset << '\t' << to_string(r.algorithm) << '\t' << r.eps << '\t' << r.fraction
            << '\t' << opt(r.max_group_size) << '\t' << opt(r.partition_rows) << '\t'
            << r.candidate_pairs << '\t' << r.triples << '\t' << std::fixed << std::setprecision(3)
            << r.wall_ms;
        if (time_breakdown) out << '\t' << r.preprocess_ms << '\t' << r.join_ms;
        out << std::defaultfloat << std::setprecision(6) << '\n';
    }
}

void BenchReport::write_table(std::ostream& out) const {
    char line[256];
    std::snprintf(line, sizeof(line), "%-14s %-18s %9s %6s %9s %9s %14s %12s %11s\n", "dataset",
                  "algorithm", "eps", "frac", "group", "part", "candidates", "triples", "wall_ms");
    out << line;
    for (const auto& r : records) {
        const std::string g = r.max_group_size ? std::to_string(r.max_group_size) : "-";
        const std::string p = r.partition_rows ? std::to_string(r.partition_rows) : "-";
        std::snprintf(line, sizeof(line), "%-14s %-18s %9.4g %6.2f %9s %9s %14llu %12llu %11.1f\n",
                      r.dataset.c_str(), to_string(r.algorithm), r.eps, r.fraction, g.c_str(),
                      p.c_str(), static_cast<unsigned long long>(r.candidate_pairs),
                      static_cast<unsigned long long>(r.triples), r.wall_ms);
        out << line;
    }
}

// ---------------------------------------------------------------------------
// Running

namespace {

using Clock = std::chrono::steady_clock;

struct Dataset {
    EmbeddingMatrix entities;
    EmbeddingMatrix relations;
};

Dataset load_dataset(const ExperimentConfig& cfg) {
    if (cfg.synth) {
        const SynthSpec& s = *cfg.synth;
        Dataset ds{generate_synthetic(s.n, s.d, s.distribution, s.seed),
                   generate_synthetic(s.relations, s.d, SyntheticDistribution::Uniform,
                                      s.seed + 0x5151)};
        for (auto& v : ds.relations.mutable_data()) v = static_cast<float>(v * s.relation_scale);
        return ds;
    }
    return {load_matrix(cfg.entities), load_matrix(cfg.relations)};
}

std::string describe_diff(const std::vector<Triple>& expected, const std::vector<Triple>& got,
                          const std::string& expected_name, const std::string& got_name) {
    std::vector<Triple> only_expected, only_got;
    std::set_difference(expected.begin(), expected.end(), got.begin(), got.end(),
                        std::back_inserter(only_expected));
    std::set_difference(got.begin(), got.end(), expected.begin(), expected.end(),
                        std::back_inserter(only_got));
    std::ostringstream os;
    os << got_name << " differs from " << expected_name << ": " << only_expected.size()
       << " missing, " << only_got.size() << " extra\n";
    std::size_t shown = 0;
    for (const auto& t : only_expected) {
        if (shown++ == 20) break;
        os << "  missing " << t.head << '\t' << t.rel << '\t' << t.tail << '\n';
    }
    for (const auto& t : only_got) {
        if (shown++ >= 20) break;
        os << "  extra   " << t.head << '\t' << t.rel << '\t' << t.tail << '\n';
    }
    return os.str();
}

}  // namespace

BenchReport run_experiment(const ExperimentConfig& config, const RunOptions& opts) {
    config.validate();
    const Dataset full = load_dataset(config);
    const MetricModel model{ModelKind::TransE, config.p};
    model.validate();

    BenchReport report;
    for (double fraction : config.fractions) {
        const EmbeddingMatrix entities =
            fraction >= 1.0 ? full.entities : subsample_entities(full.entities, fraction, config.seed);

        for (double eps : config.eps) {
            std::optional<std::vector<Triple>> reference;
            std::string reference_name;

            auto finish = [&](BenchRecord rec, std::vector<ResultTriple> results, std::string name) {
                if (config.exclude_self && (rec.algorithm == Algorithm::Naive ||
                                            rec.algorithm == Algorithm::Quickjoin)) {
                    std::erase_if(results, [](const ResultTriple& r) { return r.head == r.tail; });
                }
                rec.triples = results.size();
                if (opts.log) {
                    *opts.log << config.name << " " << name << " eps=" << eps
                              << " fraction=" << fraction << " triples=" << rec.triples
                              << " wall_ms=" << rec.wall_ms << '\n';
                }
                if (opts.verify) {
                    auto keys = triple_set(results);
                    if (!reference) {
                        reference = std::move(keys);
                        reference_name = name;
                    } else if (keys != *reference) {
                        fail(ErrorKind::Verification,
                             describe_diff(*reference, keys, reference_name, name));
                    }
                }
                report.records.push_back(std::move(rec));
            };

            for (Algorithm alg : config.algorithms) {
                BenchRecord base;
                base.dataset = config.name;
                base.algorithm = alg;
                base.eps = eps;
                base.fraction = fraction;

                if (alg == Algorithm::Pivot || alg == Algorithm::PivotPartitioned) {
                    for (std::size_t g : config.group_sizes) {
                        JoinConfig jc;
                        jc.eps = eps;
                        jc.max_group_size = g;
                        jc.partition_rows = config.partition_rows;
                        jc.exclude_self = config.exclude_self;
                        jc.pivot_kind = config.pivot;
                        jc.threads = config.threads;
                        BenchRecord rec = base;
                        rec.max_group_size = g;
                        if (alg == Algorithm::PivotPartitioned) rec.partition_rows = config.partition_rows;

                        const auto t0 = Clock::now();
                        JoinStats stats;
                        CompletionEngine engine(entities, model, jc);
                        auto results = alg == Algorithm::Pivot
                                           ? engine.complete_all(full.relations, &stats)
                                           : engine.complete_all_partitioned(full.relations, &stats);
                        rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
                        rec.candidate_pairs = stats.candidate_pairs;
                        rec.preprocess_ms = stats.preprocess_ms;
                        rec.join_ms = stats.join_ms;
                        finish(std::move(rec), std::move(results),
                               std::string(to_string(alg)) + "[g=" + std::to_string(g) + "]");
                    }
                    continue;
                }

                BenchRecord rec = base;
                const auto t0 = Clock::now();
                std::vector<ResultTriple> results;
                if (alg == Algorithm::Naive) {
                    NaiveOptions no;
                    no.threads = config.threads;
                    results = naive_join(entities, full.relations, model, eps, no);
                    rec.candidate_pairs = static_cast<std::uint64_t>(entities.rows()) *
                                          entities.rows() * full.relations.rows();
                } else {
                    results = quickjoin_complete_all(entities, full.relations, model, eps,
                                                     config.quickjoin);
                }
                rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
                rec.join_ms = rec.wall_ms;
                finish(std::move(rec), std::move(results), to_string(alg));
            }
        }
    }
    return report;
}

}  // namespace kgcjoin
