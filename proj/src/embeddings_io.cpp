#include "kgcjoin/embeddings_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "kgcjoin/error.hpp"

namespace kgcjoin {

// ---------------------------------------------------------------------------
// EmbeddingMatrix

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data,
                                 std::vector<std::string> labels)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows * dim) {
        fail(ErrorKind::Length, "matrix payload has " + std::to_string(data_.size()) +
                                    " values, expected " + std::to_string(rows * dim));
    }
    if (!labels.empty()) set_labels(std::move(labels));
}

void EmbeddingMatrix::set_labels(std::vector<std::string> labels) {
    if (labels.empty()) {
        labels_.clear();
        return;
    }
    if (labels.size() != rows_) {
        fail(ErrorKind::Data, "label count " + std::to_string(labels.size()) +
                                  " does not match row count " + std::to_string(rows_));
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(labels.size());
    for (const auto& l : labels) {
        if (!seen.insert(l).second) fail(ErrorKind::Data, "duplicate label '" + l + "'");
    }
    labels_ = std::move(labels);
}

EmbeddingMatrix EmbeddingMatrix::gather(std::span<const std::uint32_t> idx) const {
    EmbeddingMatrix out(idx.size(), dim_);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        std::copy_n(row_ptr(idx[k]), dim_, out.data_.data() + k * dim_);
    }
    if (has_labels()) {
        std::vector<std::string> labels;
        labels.reserve(idx.size());
        for (auto i : idx) labels.push_back(labels_[i]);
        out.labels_ = std::move(labels);
    }
    return out;
}

bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.rows_ == b.rows_ && a.dim_ == b.dim_ && a.labels_ == b.labels_ &&
           (a.data_.empty() ||
            std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0);
}

// ---------------------------------------------------------------------------
// Matrix files

namespace {

constexpr std::string_view kMagic = "kgj1";

std::uint32_t byteswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

void to_little_endian(std::span<float> values) {
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& f : values) f = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(f)));
    }
}

std::filesystem::path labels_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".labels";
    return p;
}

void check_finite(std::span<const float> values, const std::filesystem::path& path) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) {
            fail(ErrorKind::Data, path.string() + ": non-finite value at flat index " +
                                      std::to_string(k));
        }
    }
}

std::size_t parse_count(std::string_view token, const std::filesystem::path& path) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
        fail(ErrorKind::Format, path.string() + ": bad header field '" + std::string(token) + "'");
    }
    return v;
}

EmbeddingMatrix load_binary(std::ifstream& in, const std::filesystem::path& path) {
    std::string header;
    if (!std::getline(in, header)) fail(ErrorKind::Format, path.string() + ": missing header");
    std::istringstream hs(header);
    std::string magic, rows_tok, dim_tok, extra;
    hs >> magic >> rows_tok >> dim_tok;
    if (magic != kMagic || rows_tok.empty() || dim_tok.empty() || (hs >> extra)) {
        fail(ErrorKind::Format, path.string() + ": malformed kgj1 header '" + header + "'");
    }
    const std::size_t rows = parse_count(rows_tok, path);
    const std::size_t dim = parse_count(dim_tok, path);
    if (dim == 0) fail(ErrorKind::Format, path.string() + ": dim must be positive");

    const std::size_t count = rows * dim;
    if (dim != 0 && count / dim != rows) fail(ErrorKind::Format, path.string() + ": header overflow");

    const auto payload_start = in.tellg();
    in.seekg(0, std::ios::end);
    const auto payload_bytes = static_cast<std::uint64_t>(in.tellg() - payload_start);
    in.seekg(payload_start);
    if (payload_bytes != count * sizeof(float)) {
        fail(ErrorKind::Length, path.string() + ": payload has " + std::to_string(payload_bytes) +
                                    " bytes, header implies " +
                                    std::to_string(count * sizeof(float)));
    }

    std::vector<float> data(count);
    if (count > 0 && !in.read(reinterpret_cast<char*>(data.data()),
                              static_cast<std::streamsize>(count * sizeof(float)))) {
        fail(ErrorKind::Length, path.string() + ": truncated payload");
    }
    to_little_endian(data);  // symmetric: little-endian file -> native
    check_finite(data, path);
    return EmbeddingMatrix(rows, dim, std::move(data));
}

EmbeddingMatrix load_tsv(std::ifstream& in, const std::filesystem::path& path) {
    std::vector<float> data;
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t fields = 0;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const auto tab = line.find('\t', pos);
            const auto end = tab == std::string::npos ? line.size() : tab;
            const std::string field = line.substr(pos, end - pos);
            char* parse_end = nullptr;
            const float v = std::strtof(field.c_str(), &parse_end);
            if (field.empty() || parse_end != field.c_str() + field.size()) {
                fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) +
                                            ": bad value '" + field + "'");
            }
            data.push_back(v);
            ++fields;
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (rows == 0) {
            dim = fields;
        } else if (fields != dim) {
            fail(ErrorKind::Length, path.string() + ":" + std::to_string(line_no) + ": row has " +
                                        std::to_string(fields) + " values, expected " +
                                        std::to_string(dim));
        }
        ++rows;
    }
    check_finite(data, path);
    return EmbeddingMatrix(rows, dim, std::move(data));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace

EmbeddingMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());

    char head[5] = {};
    in.read(head, 5);
    const bool binary = in.gcount() == 5 && std::string_view(head, 4) == kMagic &&
                        (head[4] == ' ' || head[4] == '\t');
    in.clear();
    in.seekg(0);

    EmbeddingMatrix m = binary ? load_binary(in, path) : load_tsv(in, path);

    const auto lp = labels_path(path);
    if (std::filesystem::exists(lp)) m.set_labels(read_lines(lp));
    return m;
}

void save_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << kMagic << ' ' << m.rows() << ' ' << m.dim() << '\n';
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(m.data().data()),
                  static_cast<std::streamsize>(m.data().size() * sizeof(float)));
    } else {
        std::vector<float> le(m.data().begin(), m.data().end());
        to_little_endian(le);
        out.write(reinterpret_cast<const char*>(le.data()),
                  static_cast<std::streamsize>(le.size() * sizeof(float)));
    }
    if (!out) fail(ErrorKind::Io, "write failed: " + path.string());

    const auto lp = labels_path(path);
    if (m.has_labels()) {
        std::ofstream lo(lp, std::ios::trunc);
        for (const auto& l : m.labels()) lo << l << '\n';
        if (!lo) fail(ErrorKind::Io, "write failed: " + lp.string());
    } else if (std::filesystem::exists(lp)) {
        std::filesystem::remove(lp);
    }
}

void save_matrix_tsv(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            // Shortest form that round-trips the float exactly.
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), row[k]);
            (void)ec;
            if (k) out << '\t';
            out.write(buf, end - buf);
        }
        out << '\n';
    }
    if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Triples

TripleList load_triples(const std::filesystem::path& path) {
    TripleList triples;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
        ++line_no;
        if (line.empty()) continue;
        std::uint32_t ids[3];
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) {
            const auto end = k < 2 ? line.find('\t', pos) : line.size();
            if (end == std::string::npos) {
                fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) +
                                            ": expected 3 tab-separated ids");
            }
            auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, ids[k]);
            if (ec != std::errc{} || ptr != line.data() + end || end == pos) {
                fail(ErrorKind::Format,
                     path.string() + ":" + std::to_string(line_no) + ": bad id");
            }
            pos = end + 1;
        }
        triples.push_back({ids[0], ids[1], ids[2]});
    }
    return triples;
}

void save_triples(const TripleList& triples, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    for (const auto& t : triples) out << t.head << '\t' << t.rel << '\t' << t.tail << '\n';
    if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

void check_triple_bounds(const TripleList& triples, std::size_t entities,
                         std::size_t relations) {
    for (std::size_t k = 0; k < triples.size(); ++k) {
        const auto& t = triples[k];
        if (t.head >= entities || t.tail >= entities || t.rel >= relations) {
            fail(ErrorKind::Data, "triple " + std::to_string(k) + " (" +
                                      std::to_string(t.head) + ", " + std::to_string(t.rel) +
                                      ", " + std::to_string(t.tail) + ") out of bounds");
        }
    }
}

// ---------------------------------------------------------------------------
// Subsampling and synthetic data

namespace {

// Unbiased bounded draw; std::uniform_int_distribution is not portable
// across standard libraries, and selections must be reproducible.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on the raw engine, for the same reason as bounded().
double standard_normal(std::mt19937_64& rng) {
    double u1;
    do {
        u1 = unit(rng);
    } while (u1 <= 0.0);
    const double u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

std::vector<std::uint32_t> subsample_indices(std::size_t rows, double fraction,
                                             std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0) {
        fail(ErrorKind::Parameter, "fraction must be in (0, 1], got " + std::to_string(fraction));
    }
    std::vector<std::uint32_t> idx(rows);
    std::iota(idx.begin(), idx.end(), 0u);
    auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(rows)));
    keep = std::min(keep, rows);
    if (keep == rows) return idx;

    std::mt19937_64 rng(seed);
    for (std::size_t i = rows; i > 1; --i) {
        std::swap(idx[i - 1], idx[bounded(rng, i)]);
    }
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    return idx;
}

EmbeddingMatrix subsample_entities(const EmbeddingMatrix& entities, double fraction,
                                   std::uint64_t seed) {
    const auto idx = subsample_indices(entities.rows(), fraction, seed);
    return entities.gather(idx);
}

EmbeddingMatrix generate_synthetic(std::size_t n, std::size_t d,
                                   SyntheticDistribution distribution, std::uint64_t seed) {
    if (d == 0) fail(ErrorKind::Parameter, "d must be >= 1");
    EmbeddingMatrix m(n, d);
    std::mt19937_64 rng(seed);
    auto values = m.mutable_data();

    if (distribution == SyntheticDistribution::Uniform) {
        for (auto& v : values) v = static_cast<float>(unit(rng));
        return m;
    }

    constexpr double kSigma = 0.05;
    const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::vector<double> centers(k * d);
    for (auto& c : centers) c = unit(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = bounded(rng, k);
        for (std::size_t j = 0; j < d; ++j) {
            values[i * d + j] =
                static_cast<float>(centers[c * d + j] + kSigma * standard_normal(rng));
        }
    }
    return m;
}

SyntheticDistribution parse_distribution(const std::string& name) {
    if (name == "uniform") return SyntheticDistribution::Uniform;
    if (name == "clustered") return SyntheticDistribution::Clustered;
    fail(ErrorKind::Parameter, "unknown distribution '" + name + "' (uniform|clustered)");
}

}  // namespace kgcjoin
