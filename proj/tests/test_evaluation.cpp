#include <gtest/gtest.h>

#include <limits>

#include "kgcjoin/error.hpp"
#include "kgcjoin/evaluation.hpp"
#include "support/oracles.hpp"

namespace kgcjoin {
namespace {

TEST(Top1, SinglePoint) {
    const EmbeddingMatrix e(1, 2, {0.0f, 0.0f});
    const EmbeddingMatrix r(1, 2, {0.0f, 0.0f});
    const auto st = top1_stats(e, r, MetricModel{}, false);
    EXPECT_EQ(st.top1, 0.0);
    EXPECT_EQ(st.argmin, (Triple{0, 0, 0}));
    EXPECT_EQ(top1_stats(e, r, MetricModel{}, true).top1, std::numeric_limits<double>::infinity());
}

TEST(Top1, MatchesTripleLoopAndExclusionOrdering) {
    const auto e = testing::random_matrix(40, 6, 1, -1.0f, 1.0f);
    const auto r = testing::random_matrix(3, 6, 2, -0.5f, 0.5f);
    for (int p : {1, 2}) {
        for (bool excl : {false, true}) {
            double best = std::numeric_limits<double>::infinity();
            Triple at;
            for (std::uint32_t rel = 0; rel < 3; ++rel) {
                for (std::uint32_t h = 0; h < 40; ++h) {
                    for (std::uint32_t t = 0; t < 40; ++t) {
                        if (excl && h == t) continue;
                        const double v = testing::ref_dist3(e.row(h), r.row(rel), e.row(t), p);
                        if (v < best) {
                            best = v;
                            at = {h, rel, t};
                        }
                    }
                }
            }
            const auto st = top1_stats(e, r, MetricModel{ModelKind::TransE, p}, excl);
            EXPECT_NEAR(st.top1, best, 1e-12);
            EXPECT_EQ(st.argmin, at);
        }
        EXPECT_GE(top1_stats(e, r, MetricModel{ModelKind::TransE, p}, true).top1,
                  top1_stats(e, r, MetricModel{ModelKind::TransE, p}, false).top1);
    }
}

TEST(Top1, DimensionRanges) {
    const EmbeddingMatrix e(3, 2, {0.0f, 5.0f, 2.0f, -1.0f, 1.0f, 0.0f});
    const auto st = top1_stats(e, EmbeddingMatrix(1, 2), MetricModel{}, false);
    EXPECT_EQ(st.dimension_ranges, (std::vector<double>{2.0, 6.0}));
    EXPECT_EQ(st.max_range, 6.0);
}

// One-dimensional entities 0, 1, 2, 3, 10 and relations +1, +0.5, so every
// distance is an exact |h + r - t|. Ranks per (test triple, side):
//   (0,0,1)  tail 1, head 1
//   (2,1,0)  tail 4 -> 3 after filtering (2,1,3); head 3 -> 2 after (1,1,0)
//   (3,0,4)  tail 5, head 2
//   (1,1,2)  tail 2 (tie with entity 1), head 2 (tie with entity 2)
TEST(RankMetrics, HandComputedInstance) {
    const EmbeddingMatrix e(5, 1, {0.0f, 1.0f, 2.0f, 3.0f, 10.0f});
    const EmbeddingMatrix r(2, 1, {1.0f, 0.5f});
    const TripleList test{{0, 0, 1}, {2, 1, 0}, {3, 0, 4}, {1, 1, 2}};
    TripleList total = test;
    total.push_back({2, 1, 3});
    total.push_back({1, 1, 0});
    const auto m = filtered_rank_metrics(e, r, MetricModel{}, test, total);
    const double rr = 1.0 + 1.0 + 1.0 / 3 + 1.0 / 2 + 1.0 / 5 + 1.0 / 2 + 1.0 / 2 + 1.0 / 2;
    EXPECT_DOUBLE_EQ(m.mrr, rr / 8);
    EXPECT_DOUBLE_EQ(m.mrr, 17.0 / 30.0);
    EXPECT_DOUBLE_EQ(m.hits1, 2.0 / 8);
    EXPECT_DOUBLE_EQ(m.hits3, 7.0 / 8);
    EXPECT_DOUBLE_EQ(m.hits10, 1.0);

    // Unfiltered: the two filtered entries fall back to 4 and 3.
    const auto raw = filtered_rank_metrics(e, r, MetricModel{}, test, test);
    EXPECT_DOUBLE_EQ(raw.mrr, (1.0 + 1.0 + 1.0 / 4 + 1.0 / 3 + 1.0 / 5 + 1.0 / 2 + 1.0 / 2 + 1.0 / 2) / 8);
}

TEST(RankMetrics, UniqueZeroDistanceIsRankOne) {
    const EmbeddingMatrix e(3, 1, {0.0f, 1.0f, 5.0f});
    const EmbeddingMatrix r(1, 1, {1.0f});
    const TripleList test{{0, 0, 1}};
    const auto m = filtered_rank_metrics(e, r, MetricModel{}, test, test);
    EXPECT_EQ(m.mrr, 1.0);
    EXPECT_EQ(m.hits1, 1.0);
    EXPECT_EQ(m.hits10, 1.0);
}

TEST(RankMetrics, SecondOnBothSides) {
    // Tail side: h + r = 1, the truth (entity 2) at 0.5, entity 1 at 0.25.
    // Head side: t = 1.5, |h - 0.5|: the truth (entity 0) at 0.5, entity 1 at 0.25.
    const EmbeddingMatrix e(4, 1, {0.0f, 0.75f, 1.5f, 5.0f});
    const EmbeddingMatrix r(1, 1, {1.0f});
    const TripleList test{{0, 0, 2}};
    const auto m = filtered_rank_metrics(e, r, MetricModel{}, test, test);
    EXPECT_EQ(m.mrr, 0.5);
    EXPECT_EQ(m.hits1, 0.0);
    EXPECT_EQ(m.hits3, 1.0);
}

TEST(RankMetrics, EmptyTestAndBounds) {
    const EmbeddingMatrix e(3, 1, {0.0f, 1.0f, 2.0f});
    const EmbeddingMatrix r(1, 1, {1.0f});
    const auto m = filtered_rank_metrics(e, r, MetricModel{}, {}, {});
    EXPECT_EQ(m.mrr, 0.0);
    EXPECT_THROW(filtered_rank_metrics(e, r, MetricModel{}, {{0, 1, 2}}, {}), Error);
    EXPECT_THROW(filtered_rank_metrics(e, r, MetricModel{}, {{0, 0, 3}}, {}), Error);
}

TEST(RankMetrics, OrderingOnRandomInstances) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng() % 60;
        const auto e = testing::random_matrix(n, 4, rng());
        const auto r = testing::random_matrix(3, 4, rng(), -0.2f, 0.2f);
        TripleList total;
        for (int k = 0; k < 40; ++k) {
            total.push_back({static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % 3),
                             static_cast<std::uint32_t>(rng() % n)});
        }
        const TripleList test(total.begin(), total.begin() + 15);
        const auto m = filtered_rank_metrics(e, r, MetricModel{}, test, total);
        EXPECT_LE(0.0, m.hits1);
        EXPECT_LE(m.hits1, m.hits3);
        EXPECT_LE(m.hits3, m.hits10);
        EXPECT_LE(m.hits10, 1.0);
        EXPECT_GT(m.mrr, 0.0);
        EXPECT_LE(m.mrr, 1.0);
        EXPECT_GE(m.mrr, m.hits1);
    }
}

}  // namespace
}  // namespace kgcjoin
