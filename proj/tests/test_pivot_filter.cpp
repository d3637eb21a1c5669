#include <gtest/gtest.h>

#include <random>

#include "kgcjoin/error.hpp"
#include "kgcjoin/pivot_filter.hpp"
#include "support/oracles.hpp"

namespace kgcjoin {
namespace {

void expect_matches_oracle(const std::vector<double>& sa, const std::vector<double>& sb,
                           double eps) {
    const RangeTable t = compute_range(sa, sb, eps);
    const auto want = testing::ref_ranges(sa, sb, eps);
    ASSERT_EQ(t.size(), sa.size());
    std::int64_t prev_s = -1, prev_e = -1;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        ASSERT_EQ(t.empty_at(i), want[i].empty) << "row " << i;
        if (want[i].empty) continue;
        ASSERT_EQ(t.s[i], want[i].s) << "row " << i;
        ASSERT_EQ(t.e[i], want[i].e) << "row " << i;
        ASSERT_GE(t.s[i], prev_s);
        ASSERT_GE(t.e[i], prev_e);
        prev_s = t.s[i];
        prev_e = t.e[i];
    }
}

TEST(ComputeRange, HandExample) {
    const std::vector<double> sa{1.0, 2.0, 5.0};
    const std::vector<double> sb{0.5, 1.4, 2.1, 2.9, 9.0};
    const RangeTable t = compute_range(sa, sb, 0.5);
    EXPECT_EQ(t.s[0], 0);
    EXPECT_EQ(t.e[0], 1);
    EXPECT_EQ(t.s[1], 2);
    EXPECT_EQ(t.e[1], 2);
    EXPECT_TRUE(t.empty_at(2));
    EXPECT_EQ(t.candidate_count(), 3u);
}

TEST(ComputeRange, EmptySides) {
    EXPECT_EQ(compute_range({}, std::vector<double>{1.0}, 1.0).size(), 0u);
    const RangeTable t = compute_range(std::vector<double>{1.0, 2.0}, {}, 1.0);
    EXPECT_TRUE(t.empty_at(0));
    EXPECT_TRUE(t.empty_at(1));
}

TEST(ComputeRange, ExactBoundaryIncluded) {
    const std::vector<double> sa{1.0};
    const std::vector<double> sb{0.75, 1.25, 1.5};
    const RangeTable t = compute_range(sa, sb, 0.25);
    EXPECT_EQ(t.s[0], 0);
    EXPECT_EQ(t.e[0], 1);
}

TEST(ComputeRange, Errors) {
    const std::vector<double> ok{0.0, 1.0};
    const std::vector<double> bad{1.0, 0.0};
    auto kind = [](auto fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Usage;
    };
    EXPECT_EQ(kind([&] { compute_range(ok, ok, -1.0); }), ErrorKind::Parameter);
    EXPECT_EQ(kind([&] { compute_range(ok, ok, std::nan("")); }), ErrorKind::Parameter);
    EXPECT_EQ(kind([&] { compute_range(bad, ok, 1.0); }), ErrorKind::Precondition);
    EXPECT_EQ(kind([&] { compute_range(ok, bad, 1.0); }), ErrorKind::Precondition);
}

// Random sorted lists, including heavy ties and values that sit exactly eps
// apart, against the O(mn) scan.
TEST(ComputeRange, RandomAgainstBruteForce) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = rng() % 60;
        const std::size_t n = rng() % 60;
        const bool gridded = trial % 3 == 0;
        std::uniform_real_distribution<double> u(0.0, 10.0);
        auto draw = [&] { return gridded ? static_cast<double>(rng() % 20) * 0.25 : u(rng); };
        std::vector<double> sa(m), sb(n);
        for (auto& v : sa) v = draw();
        for (auto& v : sb) v = draw();
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        const double eps = gridded ? 0.25 * static_cast<double>(rng() % 5) : u(rng) * 0.3;
        expect_matches_oracle(sa, sb, eps);
    }
}

TEST(PivotDistances, MatchOracleAndDimensionCheck) {
    const auto x = testing::random_matrix(40, 9, 4);
    const std::vector<float> pivot(9, 0.25f);
    for (int p : {1, 2}) {
        const auto d = pivot_distances(x, pivot, p);
        for (std::size_t i = 0; i < 40; ++i) {
            EXPECT_NEAR(d[i], testing::ref_dist(pivot, x.row(i), p), 1e-12);
        }
    }
    EXPECT_THROW(pivot_distances(x, std::vector<float>(8, 0.0f), 2), Error);
}

TEST(SortSide, StableAndConsistent) {
    const auto x = testing::random_matrix(6, 2, 5);
    const std::vector<double> d{3.0, 1.0, 2.0, 1.0, 0.0, 3.0};
    const SortedSide s = sort_side(x, d);
    EXPECT_EQ(s.perm, (std::vector<std::uint32_t>{4, 1, 3, 2, 0, 5}));
    EXPECT_EQ(s.sorted_pivot_dist, (std::vector<double>{0.0, 1.0, 1.0, 2.0, 3.0, 3.0}));
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_TRUE(std::equal(s.reordered.row(i).begin(), s.reordered.row(i).end(),
                               x.row(s.perm[i]).begin()));
    }
}

}  // namespace
}  // namespace kgcjoin
