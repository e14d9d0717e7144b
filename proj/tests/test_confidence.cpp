#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cgclab/confidence.hpp"
#include "cgclab/errors.hpp"
#include "cgclab/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cgclab;

namespace {

ClusterAssignment make_assignment(std::vector<int> labels, int num_clusters) {
    return ClusterAssignment{std::move(labels), num_clusters};
}

Matrix unit_circle(std::initializer_list<double> angles) {
    Matrix m(angles.size(), 2);
    std::size_t i = 0;
    for (double a : angles) {
        m(i, 0) = std::cos(a);
        m(i, 1) = std::sin(a);
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("intra_distance on reference clusters") {
    SUBCASE("two identical points") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}});
        const auto assign = make_assignment({0, 0}, 1);
        CHECK(intra_distance(0, assign, f) == doctest::Approx(0.0));
    }
    SUBCASE("orthogonal pair both distances 1") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}});
        const auto assign = make_assignment({0, 0, 0}, 1);
        CHECK(intra_distance(1, assign, f) == doctest::Approx(1.0));
    }
    SUBCASE("single orthogonal neighbor") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
        const auto assign = make_assignment({0, 0}, 1);
        CHECK(intra_distance(0, assign, f) == doctest::Approx(1.0));
    }
    SUBCASE("singleton cluster throws") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}});
        const auto assign = make_assignment({0, 1, 1}, 2);
        CHECK_THROWS_AS(intra_distance(0, assign, f), SingletonCluster);
    }
}

TEST_CASE("nearest_other_distance on reference clusters") {
    SUBCASE("one other cluster") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}});
        const auto assign = make_assignment({0, 0, 1, 1}, 2);
        CHECK(nearest_other_distance(0, assign, f) == doctest::Approx(1.0));
    }
    SUBCASE("minimum over two other clusters") {
        // i = (1,0); cluster B at (0,1) mean distance 1, cluster C at (-1,0)
        // mean distance 2 -> b_i = 1.
        const Matrix f = Matrix::from_rows(
            {{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {-1.0, 0.0}, {-1.0, 0.0}});
        const auto assign = make_assignment({0, 0, 1, 1, 2, 2}, 3);
        CHECK(nearest_other_distance(0, assign, f) == doctest::Approx(1.0));
    }
    SUBCASE("invariant to relabeling clusters") {
        const Matrix f = Matrix::from_rows(
            {{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {-1.0, 0.0}, {-1.0, 0.0}});
        const auto a = make_assignment({0, 0, 1, 1, 2, 2}, 3);
        const auto b = make_assignment({2, 2, 0, 0, 1, 1}, 3);
        CHECK(nearest_other_distance(0, a, f) == doctest::Approx(nearest_other_distance(0, b, f)));
    }
    SUBCASE("single-cluster partition throws") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}});
        const auto assign = make_assignment({0, 0}, 1);
        CHECK_THROWS_AS(nearest_other_distance(0, assign, f), SingleClusterPartition);
    }
}

TEST_CASE("silhouette on a hand-evaluated 4-point instance") {
    // Sample 0 pairs with sample 1 at cosine distance 0.1 (a_0 = 0.1); the
    // other cluster holds points at 90 degrees and acos(-0.1) from sample 0,
    // so b_0 = (1.0 + 1.1) / 2 = 1.05 and s_0 = 0.95 / 1.05.
    const Matrix f = unit_circle({0.0, std::acos(0.9), std::numbers::pi / 2.0, std::acos(-0.1)});
    const auto assign = make_assignment({0, 0, 1, 1}, 2);
    const auto report = silhouette_scores(assign, f);
    CHECK(report.scores[0] == doctest::Approx(0.95 / 1.05).epsilon(1e-9));
    CHECK(report.scores[0] == doctest::Approx(0.9047619).epsilon(1e-7));

    // The cluster-size denominator divides the same intra sum by |C| instead of |C|-1.
    const auto alt = silhouette_scores(assign, f, SilhouetteDenominator::ClusterSize);
    CHECK(alt.scores[0] == doctest::Approx(1.0 / 1.05).epsilon(1e-9));
}

TEST_CASE("singleton cluster scores 0, outliers are masked") {
    const Matrix f = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {-1.0, 0.0}});
    const auto assign = make_assignment({0, 1, 1, kOutlier}, 2);
    const auto report = silhouette_scores(assign, f);
    CHECK(report.scores[0] == 0.0);  // singleton rule
    CHECK(report.valid_mask[0]);
    CHECK_FALSE(report.valid_mask[3]);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(report.scores[i] >= -1.0);
        CHECK(report.scores[i] <= 1.0);
    }
}

TEST_CASE("single-cluster partition and duplicate points degrade to 0") {
    SUBCASE("one cluster only") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}});
        const auto report = silhouette_scores(make_assignment({0, 0, 0}, 1), f);
        for (double s : report.scores)
            CHECK(s == 0.0);
    }
    SUBCASE("duplicates across clusters give a = b = 0") {
        const Matrix f = Matrix::from_rows({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}});
        const auto report = silhouette_scores(make_assignment({0, 0, 1, 1}, 2), f);
        for (double s : report.scores)
            CHECK(s == 0.0);
    }
}

TEST_CASE("matches the literal transcription oracle on 100 random partitions") {
    Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 8 + rng.uniform_below(33);  // up to 40
        const std::size_t d = 2 + rng.uniform_below(7);   // up to 8
        const Matrix f = testutil::random_unit_rows(n, d, rng);
        const auto assign = testutil::random_partition(n, 5, 0.15, rng);
        const bool alt_denominator = rng.uniform_below(2) == 1;
        const auto den = alt_denominator ? SilhouetteDenominator::ClusterSize : SilhouetteDenominator::Standard;

        const auto report = silhouette_scores(assign, f, den);
        const auto expected = oracle::silhouette(f, assign.labels, assign.num_clusters, alt_denominator);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(std::abs(report.scores[i] - expected[i]) < 1e-9);
            CHECK(report.valid_mask[i] == !assign.is_outlier(i));
            if (report.valid_mask[i]) {
                CHECK(report.scores[i] >= -1.0 - 1e-12);
                CHECK(report.scores[i] <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("swapping two samples of one cluster swaps their scores") {
    Rng rng(77);
    Matrix f = testutil::random_unit_rows(12, 4, rng);
    auto assign = testutil::random_partition(12, 3, 0.0, rng);
    std::size_t a = 0, b = 0;
    for (std::size_t i = 0; i < 12 && b == 0; ++i)
        for (std::size_t j = i + 1; j < 12; ++j)
            if (assign.labels[i] == assign.labels[j]) {
                a = i;
                b = j;
                break;
            }
    REQUIRE(b != 0);

    const auto before = silhouette_scores(assign, f);
    for (std::size_t c = 0; c < f.cols(); ++c)
        std::swap(f(a, c), f(b, c));
    const auto after = silhouette_scores(assign, f);
    CHECK(after.scores[a] == doctest::Approx(before.scores[b]).epsilon(1e-12));
    CHECK(after.scores[b] == doctest::Approx(before.scores[a]).epsilon(1e-12));
    for (std::size_t i = 0; i < 12; ++i)
        if (i != a && i != b)
            CHECK(after.scores[i] == doctest::Approx(before.scores[i]).epsilon(1e-12));
}

TEST_CASE("two tight blobs yield scores above 0.8") {
    Rng rng(88);
    const Matrix f = testutil::random_blobs(2, 12, 8, 0.02, rng);
    ClusterAssignment assign;
    assign.num_clusters = 2;
    assign.labels.assign(24, 0);
    for (std::size_t i = 12; i < 24; ++i)
        assign.labels[i] = 1;
    const auto report = silhouette_scores(assign, f);
    for (std::size_t i = 0; i < 24; ++i)
        CHECK(report.scores[i] > 0.8);
}
