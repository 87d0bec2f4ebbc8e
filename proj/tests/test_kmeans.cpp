#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "chimera/error.hpp"
#include "chimera/kmeans.hpp"
#include "chimera/rng.hpp"

using namespace chimera;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VpsMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
    VpsMatrix m;
    m.rows = static_cast<uint32_t>(rows.size());
    m.len = rows.empty() ? 0 : static_cast<uint32_t>(rows[0].size());
    for (const auto& r : rows) m.data.insert(m.data.end(), r.begin(), r.end());
    return m;
}

VpsMatrix three_blobs(int per_blob, uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    const double centers[3][2] = {{0, 0}, {20, 0}, {0, 20}};
    for (const auto& c : centers)
        for (int i = 0; i < per_blob; ++i)
            rows.push_back({c[0] + rng.uniform(-1, 1), c[1] + rng.uniform(-1, 1)});
    return matrix_of(rows);
}

} // namespace

TEST_SUITE("kmeans") {

TEST_CASE("two separated doublets split cleanly at k=2") {
    const VpsMatrix vm =
        matrix_of({{0, 0}, {0.1, 0}, {10, 10}, {10.1, 10}});
    const Clustering cl = kmeans_cluster(vm, 2, 5, 4);
    REQUIRE(cl.labels.size() == 4);
    CHECK(cl.labels[0] == cl.labels[1]);
    CHECK(cl.labels[2] == cl.labels[3]);
    CHECK(cl.labels[0] != cl.labels[2]);
    CHECK(cl.inertia == doctest::Approx(0.01).epsilon(1e-9)); // 4 * (0.05)^2
    CHECK(cl.k == 2);
}

TEST_CASE("k=1 returns the mean and the total scatter") {
    const VpsMatrix vm = matrix_of({{0, 0}, {2, 0}, {4, 6}});
    const Clustering cl = kmeans_cluster(vm, 1, 1, 1);
    REQUIRE(cl.centroids.size() == 1);
    CHECK(cl.centroids[0][0] == doctest::Approx(2.0));
    CHECK(cl.centroids[0][1] == doctest::Approx(2.0));
    double want = 0.0;
    for (int r = 0; r < 3; ++r) {
        const auto row = vm.row(r);
        want += (row[0] - 2) * (row[0] - 2) + (row[1] - 2) * (row[1] - 2);
    }
    CHECK(cl.inertia == doctest::Approx(want).epsilon(1e-12));
    for (int lbl : cl.labels) CHECK(lbl == 0);
}

TEST_CASE("duplicate rows always share a label") {
    const VpsMatrix vm = matrix_of({{0, 0}, {5, 5}, {0, 0}, {5, 5}, {0, 0}});
    const Clustering cl = kmeans_cluster(vm, 2, 9, 3);
    CHECK(cl.labels[0] == cl.labels[2]);
    CHECK(cl.labels[0] == cl.labels[4]);
    CHECK(cl.labels[1] == cl.labels[3]);
    CHECK(cl.inertia == doctest::Approx(0.0));
}

TEST_CASE("k beyond the distinct row count is rejected") {
    const VpsMatrix vm = matrix_of({{0, 0}, {0, 0}, {1, 1}, {1, 1}, {2, 2}});
    CHECK(count_distinct_rows(vm) == 3);
    CHECK_THROWS_AS(kmeans_cluster(vm, 4, 1, 1), ArgumentError);
    CHECK_NOTHROW(kmeans_cluster(vm, 3, 1, 1));
    CHECK_THROWS_AS(kmeans_cluster(vm, 0, 1, 1), ArgumentError);
    CHECK_THROWS_AS(kmeans_cluster(vm, 1, 1, 0), ArgumentError);
}

TEST_CASE("negative zero and positive zero rows are the same row") {
    const VpsMatrix vm = matrix_of({{0.0, 1.0}, {-0.0, 1.0}, {3.0, 4.0}});
    CHECK(count_distinct_rows(vm) == 2);
}

TEST_CASE("sentinel rows are excluded and labeled -1") {
    VpsMatrix vm = matrix_of({{0, 0}, {kInf, kInf}, {10, 10}, {kInf, kInf}, {0.2, 0}});
    CHECK(count_distinct_rows(vm) == 3);
    const Clustering cl = kmeans_cluster(vm, 2, 3, 3);
    CHECK(cl.labels[1] == -1);
    CHECK(cl.labels[3] == -1);
    CHECK(cl.labels[0] >= 0);
    CHECK(cl.labels[0] == cl.labels[4]);
    CHECK(cl.labels[0] != cl.labels[2]);
}

TEST_CASE("clustering is seed-deterministic") {
    const VpsMatrix vm = three_blobs(40, 77);
    const Clustering a = kmeans_cluster(vm, 3, 1234, 5);
    const Clustering b = kmeans_cluster(vm, 3, 1234, 5);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("reported inertia matches a recomputation from labels") {
    const VpsMatrix vm = three_blobs(30, 5);
    const Clustering cl = kmeans_cluster(vm, 3, 42, 4);
    double recomputed = 0.0;
    for (uint32_t r = 0; r < vm.rows; ++r) {
        const auto row = vm.row(r);
        const auto& c = cl.centroids[static_cast<size_t>(cl.labels[r])];
        for (uint32_t j = 0; j < vm.len; ++j)
            recomputed += (row[j] - c[j]) * (row[j] - c[j]);
    }
    CHECK(cl.inertia == doctest::Approx(recomputed).epsilon(1e-9));
}

TEST_CASE("elbow finds three blobs") {
    const VpsMatrix vm = three_blobs(30, 99);
    const ElbowResult er = select_k_elbow(vm, 8, 2024, 3);
    CHECK(er.k == 3);
    CHECK(er.k_max_used == 8);
    CHECK(er.inertia_curve.size() == 8);
    CHECK(er.warnings.empty());
}

TEST_CASE("inertia curve is non-increasing with generous restarts") {
    const VpsMatrix vm = three_blobs(25, 3);
    const ElbowResult er = select_k_elbow(vm, 6, 11, 20);
    for (size_t i = 1; i < er.inertia_curve.size(); ++i)
        CHECK(er.inertia_curve[i] <= er.inertia_curve[i - 1] + 1e-9);
}

TEST_CASE("elbow caps k_max at the distinct row count") {
    const VpsMatrix two = matrix_of({{0, 0}, {0, 0}, {9, 9}, {9, 9}});
    const ElbowResult er = select_k_elbow(two, 8, 7, 3);
    CHECK(er.k == 2);
    CHECK(er.k_max_used == 2);
    CHECK(!er.warnings.empty());

    CHECK_THROWS_AS(select_k_elbow(two, 2, 7, 3), ArgumentError); // k_max must be >= 3
}

TEST_CASE("all rows sentinel cannot be clustered") {
    const VpsMatrix vm = matrix_of({{kInf, kInf}, {kInf, kInf}});
    CHECK(count_distinct_rows(vm) == 0);
    CHECK_THROWS_AS(kmeans_cluster(vm, 1, 1, 1), ArgumentError);
}

} // TEST_SUITE
