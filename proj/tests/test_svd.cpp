#include <doctest.h>

#include <cmath>

#include "csc/errors.hpp"
#include "csc/svd_stats.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace csc;

namespace {

// Zero-mean rank-k window built from sinusoidal (zero-sum) factors with
// near-equal mode energies.
Field2D rank_k_window(int n, int k) {
    Field2D w;
    w.nx = n;
    w.ny = n;
    w.values.assign(static_cast<size_t>(n) * n, 0.0);
    w.field_id = "rank" + std::to_string(k);
    for (int mode = 1; mode <= k; ++mode) {
        std::vector<double> u(n), v(n);
        for (int i = 0; i < n; ++i) {
            u[i] = std::cos((2 * i + 1) * mode * std::numbers::pi / (2.0 * n));
            v[i] = std::cos((2 * i + 1) * (mode + k) * std::numbers::pi / (2.0 * n));
        }
        const double amp = 1.0 + 0.05 * mode;  // distinct but same order of magnitude
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) w.at(ix, iy) += amp * u[iy] * v[ix];
        }
    }
    return w;
}

}  // namespace

TEST_SUITE("svdstats") {

TEST_CASE("zero-mean rank-1 window needs one mode") {
    const Field2D w = rank_k_window(16, 1);
    const TruncationLevel level = svd_truncation_level(w, 0.99);
    CHECK(level.k == 1);
    CHECK(level.energy_fraction_at_k >= 0.99);
}

TEST_CASE("2x2 window with singular values {3,1} needs both modes at 0.99") {
    // [[2,1],[-1,-2]] is zero mean with gram eigenvalues {9,1}.
    Field2D w;
    w.nx = 2;
    w.ny = 2;
    w.values = {2.0, 1.0, -1.0, -2.0};
    w.field_id = "s31";
    const std::vector<double> sigma = singular_values(w);
    CHECK(sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sigma[1] == doctest::Approx(1.0).epsilon(1e-12));
    // top-1 energy 9/10 = 0.9 < 0.99 -> k = 2
    const TruncationLevel level = svd_truncation_level(w, 0.99);
    CHECK(level.k == 2);
    CHECK(svd_truncation_level(w, 0.9).k == 1);
}

TEST_CASE("singular values match the Gram-matrix eigenvalue oracle") {
    for (int trial = 0; trial < 6; ++trial) {
        const int nx = trial % 2 ? 32 : 24;
        const int ny = trial % 3 ? 32 : 40;
        const Field2D w = testsupport::white_noise_field(nx, ny, 900 + trial);
        const std::vector<double> got = singular_values(w);
        const std::vector<double> expected = oracles::gram_singular_values(w);
        REQUIRE(got.size() == expected.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("truncation level matches a brute-force scan of the oracle energies") {
    const Field2D w = testsupport::white_noise_field(32, 32, 321);
    Field2D centered = w;
    const double mean = testsupport::field_mean(w);
    for (double& v : centered.values) v -= mean;
    const std::vector<double> sigma = oracles::gram_singular_values(centered);
    double energy = 0.0;
    for (double s : sigma) energy += s * s;
    double cum = 0.0;
    int expected = static_cast<int>(sigma.size());
    for (size_t i = 0; i < sigma.size(); ++i) {
        cum += sigma[i] * sigma[i];
        if (cum / energy >= 0.99) {
            expected = static_cast<int>(i) + 1;
            break;
        }
    }
    CHECK(svd_truncation_level(w, 0.99).k == expected);
}

TEST_CASE("constant window returns k=1 with full energy") {
    const TruncationLevel level = svd_truncation_level(testsupport::constant_field(8, 8, 5.5));
    CHECK(level.k == 1);
    CHECK(level.energy_fraction_at_k == 1.0);
}

TEST_CASE("threshold validation and monotonicity") {
    const Field2D w = testsupport::white_noise_field(16, 16, 7);
    CHECK_THROWS_AS(svd_truncation_level(w, 0.0), parameter_error);
    CHECK_THROWS_AS(svd_truncation_level(w, 1.5), parameter_error);
    int prev = 1 << 20;
    for (double threshold : {1.0, 0.99, 0.9, 0.5, 0.1}) {
        const int k = svd_truncation_level(w, threshold).k;
        CHECK(k <= prev);
        prev = k;
    }
}

TEST_CASE("truncation level is shift and scale invariant") {
    for (int trial = 0; trial < 100; ++trial) {
        const Field2D w = testsupport::white_noise_field(12, 12, 5000 + trial);
        const int k = svd_truncation_level(w, 0.99).k;
        Field2D shifted = w, scaled = w;
        for (double& v : shifted.values) v += 40.0 + trial;
        for (double& v : scaled.values) v *= (trial % 2 ? -3.75 : 0.004);
        CHECK(svd_truncation_level(shifted, 0.99).k == k);
        CHECK(svd_truncation_level(scaled, 0.99).k == k);
    }
}

TEST_CASE("raw-energy mode skips centering") {
    // A constant-plus-rank-1 window: centered it is rank 1, uncentered the
    // mean mode dominates and adds one.
    Field2D w = rank_k_window(16, 1);
    for (double& v : w.values) v += 100.0;
    CHECK(svd_truncation_level(w, 0.99, true).k == 1);
    const TruncationLevel raw = svd_truncation_level(w, 0.99, false);
    CHECK(raw.k >= 1);
    // Uncentered, nearly all energy sits in the mean mode.
    const TruncationLevel raw_loose = svd_truncation_level(w, 0.5, false);
    CHECK(raw_loose.k == 1);
}

TEST_CASE("field of identical rank-1 windows has zero spread") {
    const Field2D tile = rank_k_window(32, 1);
    Field2D field;
    field.nx = 96;
    field.ny = 64;
    field.values.resize(static_cast<size_t>(96) * 64);
    field.field_id = "tiled";
    for (int iy = 0; iy < 64; ++iy) {
        for (int ix = 0; ix < 96; ++ix) field.at(ix, iy) = tile.at(ix % 32, iy % 32);
    }
    const LocalStats stats = local_svd_stats(field, 32, 0.99);
    REQUIRE(stats.window_grid.size() == 6);
    for (double v : stats.window_grid) CHECK(v == 1.0);
    CHECK(stats.std == 0.0);
    CHECK(stats.statistic_name == "svd_truncation_std");
}

TEST_CASE("smooth fields need fewer modes than white noise") {
    const LocalStats smooth =
        local_svd_stats(testsupport::single_range_grf(256, 256, 32.0, 6), 32, 0.99);
    const LocalStats noise = local_svd_stats(testsupport::white_noise_field(256, 256, 6), 32, 0.99);
    INFO("smooth mean k ", smooth.mean, " noise mean k ", noise.mean);
    CHECK(smooth.mean < noise.mean);
}

TEST_CASE("too few complete windows raises an input error") {
    CHECK_THROWS_AS(local_svd_stats(testsupport::white_noise_field(40, 64, 2), 32, 0.99),
                    input_error);
}

}  // TEST_SUITE
