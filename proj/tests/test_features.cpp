#include "doctest.h"

#include <cmath>
#include <vector>

#include "occsim/errors.hpp"
#include "occsim/features.hpp"
#include "occsim/rng.hpp"
#include "support/moments_oracle.hpp"

using namespace occsim;

namespace {

double rel_err(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

std::vector<double> ramp(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = static_cast<double>((i * 37) % 101);
    }
    return v;
}

}  // namespace

TEST_CASE("window stats of [1, 2, 3]") {
    const std::vector<double> v{1, 2, 3};
    const WindowStats s = window_stats(v);
    CHECK(s.min == 1.0);
    CHECK(s.max == 3.0);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.std == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(std::abs(s.skew) < 1e-15);
    CHECK(s.kurtosis == doctest::Approx(-1.5));
}

TEST_CASE("constant and degenerate windows") {
    const std::vector<double> c(10, 4.0);
    const WindowStats s = window_stats(c);
    CHECK(s.std == 0.0);
    CHECK(s.skew == 0.0);
    CHECK(s.kurtosis == 0.0);
    const std::vector<double> one{7.0};
    CHECK(window_stats(one).mean == 7.0);
    CHECK_THROWS_AS(window_stats(std::span<const double>{}), DataError);
}

TEST_CASE("moments agree with a two-pass reference") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + rng.below(600);
        std::vector<double> v(n);
        const double offset = rng.uniform(0, 1e5);
        const double spread = rng.uniform(1, 5e3);
        for (auto& x : v) {
            x = std::round(offset + spread * rng.normal());
        }
        const WindowStats s = window_stats(v);
        const oracle::Moments m = oracle::two_pass(v);
        REQUIRE(s.min == m.min);
        REQUIRE(s.max == m.max);
        REQUIRE(rel_err(s.mean, m.mean) <= 1e-12);
        REQUIRE(rel_err(s.std, m.std) <= 1e-12);
        REQUIRE(rel_err(s.skew, m.skew) <= 1e-9);  // absolute scale near zero
        REQUIRE(rel_err(s.kurtosis, m.kurtosis) <= 1e-9);
    }
}

TEST_CASE("moments of high-offset, low-spread windows") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> v(2 + rng.below(10000));
        for (auto& x : v) {
            x = std::round(1e5 + 10.0 * rng.exponential(1.0));
        }
        const WindowStats s = window_stats(v);
        const oracle::Moments m = oracle::two_pass(v);
        REQUIRE(rel_err(s.mean, m.mean) <= 1e-12);
        REQUIRE(rel_err(s.std, m.std) <= 1e-12);
        REQUIRE(rel_err(s.skew, m.skew) <= 1e-12);
        REQUIRE(rel_err(s.kurtosis, m.kurtosis) <= 1e-12);
    }
}

TEST_CASE("feature lengths") {
    CHECK(feature_length(4) == 60);
    CHECK(feature_length(8) == 108);
    CHECK(extract_features(ramp(250), 4).size() == 60);
    CHECK(extract_features(ramp(510), 8).size() == 108);
    CHECK(extract_features(ramp(8), 4).size() == 60);
    CHECK_THROWS_AS(extract_features(ramp(7), 4), DataError);
}

TEST_CASE("window order and remainder placement") {
    const std::vector<double> v = ramp(23);  // halves 11 + 12, segments of 2 with remainders
    const auto f = extract_features(v, 4);
    const auto stats_of = [&](std::size_t b, std::size_t e) {
        return window_stats(std::span<const double>(v).subspan(b, e - b));
    };
    const std::vector<std::pair<std::size_t, std::size_t>> windows{
        {0, 11}, {11, 23},                         // halves
        {0, 2}, {2, 4}, {4, 6}, {6, 11},           // first half segments
        {11, 14}, {14, 17}, {17, 20}, {20, 23}};  // second half segments
    REQUIRE(f.size() == windows.size() * 6);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const WindowStats s = stats_of(windows[w].first, windows[w].second);
        const double expected[] = {s.min, s.max, s.mean, s.std, s.skew, s.kurtosis};
        for (std::size_t k = 0; k < 6; ++k) {
            CHECK(f[w * 6 + k] == expected[k]);
        }
    }
}

TEST_CASE("dataset helpers") {
    Dataset ds;
    ds.rows.push_back({{1, 2}, 3, "a"});
    ds.rows.push_back({{1, 2}, 1, "b"});
    ds.rows.push_back({{1, 2}, 3, "c"});
    CHECK(ds.dim() == 2);
    CHECK(ds.labels() == std::vector<std::int64_t>{1, 3});
    ds.rows.push_back({{1}, 1, "d"});
    CHECK_THROWS_AS(ds.dim(), DataError);
}
