#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace occsim {

/// Label shared by every open-world (non-monitored) trace.
inline constexpr std::int64_t kNonSensitive = -1;

struct WindowStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;
    double skew = 0.0;
    double kurtosis = 0.0;  // excess
};

inline constexpr std::size_t kStatsPerWindow = 6;

/// Population moments over the window. Constant windows report skew = 0
/// and kurtosis = 0. Throws DataError on an empty window.
WindowStats window_stats(std::span<const double> samples);

/// 6 * (2 + 2 * segments_per_half)
constexpr std::size_t feature_length(std::size_t segments_per_half) {
    return kStatsPerWindow * (2 + 2 * segments_per_half);
}

/// Window order: first half, second half, segments of the first half,
/// segments of the second half. The first half holds n / 2 samples; the last
/// segment of each half absorbs the remainder. Throws DataError when
/// n < 2 * segments_per_half.
std::vector<double> extract_features(std::span<const double> samples, std::size_t segments_per_half);

struct FeatureVector {
    std::vector<double> values;
    std::int64_t label = 0;
    std::string source;
};

struct Dataset {
    std::vector<FeatureVector> rows;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }
    /// Feature count; throws DataError if rows disagree.
    std::size_t dim() const;
    /// Distinct labels in ascending order.
    std::vector<std::int64_t> labels() const;
};

}  // namespace occsim
