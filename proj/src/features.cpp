#include "occsim/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "occsim/errors.hpp"

namespace occsim {

namespace {

/// Neumaier summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace

WindowStats window_stats(std::span<const double> samples) {
    if (samples.empty()) {
        throw DataError("window_stats: empty window");
    }
    const auto n = static_cast<double>(samples.size());
    WindowStats s;
    s.min = samples.front();
    s.max = samples.front();
    CompensatedSum sum;
    for (const double x : samples) {
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
        sum.add(x);
    }
    const double mean = sum.value() / n;

    // Second pass over deviations. Their mean r is the rounding error of
    // `mean`; raw moments about `mean` are shifted back by r.
    CompensatedSum m1;
    CompensatedSum m2;
    CompensatedSum m3;
    CompensatedSum m4;
    for (const double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        m1.add(d);
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
    }
    const double r = m1.value() / n;
    const double a2 = m2.value() / n;
    const double a3 = m3.value() / n;
    const double a4 = m4.value() / n;
    const double var = a2 - r * r;
    const double c3 = a3 - 3.0 * r * a2 + 2.0 * r * r * r;
    const double c4 = a4 - 4.0 * r * a3 + 6.0 * r * r * a2 - 3.0 * r * r * r * r;
    if (s.min == s.max) {
        s.mean = s.min;
        return s;
    }
    s.mean = mean + r;
    s.std = std::sqrt(std::max(var, 0.0));
    if (var > 0.0) {
        s.skew = c3 / (var * s.std);
        s.kurtosis = c4 / (var * var) - 3.0;
    }
    return s;
}

std::vector<double> extract_features(std::span<const double> samples, std::size_t segments_per_half) {
    if (segments_per_half == 0) {
        throw DataError("segments_per_half must be >= 1");
    }
    const std::size_t n = samples.size();
    if (n < 2 * segments_per_half) {
        throw DataError("trace of " + std::to_string(n) + " samples is too short for " +
                        std::to_string(segments_per_half) + " segments per half");
    }
    const std::size_t first_len = n / 2;
    const auto first = samples.subspan(0, first_len);
    const auto second = samples.subspan(first_len);

    std::vector<double> out;
    out.reserve(feature_length(segments_per_half));
    const auto append = [&out](std::span<const double> w) {
        const WindowStats s = window_stats(w);
        out.insert(out.end(), {s.min, s.max, s.mean, s.std, s.skew, s.kurtosis});
    };
    append(first);
    append(second);
    for (const auto half : {first, second}) {
        const std::size_t seg = half.size() / segments_per_half;
        for (std::size_t k = 0; k < segments_per_half; ++k) {
            const std::size_t len = k + 1 == segments_per_half ? half.size() - k * seg : seg;
            append(half.subspan(k * seg, len));
        }
    }
    return out;
}

std::size_t Dataset::dim() const {
    if (rows.empty()) {
        return 0;
    }
    const std::size_t d = rows.front().values.size();
    for (const auto& r : rows) {
        if (r.values.size() != d) {
            throw DataError("feature vectors have inconsistent lengths");
        }
    }
    return d;
}

std::vector<std::int64_t> Dataset::labels() const {
    std::set<std::int64_t> s;
    for (const auto& r : rows) {
        s.insert(r.label);
    }
    return {s.begin(), s.end()};
}

}  // namespace occsim
