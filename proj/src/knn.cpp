#include "occsim/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "occsim/errors.hpp"

namespace occsim {

Standardizer Standardizer::fit(const Dataset& train) {
    const std::size_t d = train.dim();
    const auto n = static_cast<double>(train.size());
    Standardizer s;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (const auto& r : train.rows) {
            mean += r.values[j];
        }
        mean /= n;
        double var = 0.0;
        for (const auto& r : train.rows) {
            const double dev = r.values[j] - mean;
            var += dev * dev;
        }
        var /= n;
        // Treat variance lost in round-off as zero.
        if (var > 1e-24 * std::max(1.0, mean * mean)) {
            s.kept.push_back(j);
            s.mean.push_back(mean);
            s.scale.push_back(std::sqrt(var));
        }
    }
    return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    std::vector<double> out(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        out[i] = (x[kept[i]] - mean[i]) / scale[i];
    }
    return out;
}

KnnModel train_knn(const Dataset& train, const ClassifierSpec& spec) {
    if (train.empty()) {
        throw DataError("KNN needs a non-empty training set");
    }
    if (spec.k == 0 || spec.k > train.size()) {
        throw DataError("k = " + std::to_string(spec.k) + " exceeds training set size " +
                        std::to_string(train.size()));
    }
    KnnModel model;
    model.k = spec.k;
    model.standardizer = Standardizer::fit(train);
    model.points.reserve(train.size());
    model.labels.reserve(train.size());
    for (const auto& r : train.rows) {
        model.points.push_back(model.standardizer.apply(r.values));
        model.labels.push_back(r.label);
    }
    return model;
}

std::int64_t predict_knn(const KnnModel& model, std::span<const double> x) {
    const std::vector<double> q = model.standardizer.apply(x);
    const std::size_t n = model.points.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const auto& p = model.points[i];
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double diff = p[j] - q[j];
            acc += diff * diff;
        }
        dist[i] = {acc, i};
    }
    const std::size_t k = std::min<std::size_t>(model.k, n);
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    const double kth = dist[k - 1].first;

    std::map<std::int64_t, std::size_t> votes;
    std::pair<double, std::size_t> nearest = dist[0];
    for (const auto& [dd, idx] : dist) {
        if (dd <= kth) {
            ++votes[model.labels[idx]];
            nearest = std::min(nearest, std::pair{dd, idx});
        }
    }
    std::size_t best = 0;
    for (const auto& [label, count] : votes) {
        best = std::max(best, count);
    }
    const std::int64_t nearest_label = model.labels[nearest.second];
    if (votes[nearest_label] == best) {
        return nearest_label;
    }
    for (const auto& [label, count] : votes) {
        if (count == best) {
            return label;  // map order: lowest label first
        }
    }
    return nearest_label;
}

}  // namespace occsim
