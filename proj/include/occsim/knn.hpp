#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "occsim/classifier.hpp"
#include "occsim/features.hpp"

namespace occsim {

/// Per-feature z-scoring fitted on a training set. Features with zero
/// training variance are dropped.
struct Standardizer {
    std::vector<std::size_t> kept;
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Dataset& train);
    std::vector<double> apply(std::span<const double> x) const;
};

struct KnnModel {
    std::uint32_t k = 5;
    Standardizer standardizer;
    std::vector<std::vector<double>> points;  // standardized
    std::vector<std::int64_t> labels;
};

/// Throws DataError on an empty training set or k > train size.
KnnModel train_knn(const Dataset& train, const ClassifierSpec& spec);

/// Majority label among the k nearest training points (Euclidean on
/// standardized features). Points tied with the k-th distance are included.
/// Vote ties go to the single nearest neighbour's label when it is among the
/// tied labels, otherwise to the lowest label.
std::int64_t predict_knn(const KnnModel& model, std::span<const double> x);

}  // namespace occsim
