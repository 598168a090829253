#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "occsim/classifier.hpp"
#include "occsim/features.hpp"
#include "occsim/rng.hpp"

namespace occsim {

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t klass = 0;    // leaf prediction (class index)

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    std::uint32_t predict(std::span<const double> x) const;
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
    std::vector<std::int64_t> classes;  // class index -> label, ascending
    std::vector<DecisionTree> trees;

    friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// CART with Gini impurity grown to `min_leaf`; `max_features` candidate
/// features drawn per node. `rows` indexes into `x` / `y` (y holds class
/// indices) and may repeat for bootstrap samples.
DecisionTree grow_tree(const std::vector<std::vector<double>>& x, const std::vector<std::uint32_t>& y,
                       std::size_t n_classes, std::vector<std::size_t> rows, std::size_t max_features,
                       std::size_t min_leaf, Rng& rng);

/// Throws DataError on an empty training set. A single-class set yields a
/// constant model.
ForestModel train_rf(const Dataset& train, const ClassifierSpec& spec);

/// Plurality vote over trees; ties go to the lowest label.
std::int64_t predict_rf(const ForestModel& model, std::span<const double> x);

}  // namespace occsim
