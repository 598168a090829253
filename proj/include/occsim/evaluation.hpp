#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "occsim/classifier.hpp"
#include "occsim/features.hpp"
#include "occsim/forest.hpp"
#include "occsim/knn.hpp"

namespace occsim {

using Model = std::variant<KnnModel, ForestModel>;

Model train(const Dataset& train, const ClassifierSpec& spec);
std::int64_t predict(const Model& model, std::span<const double> x);

/// Square count matrix indexed [true][predicted].
using Confusion = std::vector<std::vector<std::uint64_t>>;

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct Metrics {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
};

/// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R), with 0/0 = 0; macro is
/// the unweighted class mean. Throws DataError on a non-square matrix.
Metrics compute_metrics(const Confusion& confusion);

struct EvalReport {
    std::string mode = "closed";
    ClassifierSpec spec;
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> labels;  // ascending; confusion index order
    Confusion confusion;
    Metrics metrics;
    /// Open world only: macro metrics over the non-NON_SENSITIVE classes.
    std::optional<Metrics> sensitive;
    std::vector<std::uint32_t> fold_of;  // per dataset row
};

/// Stratified fold ids: each class is shuffled and dealt round-robin,
/// continuing where the previous class stopped. Throws DataError when a
/// class has fewer than `folds` members.
std::vector<std::uint32_t> stratified_folds(const Dataset& dataset, std::size_t folds, std::uint64_t seed);

/// `jobs` = 0 uses every hardware thread; results do not depend on it.
EvalReport cross_validate(const Dataset& dataset, const ClassifierSpec& spec, std::size_t folds,
                          std::uint64_t seed, std::size_t jobs = 0);

/// Open-world rows are relabelled NON_SENSITIVE and merged into the closed set.
EvalReport evaluate_open_world(const Dataset& closed, const Dataset& open, const ClassifierSpec& spec,
                               std::size_t folds, std::uint64_t seed, std::size_t jobs = 0);

}  // namespace occsim
