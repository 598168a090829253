#include "occsim/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "occsim/errors.hpp"
#include "occsim/parallel.hpp"
#include "occsim/rng.hpp"

namespace occsim {

void validate(const ClassifierSpec& spec) {
    if (spec.kind == ClassifierKind::knn && spec.k == 0) {
        throw ConfigError("KNN k must be >= 1");
    }
    if (spec.kind == ClassifierKind::rf && (spec.trees == 0 || spec.min_leaf == 0)) {
        throw ConfigError("random forest needs trees >= 1 and min_leaf >= 1");
    }
}

Model train(const Dataset& train, const ClassifierSpec& spec) {
    validate(spec);
    if (spec.kind == ClassifierKind::knn) {
        return train_knn(train, spec);
    }
    return train_rf(train, spec);
}

std::int64_t predict(const Model& model, std::span<const double> x) {
    if (const auto* knn = std::get_if<KnnModel>(&model)) {
        return predict_knn(*knn, x);
    }
    return predict_rf(std::get<ForestModel>(model), x);
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

ClassMetrics class_metrics(const Confusion& c, std::size_t k) {
    double tp = static_cast<double>(c[k][k]);
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        row += static_cast<double>(c[k][j]);
        col += static_cast<double>(c[j][k]);
    }
    ClassMetrics m;
    m.precision = ratio(tp, col);
    m.recall = ratio(tp, row);
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.support = static_cast<std::uint64_t>(row);
    return m;
}

Metrics summarize(const Confusion& c, const std::vector<std::size_t>& classes) {
    Metrics m;
    double correct = 0.0;
    double total = 0.0;
    for (auto k : classes) {
        const ClassMetrics cm = class_metrics(c, k);
        m.per_class.push_back(cm);
        m.macro_precision += cm.precision;
        m.macro_recall += cm.recall;
        m.macro_f1 += cm.f1;
        correct += static_cast<double>(c[k][k]);
        total += static_cast<double>(cm.support);
    }
    if (!classes.empty()) {
        const auto n = static_cast<double>(classes.size());
        m.macro_precision /= n;
        m.macro_recall /= n;
        m.macro_f1 /= n;
    }
    m.accuracy = ratio(correct, total);
    return m;
}

}  // namespace

Metrics compute_metrics(const Confusion& confusion) {
    for (const auto& row : confusion) {
        if (row.size() != confusion.size()) {
            throw DataError("confusion matrix must be square");
        }
    }
    std::vector<std::size_t> all(confusion.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return summarize(confusion, all);
}

std::vector<std::uint32_t> stratified_folds(const Dataset& dataset, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) {
        throw ConfigError("cross-validation needs at least 2 folds");
    }
    std::map<std::int64_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        members[dataset.rows[i].label].push_back(i);
    }
    for (const auto& [label, idx] : members) {
        if (idx.size() < folds) {
            throw DataError("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                            " rows, fewer than " + std::to_string(folds) + " folds");
        }
    }
    Rng rng(stream_key(seed, 0, 0, StreamTag::folds));
    std::vector<std::uint32_t> fold_of(dataset.size(), 0);
    std::size_t offset = 0;
    for (auto& [label, idx] : members) {
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.below(i)]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            fold_of[idx[i]] = static_cast<std::uint32_t>((offset + i) % folds);
        }
        offset += idx.size();
    }
    return fold_of;
}

EvalReport cross_validate(const Dataset& dataset, const ClassifierSpec& spec, std::size_t folds,
                          std::uint64_t seed, std::size_t jobs) {
    validate(spec);
    if (dataset.empty()) {
        throw DataError("cross-validation needs a non-empty dataset");
    }
    dataset.dim();

    EvalReport report;
    report.spec = spec;
    report.folds = folds;
    report.seed = seed;
    report.labels = dataset.labels();
    report.fold_of = stratified_folds(dataset, folds, seed);

    const auto index_of = [&](std::int64_t label) {
        return static_cast<std::size_t>(std::lower_bound(report.labels.begin(), report.labels.end(), label) -
                                        report.labels.begin());
    };

    std::vector<std::vector<std::int64_t>> predictions(folds);
    std::vector<std::vector<std::size_t>> test_rows(folds);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        test_rows[report.fold_of[i]].push_back(i);
    }
    parallel_for(folds, jobs, [&](std::size_t f) {
        Dataset train_set;
        train_set.rows.reserve(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            if (report.fold_of[i] != f) {
                train_set.rows.push_back(dataset.rows[i]);
            }
        }
        const Model model = train(train_set, spec);
        auto& out = predictions[f];
        for (auto i : test_rows[f]) {
            out.push_back(predict(model, dataset.rows[i].values));
        }
    });

    const std::size_t n_classes = report.labels.size();
    report.confusion.assign(n_classes, std::vector<std::uint64_t>(n_classes, 0));
    for (std::size_t f = 0; f < folds; ++f) {
        for (std::size_t j = 0; j < test_rows[f].size(); ++j) {
            const auto truth = index_of(dataset.rows[test_rows[f][j]].label);
            ++report.confusion[truth][index_of(predictions[f][j])];
        }
    }
    report.metrics = compute_metrics(report.confusion);
    return report;
}

EvalReport evaluate_open_world(const Dataset& closed, const Dataset& open, const ClassifierSpec& spec,
                               std::size_t folds, std::uint64_t seed, std::size_t jobs) {
    for (const auto& r : closed.rows) {
        if (r.label == kNonSensitive) {
            throw DataError("closed-world rows may not carry the NON_SENSITIVE label");
        }
    }
    Dataset merged = closed;
    for (const auto& r : open.rows) {
        merged.rows.push_back(r);
        merged.rows.back().label = kNonSensitive;
    }
    EvalReport report = cross_validate(merged, spec, folds, seed, jobs);
    if (open.empty()) {
        return report;
    }
    report.mode = "open";
    std::vector<std::size_t> sensitive;
    for (std::size_t k = 0; k < report.labels.size(); ++k) {
        if (report.labels[k] != kNonSensitive) {
            sensitive.push_back(k);
        }
    }
    report.sensitive = summarize(report.confusion, sensitive);
    return report;
}

}  // namespace occsim
