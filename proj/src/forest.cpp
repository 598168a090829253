#include "occsim/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "occsim/errors.hpp"

namespace occsim {

std::uint32_t DecisionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const TreeNode& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].klass;
}

namespace {

struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

std::uint32_t plurality(const std::vector<std::size_t>& counts) {
    // max_element returns the first maximum, i.e. the lowest class index.
    return static_cast<std::uint32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

DecisionTree grow_tree(const std::vector<std::vector<double>>& x, const std::vector<std::uint32_t>& y,
                       std::size_t n_classes, std::vector<std::size_t> rows, std::size_t max_features,
                       std::size_t min_leaf, Rng& rng) {
    const std::size_t d = x.empty() ? 0 : x.front().size();
    min_leaf = std::max<std::size_t>(min_leaf, 1);
    max_features = std::clamp<std::size_t>(max_features, 1, std::max<std::size_t>(d, 1));

    DecisionTree tree;
    tree.nodes.emplace_back();
    struct Pending {
        std::size_t node;
        std::vector<std::size_t> rows;
    };
    std::vector<Pending> stack;
    stack.push_back({0, std::move(rows)});

    std::vector<std::size_t> feature_pool(d);
    std::vector<std::pair<double, std::uint32_t>> column;
    std::vector<std::size_t> counts(n_classes);
    std::vector<std::size_t> left_counts(n_classes);

    while (!stack.empty()) {
        Pending work = std::move(stack.back());
        stack.pop_back();
        const std::size_t n = work.rows.size();

        std::fill(counts.begin(), counts.end(), 0);
        for (auto r : work.rows) {
            ++counts[y[r]];
        }
        tree.nodes[work.node].klass = plurality(counts);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
        if (pure || n < 2 * min_leaf || d == 0) {
            continue;
        }

        double total_sq = 0.0;
        for (auto c : counts) {
            total_sq += static_cast<double>(c) * static_cast<double>(c);
        }

        std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
        Split best;
        best.impurity = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < max_features; ++m) {
            const std::size_t pick = m + static_cast<std::size_t>(rng.below(d - m));
            std::swap(feature_pool[m], feature_pool[pick]);
            const std::size_t f = feature_pool[m];

            column.clear();
            for (auto r : work.rows) {
                column.emplace_back(x[r][f], y[r]);
            }
            std::sort(column.begin(), column.end());

            std::fill(left_counts.begin(), left_counts.end(), 0);
            double left_sq = 0.0;
            double right_sq = total_sq;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const std::uint32_t c = column[i].second;
                const auto lc = static_cast<double>(left_counts[c]);
                const auto rc = static_cast<double>(counts[c] - left_counts[c]);
                left_sq += 2.0 * lc + 1.0;
                right_sq -= 2.0 * rc - 1.0;
                ++left_counts[c];
                if (column[i].first == column[i + 1].first) {
                    continue;
                }
                const std::size_t nl = i + 1;
                const std::size_t nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) {
                    continue;
                }
                // Weighted Gini: (nl * (1 - left_sq / nl^2) + nr * (1 - right_sq / nr^2)) / n
                const double impurity =
                    (static_cast<double>(n) - left_sq / static_cast<double>(nl) - right_sq / static_cast<double>(nr)) /
                    static_cast<double>(n);
                if (impurity < best.impurity) {
                    const double lo = column[i].first;
                    const double hi = column[i + 1].first;
                    double thr = lo + (hi - lo) / 2.0;
                    if (!(thr < hi)) {
                        thr = lo;
                    }
                    best = {static_cast<std::int32_t>(f), thr, impurity};
                }
            }
        }
        if (best.feature < 0) {
            continue;
        }

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (auto r : work.rows) {
            (x[r][static_cast<std::size_t>(best.feature)] <= best.threshold ? left_rows : right_rows).push_back(r);
        }
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& node = tree.nodes[work.node];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = left + 1;
        stack.push_back({static_cast<std::size_t>(left + 1), std::move(right_rows)});
        stack.push_back({static_cast<std::size_t>(left), std::move(left_rows)});
    }
    return tree;
}

ForestModel train_rf(const Dataset& train, const ClassifierSpec& spec) {
    if (train.empty()) {
        throw DataError("random forest needs a non-empty training set");
    }
    if (spec.trees == 0) {
        throw ConfigError("random forest needs at least one tree");
    }
    const std::size_t d = train.dim();
    ForestModel model;
    model.classes = train.labels();

    std::vector<std::vector<double>> x;
    std::vector<std::uint32_t> y;
    x.reserve(train.size());
    y.reserve(train.size());
    for (const auto& r : train.rows) {
        x.push_back(r.values);
        y.push_back(static_cast<std::uint32_t>(
            std::lower_bound(model.classes.begin(), model.classes.end(), r.label) - model.classes.begin()));
    }
    const std::size_t max_features =
        spec.max_features > 0 ? spec.max_features
                              : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));

    const std::size_t n = train.size();
    model.trees.reserve(spec.trees);
    for (std::uint32_t t = 0; t < spec.trees; ++t) {
        Rng rng(stream_key(spec.seed, t, 0, StreamTag::forest));
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) {
            r = static_cast<std::size_t>(rng.below(n));
        }
        model.trees.push_back(grow_tree(x, y, model.classes.size(), std::move(rows), max_features, spec.min_leaf, rng));
    }
    return model;
}

std::int64_t predict_rf(const ForestModel& model, std::span<const double> x) {
    std::vector<std::size_t> votes(model.classes.size(), 0);
    for (const auto& tree : model.trees) {
        ++votes[tree.predict(x)];
    }
    return model.classes[plurality(votes)];
}

}  // namespace occsim
