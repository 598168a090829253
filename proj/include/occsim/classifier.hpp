#pragma once

#include <cstdint>
#include <string>

namespace occsim {

enum class ClassifierKind { knn, rf };

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::rf;
    // KNN
    std::uint32_t k = 5;
    // RF
    std::uint32_t trees = 100;
    std::uint32_t min_leaf = 1;
    std::uint32_t max_features = 0;  // 0 selects floor(sqrt(d))
    std::uint64_t seed = 0;

    friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

inline ClassifierSpec knn_spec(std::uint32_t k = 5) {
    ClassifierSpec s;
    s.kind = ClassifierKind::knn;
    s.k = k;
    return s;
}

inline ClassifierSpec rf_spec(std::uint32_t trees = 100, std::uint64_t seed = 0) {
    ClassifierSpec s;
    s.kind = ClassifierKind::rf;
    s.trees = trees;
    s.seed = seed;
    return s;
}

void validate(const ClassifierSpec& spec);

}  // namespace occsim
