#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "occsim/calibration.hpp"
#include "occsim/channel.hpp"
#include "occsim/classifier.hpp"
#include "occsim/victim.hpp"

namespace occsim {

struct CorpusConfig {
    std::uint32_t sites = 100;
    std::uint32_t trials = 100;
    std::int64_t first_site_id = 0;
    std::uint64_t corpus_seed = 0;
    double duration_s = 5.0;
    double viewport_scale = 1.0;
    ProfileRanges param_ranges;
};

struct PipelineConfig {
    std::size_t segments_per_half = 4;
    ClassifierSpec classifier;
    std::size_t folds = 10;
    std::uint64_t seed = 0;
};

struct RunConfig {
    AttackConfig attack;  // attack.duration_s mirrors corpus.duration_s
    CorpusConfig corpus;
    PipelineConfig pipeline;
    std::string output_dir = "out";
    bool calibrated = false;  // timing constants came from the anchor solve
};

/// Preset defaults as a config document: "basic" (1 active thread, 5 s) or
/// "parallel" (one workgroup per subslice x 8 active threads, 3 s).
nlohmann::json preset_document(const std::string& preset);

/// Applies "a.b.c=value" to `doc`. The value is parsed as JSON when
/// possible, else taken as a string. Throws ConfigError on a malformed
/// assignment.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Resolves a document into a RunConfig. Timing constants that are absent
/// are filled by calibration against the default anchors. A collect
/// manifest (an object with a "config" member) is accepted as well.
RunConfig resolve_config(const nlohmann::json& doc);

/// preset (from the file's "preset" key, default "basic") < file < overrides.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Cross-field checks; throws ConfigError.
void validate(const RunConfig& config);

/// Fully resolved document; resolve_config(to_document(c)) reproduces c.
nlohmann::json to_document(const RunConfig& config);

}  // namespace occsim
