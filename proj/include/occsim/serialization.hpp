#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "occsim/cache.hpp"
#include "occsim/calibration.hpp"
#include "occsim/channel.hpp"
#include "occsim/classifier.hpp"
#include "occsim/evaluation.hpp"
#include "occsim/gpu.hpp"
#include "occsim/victim.hpp"

namespace occsim {

using nlohmann::json;

// Objects accept partial input: absent keys keep their defaults, unknown
// keys raise ConfigError.

void to_json(json& j, const CacheGeometry& geo);
void from_json(const json& j, CacheGeometry& geo);

void to_json(json& j, const GpuConfig& gpu);
/// Accepts a preset name string or an object (optionally with "preset").
void from_json(const json& j, GpuConfig& gpu);

void to_json(json& j, const TimerModel& timer);
void from_json(const json& j, TimerModel& timer);

void to_json(json& j, const SpyLayout& layout);
/// Accepts "basic", "thread_parallel" or an object. The full parallel
/// layout depends on the GPU and is resolved by the config loader.
void from_json(const json& j, SpyLayout& layout);

/// buffer_bytes is written as its effective value.
void to_json(json& j, const AttackConfig& config);
void from_json(const json& j, AttackConfig& config);

void to_json(json& j, const Calibration& cal);
void from_json(const json& j, Calibration& cal);

void to_json(json& j, const ProfileRanges& ranges);
void from_json(const json& j, ProfileRanges& ranges);

void to_json(json& j, const SiteProfile& profile);
void from_json(const json& j, SiteProfile& profile);

void to_json(json& j, const RenderEvent& event);
void from_json(const json& j, RenderEvent& event);

void to_json(json& j, const ClassifierSpec& spec);
void from_json(const json& j, ClassifierSpec& spec);

void to_json(json& j, const EvalReport& report);
void from_json(const json& j, EvalReport& report);

std::string to_string(ReplacementPolicy p);
std::string to_string(ProbeOrder o);

/// Canonical form: compact nlohmann dump of to_json(config) with keys in
/// lexicographic order.
std::string canonical_json(const AttackConfig& config);

/// FNV-1a 64 of `bytes`, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// fnv1a_hex(canonical_json(config))
std::string config_hash(const AttackConfig& config);

/// One line: {"site":..,"trial":..,"rate_hz":..,"config_hash":"..","samples":[..]}
std::string memorygram_to_jsonl(const Memorygram& mg);
Memorygram memorygram_from_jsonl(const std::string& line);
/// Reads every non-blank line; throws DataError with the line number on bad input.
std::vector<Memorygram> read_memorygrams(std::istream& in);

/// Header "label,f0,..,f{d-1}"; values printed with 17 significant digits.
void write_features_csv(std::ostream& out, const Dataset& dataset);
Dataset read_features_csv(std::istream& in);

/// "label,precision,recall,f1,support" per class.
void write_per_class_csv(std::ostream& out, const EvalReport& report);
/// Long format "true,predicted,count".
void write_confusion_csv(std::ostream& out, const EvalReport& report);

}  // namespace occsim
