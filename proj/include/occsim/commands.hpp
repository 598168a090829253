#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "occsim/calibration.hpp"
#include "occsim/classifier.hpp"
#include "occsim/config.hpp"
#include "occsim/evaluation.hpp"

namespace occsim {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitCalibration = 4 };

struct CollectResult {
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> files;
    std::size_t records = 0;
};

/// Writes <output_dir>/memorygrams/site_<id>.jsonl (trials 0..n-1 in order)
/// and <output_dir>/manifest.json. Runs site x trial simulations on `jobs`
/// threads; output bytes do not depend on `jobs`.
CollectResult cmd_collect(const RunConfig& config, std::size_t jobs);

struct FeaturesResult {
    std::size_t rows = 0;
    std::vector<std::string> skipped;  // "site:trial: reason"
};

/// `inputs` are JSONL files or directories (every *.jsonl inside, sorted).
/// Short traces are skipped; throws DataError if nothing usable remains.
FeaturesResult cmd_features(const std::vector<std::filesystem::path>& inputs, std::size_t segments_per_half,
                            const std::filesystem::path& output);

Dataset memorygrams_to_dataset(const std::vector<Memorygram>& memorygrams, std::size_t segments_per_half,
                               std::vector<std::string>* skipped = nullptr);

struct EvaluateOptions {
    ClassifierSpec spec;
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    std::string mode = "closed";
    std::optional<std::filesystem::path> open_csv;
    std::size_t jobs = 0;
};

/// Writes <out> (report JSON) plus <stem>.per_class.csv and <stem>.confusion.csv
/// next to it. Throws ConfigError for open mode without an open-world CSV.
EvalReport cmd_evaluate(const std::filesystem::path& features_csv, const EvaluateOptions& options,
                        const std::filesystem::path& out);

struct CalibrationReport {
    Calibration calibration;
    CalibrationAnchors anchors;
    double basic_rate_hz = 0.0;
    double parallel_rate_hz = 0.0;
    double full_probe_ticks = 0.0;
};

/// Solves the anchor calibration for the config's geometry and buffer,
/// verifies it by simulating primed probes, and writes the constants as
/// JSON. Throws CalibrationError when infeasible.
CalibrationReport cmd_calibrate(const RunConfig& config, const std::filesystem::path& out,
                                const CalibrationAnchors& anchors = {});

/// Human-readable summary of an evaluation report.
void print_report(std::ostream& os, const EvalReport& report);

/// Long-format plot data "site,trial,iteration,ticks" for the given memorygrams.
void write_memorygram_plot_csv(std::ostream& os, const std::vector<Memorygram>& memorygrams);

std::vector<Memorygram> read_memorygram_inputs(const std::vector<std::filesystem::path>& inputs);

}  // namespace occsim
