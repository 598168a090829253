#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "occsim/commands.hpp"
#include "occsim/config.hpp"
#include "occsim/errors.hpp"
#include "occsim/serialization.hpp"

namespace fs = std::filesystem;
using namespace occsim;

namespace {

RunConfig load_with_calibration(const std::string& config_path, std::vector<std::string> overrides,
                                const std::string& calibration_path) {
    if (!calibration_path.empty()) {
        std::ifstream in(calibration_path);
        if (!in) {
            throw ConfigError("cannot open calibration file '" + calibration_path + "'");
        }
        Calibration cal;
        try {
            cal = json::parse(in).get<Calibration>();
        } catch (const json::exception& e) {
            throw ConfigError("calibration file: " + std::string(e.what()));
        }
        // Calibration constants sit below explicit --set flags.
        std::vector<std::string> merged = {
            "attack.dispatch_overhead_s=" + json(cal.dispatch_overhead_s).dump(),
            "attack.probe_clock_hz=" + json(cal.probe_clock_hz).dump(),
            "attack.timer.ticks_per_cycle=" + json(cal.ticks_per_cycle).dump(),
        };
        merged.insert(merged.end(), overrides.begin(), overrides.end());
        overrides = std::move(merged);
    }
    return load_config(config_path, overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated GPU L3 cache-occupancy channel and website-fingerprinting pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string calibration_path;
    std::string out_path;
    std::size_t jobs = 0;

    auto* collect = app.add_subcommand("collect", "simulate site x trial memorygrams");
    collect->add_option("-c,--config", config_path, "JSON run config or collect manifest");
    collect->add_option("--set", overrides, "override a config value, e.g. corpus.sites=20");
    collect->add_option("--calibration", calibration_path, "calibration JSON from `calibrate`");
    collect->add_option("-o,--out", out_path, "output directory (overrides output_dir)");
    collect->add_option("-j,--jobs", jobs, "worker threads (0 = all cores)");

    std::vector<std::string> feature_inputs;
    std::size_t segments = 4;
    auto* features = app.add_subcommand("features", "memorygram JSONL -> features CSV");
    features->add_option("inputs", feature_inputs, "JSONL files or directories")->required();
    features->add_option("-s,--segments", segments, "segments per half (4 -> 60 features, 8 -> 108)");
    features->add_option("-o,--out", out_path, "features CSV")->required();

    std::string features_csv;
    EvaluateOptions eval;
    std::string classifier = "rf";
    std::string open_csv;
    auto* evaluate = app.add_subcommand("evaluate", "cross-validated classification report");
    evaluate->add_option("features", features_csv, "features CSV")->required();
    evaluate->add_option("--classifier", classifier, "knn or rf")->check(CLI::IsMember({"knn", "rf"}));
    evaluate->add_option("-k", eval.spec.k, "KNN neighbours");
    evaluate->add_option("--trees", eval.spec.trees, "RF trees");
    evaluate->add_option("--min-leaf", eval.spec.min_leaf, "RF minimum leaf size");
    evaluate->add_option("--max-features", eval.spec.max_features, "RF features per split (0 = sqrt(d))");
    evaluate->add_option("--seed", eval.seed, "fold and forest seed");
    evaluate->add_option("--folds", eval.folds, "cross-validation folds");
    evaluate->add_option("--mode", eval.mode, "closed or open")->check(CLI::IsMember({"closed", "open"}));
    evaluate->add_option("--open", open_csv, "open-world features CSV (labels become NON_SENSITIVE)");
    evaluate->add_option("-o,--out", out_path, "report JSON")->required();
    evaluate->add_option("-j,--jobs", eval.jobs, "worker threads (0 = all cores)");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "solve timing constants for the rate anchors");
    calibrate_cmd->add_option("-c,--config", config_path, "JSON run config");
    calibrate_cmd->add_option("--set", overrides, "override a config value");
    calibrate_cmd->add_option("-o,--out", out_path, "calibration JSON")->required();
    CalibrationAnchors anchors;
    calibrate_cmd->add_option("--basic-rate", anchors.basic_rate_hz, "basic anchor rate in Hz (1 active thread)");
    calibrate_cmd->add_option("--parallel-rate", anchors.parallel_rate_hz, "parallel anchor rate in Hz (24 active threads)");
    calibrate_cmd->add_option("--target-ticks", anchors.target_probe_ticks, "ticks of a primed full-buffer probe");

    std::string eval_json;
    std::vector<std::string> memorygram_inputs;
    auto* report = app.add_subcommand("report", "summaries and plot data");
    report->add_option("--eval", eval_json, "report JSON from `evaluate`");
    report->add_option("--memorygrams", memorygram_inputs, "JSONL files or directories to export");
    report->add_option("-o,--out", out_path, "plot-data CSV for --memorygrams (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*collect) {
            if (!out_path.empty()) {
                overrides.push_back("output_dir=" + json(out_path).dump());
            }
            const RunConfig config = load_with_calibration(config_path, overrides, calibration_path);
            const CollectResult r = cmd_collect(config, jobs);
            std::cout << "wrote " << r.records << " memorygrams in " << r.files.size() << " files; manifest "
                      << r.manifest.string() << '\n';
        } else if (*features) {
            std::vector<fs::path> inputs(feature_inputs.begin(), feature_inputs.end());
            const FeaturesResult r = cmd_features(inputs, segments, out_path);
            for (const auto& s : r.skipped) {
                std::cerr << "skipped " << s << '\n';
            }
            std::cout << "wrote " << r.rows << " rows x " << feature_length(segments) << " features to "
                      << out_path << '\n';
        } else if (*evaluate) {
            eval.spec.kind = classifier == "knn" ? ClassifierKind::knn : ClassifierKind::rf;
            eval.spec.seed = eval.seed;
            if (!open_csv.empty()) {
                eval.open_csv = open_csv;
            }
            const EvalReport r = cmd_evaluate(features_csv, eval, out_path);
            print_report(std::cout, r);
        } else if (*calibrate_cmd) {
            const RunConfig config = load_config(config_path, overrides);
            const CalibrationReport r = cmd_calibrate(config, out_path, anchors);
            std::cout << "dispatch_overhead_s " << r.calibration.dispatch_overhead_s << ", probe_clock_hz "
                      << r.calibration.probe_clock_hz << ", ticks_per_cycle " << r.calibration.ticks_per_cycle
                      << "\nbasic " << r.basic_rate_hz << " Hz, parallel " << r.parallel_rate_hz
                      << " Hz, full probe " << r.full_probe_ticks << " ticks\n";
        } else if (*report) {
            if (eval_json.empty() && memorygram_inputs.empty()) {
                throw ConfigError("report needs --eval or --memorygrams");
            }
            if (!eval_json.empty()) {
                std::ifstream in(eval_json);
                if (!in) {
                    throw DataError("cannot read '" + eval_json + "'");
                }
                EvalReport r;
                try {
                    r = json::parse(in).get<EvalReport>();
                } catch (const json::exception& e) {
                    throw DataError(eval_json + ": " + e.what());
                }
                print_report(std::cout, r);
            }
            if (!memorygram_inputs.empty()) {
                std::vector<fs::path> inputs(memorygram_inputs.begin(), memorygram_inputs.end());
                const auto mgs = read_memorygram_inputs(inputs);
                if (out_path.empty()) {
                    write_memorygram_plot_csv(std::cout, mgs);
                } else {
                    std::ofstream out(out_path);
                    if (!out) {
                        throw DataError("cannot write '" + out_path + "'");
                    }
                    write_memorygram_plot_csv(out, mgs);
                }
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration error: " << e.what() << '\n';
        return kExitCalibration;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}
