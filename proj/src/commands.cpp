#include "occsim/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "occsim/errors.hpp"
#include "occsim/features.hpp"
#include "occsim/parallel.hpp"
#include "occsim/serialization.hpp"

namespace occsim {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw DataError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw DataError("write to '" + path.string() + "' failed");
    }
}

std::string site_file_name(std::int64_t site) {
    std::ostringstream name;
    name << "site_" << std::setw(4) << std::setfill('0') << site << ".jsonl";
    return name.str();
}

}  // namespace

CollectResult cmd_collect(const RunConfig& config, std::size_t jobs) {
    validate(config);
    const auto& corpus = config.corpus;
    std::vector<SiteProfile> profiles;
    profiles.reserve(corpus.sites);
    for (std::uint32_t s = 0; s < corpus.sites; ++s) {
        const SiteProfile p = make_profile(corpus.first_site_id + s, corpus.corpus_seed, corpus.param_ranges);
        profiles.push_back(scale_profile(p, corpus.viewport_scale));
    }

    const std::size_t total = std::size_t{corpus.sites} * corpus.trials;
    std::vector<std::string> lines(total);
    parallel_for(total, jobs, [&](std::size_t i) {
        const auto& profile = profiles[i / corpus.trials];
        const std::uint64_t trial = i % corpus.trials;
        lines[i] = memorygram_to_jsonl(run_attack(config.attack, profile, trial));
    });

    const fs::path root(config.output_dir);
    CollectResult result;
    json files = json::array();
    for (std::uint32_t s = 0; s < corpus.sites; ++s) {
        const std::string name = site_file_name(profiles[s].site_id);
        const fs::path path = root / "memorygrams" / name;
        std::string content;
        for (std::uint32_t t = 0; t < corpus.trials; ++t) {
            content += lines[std::size_t{s} * corpus.trials + t];
            content += '\n';
        }
        auto out = open_output(path);
        out << content;
        close_output(out, path);
        files.push_back(json{{"site", profiles[s].site_id},
                             {"path", "memorygrams/" + name},
                             {"records", corpus.trials},
                             {"fnv1a", fnv1a_hex(content)}});
        result.files.push_back(path);
        result.records += corpus.trials;
    }

    json manifest;
    manifest["config"] = to_document(config);
    manifest["config_hash"] = config_hash(config.attack);
    manifest["corpus_seed"] = corpus.corpus_seed;
    manifest["trial_seeds"] = json{{"first", 0}, {"count", corpus.trials}};
    manifest["sampling_rate_hz"] = effective_sampling_rate(config.attack);
    manifest["samples_per_trace"] = sample_count(config.attack);
    manifest["profiles"] = profiles;
    manifest["files"] = files;
    result.manifest = root / "manifest.json";
    auto out = open_output(result.manifest);
    out << manifest.dump(2) << '\n';
    close_output(out, result.manifest);
    return result;
}

std::vector<Memorygram> read_memorygram_inputs(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::recursive_directory_iterator(in)) {
                if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
                    found.push_back(entry.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(in);
        }
    }
    std::vector<Memorygram> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) {
            throw DataError("cannot read '" + f.string() + "'");
        }
        try {
            auto mgs = read_memorygrams(in);
            std::move(mgs.begin(), mgs.end(), std::back_inserter(out));
        } catch (const DataError& e) {
            throw DataError(f.string() + ": " + e.what());
        }
    }
    return out;
}

Dataset memorygrams_to_dataset(const std::vector<Memorygram>& memorygrams, std::size_t segments_per_half,
                               std::vector<std::string>* skipped) {
    Dataset ds;
    std::vector<double> samples;
    for (const auto& mg : memorygrams) {
        const std::string id = std::to_string(mg.site_id) + ":" + std::to_string(mg.trial);
        if (mg.samples.size() < 2 * segments_per_half) {
            if (skipped) {
                skipped->push_back(id + ": " + std::to_string(mg.samples.size()) + " samples is too short");
            }
            continue;
        }
        samples.assign(mg.samples.begin(), mg.samples.end());
        ds.rows.push_back({extract_features(samples, segments_per_half), mg.site_id, id});
    }
    return ds;
}

FeaturesResult cmd_features(const std::vector<fs::path>& inputs, std::size_t segments_per_half,
                            const fs::path& output) {
    if (segments_per_half == 0) {
        throw ConfigError("segments_per_half must be >= 1");
    }
    const auto memorygrams = read_memorygram_inputs(inputs);
    if (memorygrams.empty()) {
        throw DataError("no memorygrams in input");
    }
    FeaturesResult result;
    const Dataset ds = memorygrams_to_dataset(memorygrams, segments_per_half, &result.skipped);
    if (ds.empty()) {
        throw DataError("every trace was too short for " + std::to_string(segments_per_half) +
                        " segments per half");
    }
    auto out = open_output(output);
    write_features_csv(out, ds);
    close_output(out, output);
    result.rows = ds.size();
    return result;
}

namespace {

Dataset read_csv_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read '" + path.string() + "'");
    }
    try {
        return read_features_csv(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace

EvalReport cmd_evaluate(const fs::path& features_csv, const EvaluateOptions& options, const fs::path& out) {
    if (options.mode != "closed" && options.mode != "open") {
        throw ConfigError("mode must be 'closed' or 'open'");
    }
    if (options.mode == "open" && !options.open_csv) {
        throw ConfigError("open mode requires an open-world features CSV");
    }
    const Dataset closed = read_csv_file(features_csv);
    if (closed.empty()) {
        throw DataError("features CSV has no rows");
    }
    EvalReport report;
    if (options.mode == "open") {
        const Dataset open = read_csv_file(*options.open_csv);
        if (!open.empty() && open.dim() != closed.dim()) {
            throw DataError("open-world features have a different dimension");
        }
        report = evaluate_open_world(closed, open, options.spec, options.folds, options.seed, options.jobs);
        report.mode = "open";
    } else {
        report = cross_validate(closed, options.spec, options.folds, options.seed, options.jobs);
    }

    auto json_out = open_output(out);
    json_out << json(report).dump(2) << '\n';
    close_output(json_out, out);

    const fs::path stem = out.parent_path() / out.stem();
    const fs::path per_class = stem.string() + ".per_class.csv";
    const fs::path confusion = stem.string() + ".confusion.csv";
    auto pc = open_output(per_class);
    write_per_class_csv(pc, report);
    close_output(pc, per_class);
    auto cf = open_output(confusion);
    write_confusion_csv(cf, report);
    close_output(cf, confusion);
    return report;
}

CalibrationReport cmd_calibrate(const RunConfig& config, const fs::path& out, const CalibrationAnchors& anchors) {
    CalibrationReport rep;
    rep.anchors = anchors;
    AttackConfig attack = config.attack;
    rep.calibration = calibrate(attack, rep.anchors);
    apply(attack, rep.calibration);

    AttackConfig basic = attack;
    basic.layout = rep.anchors.basic_layout;
    rep.basic_rate_hz = effective_sampling_rate(basic);
    AttackConfig parallel = attack;
    parallel.layout = rep.anchors.parallel_layout;
    parallel.gpu = rep.anchors.parallel_gpu;
    rep.parallel_rate_hz = effective_sampling_rate(parallel);

    // Mean of primed single-thread probes with timer jitter.
    CacheState state(basic.geo);
    ProbeChain chain = build_probe_chain(basic.effective_buffer_bytes(), basic.geo, basic.probe_order, basic.probe_seed);
    prime(state, chain);
    Rng rng(stream_key(0, 0, 0, StreamTag::timer));
    constexpr int kProbes = 100;
    double sum = 0.0;
    for (int i = 0; i < kProbes; ++i) {
        sum += static_cast<double>(probe_once(state, chain, basic.timer, Contention{}, rng));
    }
    rep.full_probe_ticks = sum / kProbes;

    json j = rep.calibration;
    j["hit_latency_cycles"] = attack.geo.hit_latency_cycles;
    j["miss_latency_cycles"] = attack.geo.miss_latency_cycles;
    j["anchors"] = json{{"basic_rate_hz", rep.anchors.basic_rate_hz},
                        {"basic_active_threads", rep.anchors.basic_layout.total_active_threads()},
                        {"parallel_rate_hz", rep.anchors.parallel_rate_hz},
                        {"parallel_active_threads", rep.anchors.parallel_layout.total_active_threads()},
                        {"target_probe_ticks", rep.anchors.target_probe_ticks}};
    j["achieved"] = json{{"basic_rate_hz", rep.basic_rate_hz},
                         {"parallel_rate_hz", rep.parallel_rate_hz},
                         {"full_probe_ticks_mean", rep.full_probe_ticks}};
    auto os = open_output(out);
    os << j.dump(2) << '\n';
    close_output(os, out);
    return rep;
}

void print_report(std::ostream& os, const EvalReport& report) {
    const auto& m = report.metrics;
    os << "mode " << report.mode << ", " << report.labels.size() << " classes, " << report.folds << " folds\n";
    os << std::fixed << std::setprecision(4);
    os << "overall    accuracy " << m.accuracy << "  precision " << m.macro_precision << "  recall "
       << m.macro_recall << "  f1 " << m.macro_f1 << '\n';
    if (report.sensitive) {
        const auto& s = *report.sensitive;
        os << "sensitive  accuracy " << s.accuracy << "  precision " << s.macro_precision << "  recall "
           << s.macro_recall << "  f1 " << s.macro_f1 << '\n';
    }
    os << "label       precision  recall     f1         support\n";
    for (std::size_t k = 0; k < report.labels.size(); ++k) {
        const auto& c = m.per_class[k];
        os << std::setw(10) << report.labels[k] << "  " << c.precision << "     " << c.recall << "     " << c.f1
           << "     " << c.support << '\n';
    }
    os.unsetf(std::ios::fixed);
}

void write_memorygram_plot_csv(std::ostream& os, const std::vector<Memorygram>& memorygrams) {
    os << "site,trial,iteration,ticks\n";
    for (const auto& mg : memorygrams) {
        for (std::size_t i = 0; i < mg.samples.size(); ++i) {
            os << mg.site_id << ',' << mg.trial << ',' << i << ',' << mg.samples[i] << '\n';
        }
    }
}

}  // namespace occsim
