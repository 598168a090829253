#include "occsim/config.hpp"

#include <fstream>

#include "occsim/errors.hpp"
#include "occsim/serialization.hpp"

namespace occsim {

namespace {

void require_object(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) {
        throw ConfigError(std::string(what) + " must be a JSON object");
    }
    for (const auto& item : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; })) {
            throw ConfigError(std::string("unknown key '") + item.key() + "' in " + what);
        }
    }
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        out = it->get<T>();
    }
}

bool has(const json& j, const char* key) {
    auto it = j.find(key);
    return it != j.end() && !it->is_null();
}

}  // namespace

json preset_document(const std::string& preset) {
    json doc;
    doc["preset"] = preset;
    doc["gpu"] = "gen9";
    doc["cache"] = json(default_geometry());
    doc["attack"] = json{{"probe_order", "REVERSE_RECENCY"}, {"probe_seed", 0}, {"aggregation", "max"}};
    doc["corpus"] = json{{"sites", 100},
                         {"trials", 100},
                         {"first_site_id", 0},
                         {"corpus_seed", 0},
                         {"viewport_scale", 1.0},
                         {"param_ranges", json(ProfileRanges{})}};
    doc["pipeline"] = json{{"classifier", json(ClassifierSpec{})}, {"folds", 10}, {"seed", 0}};
    doc["output_dir"] = "out";
    if (preset == "basic") {
        doc["attack"]["layout"] = "basic";
        doc["corpus"]["duration_s"] = 5.0;
        doc["pipeline"]["segments_per_half"] = 4;
    } else if (preset == "parallel") {
        doc["attack"]["layout"] = "parallel";
        doc["corpus"]["duration_s"] = 3.0;
        doc["pipeline"]["segments_per_half"] = 8;
    } else {
        throw ConfigError("unknown preset '" + preset + "' (expected basic or parallel)");
    }
    return doc;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like path.to.key=value: '" + assignment + "'");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }

    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) {
            throw ConfigError("empty key in override path '" + path + "'");
        }
        if (node->is_string()) {
            // A preset name expands to an object that names the preset.
            *node = json{{"preset", node->get<std::string>()}};
        } else if (node->is_null()) {
            *node = json::object();
        } else if (!node->is_object()) {
            throw ConfigError("override path '" + path + "' descends into a non-object");
        }
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

RunConfig resolve_config(const json& input) {
    const json& doc = input.contains("config") && input.contains("config_hash") ? input.at("config") : input;
    try {
        require_object(doc, {"preset", "gpu", "cache", "attack", "corpus", "pipeline", "output_dir"}, "config");
        RunConfig rc;

        json attack_doc = doc.value("attack", json::object());
        require_object(attack_doc,
                       {"layout", "timer", "probe_order", "probe_seed", "buffer_bytes", "dispatch_overhead_s",
                        "probe_clock_hz", "aggregation"},
                       "attack");
        if (has(doc, "gpu")) {
            attack_doc["gpu"] = doc.at("gpu");
        }
        if (has(doc, "cache")) {
            attack_doc["geo"] = doc.at("cache");
        }
        from_json(attack_doc, rc.attack);

        const json timer_doc = attack_doc.value("timer", json::object());
        if (!has(timer_doc, "jitter_rel")) {
            rc.attack.timer.jitter_rel = default_jitter_rel(rc.attack.gpu);
        }

        const json corpus = doc.value("corpus", json::object());
        require_object(corpus,
                       {"sites", "trials", "first_site_id", "corpus_seed", "duration_s", "viewport_scale",
                        "param_ranges"},
                       "corpus");
        get_opt(corpus, "sites", rc.corpus.sites);
        get_opt(corpus, "trials", rc.corpus.trials);
        get_opt(corpus, "first_site_id", rc.corpus.first_site_id);
        get_opt(corpus, "corpus_seed", rc.corpus.corpus_seed);
        get_opt(corpus, "duration_s", rc.corpus.duration_s);
        get_opt(corpus, "viewport_scale", rc.corpus.viewport_scale);
        if (has(corpus, "param_ranges")) {
            from_json(corpus.at("param_ranges"), rc.corpus.param_ranges);
        }
        rc.attack.duration_s = rc.corpus.duration_s;

        const json pipeline = doc.value("pipeline", json::object());
        require_object(pipeline, {"segments_per_half", "classifier", "folds", "seed"}, "pipeline");
        get_opt(pipeline, "segments_per_half", rc.pipeline.segments_per_half);
        if (has(pipeline, "classifier")) {
            from_json(pipeline.at("classifier"), rc.pipeline.classifier);
        }
        get_opt(pipeline, "folds", rc.pipeline.folds);
        get_opt(pipeline, "seed", rc.pipeline.seed);
        get_opt(doc, "output_dir", rc.output_dir);

        const bool need_dispatch = !has(attack_doc, "dispatch_overhead_s");
        const bool need_clock = !has(attack_doc, "probe_clock_hz");
        const bool need_ticks = !has(timer_doc, "ticks_per_cycle");
        if (need_dispatch || need_clock || need_ticks) {
            validate(rc.attack.geo);
            const Calibration cal = calibrate(rc.attack);
            if (need_dispatch) rc.attack.dispatch_overhead_s = cal.dispatch_overhead_s;
            if (need_clock) rc.attack.probe_clock_hz = cal.probe_clock_hz;
            if (need_ticks) rc.attack.timer.ticks_per_cycle = cal.ticks_per_cycle;
            rc.calibrated = true;
        }
        validate(rc);
        return rc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json file = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file '" + path + "'");
        }
        try {
            file = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError("config file '" + path + "': " + e.what());
        }
        if (file.contains("config") && file.contains("config_hash")) {
            file = file.at("config");
        }
    }
    // The preset may itself be overridden on the command line.
    std::string preset = file.value("preset", std::string("basic"));
    for (const auto& o : overrides) {
        if (o.rfind("preset=", 0) == 0) {
            preset = o.substr(7);
        }
    }
    json doc = preset_document(preset);
    doc.merge_patch(file);
    for (const auto& o : overrides) {
        apply_override(doc, o);
    }
    return resolve_config(doc);
}

void validate(const RunConfig& c) {
    validate(c.attack);
    if (c.corpus.sites == 0 || c.corpus.trials == 0) {
        throw ConfigError("corpus needs at least one site and one trial");
    }
    if (!(c.corpus.viewport_scale > 0.0 && c.corpus.viewport_scale <= 1.0)) {
        throw ConfigError("viewport_scale must lie in (0, 1]");
    }
    validate(c.corpus.param_ranges);
    validate(c.pipeline.classifier);
    if (c.pipeline.segments_per_half == 0) {
        throw ConfigError("segments_per_half must be >= 1");
    }
    if (c.pipeline.folds < 2) {
        throw ConfigError("folds must be >= 2");
    }
    const std::size_t samples = sample_count(c.attack);
    if (samples < 2 * c.pipeline.segments_per_half) {
        throw ConfigError("traces of " + std::to_string(samples) + " samples cannot be split into " +
                          std::to_string(c.pipeline.segments_per_half) + " segments per half");
    }
}

json to_document(const RunConfig& c) {
    json attack = c.attack;
    attack.erase("gpu");
    attack.erase("geo");
    attack.erase("duration_s");
    if (!c.attack.buffer_bytes) {
        attack["buffer_bytes"] = nullptr;
    }
    json doc;
    doc["gpu"] = c.attack.gpu;
    doc["cache"] = c.attack.geo;
    doc["attack"] = attack;
    doc["corpus"] = json{{"sites", c.corpus.sites},
                         {"trials", c.corpus.trials},
                         {"first_site_id", c.corpus.first_site_id},
                         {"corpus_seed", c.corpus.corpus_seed},
                         {"duration_s", c.corpus.duration_s},
                         {"viewport_scale", c.corpus.viewport_scale},
                         {"param_ranges", c.corpus.param_ranges}};
    doc["pipeline"] = json{{"segments_per_half", c.pipeline.segments_per_half},
                           {"classifier", c.pipeline.classifier},
                           {"folds", c.pipeline.folds},
                           {"seed", c.pipeline.seed}};
    doc["output_dir"] = c.output_dir;
    return doc;
}

}  // namespace occsim
