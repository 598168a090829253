#include "occsim/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "occsim/errors.hpp"

namespace occsim {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) {
        throw ConfigError(std::string(what) + " must be a JSON object");
    }
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) {
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

const char* domain_name(Domain d) { return d == Domain::spy ? "SPY" : "VICTIM"; }

}  // namespace

std::string to_string(ReplacementPolicy p) {
    switch (p) {
        case ReplacementPolicy::lru: return "LRU";
        case ReplacementPolicy::random: return "RANDOM";
        case ReplacementPolicy::tree_plru: return "TREE_PLRU";
    }
    return "LRU";
}

std::string to_string(ProbeOrder o) {
    switch (o) {
        case ProbeOrder::prime_order: return "PRIME_ORDER";
        case ProbeOrder::reverse_recency: return "REVERSE_RECENCY";
        case ProbeOrder::random_permutation: return "RANDOM_PERMUTATION";
    }
    return "REVERSE_RECENCY";
}

namespace {

ReplacementPolicy parse_policy(const std::string& s) {
    if (s == "LRU") return ReplacementPolicy::lru;
    if (s == "RANDOM") return ReplacementPolicy::random;
    if (s == "TREE_PLRU") return ReplacementPolicy::tree_plru;
    throw ConfigError("unknown replacement_policy '" + s + "'");
}

ProbeOrder parse_order(const std::string& s) {
    if (s == "PRIME_ORDER") return ProbeOrder::prime_order;
    if (s == "REVERSE_RECENCY") return ProbeOrder::reverse_recency;
    if (s == "RANDOM_PERMUTATION") return ProbeOrder::random_permutation;
    throw ConfigError("unknown probe_order '" + s + "'");
}

Aggregation parse_aggregation(const std::string& s) {
    if (s == "max") return Aggregation::max;
    if (s == "mean") return Aggregation::mean;
    throw ConfigError("unknown aggregation '" + s + "'");
}

}  // namespace

// ---- cache ----------------------------------------------------------------

void to_json(json& j, const CacheGeometry& geo) {
    j = json{{"line_size_bytes", geo.line_size_bytes},
             {"set_bits", geo.set_bits},
             {"sub_bank_bits", geo.sub_bank_bits},
             {"bank_bits", geo.bank_bits},
             {"ways", geo.ways},
             {"replacement_policy", to_string(geo.replacement_policy)},
             {"hit_latency_cycles", geo.hit_latency_cycles},
             {"miss_latency_cycles", geo.miss_latency_cycles},
             {"partition", nullptr}};
    if (geo.partition) {
        json p = json::object();
        for (const Domain d : {Domain::spy, Domain::victim}) {
            if (const auto& r = geo.partition->range(d)) {
                p[domain_name(d)] = json::array({r->first, r->last});
            }
        }
        j["partition"] = p;
    }
}

void from_json(const json& j, CacheGeometry& geo) {
    check_keys(j,
               {"preset", "line_size_bytes", "set_bits", "sub_bank_bits", "bank_bits", "ways",
                "replacement_policy", "hit_latency_cycles", "miss_latency_cycles", "partition"},
               "cache geometry");
    if (auto it = j.find("preset"); it != j.end()) {
        const auto name = it->get<std::string>();
        if (name == "default") {
            geo = default_geometry();
        } else if (name == "paper_literal") {
            geo = paper_literal_geometry();
        } else {
            throw ConfigError("unknown cache preset '" + name + "'");
        }
    }
    get_opt(j, "line_size_bytes", geo.line_size_bytes);
    get_opt(j, "set_bits", geo.set_bits);
    get_opt(j, "sub_bank_bits", geo.sub_bank_bits);
    get_opt(j, "bank_bits", geo.bank_bits);
    get_opt(j, "ways", geo.ways);
    if (auto it = j.find("replacement_policy"); it != j.end()) {
        geo.replacement_policy = parse_policy(it->get<std::string>());
    }
    get_opt(j, "hit_latency_cycles", geo.hit_latency_cycles);
    get_opt(j, "miss_latency_cycles", geo.miss_latency_cycles);
    if (auto it = j.find("partition"); it != j.end()) {
        if (it->is_null()) {
            geo.partition.reset();
        } else {
            check_keys(*it, {"SPY", "VICTIM"}, "partition");
            WayPartition part;
            for (const Domain d : {Domain::spy, Domain::victim}) {
                if (auto r = it->find(domain_name(d)); r != it->end()) {
                    if (!r->is_array() || r->size() != 2) {
                        throw ConfigError("partition ranges are [first, last) pairs");
                    }
                    part.set(d, WayRange{(*r)[0].get<std::uint32_t>(), (*r)[1].get<std::uint32_t>()});
                }
            }
            geo.partition = part;
        }
    }
}

// ---- gpu ------------------------------------------------------------------

void to_json(json& j, const GpuConfig& gpu) {
    j = json{{"preset", gpu.name},
             {"num_subslices", gpu.num_subslices},
             {"eus_per_subslice", gpu.eus_per_subslice},
             {"threads_per_wavefront", gpu.threads_per_wavefront},
             {"max_threads_per_workgroup", gpu.max_threads_per_workgroup},
             {"slm_bytes_per_subslice", gpu.slm_bytes_per_subslice}};
}

void from_json(const json& j, GpuConfig& gpu) {
    if (j.is_string()) {
        gpu = gpu_preset(j.get<std::string>());
        return;
    }
    check_keys(j,
               {"preset", "num_subslices", "eus_per_subslice", "threads_per_wavefront",
                "max_threads_per_workgroup", "slm_bytes_per_subslice"},
               "gpu");
    if (auto it = j.find("preset"); it != j.end()) {
        gpu = gpu_preset(it->get<std::string>());
    }
    get_opt(j, "num_subslices", gpu.num_subslices);
    get_opt(j, "eus_per_subslice", gpu.eus_per_subslice);
    get_opt(j, "threads_per_wavefront", gpu.threads_per_wavefront);
    get_opt(j, "max_threads_per_workgroup", gpu.max_threads_per_workgroup);
    get_opt(j, "slm_bytes_per_subslice", gpu.slm_bytes_per_subslice);
}

void to_json(json& j, const TimerModel& timer) {
    j = json{{"ticks_per_cycle", timer.ticks_per_cycle}, {"jitter_rel", timer.jitter_rel}};
}

void from_json(const json& j, TimerModel& timer) {
    check_keys(j, {"ticks_per_cycle", "jitter_rel"}, "timer");
    get_opt(j, "ticks_per_cycle", timer.ticks_per_cycle);
    get_opt(j, "jitter_rel", timer.jitter_rel);
}

void to_json(json& j, const SpyLayout& layout) {
    j = json{{"num_workgroups", layout.num_workgroups},
             {"counting_threads_per_workgroup", layout.counting_threads_per_workgroup},
             {"attacker_wavefronts_per_workgroup", layout.attacker_wavefronts_per_workgroup},
             {"active_threads_per_attacker_wavefront", layout.active_threads_per_attacker_wavefront}};
}

void from_json(const json& j, SpyLayout& layout) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "basic") {
            layout = basic_layout();
        } else if (name == "thread_parallel") {
            layout = thread_parallel_layout();
        } else {
            throw ConfigError("unknown layout preset '" + name + "'");
        }
        return;
    }
    check_keys(j,
               {"num_workgroups", "counting_threads_per_workgroup", "attacker_wavefronts_per_workgroup",
                "active_threads_per_attacker_wavefront"},
               "layout");
    get_opt(j, "num_workgroups", layout.num_workgroups);
    get_opt(j, "counting_threads_per_workgroup", layout.counting_threads_per_workgroup);
    get_opt(j, "attacker_wavefronts_per_workgroup", layout.attacker_wavefronts_per_workgroup);
    get_opt(j, "active_threads_per_attacker_wavefront", layout.active_threads_per_attacker_wavefront);
}

// ---- attack ---------------------------------------------------------------

void to_json(json& j, const AttackConfig& c) {
    j = json{{"layout", c.layout},
             {"gpu", c.gpu},
             {"geo", c.geo},
             {"timer", c.timer},
             {"probe_order", to_string(c.probe_order)},
             {"probe_seed", c.probe_seed},
             {"buffer_bytes", c.effective_buffer_bytes()},
             {"dispatch_overhead_s", c.dispatch_overhead_s},
             {"probe_clock_hz", c.probe_clock_hz},
             {"duration_s", c.duration_s},
             {"aggregation", c.aggregation == Aggregation::max ? "max" : "mean"}};
}

void from_json(const json& j, AttackConfig& c) {
    check_keys(j,
               {"layout", "gpu", "geo", "timer", "probe_order", "probe_seed", "buffer_bytes",
                "dispatch_overhead_s", "probe_clock_hz", "duration_s", "aggregation"},
               "attack config");
    if (auto it = j.find("gpu"); it != j.end()) {
        c.gpu = it->get<GpuConfig>();
    }
    if (auto it = j.find("layout"); it != j.end()) {
        if (it->is_string() && it->get<std::string>() == "parallel") {
            c.layout = full_parallel_layout(c.gpu);
        } else {
            c.layout = it->get<SpyLayout>();
        }
    }
    if (auto it = j.find("geo"); it != j.end()) {
        from_json(*it, c.geo);
    }
    if (auto it = j.find("timer"); it != j.end()) {
        from_json(*it, c.timer);
    }
    if (auto it = j.find("probe_order"); it != j.end()) {
        c.probe_order = parse_order(it->get<std::string>());
    }
    get_opt(j, "probe_seed", c.probe_seed);
    if (auto it = j.find("buffer_bytes"); it != j.end()) {
        if (it->is_null()) {
            c.buffer_bytes.reset();
        } else {
            c.buffer_bytes = it->get<std::uint64_t>();
        }
    }
    get_opt(j, "dispatch_overhead_s", c.dispatch_overhead_s);
    get_opt(j, "probe_clock_hz", c.probe_clock_hz);
    get_opt(j, "duration_s", c.duration_s);
    if (auto it = j.find("aggregation"); it != j.end()) {
        c.aggregation = parse_aggregation(it->get<std::string>());
    }
}

void to_json(json& j, const Calibration& cal) {
    j = json{{"dispatch_overhead_s", cal.dispatch_overhead_s},
             {"probe_clock_hz", cal.probe_clock_hz},
             {"ticks_per_cycle", cal.ticks_per_cycle}};
}

void from_json(const json& j, Calibration& cal) {
    cal.dispatch_overhead_s = j.at("dispatch_overhead_s").get<double>();
    cal.probe_clock_hz = j.at("probe_clock_hz").get<double>();
    cal.ticks_per_cycle = j.at("ticks_per_cycle").get<double>();
}

// ---- victim ---------------------------------------------------------------

namespace {

template <typename T>
json range_json(const Range<T>& r) {
    return json::array({r.lo, r.hi});
}

template <typename T>
void range_opt(const json& j, const char* key, Range<T>& r) {
    if (auto it = j.find(key); it != j.end()) {
        if (!it->is_array() || it->size() != 2) {
            throw ConfigError(std::string(key) + " must be a [lo, hi] pair");
        }
        r.lo = (*it)[0].get<T>();
        r.hi = (*it)[1].get<T>();
    }
}

}  // namespace

void to_json(json& j, const ProfileRanges& r) {
    j = json{{"footprint_lines", range_json(r.footprint_lines)},
             {"burst_rate_hz", range_json(r.burst_rate_hz)},
             {"load_intensity", range_json(r.load_intensity)},
             {"settle_start_s", range_json(r.settle_start_s)},
             {"settle_intensity", range_json(r.settle_intensity)},
             {"idle_gap_s", range_json(r.idle_gap_s)},
             {"idle_intensity", range_json(r.idle_intensity)},
             {"trial_jitter", r.trial_jitter}};
}

void from_json(const json& j, ProfileRanges& r) {
    check_keys(j,
               {"footprint_lines", "burst_rate_hz", "load_intensity", "settle_start_s", "settle_intensity",
                "idle_gap_s", "idle_intensity", "trial_jitter"},
               "param_ranges");
    range_opt(j, "footprint_lines", r.footprint_lines);
    range_opt(j, "burst_rate_hz", r.burst_rate_hz);
    range_opt(j, "load_intensity", r.load_intensity);
    range_opt(j, "settle_start_s", r.settle_start_s);
    range_opt(j, "settle_intensity", r.settle_intensity);
    range_opt(j, "idle_gap_s", r.idle_gap_s);
    range_opt(j, "idle_intensity", r.idle_intensity);
    get_opt(j, "trial_jitter", r.trial_jitter);
}

void to_json(json& j, const SiteProfile& p) {
    json env = json::array();
    for (const auto& ph : p.envelope) {
        env.push_back(json::array({ph.start_s, ph.intensity}));
    }
    j = json{{"site_id", p.site_id},
             {"corpus_seed", p.corpus_seed},
             {"footprint_lines", p.footprint_lines},
             {"burst_rate_hz", p.burst_rate_hz},
             {"envelope", env},
             {"address_base", p.address_base},
             {"viewport_scale", p.viewport_scale},
             {"trial_jitter", p.trial_jitter}};
}

void from_json(const json& j, SiteProfile& p) {
    check_keys(j,
               {"site_id", "corpus_seed", "footprint_lines", "burst_rate_hz", "envelope", "address_base",
                "viewport_scale", "trial_jitter"},
               "site profile");
    p.site_id = j.at("site_id").get<std::int64_t>();
    p.corpus_seed = j.at("corpus_seed").get<std::uint64_t>();
    p.footprint_lines = j.at("footprint_lines").get<std::uint32_t>();
    p.burst_rate_hz = j.at("burst_rate_hz").get<double>();
    p.envelope.clear();
    for (const auto& ph : j.at("envelope")) {
        p.envelope.push_back({ph.at(0).get<double>(), ph.at(1).get<double>()});
    }
    p.address_base = j.at("address_base").get<std::uint64_t>();
    p.viewport_scale = j.at("viewport_scale").get<double>();
    get_opt(j, "trial_jitter", p.trial_jitter);
}

void to_json(json& j, const RenderEvent& e) { j = json{{"t", e.time_s}, {"addr", e.addr}}; }

void from_json(const json& j, RenderEvent& e) {
    e.time_s = j.at("t").get<double>();
    e.addr = j.at("addr").get<std::uint64_t>();
}

// ---- classification -------------------------------------------------------

void to_json(json& j, const ClassifierSpec& s) {
    if (s.kind == ClassifierKind::knn) {
        j = json{{"kind", "knn"}, {"k", s.k}};
    } else {
        j = json{{"kind", "rf"},
                 {"trees", s.trees},
                 {"min_leaf", s.min_leaf},
                 {"max_features", s.max_features},
                 {"seed", s.seed}};
    }
}

void from_json(const json& j, ClassifierSpec& s) {
    check_keys(j, {"kind", "k", "trees", "min_leaf", "max_features", "seed"}, "classifier");
    if (auto it = j.find("kind"); it != j.end()) {
        const auto kind = it->get<std::string>();
        if (kind == "knn") {
            s.kind = ClassifierKind::knn;
        } else if (kind == "rf") {
            s.kind = ClassifierKind::rf;
        } else {
            throw ConfigError("unknown classifier kind '" + kind + "'");
        }
    }
    get_opt(j, "k", s.k);
    get_opt(j, "trees", s.trees);
    get_opt(j, "min_leaf", s.min_leaf);
    get_opt(j, "max_features", s.max_features);
    get_opt(j, "seed", s.seed);
}

namespace {

json metrics_json(const Metrics& m, const std::vector<std::int64_t>& labels) {
    json per_class = json::array();
    for (std::size_t k = 0; k < m.per_class.size(); ++k) {
        const auto& c = m.per_class[k];
        per_class.push_back(json{{"label", labels[k]},
                                 {"precision", c.precision},
                                 {"recall", c.recall},
                                 {"f1", c.f1},
                                 {"support", c.support}});
    }
    return json{{"per_class", per_class},
                {"macro", json{{"precision", m.macro_precision}, {"recall", m.macro_recall}, {"f1", m.macro_f1}}},
                {"accuracy", m.accuracy}};
}

Metrics metrics_from_json(const json& j, std::vector<std::int64_t>* labels) {
    Metrics m;
    for (const auto& c : j.at("per_class")) {
        m.per_class.push_back({c.at("precision").get<double>(), c.at("recall").get<double>(),
                               c.at("f1").get<double>(), c.at("support").get<std::uint64_t>()});
        if (labels) {
            labels->push_back(c.at("label").get<std::int64_t>());
        }
    }
    const auto& macro = j.at("macro");
    m.macro_precision = macro.at("precision").get<double>();
    m.macro_recall = macro.at("recall").get<double>();
    m.macro_f1 = macro.at("f1").get<double>();
    m.accuracy = j.at("accuracy").get<double>();
    return m;
}

}  // namespace

void to_json(json& j, const EvalReport& r) {
    json flat = json::array();
    for (const auto& row : r.confusion) {
        for (auto v : row) {
            flat.push_back(v);
        }
    }
    j = json{{"mode", r.mode},
             {"config", json{{"classifier", r.spec}, {"folds", r.folds}, {"seed", r.seed}}},
             {"labels", r.labels},
             {"n_classes", r.labels.size()},
             {"confusion", flat},
             {"overall", metrics_json(r.metrics, r.labels)},
             {"fold_of", r.fold_of}};
    if (r.sensitive) {
        std::vector<std::int64_t> sens;
        for (auto l : r.labels) {
            if (l != kNonSensitive) {
                sens.push_back(l);
            }
        }
        j["sensitive"] = metrics_json(*r.sensitive, sens);
    }
}

void from_json(const json& j, EvalReport& r) {
    r.mode = j.at("mode").get<std::string>();
    const auto& cfg = j.at("config");
    r.spec = cfg.at("classifier").get<ClassifierSpec>();
    r.folds = cfg.at("folds").get<std::size_t>();
    r.seed = cfg.at("seed").get<std::uint64_t>();
    r.labels = j.at("labels").get<std::vector<std::int64_t>>();
    const std::size_t n = r.labels.size();
    const auto flat = j.at("confusion").get<std::vector<std::uint64_t>>();
    if (flat.size() != n * n) {
        throw DataError("confusion matrix size does not match label count");
    }
    r.confusion.assign(n, std::vector<std::uint64_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            r.confusion[i][k] = flat[i * n + k];
        }
    }
    r.metrics = metrics_from_json(j.at("overall"), nullptr);
    r.fold_of = j.at("fold_of").get<std::vector<std::uint32_t>>();
    if (auto it = j.find("sensitive"); it != j.end()) {
        r.sensitive = metrics_from_json(*it, nullptr);
    } else {
        r.sensitive.reset();
    }
}

// ---- hashing --------------------------------------------------------------

std::string canonical_json(const AttackConfig& config) { return json(config).dump(); }

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const AttackConfig& config) { return fnv1a_hex(canonical_json(config)); }

// ---- memorygram JSONL -----------------------------------------------------

std::string memorygram_to_jsonl(const Memorygram& mg) {
    nlohmann::ordered_json j;
    j["site"] = mg.site_id;
    j["trial"] = mg.trial;
    j["rate_hz"] = mg.sampling_rate_hz;
    j["config_hash"] = mg.config_hash;
    j["samples"] = mg.samples;
    return j.dump();
}

Memorygram memorygram_from_jsonl(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed memorygram record: ") + e.what());
    }
    try {
        Memorygram mg;
        mg.site_id = j.at("site").get<std::int64_t>();
        mg.trial = j.at("trial").get<std::uint64_t>();
        mg.sampling_rate_hz = j.at("rate_hz").get<double>();
        mg.config_hash = j.at("config_hash").get<std::string>();
        mg.samples = j.at("samples").get<std::vector<std::uint64_t>>();
        return mg;
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid memorygram record: ") + e.what());
    }
}

std::vector<Memorygram> read_memorygrams(std::istream& in) {
    std::vector<Memorygram> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            out.push_back(memorygram_from_jsonl(line));
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

// ---- CSV ------------------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t lineno) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(lineno) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

void write_features_csv(std::ostream& out, const Dataset& dataset) {
    const std::size_t d = dataset.dim();
    out << "label";
    for (std::size_t i = 0; i < d; ++i) {
        out << ",f" << i;
    }
    out << '\n';
    for (const auto& r : dataset.rows) {
        out << r.label;
        for (const double v : r.values) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

Dataset read_features_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("features CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_csv(line);
    if (header.empty() || header[0] != "label") {
        throw DataError("features CSV header must start with 'label'");
    }
    const std::size_t d = header.size() - 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (header[i + 1] != "f" + std::to_string(i)) {
            throw DataError("features CSV header column " + std::to_string(i + 1) + " must be f" +
                            std::to_string(i));
        }
    }
    Dataset ds;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != d + 1) {
            throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(d + 1) + " columns");
        }
        FeatureVector fv;
        fv.label = parse_number<std::int64_t>(cells[0], lineno);
        fv.values.reserve(d);
        for (std::size_t i = 1; i <= d; ++i) {
            fv.values.push_back(parse_number<double>(cells[i], lineno));
        }
        fv.source = "row" + std::to_string(lineno - 1);
        ds.rows.push_back(std::move(fv));
    }
    return ds;
}

void write_per_class_csv(std::ostream& out, const EvalReport& report) {
    out << "label,precision,recall,f1,support\n";
    for (std::size_t k = 0; k < report.labels.size(); ++k) {
        const auto& c = report.metrics.per_class[k];
        out << report.labels[k] << ',' << format_double(c.precision) << ',' << format_double(c.recall) << ','
            << format_double(c.f1) << ',' << c.support << '\n';
    }
}

void write_confusion_csv(std::ostream& out, const EvalReport& report) {
    out << "true,predicted,count\n";
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        for (std::size_t k = 0; k < report.labels.size(); ++k) {
            out << report.labels[i] << ',' << report.labels[k] << ',' << report.confusion[i][k] << '\n';
        }
    }
}

}  // namespace occsim
