// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "occsim/cache.hpp"
#include "occsim/calibration.hpp"
#include "occsim/channel.hpp"
#include "occsim/commands.hpp"
#include "occsim/config.hpp"
#include "occsim/evaluation.hpp"
#include "occsim/features.hpp"
#include "occsim/parallel.hpp"
#include "occsim/serialization.hpp"
#include "occsim/victim.hpp"
#include "support/lru_oracle.hpp"
#include "support/moments_oracle.hpp"

namespace fs = std::filesystem;
using namespace occsim;

namespace {

// Pinned tolerances.
constexpr int kOracleTraces = 200;
constexpr int kOracleMaxAccesses = 10000;
constexpr double kOracleTimeLimitS = 10.0;
constexpr double kBasicRateHz = 50.0;
constexpr double kBasicRateTol = 0.02;
constexpr double kParallelRateHz = 170.0;
constexpr double kParallelRateTol = 0.05;
constexpr double kCalibrationTimeLimitS = 5.0;
constexpr int kMomentVectors = 1000;
constexpr double kMomentRelTol = 1e-12;
constexpr std::size_t kMomentMaxLength = 10000;
constexpr int kSpearmanWindows = 1000;
constexpr double kSpearmanMin = 0.9;
constexpr std::uint32_t kSites = 20;
constexpr std::uint32_t kTrials = 40;
constexpr std::size_t kFolds = 10;
constexpr double kRfF1Min = 0.80;
constexpr double kKnnF1Min = 0.70;
constexpr double kChance = 1.0 / kSites;
constexpr double kEndToEndTimeLimitS = 300.0;
constexpr std::uint64_t kCorpusSeeds[] = {0, 1, 2};
constexpr std::uint32_t kViewportTrainTrials = 30;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

CacheGeometry small_geometry(std::uint32_t set_bits, std::uint32_t ways, ReplacementPolicy policy) {
    CacheGeometry geo;
    geo.set_bits = set_bits;
    geo.sub_bank_bits = 0;
    geo.bank_bits = 0;
    geo.ways = ways;
    geo.replacement_policy = policy;
    return geo;
}

// Corpus helpers ------------------------------------------------------------

struct CorpusSpec {
    AttackConfig attack;
    ProfileRanges ranges;
    std::uint64_t corpus_seed = 0;
    std::uint32_t first_trial = 0;
    std::uint32_t trials = kTrials;
    double viewport_scale = 1.0;
    std::size_t segments = 4;
};

Dataset collect_dataset(const CorpusSpec& spec) {
    std::vector<SiteProfile> profiles;
    for (std::uint32_t s = 0; s < kSites; ++s) {
        profiles.push_back(scale_profile(make_profile(s, spec.corpus_seed, spec.ranges), spec.viewport_scale));
    }
    const std::size_t total = std::size_t{kSites} * spec.trials;
    std::vector<Memorygram> mgs(total);
    parallel_for(total, 0, [&](std::size_t i) {
        mgs[i] = run_attack(spec.attack, profiles[i / spec.trials], spec.first_trial + i % spec.trials);
    });
    return memorygrams_to_dataset(mgs, spec.segments);
}

double holdout_accuracy(const Dataset& train_set, const Dataset& test_set, const ClassifierSpec& spec) {
    const Model model = train(train_set, spec);
    std::size_t ok = 0;
    for (const auto& r : test_set.rows) {
        ok += predict(model, r.values) == r.label;
    }
    return static_cast<double>(ok) / static_cast<double>(test_set.size());
}

// Criteria ------------------------------------------------------------------

Outcome cache_oracle() {
    const auto t0 = Clock::now();
    Rng rng(stream_key(1, 0, 0, StreamTag::trace));
    std::uint64_t mismatches = 0;
    std::uint64_t accesses = 0;
    for (int trace = 0; trace < kOracleTraces; ++trace) {
        const auto set_bits = static_cast<std::uint32_t>(rng.below(5));
        const auto ways = static_cast<std::uint32_t>(1 + rng.below(4));
        const CacheGeometry geo = small_geometry(set_bits, ways, ReplacementPolicy::lru);
        CacheState state(geo);
        oracle::LruCache ref(geo.line_size_bytes, geo.composite_sets(), ways);
        const std::uint64_t n = 1 + rng.below(kOracleMaxAccesses);
        const std::uint64_t distinct = 1 + rng.below(4 * geo.capacity_lines());
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::uint64_t addr = rng.below(distinct) * geo.line_size_bytes + rng.below(geo.line_size_bytes);
            mismatches += state.access(addr, Domain::spy).hit != ref.access(addr);
        }
        accesses += n;
    }
    const double t = seconds_since(t0);
    return {mismatches == 0 && t < kOracleTimeLimitS,
            fmt("%llu mismatches over %d traces / %llu accesses in %.2f s (need 0, < %.0f s)",
                static_cast<unsigned long long>(mismatches), kOracleTraces,
                static_cast<unsigned long long>(accesses), t, kOracleTimeLimitS)};
}

Outcome reverse_recency() {
    std::uint64_t cases = 0;
    std::uint64_t failures = 0;
    Rng rng(stream_key(2, 0, 0, StreamTag::trace));
    for (std::uint32_t set_bits = 0; set_bits <= 4; ++set_bits) {
        for (std::uint32_t ways = 1; ways <= 8; ++ways) {
            const CacheGeometry geo = small_geometry(set_bits, ways, ReplacementPolicy::lru);
            const std::uint64_t sets = geo.composite_sets();
            // Uniform v for every v in [0, ways], then mixed per-set counts.
            std::vector<std::vector<std::uint32_t>> plans;
            for (std::uint32_t v = 0; v <= ways; ++v) {
                plans.emplace_back(sets, v);
            }
            for (int k = 0; k < 8; ++k) {
                std::vector<std::uint32_t> plan(sets);
                for (auto& v : plan) {
                    v = static_cast<std::uint32_t>(rng.below(ways + 1));
                }
                plans.push_back(plan);
            }
            for (const auto& plan : plans) {
                CacheState state(geo);
                ProbeChain chain = build_probe_chain(geo.capacity_bytes(), geo, ProbeOrder::reverse_recency, 0);
                prime(state, chain);
                std::vector<std::vector<std::uint64_t>> primed(sets);
                for (std::uint64_t s = 0; s < sets; ++s) {
                    primed[s] = state.resident_lines(s);
                    std::sort(primed[s].begin(), primed[s].end());
                }
                const std::vector<ThreadPartition> whole{{0, chain.size(), 0}};
                for (int round = 0; round < 2; ++round) {
                    for (std::uint64_t s = 0; s < sets; ++s) {
                        for (std::uint32_t i = 0; i < plan[s]; ++i) {
                            state.access(line_address(1u << 20 | (round * 64 + i), static_cast<std::uint32_t>(s), geo),
                                         Domain::victim);
                        }
                    }
                    std::vector<std::uint32_t> per_set;
                    probe_pass(state, chain, whole, &per_set);
                    bool ok = true;
                    for (std::uint64_t s = 0; s < sets; ++s) {
                        auto lines = state.resident_lines(s);
                        std::sort(lines.begin(), lines.end());
                        ok = ok && per_set[s] == plan[s] && lines == primed[s];
                    }
                    ++cases;
                    failures += !ok;
                }
            }
        }
    }
    return {failures == 0,
            fmt("%llu/%llu probes exact (v misses per set, primed state restored; 1-16 sets x 1-8 ways)",
                static_cast<unsigned long long>(cases - failures), static_cast<unsigned long long>(cases))};
}

Outcome partition_isolation() {
    int runs = 0;
    int identical = 0;
    for (const auto policy : {ReplacementPolicy::lru, ReplacementPolicy::random, ReplacementPolicy::tree_plru}) {
        for (AttackConfig config : {basic_attack_config(), parallel_attack_config()}) {
            WayPartition p;
            p.set(Domain::spy, {0, 4});
            p.set(Domain::victim, {4, 8});
            config.geo.partition = p;
            config.geo.replacement_policy = policy;
            config.buffer_bytes = config.geo.capacity_bytes() / 2;
            for (std::int64_t site = 0; site < 3; ++site) {
                const SiteProfile profile = make_profile(site, 0);
                const auto attacked = memorygram_to_jsonl(run_attack(config, profile, 0));
                const auto quiet = memorygram_to_jsonl(run_attack_events(config, {}, site, 0, 0));
                ++runs;
                identical += attacked == quiet;
            }
        }
    }
    return {identical == runs,
            fmt("%d/%d memorygrams byte-identical to no-victim runs (LRU, RANDOM, TREE_PLRU x basic, parallel)",
                identical, runs)};
}

Outcome calibration_anchors() {
    const auto t0 = Clock::now();
    const AttackConfig basic = basic_attack_config();
    const AttackConfig parallel = parallel_attack_config();
    const double r1 = effective_sampling_rate(basic);
    const double r2 = effective_sampling_rate(parallel);
    AttackConfig probe = basic;
    probe.duration_s = 5.0;
    const Memorygram mg = run_attack_events(probe, {}, 0, 0, 0);
    const double mean =
        std::accumulate(mg.samples.begin(), mg.samples.end(), 0.0) / static_cast<double>(mg.samples.size());
    const double t = seconds_since(t0);
    const bool ok = std::abs(r1 - kBasicRateHz) <= kBasicRateTol * kBasicRateHz &&
                    std::abs(r2 - kParallelRateHz) <= kParallelRateTol * kParallelRateHz &&
                    mean >= kProbeTickBandLow && mean <= kProbeTickBandHigh && t < kCalibrationTimeLimitS;
    return {ok, fmt("basic %.3f Hz (50 +-2%%), 24 threads %.3f Hz (170 +-5%%), full-probe mean %.0f ticks "
                    "([80000, 120000]), %.2f s (< 5 s)",
                    r1, r2, mean, t)};
}

Outcome feature_law() {
    std::vector<double> ramp(510);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    const std::size_t n60 = extract_features(std::span<const double>(ramp).first(250), 4).size();
    const std::size_t n108 = extract_features(ramp, 8).size();

    Rng rng(stream_key(5, 0, 0, StreamTag::trace));
    double worst = 0.0;
    for (int i = 0; i < kMomentVectors; ++i) {
        const std::size_t n = 2 + rng.below(kMomentMaxLength - 1);
        std::vector<double> v(n);
        // Memorygram-like: a base level plus skewed, integer-valued excursions.
        const double base = rng.uniform(1e3, 1e5);
        const double scale = rng.uniform(10, 5e3);
        for (auto& x : v) {
            x = std::round(base + scale * rng.exponential(1.0));
        }
        const WindowStats s = window_stats(v);
        const oracle::Moments m = oracle::two_pass(v);
        const double got[] = {s.min, s.max, s.mean, s.std, s.skew, s.kurtosis};
        const double want[] = {m.min, m.max, m.mean, m.std, m.skew, m.kurtosis};
        for (int k = 0; k < 6; ++k) {
            worst = std::max(worst, std::abs(got[k] - want[k]) / std::max(std::abs(want[k]), 1e-300));
        }
    }
    return {n60 == 60 && n108 == 108 && worst <= kMomentRelTol,
            fmt("lengths %zu (segments=4), %zu (segments=8); max relative moment error %.2e over %d vectors "
                "(<= 1e-12)",
                n60, n108, worst, kMomentVectors)};
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) {
            ++j;
        }
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

Outcome occupancy_monotonicity() {
    AttackConfig config = basic_attack_config();
    config.geo.replacement_policy = ReplacementPolicy::random;
    config.duration_s = kSpearmanWindows / effective_sampling_rate(config);
    const double rate = effective_sampling_rate(config);

    // Window i: the victim touches d_i distinct lines drawn from a pool the
    // size of the cache.
    Rng rng(stream_key(6, 0, 0, StreamTag::trace));
    const std::uint32_t pool = static_cast<std::uint32_t>(config.geo.capacity_lines());
    std::vector<std::uint32_t> lines(pool);
    std::vector<RenderEvent> events;
    std::vector<double> distinct;
    for (int i = 0; i < kSpearmanWindows; ++i) {
        const auto d = static_cast<std::uint32_t>(rng.below(pool / 2 + 1));
        std::iota(lines.begin(), lines.end(), 0U);
        for (std::uint32_t k = 0; k < d; ++k) {
            std::swap(lines[k], lines[k + rng.below(pool - k)]);
            events.push_back({(i + 0.5) / rate, site_address_base(0) + std::uint64_t{lines[k]} * 64});
        }
        distinct.push_back(d);
    }
    const Memorygram mg = run_attack_events(config, events, 0, 0, 0);
    std::vector<double> ticks(mg.samples.begin(), mg.samples.end());
    if (ticks.size() != distinct.size()) {
        return {false, fmt("expected %d samples, got %zu", kSpearmanWindows, ticks.size())};
    }
    const double rho = pearson(ranks(distinct), ranks(ticks));
    return {rho > kSpearmanMin,
            fmt("Spearman rho %.4f over %d windows, RANDOM replacement (> 0.9)", rho, kSpearmanWindows)};
}

struct ClosedWorld {
    double rf_f1 = 0.0;
    double knn_f1 = 0.0;
};

ClosedWorld closed_world_scores(const Dataset& ds) {
    return {cross_validate(ds, rf_spec(), kFolds, 0).metrics.macro_f1,
            cross_validate(ds, knn_spec(), kFolds, 0).metrics.macro_f1};
}

Dataset basic_seed0;  // reused by criterion 8

Outcome end_to_end() {
    const auto t0 = Clock::now();
    CorpusSpec spec;
    spec.attack = basic_attack_config();
    basic_seed0 = collect_dataset(spec);
    const ClosedWorld s = closed_world_scores(basic_seed0);

    Dataset shuffled = basic_seed0;
    Rng rng(stream_key(7, 0, 0, StreamTag::folds));
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled.rows[i - 1].label, shuffled.rows[rng.below(i)].label);
    }
    const double control = cross_validate(shuffled, rf_spec(), kFolds, 0).metrics.accuracy;
    const double sigma = std::sqrt(kChance * (1 - kChance) / static_cast<double>(shuffled.size()));
    const double t = seconds_since(t0);
    const bool ok = s.rf_f1 >= kRfF1Min && s.knn_f1 >= kKnnF1Min && std::abs(control - kChance) <= 3 * sigma &&
                    t < kEndToEndTimeLimitS;
    return {ok, fmt("RF macro F1 %.4f (>= 0.80), KNN %.4f (>= 0.70), shuffled-label accuracy %.4f "
                    "(0.05 +- %.4f), %.1f s (< 300 s)",
                    s.rf_f1, s.knn_f1, control, 3 * sigma, t)};
}

// Narrow footprints put the basic channel in its measurement-limited regime
// (one miss is ~1/18 of the single-thread timer noise); at the default
// footprints both configs sit near F1 = 1 and the ordering is noise.
ProfileRanges narrow_footprint_ranges() {
    ProfileRanges r;
    r.footprint_lines = {4, 256};
    return r;
}

std::string compare_configs(const ProfileRanges& ranges, const Dataset* basic_seed0_cache, int& wins) {
    std::string detail;
    wins = 0;
    for (const std::uint64_t seed : kCorpusSeeds) {
        CorpusSpec b;
        b.attack = basic_attack_config();
        b.ranges = ranges;
        b.corpus_seed = seed;
        CorpusSpec p = b;
        p.attack = parallel_attack_config();
        p.segments = 8;
        const Dataset basic = seed == 0 && basic_seed0_cache ? *basic_seed0_cache : collect_dataset(b);
        const ClosedWorld sb = closed_world_scores(basic);
        const ClosedWorld sp = closed_world_scores(collect_dataset(p));
        wins += (sp.rf_f1 > sb.rf_f1) + (sp.knn_f1 > sb.knn_f1);
        detail += fmt("%sseed %llu RF %.4f/%.4f KNN %.4f/%.4f", detail.empty() ? "" : ", ",
                      static_cast<unsigned long long>(seed), sp.rf_f1, sb.rf_f1, sp.knn_f1, sb.knn_f1);
    }
    return detail;
}

Outcome parallelism_benefit() {
    int wins = 0;
    const std::string narrow = compare_configs(narrow_footprint_ranges(), nullptr, wins);
    int default_wins = 0;
    const std::string defaults =
        compare_configs(ProfileRanges{}, basic_seed0.empty() ? nullptr : &basic_seed0, default_wins);
    const int needed = 2 * static_cast<int>(std::size(kCorpusSeeds));
    return {wins == needed,
            fmt("parallel/basic macro F1, footprint 4-256 corpus: %s -> %d/%d strictly greater (need all); "
                "default corpus (informational): %s -> %d/%d",
                narrow.c_str(), wins, needed, defaults.c_str(), default_wins, needed)};
}

Outcome viewport_degradation() {
    CorpusSpec spec;
    spec.attack = basic_attack_config();
    spec.trials = kViewportTrainTrials;
    const Dataset train_set = collect_dataset(spec);
    spec.first_trial = kViewportTrainTrials;
    spec.trials = kTrials - kViewportTrainTrials;
    const Dataset same = collect_dataset(spec);
    spec.viewport_scale = 0.7;
    const Dataset s07 = collect_dataset(spec);
    spec.viewport_scale = 0.5;
    const Dataset s05 = collect_dataset(spec);

    const ClassifierSpec rf = rf_spec();
    const double a10 = holdout_accuracy(train_set, same, rf);
    const double a07 = holdout_accuracy(train_set, s07, rf);
    const double a05 = holdout_accuracy(train_set, s05, rf);
    return {a07 >= a05 && a07 < a10 && a05 < a10,
            fmt("RF trained at scale 1.0 (trials 0-29), tested on trials 30-39: acc(1.0) %.4f, acc(0.7) %.4f, "
                "acc(0.5) %.4f (need acc(0.7) >= acc(0.5), both < acc(1.0))",
                a10, a07, a05)};
}

std::vector<std::pair<std::string, std::string>> hash_tree(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            out.emplace_back(fs::relative(e.path(), root).string(), fnv1a_hex(ss.str()));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "occsim_acceptance_determinism";
    fs::remove_all(root);
    const auto run_pipeline = [&] {
        for (const char* preset : {"basic", "parallel"}) {
            const fs::path dir = root / preset;
            RunConfig config = load_config("", {std::string("preset=") + preset, "corpus.sites=4",
                                                "corpus.trials=10", "output_dir=" + dir.string()});
            cmd_collect(config, 0);
            cmd_features({dir / "memorygrams"}, config.pipeline.segments_per_half, dir / "features.csv");
            EvaluateOptions opt;
            opt.folds = 5;
            opt.spec = rf_spec(20);
            cmd_evaluate(dir / "features.csv", opt, dir / "rf.json");
            opt.spec = knn_spec(3);
            cmd_evaluate(dir / "features.csv", opt, dir / "knn.json");
            cmd_calibrate(config, dir / "calibration.json");
            std::ofstream plot(dir / "plot.csv");
            write_memorygram_plot_csv(plot, read_memorygram_inputs({dir / "memorygrams"}));
        }
        return hash_tree(root);
    };
    const auto first = run_pipeline();
    const auto second = run_pipeline();
    std::size_t same = 0;
    for (std::size_t i = 0; i < std::min(first.size(), second.size()); ++i) {
        same += first[i] == second[i];
    }
    fs::remove_all(root);
    return {first.size() == second.size() && same == first.size() && !first.empty(),
            fmt("%zu/%zu output files hash-identical across two runs (collect, features, evaluate rf/knn, "
                "calibrate, plot data; basic and parallel)",
                same, first.size())};
}

}  // namespace

int main(int argc, char** argv) {
    // Optional arguments select criteria by number; default runs all.
    std::vector<bool> selected(11, argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k >= 1 && k <= 10) {
            selected[k] = true;
        }
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"cache oracle equivalence", cache_oracle},
        {"reverse-recency exactness", reverse_recency},
        {"partition isolation", partition_isolation},
        {"calibration anchors", calibration_anchors},
        {"feature-length law and moments", feature_law},
        {"occupancy monotonicity", occupancy_monotonicity},
        {"end-to-end fingerprinting", end_to_end},
        {"parallelism benefit", parallelism_benefit},
        {"viewport-scale degradation", viewport_degradation},
        {"determinism", determinism},
    };
    int failed = 0;
    int run = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i + 1]) {
            continue;
        }
        ++run;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", run - failed, run);
    return failed == 0 ? 0 : 1;
}
