#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "occsim/calibration.hpp"
#include "occsim/channel.hpp"
#include "occsim/errors.hpp"
#include "support/lru_oracle.hpp"

using namespace occsim;

namespace {

CacheGeometry tiny(std::uint32_t set_bits, std::uint32_t ways) {
    CacheGeometry geo;
    geo.set_bits = set_bits;
    geo.sub_bank_bits = 0;
    geo.bank_bits = 0;
    geo.ways = ways;
    return geo;
}

std::vector<ThreadPartition> single(std::size_t n) { return {{0, n, 0}}; }

AttackConfig quiet_basic() {
    AttackConfig c = basic_attack_config();
    c.timer.jitter_rel = 0.0;
    return c;
}

}  // namespace

TEST_CASE("probe chain construction") {
    const CacheGeometry geo = default_geometry();
    CHECK_THROWS_AS(build_probe_chain(0, geo, ProbeOrder::prime_order, 0), ConfigError);
    CHECK_THROWS_AS(build_probe_chain(100, geo, ProbeOrder::prime_order, 0), ConfigError);

    const ProbeChain plain = build_probe_chain(64 * 100, geo, ProbeOrder::prime_order, 0);
    CHECK(plain.size() == 100);
    CHECK(plain.address_at(7) == 7 * 64);

    const ProbeChain a = build_probe_chain(64 * 500, geo, ProbeOrder::random_permutation, 3);
    const ProbeChain b = build_probe_chain(64 * 500, geo, ProbeOrder::random_permutation, 3);
    const ProbeChain c = build_probe_chain(64 * 500, geo, ProbeOrder::random_permutation, 4);
    CHECK(a.lines == b.lines);
    CHECK(a.lines != c.lines);
    std::vector<std::uint32_t> sorted = a.lines;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t i = 0; i < sorted.size(); ++i) {
        REQUIRE(sorted[i] == i);
    }
}

TEST_CASE("chain partitions cover every position once") {
    for (const auto* name : {"gen9", "gen11"}) {
        const GpuConfig gpu = gpu_preset(name);
        for (const SpyLayout& layout : {basic_layout(), thread_parallel_layout(), full_parallel_layout(gpu)}) {
            const ValidatedLayout v = validate_layout(layout, gpu);
            for (const std::size_t n : {64UL, 65UL, 1000UL, 8192UL, 8191UL}) {
                const auto parts = partition_chain(n, v);
                REQUIRE(parts.size() == layout.total_active_threads());
                std::size_t pos = 0;
                std::size_t lo = n;
                std::size_t hi = 0;
                for (std::size_t t = 0; t < parts.size(); ++t) {
                    CHECK(parts[t].begin == pos);
                    pos = parts[t].end;
                    lo = std::min(lo, parts[t].size());
                    hi = std::max(hi, parts[t].size());
                    CHECK(parts[t].subslice == v.workgroup_subslice[t / layout.active_threads_per_workgroup()]);
                }
                CHECK(pos == n);
                CHECK(hi - lo <= 1);
            }
        }
    }
    CHECK_THROWS_AS(partition_chain(10, validate_layout(full_parallel_layout(gpu_preset("gen9")),
                                                        gpu_preset("gen9"))),
                    ConfigError);
}

TEST_CASE("prime and probe without a victim") {
    const CacheGeometry geo = default_geometry();
    CacheState state(geo);
    ProbeChain chain = build_probe_chain(geo.capacity_bytes(), geo, ProbeOrder::reverse_recency, 0);
    prime(state, chain);
    CHECK(state.counters(Domain::spy).misses == chain.size());
    for (int i = 0; i < 3; ++i) {
        CHECK(probe_pass(state, chain, single(chain.size())).misses == 0);
    }

    TimerModel timer{0.5, 0.0};
    Rng rng(0);
    CHECK(probe_once(state, chain, timer, Contention{}, rng) == chain.size() * 30 / 2);
}

TEST_CASE("prime with twice the capacity follows the LRU oracle") {
    const CacheGeometry geo = tiny(2, 2);
    for (const ProbeOrder order : {ProbeOrder::prime_order, ProbeOrder::reverse_recency}) {
        CacheState state(geo);
        ProbeChain chain = build_probe_chain(2 * geo.capacity_bytes(), geo, order, 0);
        oracle::LruCache ref(64, geo.composite_sets(), geo.ways);
        for (std::size_t i = 0; i < chain.size(); ++i) {
            ref.access(chain.address_at(i));
        }
        prime(state, chain);
        std::size_t resident = 0;
        for (std::uint64_t s = 0; s < geo.composite_sets(); ++s) {
            resident += state.resident_count(s);
        }
        CHECK(resident == geo.capacity_lines());

        std::size_t expected_hits = 0;
        const std::size_t n = chain.size();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pos = chain.next_reversed ? n - 1 - i : i;
            expected_hits += ref.access(chain.address_at(pos));
        }
        const ProbeStats stats = probe_pass(state, chain, single(n));
        CHECK(n - stats.misses == expected_hits);
    }
}

TEST_CASE("reverse-recency probes count exactly the victim evictions") {
    for (std::uint32_t set_bits = 0; set_bits <= 3; ++set_bits) {
        for (std::uint32_t ways = 1; ways <= 4; ++ways) {
            const CacheGeometry geo = tiny(set_bits, ways);
            const std::uint64_t sets = geo.composite_sets();
            for (std::uint32_t v = 0; v <= ways; ++v) {
                CacheState state(geo);
                ProbeChain chain = build_probe_chain(geo.capacity_bytes(), geo, ProbeOrder::reverse_recency, 0);
                prime(state, chain);
                const auto primed = [&] {
                    std::vector<std::vector<std::uint64_t>> out;
                    for (std::uint64_t s = 0; s < sets; ++s) {
                        auto lines = state.resident_lines(s);
                        std::sort(lines.begin(), lines.end());
                        out.push_back(lines);
                    }
                    return out;
                }();
                for (int round = 0; round < 3; ++round) {
                    for (std::uint64_t s = 0; s < sets; ++s) {
                        for (std::uint32_t k = 0; k < v; ++k) {
                            state.access(line_address(1000 + 10 * round + k, static_cast<std::uint32_t>(s), geo),
                                         Domain::victim);
                        }
                    }
                    std::vector<std::uint32_t> per_set;
                    const ProbeStats stats = probe_pass(state, chain, single(chain.size()), &per_set);
                    CHECK(stats.misses == v * sets);
                    for (std::uint64_t s = 0; s < sets; ++s) {
                        REQUIRE(per_set[s] == v);
                        auto lines = state.resident_lines(s);
                        std::sort(lines.begin(), lines.end());
                        REQUIRE(lines == primed[s]);
                    }
                }
            }
        }
    }
}

TEST_CASE("prime-order probing under LRU cascades") {
    const CacheGeometry geo = tiny(0, 4);
    CacheState state(geo);
    ProbeChain chain = build_probe_chain(geo.capacity_bytes(), geo, ProbeOrder::prime_order, 0);
    prime(state, chain);
    state.access(line_address(99, 0, geo), Domain::victim);
    CHECK(probe_pass(state, chain, single(chain.size())).misses == 4);
}

TEST_CASE("calibrated timing constants") {
    const AttackConfig basic = basic_attack_config();
    CHECK(basic.dispatch_overhead_s == doctest::Approx(0.0052673).epsilon(1e-4));
    CHECK(basic.probe_clock_hz == doctest::Approx(16681250.0).epsilon(1e-6));
    CHECK(basic.timer.ticks_per_cycle * 8192 * 30 == doctest::Approx(95000.0));
    CHECK(effective_sampling_rate(basic) == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(sample_count(basic) == 250);

    const AttackConfig par = parallel_attack_config();
    CHECK(effective_sampling_rate(par) == doctest::Approx(170.0).epsilon(1e-9));
    CHECK(sample_count(par) == 510);
    CHECK(par.layout.total_active_threads() == 24);

    AttackConfig slow = basic;
    slow.dispatch_overhead_s *= 2.0;
    CHECK(effective_sampling_rate(slow) < effective_sampling_rate(basic));

    CalibrationAnchors bad;
    bad.parallel_rate_hz = 40.0;
    CHECK_THROWS_AS(calibrate(basic, bad), CalibrationError);
}

TEST_CASE("no-victim runs are flat without jitter") {
    for (AttackConfig c : {quiet_basic(), parallel_attack_config()}) {
        c.timer.jitter_rel = 0.0;
        c.duration_s = 1.0;
        const Memorygram mg = run_attack_events(c, {}, 0, 0, 0);
        REQUIRE(mg.samples.size() == sample_count(c));
        for (const auto s : mg.samples) {
            REQUIRE(s == mg.samples.front());
        }
    }
    const Memorygram mg = run_attack_events(quiet_basic(), {}, 0, 0, 0);
    CHECK(static_cast<double>(mg.samples.front()) == doctest::Approx(95000.0).epsilon(1e-4));
}

TEST_CASE("probe ticks grow with victim footprint") {
    AttackConfig c = quiet_basic();
    c.duration_s = 0.2;  // 10 samples
    const CacheGeometry& geo = c.geo;
    std::vector<RenderEvent> events;
    for (int i = 0; i < 10; ++i) {
        for (int k = 0; k < 20 * i; ++k) {
            events.push_back({i / 50.0 + 0.001, site_address_base(1) + std::uint64_t(k) * 64});
        }
    }
    const Memorygram mg = run_attack_events(c, events, 1, 0, 0);
    REQUIRE(mg.samples.size() == 10);
    const double per_miss = (geo.miss_latency_cycles - geo.hit_latency_cycles) * c.timer.ticks_per_cycle;
    for (int i = 0; i < 10; ++i) {
        const double expected = 95000.0 + 20.0 * i * per_miss;
        CHECK(std::abs(static_cast<double>(mg.samples[i]) - expected) <= 1.0);
    }
}

TEST_CASE("victim events apply at the start of their window") {
    AttackConfig c = quiet_basic();
    c.duration_s = 0.1;  // 5 samples at 50 Hz
    std::vector<RenderEvent> events;
    for (int k = 0; k < 50; ++k) {
        events.push_back({0.045, site_address_base(2) + std::uint64_t(k) * 64});
    }
    const Memorygram mg = run_attack_events(c, events, 2, 0, 0);
    REQUIRE(mg.samples.size() == 5);
    CHECK(mg.samples[0] == mg.samples[1]);
    CHECK(mg.samples[2] > mg.samples[1]);  // 0.045 s falls in [0.04, 0.06)
    CHECK(mg.samples[3] == mg.samples[0]);
}

TEST_CASE("way partitioning hides the victim completely") {
    for (AttackConfig c : {basic_attack_config(), parallel_attack_config()}) {
        WayPartition p;
        p.set(Domain::spy, {0, 4});
        p.set(Domain::victim, {4, 8});
        c.geo.partition = p;
        c.buffer_bytes = c.geo.capacity_bytes() / 2;
        c.duration_s = 1.0;
        const SiteProfile profile = make_profile(4, 0);
        const Memorygram attacked = run_attack(c, profile, 3);
        const Memorygram quiet = run_attack_events(c, {}, 4, 0, 3);
        CHECK(attacked == quiet);
    }
}

TEST_CASE("run_attack is deterministic and trial dependent") {
    AttackConfig c = basic_attack_config();
    c.duration_s = 1.0;
    const SiteProfile p = make_profile(5, 0);
    const Memorygram a = run_attack(c, p, 0);
    CHECK(a == run_attack(c, p, 0));
    CHECK(a.samples != run_attack(c, p, 1).samples);
    CHECK(a.config_hash.size() == 16);
    CHECK(a.sampling_rate_hz == doctest::Approx(50.0));
}

TEST_CASE("mean aggregation averages per-thread ticks") {
    AttackConfig c = parallel_attack_config();
    c.timer.jitter_rel = 0.0;
    c.duration_s = 0.1;
    const Memorygram mx = run_attack_events(c, {}, 0, 0, 0);
    c.aggregation = Aggregation::mean;
    const Memorygram mean = run_attack_events(c, {}, 0, 0, 0);
    // 8192 lines over 24 threads: 8 threads hold 342 lines, 16 hold 341.
    const double tpc = c.timer.ticks_per_cycle;
    CHECK(mx.samples[0] == static_cast<std::uint64_t>(std::llround(342 * 30 * tpc)));
    CHECK(std::abs(static_cast<double>(mean.samples[0]) - 8192.0 / 24.0 * 30 * tpc) <= 1.0);
}

TEST_CASE("attack config validation") {
    AttackConfig c = basic_attack_config();
    c.duration_s = 0.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = basic_attack_config();
    c.buffer_bytes = 100;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = basic_attack_config();
    c.probe_clock_hz = 0.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
}
