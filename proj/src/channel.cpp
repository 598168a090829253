#include "occsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "occsim/errors.hpp"
#include "occsim/serialization.hpp"

namespace occsim {

ProbeChain build_probe_chain(std::uint64_t buffer_bytes, const CacheGeometry& geo, ProbeOrder order,
                             std::uint64_t seed, std::uint64_t buffer_base) {
    if (buffer_bytes == 0 || buffer_bytes % geo.line_size_bytes != 0) {
        throw ConfigError("probe buffer size must be a non-zero multiple of the line size");
    }
    if (buffer_base % geo.line_size_bytes != 0) {
        throw ConfigError("probe buffer base must be line aligned");
    }
    ProbeChain chain;
    chain.buffer_base = buffer_base;
    chain.buffer_bytes = buffer_bytes;
    chain.line_size = geo.line_size_bytes;
    chain.order = order;
    chain.lines.resize(buffer_bytes / geo.line_size_bytes);
    std::iota(chain.lines.begin(), chain.lines.end(), 0U);
    if (order == ProbeOrder::random_permutation) {
        Rng rng(stream_key(seed, 0, 0, StreamTag::probe_order));
        for (std::size_t i = chain.lines.size(); i > 1; --i) {
            std::swap(chain.lines[i - 1], chain.lines[rng.below(i)]);
        }
    }
    return chain;
}

std::vector<ThreadPartition> partition_chain(std::size_t n_lines, const ValidatedLayout& layout) {
    const std::uint32_t per_wg = layout.layout.active_threads_per_workgroup();
    const std::size_t threads = std::size_t{layout.layout.num_workgroups} * per_wg;
    if (threads > n_lines) {
        throw ConfigError("more active threads than probe buffer lines");
    }
    std::vector<ThreadPartition> parts;
    parts.reserve(threads);
    const std::size_t base = n_lines / threads;
    const std::size_t extra = n_lines % threads;
    std::size_t pos = 0;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t len = base + (t < extra ? 1 : 0);
        parts.push_back({pos, pos + len, layout.workgroup_subslice[t / per_wg]});
        pos += len;
    }
    return parts;
}

namespace {

void finish_pass(ProbeChain& chain) {
    if (chain.order == ProbeOrder::reverse_recency) {
        chain.next_reversed = !chain.next_reversed;
    }
}

}  // namespace

void prime(CacheState& state, ProbeChain& chain) {
    const std::size_t n = chain.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pos = chain.next_reversed ? n - 1 - i : i;
        state.access(chain.address_at(pos), Domain::spy);
    }
    finish_pass(chain);
}

ProbeStats probe_pass(CacheState& state, ProbeChain& chain, const std::vector<ThreadPartition>& parts,
                      std::vector<std::uint32_t>* misses_per_set) {
    const CacheGeometry& geo = state.geometry();
    if (misses_per_set) {
        misses_per_set->assign(geo.composite_sets(), 0);
    }
    ProbeStats stats;
    stats.thread_cycles.assign(parts.size(), 0);
    const bool reversed = chain.next_reversed;
    const std::size_t np = parts.size();
    for (std::size_t k = 0; k < np; ++k) {
        const std::size_t t = reversed ? np - 1 - k : k;
        const ThreadPartition& part = parts[t];
        std::uint64_t cycles = 0;
        for (std::size_t i = 0; i < part.size(); ++i) {
            const std::size_t pos = reversed ? part.end - 1 - i : part.begin + i;
            const std::uint64_t addr = chain.address_at(pos);
            const AccessResult r = state.access(addr, Domain::spy);
            cycles += r.latency_cycles;
            if (!r.hit) {
                ++stats.misses;
                if (misses_per_set) {
                    ++(*misses_per_set)[decompose_address(addr, geo).composite];
                }
            }
        }
        stats.thread_cycles[t] = cycles;
    }
    finish_pass(chain);
    return stats;
}

std::uint64_t probe_once(CacheState& state, ProbeChain& chain, const TimerModel& timer,
                         const Contention& contention, Rng& rng) {
    const std::vector<ThreadPartition> whole{{0, chain.size(), 0}};
    const ProbeStats stats = probe_pass(state, chain, whole);
    return timer_ticks(static_cast<double>(stats.thread_cycles[0]) * contention.latency_multiplier, timer,
                       rng, contention.jitter_scale);
}

void validate(const AttackConfig& config) {
    validate(config.geo);
    validate(config.timer);
    const ValidatedLayout layout = validate_layout(config.layout, config.gpu);
    const std::uint64_t buffer = config.effective_buffer_bytes();
    if (buffer == 0 || buffer % config.geo.line_size_bytes != 0) {
        throw ConfigError("probe buffer size must be a non-zero multiple of the line size");
    }
    if (layout.layout.total_active_threads() > buffer / config.geo.line_size_bytes) {
        throw ConfigError("more active threads than probe buffer lines");
    }
    if (!(config.dispatch_overhead_s >= 0.0) || !std::isfinite(config.dispatch_overhead_s)) {
        throw ConfigError("dispatch_overhead_s must be >= 0");
    }
    if (!(config.probe_clock_hz > 0.0) || !std::isfinite(config.probe_clock_hz)) {
        throw ConfigError("probe_clock_hz must be > 0");
    }
    if (!(config.duration_s > 0.0)) {
        throw ConfigError("attack duration must be > 0");
    }
}

double effective_sampling_rate(const AttackConfig& config) {
    validate(config);
    const ValidatedLayout layout = validate_layout(config.layout, config.gpu);
    const auto parts = partition_chain(config.effective_buffer_bytes() / config.geo.line_size_bytes, layout);
    double slowest = 0.0;
    for (const auto& p : parts) {
        const double mult =
            contention_factor(layout.active_threads_per_subslice[p.subslice], config.gpu).latency_multiplier;
        slowest = std::max(slowest, static_cast<double>(p.size()) * config.geo.hit_latency_cycles * mult);
    }
    return 1.0 / (config.dispatch_overhead_s + slowest / config.probe_clock_hz);
}

std::size_t sample_count(const AttackConfig& config) {
    return static_cast<std::size_t>(std::floor(config.duration_s * effective_sampling_rate(config) + 1e-9));
}

Memorygram run_attack(const AttackConfig& config, const SiteProfile& profile, std::uint64_t trial_seed) {
    const auto events = generate_trace(profile, config.duration_s, trial_seed);
    return run_attack_events(config, events, profile.site_id, profile.corpus_seed, trial_seed);
}

Memorygram run_attack_events(const AttackConfig& config, const std::vector<RenderEvent>& events,
                             std::int64_t site_id, std::uint64_t stream_seed, std::uint64_t trial_seed) {
    validate(config);
    const ValidatedLayout layout = validate_layout(config.layout, config.gpu);
    const auto site_key = static_cast<std::uint64_t>(site_id);

    Memorygram mg;
    mg.site_id = site_id;
    mg.trial = trial_seed;
    mg.sampling_rate_hz = effective_sampling_rate(config);
    mg.config_hash = config_hash(config);

    CacheState state(config.geo, stream_key(stream_seed, site_key, trial_seed, StreamTag::cache_replacement));
    Rng timer_rng(stream_key(stream_seed, site_key, trial_seed, StreamTag::timer));
    ProbeChain chain =
        build_probe_chain(config.effective_buffer_bytes(), config.geo, config.probe_order, config.probe_seed);
    const auto parts = partition_chain(chain.size(), layout);
    std::vector<Contention> contention;
    contention.reserve(parts.size());
    for (const auto& p : parts) {
        contention.push_back(contention_factor(layout.active_threads_per_subslice[p.subslice], config.gpu));
    }

    prime(state, chain);

    const std::size_t n = sample_count(config);
    mg.samples.reserve(n);
    std::size_t next_event = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double window_end = static_cast<double>(i + 1) / mg.sampling_rate_hz;
        while (next_event < events.size() && events[next_event].time_s < window_end) {
            state.access(events[next_event].addr, Domain::victim);
            ++next_event;
        }
        const ProbeStats stats = probe_pass(state, chain, parts);
        std::uint64_t max_ticks = 0;
        std::uint64_t sum_ticks = 0;
        for (std::size_t t = 0; t < parts.size(); ++t) {
            const std::uint64_t ticks =
                timer_ticks(static_cast<double>(stats.thread_cycles[t]) * contention[t].latency_multiplier,
                            config.timer, timer_rng, contention[t].jitter_scale);
            max_ticks = std::max(max_ticks, ticks);
            sum_ticks += ticks;
        }
        if (config.aggregation == Aggregation::max) {
            mg.samples.push_back(max_ticks);
        } else {
            mg.samples.push_back((sum_ticks + parts.size() / 2) / parts.size());
        }
    }
    return mg;
}

}  // namespace occsim
