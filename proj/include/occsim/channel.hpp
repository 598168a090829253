#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "occsim/cache.hpp"
#include "occsim/gpu.hpp"
#include "occsim/rng.hpp"
#include "occsim/victim.hpp"

namespace occsim {

enum class ProbeOrder { prime_order, reverse_recency, random_permutation };

/// Pointer-chase chain over the spy buffer. `lines` holds buffer line indices
/// in traversal order. Under REVERSE_RECENCY the traversal direction flips
/// after every pass so each probe visits lines in reverse order of their last
/// use.
struct ProbeChain {
    std::uint64_t buffer_base = 0;
    std::uint64_t buffer_bytes = 0;
    std::uint32_t line_size = 64;
    ProbeOrder order = ProbeOrder::reverse_recency;
    std::vector<std::uint32_t> lines;
    bool next_reversed = false;

    std::size_t size() const noexcept { return lines.size(); }
    std::uint64_t address_at(std::size_t pos) const noexcept {
        return buffer_base + std::uint64_t{lines[pos]} * line_size;
    }
};

/// Throws ConfigError when buffer_bytes is zero or not a multiple of the line size.
ProbeChain build_probe_chain(std::uint64_t buffer_bytes, const CacheGeometry& geo, ProbeOrder order,
                             std::uint64_t seed, std::uint64_t buffer_base = 0);

/// Contiguous slice [begin, end) of chain positions owned by one attacker thread.
struct ThreadPartition {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::uint32_t subslice = 0;

    std::size_t size() const noexcept { return end - begin; }
};

/// Splits `n_lines` chain positions over the layout's active threads
/// (workgroup-major), sizes differing by at most one.
std::vector<ThreadPartition> partition_chain(std::size_t n_lines, const ValidatedLayout& layout);

struct ProbeStats {
    std::vector<std::uint64_t> thread_cycles;  // raw latency sum per partition
    std::uint64_t misses = 0;
};

/// Accesses every chain line once as SPY in the current direction.
void prime(CacheState& state, ProbeChain& chain);

/// One traversal attributed to partitions. Threads run in parallel on the
/// GPU; the traversal itself follows chain order, so the cache sees the same
/// sequence as a single-thread probe. `misses_per_set`, when given, is
/// resized to the set count and receives per-set miss counts.
ProbeStats probe_pass(CacheState& state, ProbeChain& chain, const std::vector<ThreadPartition>& parts,
                      std::vector<std::uint32_t>* misses_per_set = nullptr);

/// Single-thread probe: latency sum times the contention multiplier, then
/// converted to timer ticks.
std::uint64_t probe_once(CacheState& state, ProbeChain& chain, const TimerModel& timer,
                         const Contention& contention, Rng& rng);

enum class Aggregation { max, mean };

struct AttackConfig {
    SpyLayout layout = basic_layout();
    GpuConfig gpu = gpu_preset("gen9");
    CacheGeometry geo = default_geometry();
    TimerModel timer;
    ProbeOrder probe_order = ProbeOrder::reverse_recency;
    std::uint64_t probe_seed = 0;
    std::optional<std::uint64_t> buffer_bytes;  // defaults to cache capacity
    double dispatch_overhead_s = 0.0;
    double probe_clock_hz = 1.0;  // converts probe cycles into wall time
    double duration_s = 5.0;
    Aggregation aggregation = Aggregation::max;

    std::uint64_t effective_buffer_bytes() const {
        return buffer_bytes.value_or(geo.capacity_bytes());
    }
};

void validate(const AttackConfig& config);

struct Memorygram {
    std::int64_t site_id = 0;
    std::uint64_t trial = 0;
    double sampling_rate_hz = 0.0;
    std::vector<std::uint64_t> samples;
    std::string config_hash;

    friend bool operator==(const Memorygram&, const Memorygram&) = default;
};

/// 1 / (dispatch_overhead_s + slowest partition probe time at hit latency).
double effective_sampling_rate(const AttackConfig& config);

/// floor(duration * rate), with a 1e-9 guard against round-off in the rate.
std::size_t sample_count(const AttackConfig& config);

/// Simulates a full trace. Victim events in window [i/rate, (i+1)/rate) are
/// applied before probe i; each sample aggregates per-thread tick counts.
Memorygram run_attack(const AttackConfig& config, const SiteProfile& profile, std::uint64_t trial_seed);

/// Same as run_attack with an explicit victim event list (may be empty).
/// `stream_seed` and `site_id` key the timer and replacement streams.
Memorygram run_attack_events(const AttackConfig& config, const std::vector<RenderEvent>& events,
                             std::int64_t site_id, std::uint64_t stream_seed, std::uint64_t trial_seed);

}  // namespace occsim
