#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occsim/rng.hpp"

namespace occsim {

struct GpuConfig {
    std::string name = "gen9";
    std::uint32_t num_subslices = 3;
    std::uint32_t eus_per_subslice = 8;
    std::uint32_t threads_per_wavefront = 32;
    std::uint32_t max_threads_per_workgroup = 256;
    std::uint32_t slm_bytes_per_subslice = 65536;

    friend bool operator==(const GpuConfig&, const GpuConfig&) = default;
};

/// "gen9", "gen9.5" or "gen11"; throws ConfigError otherwise.
GpuConfig gpu_preset(const std::string& name);
void validate(const GpuConfig& gpu);

/// Counting-thread timer: converts GPU cycles into counter increments.
struct TimerModel {
    double ticks_per_cycle = 1.0;
    double jitter_rel = 0.02;

    friend bool operator==(const TimerModel&, const TimerModel&) = default;
};

/// Default relative timer jitter for a preset. Gen11 routes SLM separately
/// from L3 and gets half the Gen9 value.
double default_jitter_rel(const GpuConfig& gpu);
void validate(const TimerModel& timer);

struct SpyLayout {
    std::uint32_t num_workgroups = 1;
    std::uint32_t counting_threads_per_workgroup = 64;
    std::uint32_t attacker_wavefronts_per_workgroup = 1;
    std::uint32_t active_threads_per_attacker_wavefront = 1;

    std::uint32_t active_threads_per_workgroup() const noexcept {
        return attacker_wavefronts_per_workgroup * active_threads_per_attacker_wavefront;
    }
    std::uint32_t total_active_threads() const noexcept {
        return num_workgroups * active_threads_per_workgroup();
    }

    friend bool operator==(const SpyLayout&, const SpyLayout&) = default;
};

/// One workgroup, two counting wavefronts, a single active attacker thread.
SpyLayout basic_layout();
/// One workgroup with 8 active attacker threads.
SpyLayout thread_parallel_layout();
/// One workgroup per subslice, each with 8 active attacker threads.
SpyLayout full_parallel_layout(const GpuConfig& gpu);

struct ValidatedLayout {
    SpyLayout layout;
    std::uint32_t threads_per_workgroup = 0;
    std::vector<std::uint32_t> workgroup_subslice;         // per workgroup
    std::vector<std::uint32_t> active_threads_per_subslice; // per subslice
    bool contention = false;
};

ValidatedLayout validate_layout(const SpyLayout& layout, const GpuConfig& gpu);

/// Workgroup i runs on subslice i mod num_subslices.
std::vector<std::uint32_t> assign_workgroups(std::uint32_t n_workgroups, const GpuConfig& gpu);

/// round(cycles * ticks_per_cycle * (1 + g)), g ~ N(0, (jitter_rel * jitter_scale)^2)
/// truncated at +-3 sigma. Draws exactly one normal from `rng` whenever the
/// effective jitter is non-zero.
std::uint64_t timer_ticks(double duration_cycles, const TimerModel& timer, Rng& rng,
                          double jitter_scale = 1.0);

struct Contention {
    double latency_multiplier = 1.0;
    double jitter_scale = 1.0;
};

/// multiplier = max(1, active / eus_per_subslice); jitter_scale = multiplier.
Contention contention_factor(std::uint32_t active_threads_in_subslice, const GpuConfig& gpu);

}  // namespace occsim
