#include "occsim/gpu.hpp"

#include <algorithm>
#include <cmath>

#include "occsim/errors.hpp"

namespace occsim {

GpuConfig gpu_preset(const std::string& name) {
    GpuConfig gpu;
    gpu.name = name;
    if (name == "gen9" || name == "gen9.5") {
        gpu.num_subslices = 3;
    } else if (name == "gen11") {
        gpu.num_subslices = 8;
    } else {
        throw ConfigError("unknown GPU preset '" + name + "'");
    }
    return gpu;
}

void validate(const GpuConfig& gpu) {
    if (gpu.num_subslices == 0 || gpu.eus_per_subslice == 0 || gpu.threads_per_wavefront == 0 ||
        gpu.max_threads_per_workgroup == 0 || gpu.slm_bytes_per_subslice == 0) {
        throw ConfigError("GPU config fields must all be >= 1");
    }
    if (gpu.max_threads_per_workgroup % gpu.threads_per_wavefront != 0) {
        throw ConfigError("max_threads_per_workgroup must be a multiple of threads_per_wavefront");
    }
}

double default_jitter_rel(const GpuConfig& gpu) {
    return gpu.name == "gen11" ? 0.01 : 0.02;
}

void validate(const TimerModel& timer) {
    if (!(timer.ticks_per_cycle > 0.0) || !std::isfinite(timer.ticks_per_cycle)) {
        throw ConfigError("ticks_per_cycle must be > 0");
    }
    if (!(timer.jitter_rel >= 0.0) || !std::isfinite(timer.jitter_rel)) {
        throw ConfigError("jitter_rel must be >= 0");
    }
}

SpyLayout basic_layout() { return SpyLayout{}; }

SpyLayout thread_parallel_layout() {
    SpyLayout layout;
    layout.active_threads_per_attacker_wavefront = 8;
    return layout;
}

SpyLayout full_parallel_layout(const GpuConfig& gpu) {
    SpyLayout layout = thread_parallel_layout();
    layout.num_workgroups = gpu.num_subslices;
    return layout;
}

std::vector<std::uint32_t> assign_workgroups(std::uint32_t n_workgroups, const GpuConfig& gpu) {
    std::vector<std::uint32_t> placement(n_workgroups);
    for (std::uint32_t i = 0; i < n_workgroups; ++i) {
        placement[i] = i % gpu.num_subslices;
    }
    return placement;
}

ValidatedLayout validate_layout(const SpyLayout& layout, const GpuConfig& gpu) {
    validate(gpu);
    if (layout.num_workgroups == 0) {
        throw ConfigError("layout needs at least one workgroup");
    }
    if (layout.counting_threads_per_workgroup == 0 ||
        layout.counting_threads_per_workgroup % gpu.threads_per_wavefront != 0) {
        throw ConfigError("counting threads must be a non-zero multiple of the wavefront size");
    }
    if (layout.active_threads_per_workgroup() == 0) {
        throw ConfigError("layout has no active attacker threads");
    }
    if (layout.active_threads_per_attacker_wavefront > gpu.threads_per_wavefront) {
        throw ConfigError("more active threads than a wavefront holds");
    }
    const std::uint32_t threads = layout.counting_threads_per_workgroup +
                                  layout.attacker_wavefronts_per_workgroup * gpu.threads_per_wavefront;
    if (threads > gpu.max_threads_per_workgroup) {
        throw ConfigError("workgroup needs " + std::to_string(threads) + " threads, budget is " +
                          std::to_string(gpu.max_threads_per_workgroup));
    }

    ValidatedLayout out;
    out.layout = layout;
    out.threads_per_workgroup = threads;
    out.workgroup_subslice = assign_workgroups(layout.num_workgroups, gpu);
    out.active_threads_per_subslice.assign(gpu.num_subslices, 0);
    for (auto ss : out.workgroup_subslice) {
        out.active_threads_per_subslice[ss] += layout.active_threads_per_workgroup();
    }
    out.contention = std::any_of(out.active_threads_per_subslice.begin(),
                                 out.active_threads_per_subslice.end(),
                                 [&](std::uint32_t a) { return a > gpu.eus_per_subslice; });
    return out;
}

std::uint64_t timer_ticks(double duration_cycles, const TimerModel& timer, Rng& rng,
                          double jitter_scale) {
    const double sigma = timer.jitter_rel * jitter_scale;
    double factor = 1.0;
    if (sigma > 0.0) {
        factor += sigma * rng.truncated_normal(3.0);
    }
    const double ticks = std::round(std::max(0.0, duration_cycles) * timer.ticks_per_cycle * factor);
    return ticks > 0.0 ? static_cast<std::uint64_t>(ticks) : 0;
}

Contention contention_factor(std::uint32_t active_threads_in_subslice, const GpuConfig& gpu) {
    const double m = std::max(1.0, static_cast<double>(active_threads_in_subslice) /
                                       static_cast<double>(gpu.eus_per_subslice));
    return {m, m};
}

}  // namespace occsim
