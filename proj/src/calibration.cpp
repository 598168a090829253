#include "occsim/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "occsim/errors.hpp"

namespace occsim {

namespace {

// Cycles of the slowest partition when every access hits.
double slowest_partition_cycles(const AttackConfig& config, const SpyLayout& layout, const GpuConfig& gpu) {
    const ValidatedLayout v = validate_layout(layout, gpu);
    const auto parts = partition_chain(config.effective_buffer_bytes() / config.geo.line_size_bytes, v);
    double slowest = 0.0;
    for (const auto& p : parts) {
        const double mult = contention_factor(v.active_threads_per_subslice[p.subslice], gpu).latency_multiplier;
        slowest = std::max(slowest, static_cast<double>(p.size()) * config.geo.hit_latency_cycles * mult);
    }
    return slowest;
}

}  // namespace

Calibration calibrate(const AttackConfig& config, const CalibrationAnchors& anchors) {
    validate(config.geo);
    if (!(anchors.basic_rate_hz > 0.0) || !(anchors.parallel_rate_hz > 0.0) ||
        !(anchors.target_probe_ticks > 0.0)) {
        throw CalibrationError("calibration anchors must be positive");
    }
    const double c1 = slowest_partition_cycles(config, anchors.basic_layout, config.gpu);
    const double c2 = slowest_partition_cycles(config, anchors.parallel_layout, anchors.parallel_gpu);
    const double t1 = 1.0 / anchors.basic_rate_hz;
    const double t2 = 1.0 / anchors.parallel_rate_hz;
    if (c1 == c2) {
        throw CalibrationError("anchor layouts have identical probe cost");
    }
    // dispatch + c_i * s = t_i, s = seconds per cycle
    const double seconds_per_cycle = (t1 - t2) / (c1 - c2);
    const double dispatch = t1 - c1 * seconds_per_cycle;
    if (!(seconds_per_cycle > 0.0) || !(dispatch >= 0.0)) {
        throw CalibrationError("anchors " + std::to_string(anchors.basic_rate_hz) + " Hz / " +
                               std::to_string(anchors.parallel_rate_hz) +
                               " Hz are infeasible for this geometry");
    }

    Calibration cal;
    cal.dispatch_overhead_s = dispatch;
    cal.probe_clock_hz = 1.0 / seconds_per_cycle;
    const double full_probe_cycles =
        static_cast<double>(config.effective_buffer_bytes() / config.geo.line_size_bytes) *
        config.geo.hit_latency_cycles;
    cal.ticks_per_cycle = anchors.target_probe_ticks / full_probe_cycles;
    return cal;
}

void apply(AttackConfig& config, const Calibration& cal) {
    config.dispatch_overhead_s = cal.dispatch_overhead_s;
    config.probe_clock_hz = cal.probe_clock_hz;
    config.timer.ticks_per_cycle = cal.ticks_per_cycle;
}

AttackConfig basic_attack_config() {
    AttackConfig config;
    config.layout = basic_layout();
    config.timer.jitter_rel = default_jitter_rel(config.gpu);
    config.duration_s = 5.0;
    apply(config, calibrate(config));
    return config;
}

AttackConfig parallel_attack_config(const GpuConfig& gpu) {
    AttackConfig config;
    config.gpu = gpu;
    config.layout = full_parallel_layout(gpu);
    config.timer.jitter_rel = default_jitter_rel(gpu);
    config.duration_s = 3.0;
    apply(config, calibrate(config));
    return config;
}

}  // namespace occsim
