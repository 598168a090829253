#pragma once

#include "occsim/channel.hpp"

namespace occsim {

/// Two measured operating points the timing constants must reproduce, plus
/// the target tick count of a fully primed single-thread probe.
struct CalibrationAnchors {
    double basic_rate_hz = 50.0;
    SpyLayout basic_layout = occsim::basic_layout();
    double parallel_rate_hz = 170.0;
    SpyLayout parallel_layout = full_parallel_layout(gpu_preset("gen9"));
    GpuConfig parallel_gpu = gpu_preset("gen9");
    double target_probe_ticks = 95000.0;
};

/// Memorygram tick band of a full-buffer single-thread probe.
inline constexpr double kProbeTickBandLow = 80000.0;
inline constexpr double kProbeTickBandHigh = 120000.0;

struct Calibration {
    double dispatch_overhead_s = 0.0;
    double probe_clock_hz = 0.0;
    double ticks_per_cycle = 0.0;
};

/// Solves dispatch + cycles_i / clock = 1 / rate_i for both anchors and sets
/// ticks_per_cycle so a primed full probe reads `target_probe_ticks`.
/// `config` supplies geometry and buffer size. Throws CalibrationError when
/// the solution needs a negative overhead or a non-positive clock.
Calibration calibrate(const AttackConfig& config, const CalibrationAnchors& anchors = {});

void apply(AttackConfig& config, const Calibration& cal);

/// Calibrated single-thread attack: 1 workgroup, 1 active thread, 5 s.
AttackConfig basic_attack_config();
/// Calibrated workgroup + thread parallel attack: one workgroup per subslice
/// with 8 active threads each, 3 s.
AttackConfig parallel_attack_config(const GpuConfig& gpu = gpu_preset("gen9"));

}  // namespace occsim
