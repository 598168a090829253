#pragma once

#include <cstdint>
#include <vector>

namespace occsim {

struct EnvelopePhase {
    double start_s = 0.0;
    double intensity = 1.0;

    friend bool operator==(const EnvelopePhase&, const EnvelopePhase&) = default;
};

/// Synthetic rendering workload of one website. Every parameter is drawn once
/// per (corpus_seed, site_id); trial seeds only perturb timing and burst sizes.
struct SiteProfile {
    std::int64_t site_id = 0;
    std::uint64_t corpus_seed = 0;
    std::uint32_t footprint_lines = 1;
    double burst_rate_hz = 1.0;
    std::vector<EnvelopePhase> envelope;  // load, settle, idle
    std::uint64_t address_base = 0;
    double viewport_scale = 1.0;
    /// Relative per-trial perturbation of burst size and phase timing.
    double trial_jitter = 0.1;

    /// Distinct lines touched per burst before trial jitter: ceil(footprint * scale).
    std::uint32_t lines_per_burst() const;
    /// Lines the site's bursts are drawn from.
    std::uint32_t pool_lines() const { return 2 * footprint_lines; }
    double intensity_at(double t) const;

    friend bool operator==(const SiteProfile&, const SiteProfile&) = default;
};

template <typename T>
struct Range {
    T lo{};
    T hi{};

    friend bool operator==(const Range&, const Range&) = default;
};

/// Generator ranges. All defaults are synthetic.
struct ProfileRanges {
    Range<std::uint32_t> footprint_lines{8, 2048};
    Range<double> burst_rate_hz{2.0, 30.0};
    Range<double> load_intensity{0.6, 1.0};
    Range<double> settle_start_s{0.3, 1.5};
    Range<double> settle_intensity{0.2, 0.6};
    Range<double> idle_gap_s{0.5, 2.5};
    Range<double> idle_intensity{0.0, 0.25};
    double trial_jitter = 0.1;

    friend bool operator==(const ProfileRanges&, const ProfileRanges&) = default;
};

void validate(const ProfileRanges& ranges);
void validate(const SiteProfile& profile);

/// Victim lines live above 4 GiB, 16 MiB apart per site, so they never share
/// a tag with the spy buffer at address 0.
std::uint64_t site_address_base(std::int64_t site_id);

SiteProfile make_profile(std::int64_t site_id, std::uint64_t corpus_seed,
                         const ProfileRanges& ranges = {});

/// Field replacement: the scale is absolute, not cumulative.
SiteProfile scale_profile(const SiteProfile& profile, double viewport_scale);

struct RenderEvent {
    double time_s = 0.0;
    std::uint64_t addr = 0;

    friend bool operator==(const RenderEvent&, const RenderEvent&) = default;
};

inline constexpr std::uint32_t kVictimLineBytes = 64;

/// Per-burst time jitter scale: a burst moves by N(0, (trial_jitter * this)^2) seconds.
inline constexpr double kBurstTimeJitterS = 0.25;

/// Each site has a fixed render schedule (Poisson arrivals at burst_rate_hz
/// thinned by the envelope). A trial stretches the schedule by
/// 1 + trial_jitter * z, shifts every burst independently, and scales each
/// burst size by 1 + trial_jitter * z (z standard normal truncated at 3).
/// Each burst touches a fresh draw of distinct lines from the site pool.
/// Events are sorted by time.
std::vector<RenderEvent> generate_trace(const SiteProfile& profile, double duration_s,
                                        std::uint64_t trial_seed);

}  // namespace occsim
