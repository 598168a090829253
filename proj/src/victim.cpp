#include "occsim/victim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "occsim/errors.hpp"
#include "occsim/rng.hpp"

namespace occsim {

namespace {

template <typename T>
void check_range(const Range<T>& r, const char* name) {
    if (!(r.lo <= r.hi)) {
        throw ConfigError(std::string("empty parameter range: ") + name);
    }
}

}  // namespace

std::uint32_t SiteProfile::lines_per_burst() const {
    return static_cast<std::uint32_t>(std::ceil(footprint_lines * viewport_scale - 1e-9));
}

double SiteProfile::intensity_at(double t) const {
    double intensity = envelope.empty() ? 1.0 : envelope.front().intensity;
    for (const auto& phase : envelope) {
        if (phase.start_s <= t) {
            intensity = phase.intensity;
        }
    }
    return intensity;
}

void validate(const ProfileRanges& r) {
    check_range(r.footprint_lines, "footprint_lines");
    check_range(r.burst_rate_hz, "burst_rate_hz");
    check_range(r.load_intensity, "load_intensity");
    check_range(r.settle_start_s, "settle_start_s");
    check_range(r.settle_intensity, "settle_intensity");
    check_range(r.idle_gap_s, "idle_gap_s");
    check_range(r.idle_intensity, "idle_intensity");
    if (r.footprint_lines.lo < 1) {
        throw ConfigError("footprint_lines must be >= 1");
    }
    if (!(r.burst_rate_hz.lo > 0.0)) {
        throw ConfigError("burst_rate_hz must be > 0");
    }
    for (const auto* i : {&r.load_intensity, &r.settle_intensity, &r.idle_intensity}) {
        if (i->lo < 0.0 || i->hi > 1.0) {
            throw ConfigError("envelope intensities must lie in [0, 1]");
        }
    }
    if (r.settle_start_s.lo < 0.0 || r.idle_gap_s.lo < 0.0) {
        throw ConfigError("phase offsets must be >= 0");
    }
    if (!(r.trial_jitter >= 0.0 && r.trial_jitter < 1.0 / 3.0)) {
        throw ConfigError("trial_jitter must lie in [0, 1/3)");
    }
}

void validate(const SiteProfile& p) {
    if (p.footprint_lines < 1) {
        throw ConfigError("footprint_lines must be >= 1");
    }
    if (!(p.burst_rate_hz > 0.0)) {
        throw ConfigError("burst_rate_hz must be > 0");
    }
    if (!(p.viewport_scale > 0.0 && p.viewport_scale <= 1.0)) {
        throw ConfigError("viewport_scale must lie in (0, 1]");
    }
    if (p.envelope.empty() || p.envelope.front().start_s != 0.0) {
        throw ConfigError("envelope must start at t = 0");
    }
    for (std::size_t i = 1; i < p.envelope.size(); ++i) {
        if (p.envelope[i].start_s < p.envelope[i - 1].start_s) {
            throw ConfigError("envelope phases must be ordered");
        }
    }
    if (p.address_base % kVictimLineBytes != 0) {
        throw ConfigError("address_base must be line aligned");
    }
}

std::uint64_t site_address_base(std::int64_t site_id) {
    return (std::uint64_t{1} << 32) + static_cast<std::uint64_t>(site_id) * (std::uint64_t{1} << 24);
}

SiteProfile make_profile(std::int64_t site_id, std::uint64_t corpus_seed, const ProfileRanges& ranges) {
    validate(ranges);
    Rng rng(stream_key(corpus_seed, static_cast<std::uint64_t>(site_id), 0, StreamTag::profile));

    SiteProfile p;
    p.site_id = site_id;
    p.corpus_seed = corpus_seed;
    p.footprint_lines = static_cast<std::uint32_t>(
        rng.uniform_int(ranges.footprint_lines.lo, ranges.footprint_lines.hi));
    p.burst_rate_hz = rng.uniform(ranges.burst_rate_hz.lo, ranges.burst_rate_hz.hi);
    const double load = rng.uniform(ranges.load_intensity.lo, ranges.load_intensity.hi);
    const double settle_start = rng.uniform(ranges.settle_start_s.lo, ranges.settle_start_s.hi);
    const double settle = rng.uniform(ranges.settle_intensity.lo, ranges.settle_intensity.hi);
    const double idle_start = settle_start + rng.uniform(ranges.idle_gap_s.lo, ranges.idle_gap_s.hi);
    const double idle = rng.uniform(ranges.idle_intensity.lo, ranges.idle_intensity.hi);
    p.envelope = {{0.0, load}, {settle_start, settle}, {idle_start, idle}};
    p.address_base = site_address_base(site_id);
    p.viewport_scale = 1.0;
    p.trial_jitter = ranges.trial_jitter;
    return p;
}

SiteProfile scale_profile(const SiteProfile& profile, double viewport_scale) {
    if (!(viewport_scale > 0.0 && viewport_scale <= 1.0)) {
        throw ConfigError("viewport_scale must lie in (0, 1]");
    }
    SiteProfile out = profile;
    out.viewport_scale = viewport_scale;
    return out;
}

std::vector<RenderEvent> generate_trace(const SiteProfile& profile, double duration_s,
                                        std::uint64_t trial_seed) {
    validate(profile);
    if (!(duration_s > 0.0)) {
        throw ConfigError("trace duration must be > 0");
    }
    const auto site = static_cast<std::uint64_t>(profile.site_id);
    const double jitter = profile.trial_jitter;

    // The site's render schedule: Poisson arrivals at burst_rate_hz thinned by
    // the envelope. It depends on the site only, and a longer horizon extends
    // it without changing its prefix.
    Rng schedule_rng(stream_key(profile.corpus_seed, site, 0, StreamTag::trace));
    const double horizon = duration_s / (1.0 - 3.0 * jitter) + 3.0 * kBurstTimeJitterS * jitter;
    std::vector<double> schedule;
    for (double t = schedule_rng.exponential(profile.burst_rate_hz); t < horizon;
         t += schedule_rng.exponential(profile.burst_rate_hz)) {
        if (schedule_rng.uniform() < profile.intensity_at(t)) {
            schedule.push_back(t);
        }
    }

    // Per trial: a global time stretch, per-burst time jitter and per-burst
    // size jitter. Timing and content use separate streams so that viewport
    // scaling changes burst sizes without moving bursts.
    const std::uint64_t key = stream_key(profile.corpus_seed, site, trial_seed, StreamTag::trace);
    Rng timing(key);
    Rng content(mix64(key ^ 1));
    const double stretch = 1.0 + jitter * timing.truncated_normal(3.0);
    std::vector<double> times;
    times.reserve(schedule.size());
    for (const double t : schedule) {
        const double jittered = t * stretch + kBurstTimeJitterS * jitter * timing.truncated_normal(3.0);
        if (jittered >= 0.0 && jittered < duration_s) {
            times.push_back(jittered);
        }
    }
    std::sort(times.begin(), times.end());

    const std::uint32_t pool = profile.pool_lines();
    const double base_count = profile.lines_per_burst();
    std::vector<std::uint32_t> lines(pool);
    std::vector<RenderEvent> events;
    for (const double t : times) {
        const double size = base_count * (1.0 + jitter * content.truncated_normal(3.0));
        const auto count =
            static_cast<std::uint32_t>(std::clamp<double>(std::round(size), 1.0, static_cast<double>(pool)));
        // Partial Fisher-Yates: the first `count` entries are a uniform draw
        // of distinct pool lines.
        std::iota(lines.begin(), lines.end(), 0U);
        for (std::uint32_t i = 0; i < count; ++i) {
            const auto j = i + static_cast<std::uint32_t>(content.below(pool - i));
            std::swap(lines[i], lines[j]);
            events.push_back({t, profile.address_base + std::uint64_t{lines[i]} * kVictimLineBytes});
        }
    }
    return events;
}

}  // namespace occsim
