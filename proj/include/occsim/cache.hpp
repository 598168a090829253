#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "occsim/rng.hpp"

namespace occsim {

enum class ReplacementPolicy { lru, random, tree_plru };

/// Security domain issuing an access. Way partitions are keyed by domain.
enum class Domain : std::uint8_t { spy = 0, victim = 1 };

inline constexpr std::size_t kDomainCount = 2;

/// Half-open way range [first, last).
struct WayRange {
    std::uint32_t first = 0;
    std::uint32_t last = 0;

    std::uint32_t width() const noexcept { return last - first; }
    friend bool operator==(const WayRange&, const WayRange&) = default;
};

struct WayPartition {
    std::array<std::optional<WayRange>, kDomainCount> ranges{};

    const std::optional<WayRange>& range(Domain d) const noexcept {
        return ranges[static_cast<std::size_t>(d)];
    }
    void set(Domain d, WayRange r) { ranges[static_cast<std::size_t>(d)] = r; }
    friend bool operator==(const WayPartition&, const WayPartition&) = default;
};

/// Set-associative L3 geometry. The index is the low bits of the line
/// address with no hashing: set bits lowest, then sub-bank, then bank.
struct CacheGeometry {
    std::uint32_t line_size_bytes = 64;
    std::uint32_t set_bits = 5;
    std::uint32_t sub_bank_bits = 3;
    std::uint32_t bank_bits = 2;
    std::uint32_t ways = 8;
    ReplacementPolicy replacement_policy = ReplacementPolicy::lru;
    std::uint32_t hit_latency_cycles = 30;
    std::uint32_t miss_latency_cycles = 300;
    std::optional<WayPartition> partition;

    std::uint32_t offset_bits() const noexcept;
    std::uint32_t index_bits() const noexcept { return set_bits + sub_bank_bits + bank_bits; }
    std::uint64_t composite_sets() const noexcept { return std::uint64_t{1} << index_bits(); }
    std::uint64_t capacity_bytes() const noexcept {
        return composite_sets() * ways * line_size_bytes;
    }
    std::uint64_t capacity_lines() const noexcept { return composite_sets() * ways; }

    friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

/// 1024 sets x 8 ways x 64 B = 512 KB.
CacheGeometry default_geometry();
/// Same index bits with 64 ways (4 MB); see README for the capacity discrepancy.
CacheGeometry paper_literal_geometry();

/// Throws ConfigError when any geometry or partition invariant is violated.
void validate(const CacheGeometry& geo);

struct SetIndex {
    std::uint32_t bank = 0;
    std::uint32_t sub_bank = 0;
    std::uint32_t set = 0;
    std::uint32_t composite = 0;

    friend bool operator==(const SetIndex&, const SetIndex&) = default;
};

SetIndex decompose_address(std::uint64_t addr, const CacheGeometry& geo) noexcept;

/// Tag bits of an address (everything above offset and index bits).
std::uint64_t address_tag(std::uint64_t addr, const CacheGeometry& geo) noexcept;

/// Inverse of (tag, composite set) back to the line-aligned byte address.
std::uint64_t line_address(std::uint64_t tag, std::uint32_t composite_set,
                           const CacheGeometry& geo) noexcept;

struct AccessResult {
    bool hit = false;
    std::uint32_t latency_cycles = 0;
};

struct DomainCounters {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;

    std::uint64_t accesses() const noexcept { return hits + misses; }
};

/// Mutable contents of one cache instance. Single owner; copyable.
class CacheState {
public:
    /// `replacement_seed` keys the RANDOM policy streams (one per domain, so
    /// victim misses never shift the spy's draws); reset() rewinds them.
    explicit CacheState(const CacheGeometry& geo, std::uint64_t replacement_seed = 0);

    AccessResult access(std::uint64_t addr, Domain domain);

    void reset();

    /// Tags resident in `composite_set`, least to most recently used.
    std::vector<std::uint64_t> resident_lines(std::uint64_t composite_set) const;
    std::size_t resident_count(std::uint64_t composite_set) const;
    bool contains(std::uint64_t addr) const;

    const DomainCounters& counters(Domain d) const noexcept {
        return counters_[static_cast<std::size_t>(d)];
    }
    const CacheGeometry& geometry() const noexcept { return geo_; }

private:
    static constexpr std::uint64_t kInvalid = ~std::uint64_t{0};

    WayRange visible_ways(Domain d) const;
    std::uint32_t choose_victim(std::size_t set_base, WayRange r, Domain d);
    void seed_streams();
    void touch(std::size_t set_base, WayRange r, std::uint32_t way);

    CacheGeometry geo_;
    std::uint32_t offset_bits_;
    std::uint32_t index_bits_;
    std::uint64_t set_mask_;
    std::uint64_t replacement_seed_;
    std::array<Rng, kDomainCount> rngs_;  // RANDOM policy, one stream per domain
    std::uint64_t clock_ = 0;
    std::vector<std::uint64_t> tags_;     // sets x ways, kInvalid when empty
    std::vector<std::uint64_t> stamps_;   // last-use clock per way
    std::vector<std::uint8_t> plru_bits_; // per set, tree bits stored at the range's first way
    std::array<DomainCounters, kDomainCount> counters_{};
};

}  // namespace occsim
