#include "occsim/cache.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "occsim/errors.hpp"

namespace occsim {

namespace {

bool is_pow2(std::uint64_t v) noexcept { return v != 0 && std::has_single_bit(v); }

}  // namespace

std::uint32_t CacheGeometry::offset_bits() const noexcept {
    return static_cast<std::uint32_t>(std::countr_zero(line_size_bytes));
}

CacheGeometry default_geometry() { return CacheGeometry{}; }

CacheGeometry paper_literal_geometry() {
    CacheGeometry geo;
    geo.ways = 64;
    return geo;
}

void validate(const CacheGeometry& geo) {
    if (!is_pow2(geo.line_size_bytes)) {
        throw ConfigError("line_size_bytes must be a power of two");
    }
    if (geo.index_bits() > 40) {
        throw ConfigError("index bits out of range");
    }
    if (geo.ways == 0) {
        throw ConfigError("ways must be >= 1");
    }
    if (geo.miss_latency_cycles <= geo.hit_latency_cycles) {
        throw ConfigError("miss_latency_cycles must exceed hit_latency_cycles");
    }
    if (geo.replacement_policy == ReplacementPolicy::tree_plru && !geo.partition && !is_pow2(geo.ways)) {
        throw ConfigError("TREE_PLRU requires a power-of-two way count");
    }
    if (geo.partition) {
        std::vector<WayRange> present;
        for (const auto& r : geo.partition->ranges) {
            if (!r) {
                continue;
            }
            if (r->first >= r->last) {
                throw ConfigError("partition way range must be non-empty");
            }
            if (r->last > geo.ways) {
                throw ConfigError("partition way range exceeds associativity");
            }
            if (geo.replacement_policy == ReplacementPolicy::tree_plru && !is_pow2(r->width())) {
                throw ConfigError("TREE_PLRU requires power-of-two partition widths");
            }
            for (const auto& other : present) {
                if (r->first < other.last && other.first < r->last) {
                    throw ConfigError("partition way ranges overlap");
                }
            }
            present.push_back(*r);
        }
        if (present.empty()) {
            throw ConfigError("partition must assign at least one domain");
        }
    }
}

SetIndex decompose_address(std::uint64_t addr, const CacheGeometry& geo) noexcept {
    const std::uint64_t line = addr >> geo.offset_bits();
    const auto field = [&](std::uint32_t shift, std::uint32_t bits) {
        return static_cast<std::uint32_t>((line >> shift) & ((std::uint64_t{1} << bits) - 1));
    };
    SetIndex idx;
    idx.set = field(0, geo.set_bits);
    idx.sub_bank = field(geo.set_bits, geo.sub_bank_bits);
    idx.bank = field(geo.set_bits + geo.sub_bank_bits, geo.bank_bits);
    idx.composite = (idx.bank << (geo.sub_bank_bits + geo.set_bits)) | (idx.sub_bank << geo.set_bits) | idx.set;
    return idx;
}

std::uint64_t address_tag(std::uint64_t addr, const CacheGeometry& geo) noexcept {
    return addr >> (geo.offset_bits() + geo.index_bits());
}

std::uint64_t line_address(std::uint64_t tag, std::uint32_t composite_set,
                           const CacheGeometry& geo) noexcept {
    const std::uint64_t line = (tag << geo.index_bits()) | composite_set;
    return line << geo.offset_bits();
}

CacheState::CacheState(const CacheGeometry& geo, std::uint64_t replacement_seed)
    : geo_(geo),
      offset_bits_(0),
      index_bits_(0),
      set_mask_(0),
      replacement_seed_(replacement_seed) {
    validate(geo_);
    seed_streams();
    offset_bits_ = geo_.offset_bits();
    index_bits_ = geo_.index_bits();
    set_mask_ = geo_.composite_sets() - 1;
    const std::size_t slots = geo_.composite_sets() * geo_.ways;
    tags_.assign(slots, kInvalid);
    stamps_.assign(slots, 0);
    plru_bits_.assign(slots, 0);
}

void CacheState::reset() {
    std::fill(tags_.begin(), tags_.end(), kInvalid);
    std::fill(stamps_.begin(), stamps_.end(), 0);
    std::fill(plru_bits_.begin(), plru_bits_.end(), 0);
    counters_ = {};
    clock_ = 0;
    seed_streams();
}

void CacheState::seed_streams() {
    for (std::size_t d = 0; d < kDomainCount; ++d) {
        rngs_[d].seed(mix64(replacement_seed_ ^ d));
    }
}

WayRange CacheState::visible_ways(Domain d) const {
    if (!geo_.partition) {
        return WayRange{0, geo_.ways};
    }
    const auto& r = geo_.partition->range(d);
    if (!r) {
        throw ConfigError(std::string("no way partition configured for domain ") +
                          (d == Domain::spy ? "SPY" : "VICTIM"));
    }
    return *r;
}

void CacheState::touch(std::size_t set_base, WayRange r, std::uint32_t way) {
    stamps_[set_base + way] = ++clock_;
    if (geo_.replacement_policy != ReplacementPolicy::tree_plru || r.width() == 1) {
        return;
    }
    // Point every tree node on the path away from the touched way.
    std::uint8_t* bits = &plru_bits_[set_base + r.first];
    std::uint32_t node = 0;
    std::uint32_t span = r.width();
    std::uint32_t local = way - r.first;
    while (span > 1) {
        const std::uint32_t half = span / 2;
        if (local < half) {
            bits[node] = 1;
            node = 2 * node + 1;
        } else {
            bits[node] = 0;
            node = 2 * node + 2;
            local -= half;
        }
        span = half;
    }
}

std::uint32_t CacheState::choose_victim(std::size_t set_base, WayRange r, Domain d) {
    for (std::uint32_t w = r.first; w < r.last; ++w) {
        if (tags_[set_base + w] == kInvalid) {
            return w;
        }
    }
    switch (geo_.replacement_policy) {
        case ReplacementPolicy::lru: {
            std::uint32_t victim = r.first;
            for (std::uint32_t w = r.first + 1; w < r.last; ++w) {
                if (stamps_[set_base + w] < stamps_[set_base + victim]) {
                    victim = w;
                }
            }
            return victim;
        }
        case ReplacementPolicy::random:
            return r.first + static_cast<std::uint32_t>(rngs_[static_cast<std::size_t>(d)].below(r.width()));
        case ReplacementPolicy::tree_plru: {
            const std::uint8_t* bits = &plru_bits_[set_base + r.first];
            std::uint32_t node = 0;
            std::uint32_t span = r.width();
            std::uint32_t base = 0;
            while (span > 1) {
                const std::uint32_t half = span / 2;
                if (bits[node] == 0) {
                    node = 2 * node + 1;
                } else {
                    base += half;
                    node = 2 * node + 2;
                }
                span = half;
            }
            return r.first + base;
        }
    }
    return r.first;
}

AccessResult CacheState::access(std::uint64_t addr, Domain domain) {
    const WayRange r = visible_ways(domain);
    const std::uint64_t line = addr >> offset_bits_;
    const std::uint64_t set = line & set_mask_;
    const std::uint64_t tag = line >> index_bits_;
    const std::size_t base = set * geo_.ways;
    auto& counters = counters_[static_cast<std::size_t>(domain)];

    for (std::uint32_t w = r.first; w < r.last; ++w) {
        if (tags_[base + w] == tag) {
            touch(base, r, w);
            ++counters.hits;
            return {true, geo_.hit_latency_cycles};
        }
    }

    if (geo_.partition) {
        // A line lives in at most one way of its set.
        for (std::uint32_t w = 0; w < geo_.ways; ++w) {
            if ((w < r.first || w >= r.last) && tags_[base + w] == tag) {
                tags_[base + w] = kInvalid;
                stamps_[base + w] = 0;
            }
        }
    }

    const std::uint32_t way = choose_victim(base, r, domain);
    tags_[base + way] = tag;
    touch(base, r, way);
    ++counters.misses;
    return {false, geo_.miss_latency_cycles};
}

std::vector<std::uint64_t> CacheState::resident_lines(std::uint64_t composite_set) const {
    if (composite_set >= geo_.composite_sets()) {
        throw std::out_of_range("composite set index out of range");
    }
    const std::size_t base = composite_set * geo_.ways;
    std::vector<std::uint32_t> ways;
    for (std::uint32_t w = 0; w < geo_.ways; ++w) {
        if (tags_[base + w] != kInvalid) {
            ways.push_back(w);
        }
    }
    std::sort(ways.begin(), ways.end(), [&](std::uint32_t a, std::uint32_t b) {
        return stamps_[base + a] < stamps_[base + b];
    });
    std::vector<std::uint64_t> out;
    out.reserve(ways.size());
    for (auto w : ways) {
        out.push_back(tags_[base + w]);
    }
    return out;
}

std::size_t CacheState::resident_count(std::uint64_t composite_set) const {
    if (composite_set >= geo_.composite_sets()) {
        throw std::out_of_range("composite set index out of range");
    }
    const auto first = tags_.begin() + static_cast<std::ptrdiff_t>(composite_set * geo_.ways);
    return static_cast<std::size_t>(
        std::count_if(first, first + geo_.ways, [](std::uint64_t t) { return t != kInvalid; }));
}

bool CacheState::contains(std::uint64_t addr) const {
    const std::uint64_t line = addr >> offset_bits_;
    const std::uint64_t set = line & set_mask_;
    const std::uint64_t tag = line >> index_bits_;
    const auto first = tags_.begin() + static_cast<std::ptrdiff_t>(set * geo_.ways);
    return std::find(first, first + geo_.ways, tag) != first + geo_.ways;
}

}  // namespace occsim
