#pragma once

// Hierarchy of sampled rank tables and the lower-bound rank estimator.
//
// Level 1 is the coarsest (resident in memory), level L the finest. Level l
// samples rank_c at positions s_l, 2 s_l, ..., and always at n, so every level
// answers rank_c(n) directly. Spacings shrink by the rate r from one level to
// the next: s_l = r * s_{l+1}.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alphabet.hpp"
#include "error.hpp"

namespace seqfm {

inline constexpr std::uint64_t kEntryBytes = 8;

constexpr std::uint64_t sample_count(std::uint64_t n, std::uint64_t spacing) {
    return (n + spacing - 1) / spacing;
}

struct LevelSchedule {
    std::uint32_t rate = 2;
    std::vector<std::uint64_t> spacings; // coarsest first
    std::uint64_t mem_budget = 0;
    // False when not even a single-sample level 1 fits the budget; level 1 is
    // kept resident regardless.
    bool resident_fits = true;

    std::size_t levels() const noexcept { return spacings.size(); }
    std::uint64_t finest() const { return spacings.back(); }
};

// Bytes of a level-1 table with the given spacing.
constexpr std::uint64_t level_bytes(std::uint64_t n, std::uint64_t spacing, std::size_t sigma) {
    return sigma * sample_count(n, spacing) * kEntryBytes;
}

// Budget used when the caller gives none: roughly sqrt(n) samples per column.
inline std::uint64_t default_mem_budget(std::uint64_t n, std::size_t sigma) {
    const auto root = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    return sigma * std::max<std::uint64_t>(root, 1) * kEntryBytes;
}

// Smallest L such that level 1 (spacing finest * r^(L-1)) fits mem_budget.
inline LevelSchedule make_schedule(std::uint64_t n, std::uint32_t rate, std::uint64_t finest,
                                   std::uint64_t mem_budget, std::size_t sigma) {
    if (rate < 2) throw error("rate must be >= 2");
    if (finest < 1) throw error("finest spacing must be >= 1");
    if (finest > n) throw error("finest spacing exceeds text length");

    LevelSchedule schedule;
    schedule.rate = rate;
    schedule.mem_budget = mem_budget;

    if (level_bytes(n, n, sigma) > mem_budget) {
        schedule.resident_fits = false;
        schedule.spacings = {finest};
        return schedule;
    }
    std::vector<std::uint64_t> finest_first{finest};
    while (level_bytes(n, finest_first.back(), sigma) > mem_budget)
        finest_first.push_back(finest_first.back() * rate);
    schedule.spacings.assign(finest_first.rbegin(), finest_first.rend());
    return schedule;
}

// Sample grid of one level: positions s, 2s, ..., and n.
class LevelGeometry {
public:
    LevelGeometry() = default;
    LevelGeometry(std::uint64_t n, std::uint64_t spacing)
        : n_(n), spacing_(spacing), count_(sample_count(n, spacing)) {
        if (n == 0 || spacing == 0) throw error("invalid level geometry");
    }

    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t spacing() const noexcept { return spacing_; }
    std::uint64_t count() const noexcept { return count_; }

    std::uint64_t position(std::uint64_t index) const {
        if (index >= count_) throw error("sample index out of range");
        return index + 1 == count_ ? n_ : (index + 1) * spacing_;
    }

    // Index of the smallest sample position >= i, for 1 <= i <= n.
    std::uint64_t next_index(std::uint64_t i) const {
        if (i < 1 || i > n_) throw error("position " + std::to_string(i) + " out of range");
        return std::min((i + spacing_ - 1) / spacing_, count_) - 1;
    }

    // Index of the largest sample position <= i, or nullopt when i precedes
    // the first sample (rank there is taken as 0 at position 0).
    std::optional<std::uint64_t> prev_index(std::uint64_t i) const {
        if (i > n_) throw error("position " + std::to_string(i) + " out of range");
        if (i == n_) return count_ - 1;
        if (i < spacing_) return std::nullopt;
        return i / spacing_ - 1;
    }

    std::uint64_t next_sample(std::uint64_t i) const { return position(next_index(i)); }

    std::uint64_t prev_sample(std::uint64_t i) const {
        const auto idx = prev_index(i);
        return idx ? position(*idx) : 0;
    }

    friend bool operator==(const LevelGeometry&, const LevelGeometry&) = default;

private:
    std::uint64_t n_ = 0;
    std::uint64_t spacing_ = 0;
    std::uint64_t count_ = 0;
};

// Anything that hands out rank_c at a sample index of one level.
template <class S>
concept RankSource = requires(const S& s, std::size_t column, std::uint64_t index) {
    { s.entry(column, index) } -> std::convertible_to<std::uint64_t>;
};

struct SampleTable {
    std::size_t level = 0; // 1-based
    LevelGeometry geometry;
    // columns[c][t] = rank_c(position(t)), c = alphabet rank
    std::vector<std::vector<std::uint64_t>> columns;

    std::uint64_t entry(std::size_t column, std::uint64_t index) const {
        return columns.at(column).at(index);
    }

    std::vector<std::uint64_t> positions() const {
        std::vector<std::uint64_t> out(geometry.count());
        for (std::uint64_t t = 0; t < out.size(); ++t) out[t] = geometry.position(t);
        return out;
    }

    friend bool operator==(const SampleTable&, const SampleTable&) = default;
};

inline std::vector<SampleTable> build_tables(std::string_view b, const Alphabet& alphabet,
                                             const LevelSchedule& schedule) {
    const std::uint64_t n = b.size();
    std::vector<std::size_t> ranks(n);
    for (std::uint64_t p = 0; p < n; ++p) {
        const auto r = alphabet.rank_of(static_cast<std::uint8_t>(b[p]));
        if (!r) throw error("byte outside alphabet");
        ranks[p] = *r;
    }

    std::vector<SampleTable> tables;
    tables.reserve(schedule.levels());
    for (std::size_t l = 0; l < schedule.levels(); ++l) {
        SampleTable table;
        table.level = l + 1;
        table.geometry = LevelGeometry(n, schedule.spacings[l]);
        table.columns.assign(alphabet.size(), std::vector<std::uint64_t>(table.geometry.count()));

        std::vector<std::uint64_t> running(alphabet.size(), 0);
        std::uint64_t next = 0;
        for (std::uint64_t p = 1; p <= n; ++p) {
            ++running[ranks[p - 1]];
            if (p == table.geometry.position(next)) {
                for (std::size_t c = 0; c < running.size(); ++c) table.columns[c][next] = running[c];
                ++next;
                if (next == table.geometry.count()) break;
            }
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

inline std::uint64_t next_sample(const SampleTable& table, std::uint64_t i) {
    return table.geometry.next_sample(i);
}

inline std::uint64_t prev_sample(const SampleTable& table, std::uint64_t i) {
    return table.geometry.prev_sample(i);
}

// Entries of one level fetched from disk, addressed by (column, sample index).
class SampleBuffer {
public:
    void insert(std::size_t column, std::uint64_t first_index, std::span<const std::uint64_t> values) {
        for (std::uint64_t k = 0; k < values.size(); ++k) entries_[{column, first_index + k}] = values[k];
    }

    bool contains(std::size_t column, std::uint64_t index) const {
        return entries_.contains({column, index});
    }

    std::uint64_t entry(std::size_t column, std::uint64_t index) const {
        const auto it = entries_.find({column, index});
        if (it == entries_.end()) throw error("sample not fetched");
        return it->second;
    }

    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::pair<std::size_t, std::uint64_t>, std::uint64_t> entries_;
};

// A value known to lie in [lower, lower + width].
struct EstimateWindow {
    std::uint64_t lower = 0;
    std::uint64_t width = 0;

    std::uint64_t upper() const noexcept { return lower + width; }
    bool exact() const noexcept { return width == 0; }
    bool contains(std::uint64_t v) const noexcept { return lower <= v && v <= upper(); }

    friend bool operator==(const EstimateWindow&, const EstimateWindow&) = default;
};

// Window for rank_c(x) given x in `window`, from the single entry at
// p = next_sample(window.lower):
//   rank_c(p) - (p - lower) <= rank_c(x) <= that + max(width, p - lower).
// Position 0 acts as an implicit sample with rank 0.
template <RankSource Source>
EstimateWindow estimate_lower(const Source& source, const LevelGeometry& geometry,
                              std::size_t column, EstimateWindow window) {
    if (window.lower == 0) return {0, window.width};
    const std::uint64_t index = geometry.next_index(window.lower);
    const std::uint64_t p = geometry.position(index);
    const std::uint64_t value = source.entry(column, index);
    const std::uint64_t gap = p - window.lower;
    const std::uint64_t width = std::max(window.width, gap);
    if (value >= gap) return {value - gap, width};
    // Negative lower bound: clamp at 0 and keep the same upper bound.
    const std::uint64_t upper = value + width >= gap ? value + width - gap : 0;
    return {0, upper};
}

} // namespace seqfm
