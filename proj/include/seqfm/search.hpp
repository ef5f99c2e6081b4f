#pragma once

// Backward search over an on-disk index, in two modes.
//
// Both interval endpoints follow the same recurrence x_{k+1} = C[c] + rank_c(x_k),
// where c is the pattern read right to left:
//   right chain  x_1 = C[c] + rank_c(n), ends at ep
//   left chain   x_1 = C[c],             ends at sp - 1
// Naive mode resolves each rank_c exactly with a random access. Sequential mode
// estimates every step from the resident level, refines the estimates level by
// level with forward-only reads, and finishes with one forward pass over B.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "access_trace.hpp"
#include "error.hpp"
#include "layout.hpp"
#include "rank_tables.hpp"

namespace seqfm {

enum class Chain { right, left };

struct ChainState {
    std::string pattern;
    // columns[k] is the alphabet rank of the symbol consumed by step k + 1,
    // i.e. the pattern reversed.
    std::vector<std::size_t> columns;
    std::vector<EstimateWindow> right; // windows on j_k
    std::vector<EstimateWindow> left;  // windows on sp_k - 1

    std::size_t steps() const noexcept { return columns.size(); }

    const std::vector<EstimateWindow>& chain(Chain which) const { return which == Chain::right ? right : left; }
    std::vector<EstimateWindow>& chain(Chain which) { return which == Chain::right ? right : left; }

    EstimateWindow sp_window(std::size_t k) const { return {left.at(k).lower + 1, left.at(k).width}; }

    bool exact() const {
        const auto is_exact = [](const EstimateWindow& w) { return w.exact(); };
        return std::all_of(right.begin(), right.end(), is_exact) && std::all_of(left.begin(), left.end(), is_exact);
    }

    std::uint64_t max_width() const {
        std::uint64_t w = 0;
        for (const auto& x : right) w = std::max(w, x.width);
        for (const auto& x : left) w = std::max(w, x.width);
        return w;
    }
};

// A run of consecutive entries [first, last] of one column of one level.
struct BlockRequest {
    std::size_t level = 0;
    std::size_t column = 0;
    std::uint64_t first = 0;
    std::uint64_t last = 0;
    std::vector<std::pair<Chain, std::size_t>> origins; // (chain, step) of each dependency served

    std::uint64_t size() const noexcept { return last - first + 1; }
};

struct SearchOutcome {
    std::uint64_t sp = 1;
    std::uint64_t ep = 0; // sp > ep encodes an empty interval
    std::uint64_t count = 0;
    SearchMode mode = SearchMode::sequential;
    std::vector<std::uint64_t> ep_chain; // j_1 .. j_m
    std::vector<std::uint64_t> sp_chain; // sp_1 .. sp_m
    AccessTrace trace;
    TraceStats stats;
};

// Called with the chain state after the resident level (level 1) and after
// each refined level.
using LevelObserver = std::function<void(std::size_t level, std::uint64_t spacing, const ChainState&)>;

// Alphabet ranks of the pattern, reversed; nullopt if some byte is absent.
inline std::optional<std::vector<std::size_t>> pattern_columns(const Alphabet& alphabet, std::string_view pattern) {
    std::vector<std::size_t> columns;
    columns.reserve(pattern.size());
    for (auto it = pattern.rbegin(); it != pattern.rend(); ++it) {
        const auto r = alphabet.rank_of(static_cast<std::uint8_t>(*it));
        if (!r) return std::nullopt;
        columns.push_back(*r);
    }
    return columns;
}

namespace detail {

// Window on C[c] + rank, clamped to [0, n].
inline EstimateWindow shift_window(EstimateWindow rank, std::uint64_t c, std::uint64_t n) {
    const std::uint64_t lower = std::min(rank.lower + c, n);
    const std::uint64_t upper = std::min(rank.upper() + c, n);
    return {lower, upper - lower};
}

inline EstimateWindow intersect(EstimateWindow a, EstimateWindow b) {
    const std::uint64_t lower = std::max(a.lower, b.lower);
    const std::uint64_t upper = std::min(a.upper(), b.upper());
    if (lower > upper) throw error("disjoint estimate windows");
    return {lower, upper - lower};
}

// Re-derives steps 2..m of a chain in step order from one level's entries.
// With `previous`, each new window is intersected with the earlier one.
template <RankSource Source>
void derive_chain(const Source& source, const LevelGeometry& geometry, const std::vector<std::uint64_t>& c_array,
                  const std::vector<std::size_t>& columns, std::vector<EstimateWindow>& chain,
                  const std::vector<EstimateWindow>* previous) {
    for (std::size_t k = 1; k < columns.size(); ++k) {
        const std::size_t col = columns[k];
        EstimateWindow next =
            shift_window(estimate_lower(source, geometry, col, chain[k - 1]), c_array[col], geometry.n());
        if (previous) next = intersect(next, (*previous)[k]);
        chain[k] = next;
    }
}

inline void finish(SearchOutcome& out) {
    out.count = out.ep >= out.sp ? out.ep - out.sp + 1 : 0;
    out.stats = trace_stats(out.trace);
}

// B slices read during the exact phase, keyed by first position.
class BwtSlices {
public:
    void insert(std::uint64_t first, std::string bytes) { slices_.emplace(first, std::move(bytes)); }

    // Occurrences of byte c in B[from..to], 1-based inclusive; from > to is empty.
    std::uint64_t count(std::uint8_t c, std::uint64_t from, std::uint64_t to) const {
        if (from > to) return 0;
        auto it = slices_.upper_bound(from);
        if (it == slices_.begin()) throw error("bwt slice not fetched");
        --it;
        const std::uint64_t first = it->first;
        const std::string& bytes = it->second;
        if (to >= first + bytes.size()) throw error("bwt slice not fetched");
        return static_cast<std::uint64_t>(
            std::count(bytes.begin() + static_cast<std::ptrdiff_t>(from - first),
                       bytes.begin() + static_cast<std::ptrdiff_t>(to - first + 1), static_cast<char>(c)));
    }

private:
    std::map<std::uint64_t, std::string> slices_;
};

} // namespace detail

// Step 1 of both chains is exact from C and rank_c(n); the remaining steps are
// lower-bound estimates from the resident level.
inline ChainState seed_chains(const IndexFile& index, std::string_view pattern) {
    if (pattern.empty()) throw error("empty pattern");
    auto columns = pattern_columns(index.alphabet(), pattern);
    if (!columns) throw error("pattern symbol outside alphabet");

    const SampleTable& resident = index.resident();
    const auto& c_array = index.c_array();
    ChainState chains;
    chains.pattern = std::string(pattern);
    chains.columns = std::move(*columns);
    chains.right.assign(chains.steps(), {});
    chains.left.assign(chains.steps(), {});

    const std::size_t first = chains.columns[0];
    chains.right[0] = {c_array[first] + resident.entry(first, resident.geometry.count() - 1), 0};
    chains.left[0] = {c_array[first], 0};
    detail::derive_chain(resident, resident.geometry, c_array, chains.columns, chains.right, nullptr);
    detail::derive_chain(resident, resident.geometry, c_array, chains.columns, chains.left, nullptr);
    return chains;
}

// Entries of `level` that refining the chains can touch. Each dependency of
// step k + 1 on the window of step k needs the samples from prev_sample(lower)
// through next_sample(lower + s_prev), where s_prev is the previous level's
// spacing (exact windows need only prev/next of their position). Requests are
// sorted by disk offset and merged when overlapping or adjacent.
inline std::vector<BlockRequest> plan_blocks(const ChainState& chains, const LevelGeometry& geometry,
                                             std::size_t level, std::uint64_t prev_spacing) {
    const std::uint64_t n = geometry.n();
    std::vector<BlockRequest> requests;
    for (Chain which : {Chain::right, Chain::left}) {
        const auto& chain = chains.chain(which);
        for (std::size_t k = 0; k + 1 < chains.steps(); ++k) {
            const EstimateWindow w = chain[k];
            const std::uint64_t lo = w.lower;
            const std::uint64_t hi = w.exact() ? lo : std::min(n, lo + prev_spacing);
            if (hi == 0) continue;
            BlockRequest req;
            req.level = level;
            req.column = chains.columns[k + 1];
            req.first = geometry.prev_index(lo).value_or(0);
            req.last = geometry.next_index(hi);
            req.origins.emplace_back(which, k);
            requests.push_back(std::move(req));
        }
    }
    std::sort(requests.begin(), requests.end(), [](const BlockRequest& a, const BlockRequest& b) {
        return std::tie(a.column, a.first, a.last) < std::tie(b.column, b.first, b.last);
    });

    std::vector<BlockRequest> merged;
    for (auto& req : requests) {
        if (!merged.empty() && merged.back().column == req.column && req.first <= merged.back().last + 1) {
            auto& cur = merged.back();
            cur.last = std::max(cur.last, req.last);
            cur.origins.insert(cur.origins.end(), req.origins.begin(), req.origins.end());
        } else {
            merged.push_back(std::move(req));
        }
    }
    return merged;
}

// Re-estimates both chains from one level's buffered entries. New windows are
// intersected with the old ones, so they never leave the planned blocks.
template <RankSource Source>
ChainState resolve_level(const ChainState& chains, const Source& entries, const LevelGeometry& geometry,
                         const std::vector<std::uint64_t>& c_array) {
    ChainState next = chains;
    detail::derive_chain(entries, geometry, c_array, next.columns, next.right, &chains.right);
    detail::derive_chain(entries, geometry, c_array, next.columns, next.left, &chains.left);
    return next;
}

// Resolves both chains exactly. `finest` holds the finest level's entries
// (anchors at prev_sample of each window); B is read once, forward, over
// [anchor + 1, upper] of every window, then the chains are replayed in step order.
template <RankSource Source>
SearchOutcome exact_phase(const ChainState& chains, const IndexFile& index, const Source& finest,
                          TracedReader& reader) {
    const std::uint64_t n = index.n();
    const LevelGeometry geometry = index.geometry(index.levels());
    const auto& c_array = index.c_array();

    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    for (Chain which : {Chain::right, Chain::left}) {
        const auto& chain = chains.chain(which);
        for (std::size_t k = 0; k + 1 < chains.steps(); ++k) {
            const EstimateWindow w = chain[k];
            if (w.upper() == 0) continue;
            const std::uint64_t first = geometry.prev_sample(w.lower) + 1;
            const std::uint64_t last = std::min(w.upper(), n);
            if (first <= last) ranges.emplace_back(first, last);
        }
    }
    std::sort(ranges.begin(), ranges.end());
    std::vector<std::pair<std::uint64_t, std::uint64_t>> merged;
    for (const auto& r : ranges) {
        if (!merged.empty() && r.first <= merged.back().second + 1)
            merged.back().second = std::max(merged.back().second, r.second);
        else
            merged.push_back(r);
    }
    detail::BwtSlices slices;
    for (const auto& [first, last] : merged) slices.insert(first, reader.read_bwt(first, last));

    const auto replay = [&](const std::vector<EstimateWindow>& chain) {
        std::vector<std::uint64_t> values(chains.steps());
        values[0] = chain[0].lower;
        for (std::size_t k = 0; k + 1 < chains.steps(); ++k) {
            const std::uint64_t x = values[k];
            if (!chain[k].contains(x)) throw error("estimate window lost the true value");
            const std::size_t col = chains.columns[k + 1];
            std::uint64_t rank = 0;
            if (x > 0) {
                const auto anchor = geometry.prev_index(chain[k].lower);
                const std::uint64_t anchor_pos = anchor ? geometry.position(*anchor) : 0;
                rank = (anchor ? finest.entry(col, *anchor) : 0) +
                       slices.count(index.alphabet().symbol(col), anchor_pos + 1, x);
            }
            values[k + 1] = c_array[col] + rank;
        }
        return values;
    };

    SearchOutcome out;
    out.mode = SearchMode::sequential;
    out.ep_chain = replay(chains.right);
    out.sp_chain = replay(chains.left);
    for (auto& v : out.sp_chain) ++v;
    out.ep = out.ep_chain.back();
    out.sp = out.sp_chain.back();
    return out;
}

namespace detail {

inline std::optional<SearchOutcome> trivial_query(const IndexFile& index, std::string_view pattern, SearchMode mode) {
    if (pattern.size() > index.n()) throw query_error("pattern longer than text");
    SearchOutcome out;
    out.mode = mode;
    out.trace.mode = mode;
    if (pattern.empty()) {
        out.sp = 1;
        out.ep = index.n();
    } else if (!pattern_columns(index.alphabet(), pattern)) {
        out.sp = 1;
        out.ep = 0;
    } else {
        return std::nullopt;
    }
    finish(out);
    return out;
}

} // namespace detail

// Exact rank_c(x) for every step: the finest level's entry at prev_sample(x)
// plus a scan of B up to x, each fetched where it lies on disk.
inline SearchOutcome backward_search_naive(const IndexFile& index, std::string_view pattern) {
    if (auto trivial = detail::trivial_query(index, pattern, SearchMode::naive)) return *trivial;
    const auto columns = *pattern_columns(index.alphabet(), pattern);
    const std::size_t finest = index.levels();
    const LevelGeometry geometry = index.geometry(finest);
    const auto& c_array = index.c_array();
    TracedReader reader(index, SearchMode::naive);

    const auto rank = [&](std::size_t col, std::uint64_t x) -> std::uint64_t {
        if (x == 0) return 0;
        const auto anchor = geometry.prev_index(x);
        std::uint64_t value = 0;
        std::uint64_t anchor_pos = 0;
        if (anchor) {
            value = finest == 1 ? index.resident().entry(col, *anchor)
                                : reader.read_entries(finest, col, *anchor, *anchor)[0];
            anchor_pos = geometry.position(*anchor);
        }
        if (x > anchor_pos) {
            const std::string slice = reader.read_bwt(anchor_pos + 1, x);
            value += static_cast<std::uint64_t>(
                std::count(slice.begin(), slice.end(), static_cast<char>(index.alphabet().symbol(col))));
        }
        return value;
    };

    SearchOutcome out;
    out.mode = SearchMode::naive;
    std::uint64_t x = c_array[columns[0]] + rank(columns[0], index.n());
    out.ep_chain.push_back(x);
    for (std::size_t k = 1; k < columns.size(); ++k) {
        x = c_array[columns[k]] + rank(columns[k], x);
        out.ep_chain.push_back(x);
    }
    std::uint64_t y = c_array[columns[0]];
    out.sp_chain.push_back(y + 1);
    for (std::size_t k = 1; k < columns.size(); ++k) {
        y = c_array[columns[k]] + rank(columns[k], y);
        out.sp_chain.push_back(y + 1);
    }
    out.ep = x;
    out.sp = y + 1;
    out.trace = reader.take_trace();
    detail::finish(out);
    return out;
}

// Seed from the resident level, refine through levels 2..L with one forward
// pass per level, then resolve exactly with one forward pass over B.
inline SearchOutcome sequential_count(const IndexFile& index, std::string_view pattern,
                                      const LevelObserver& observer = {}) {
    if (auto trivial = detail::trivial_query(index, pattern, SearchMode::sequential)) return *trivial;

    ChainState chains = seed_chains(index, pattern);
    if (observer) observer(1, index.geometry(1).spacing(), chains);

    TracedReader reader(index, SearchMode::sequential);
    SampleBuffer buffer;
    for (std::size_t level = 2; level <= index.levels(); ++level) {
        const LevelGeometry geometry = index.geometry(level);
        buffer = SampleBuffer{};
        for (const auto& block :
             plan_blocks(chains, geometry, level, index.geometry(level - 1).spacing())) {
            const auto values = reader.read_entries(level, block.column, block.first, block.last);
            buffer.insert(block.column, block.first, values);
        }
        chains = resolve_level(chains, buffer, geometry, index.c_array());
        if (observer) observer(level, geometry.spacing(), chains);
    }

    SearchOutcome out = index.levels() == 1 ? exact_phase(chains, index, index.resident(), reader)
                                            : exact_phase(chains, index, buffer, reader);
    out.trace = reader.take_trace();
    detail::finish(out);
    return out;
}

inline SearchOutcome count(const IndexFile& index, std::string_view pattern, SearchMode mode) {
    return mode == SearchMode::naive ? backward_search_naive(index, pattern) : sequential_count(index, pattern);
}

} // namespace seqfm
