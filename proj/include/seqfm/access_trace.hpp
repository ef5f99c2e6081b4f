#pragma once

// Record of every byte range a query reads, and the seek statistics over it.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace seqfm {

enum class SearchMode { naive, sequential };

inline std::string_view to_string(SearchMode mode) {
    return mode == SearchMode::naive ? "naive" : "sequential";
}

struct TraceRecord {
    std::string region;         // "level2", ..., "bwt"
    std::uint32_t region_order; // position of the region in file order
    std::uint64_t offset;       // absolute byte offset
    std::uint64_t length;

    std::uint64_t end() const noexcept { return offset + length; }
    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct AccessTrace {
    SearchMode mode = SearchMode::sequential;
    std::vector<TraceRecord> records; // chronological
};

struct TraceStats {
    std::uint64_t total_bytes = 0;
    std::uint64_t read_count = 0;
    std::uint64_t backward_seeks = 0;  // reads starting before the previous read's end
    std::uint64_t forward_skips = 0;   // reads starting after the previous read's end
    std::uint64_t max_backward_distance = 0;

    friend bool operator==(const TraceStats&, const TraceStats&) = default;
};

inline TraceStats trace_stats(const AccessTrace& trace) {
    TraceStats stats;
    const TraceRecord* prev = nullptr;
    for (const auto& rec : trace.records) {
        stats.total_bytes += rec.length;
        ++stats.read_count;
        if (prev) {
            if (rec.offset < prev->end()) {
                ++stats.backward_seeks;
                stats.max_backward_distance = std::max(stats.max_backward_distance, prev->end() - rec.offset);
            } else if (rec.offset > prev->end()) {
                ++stats.forward_skips;
            }
        }
        prev = &rec;
    }
    return stats;
}

// One "region,offset,length" line per record.
inline void write_trace(std::ostream& out, const AccessTrace& trace) {
    for (const auto& rec : trace.records) out << rec.region << ',' << rec.offset << ',' << rec.length << '\n';
}

} // namespace seqfm
