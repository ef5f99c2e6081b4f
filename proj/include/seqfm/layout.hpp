#pragma once

// On-disk index format. All integers little-endian, unsigned.
//
//   magic "SQFM"                  4 bytes
//   version                       u32 (= 1)
//   n                             u64
//   sigma                         u16
//   rate                          u32
//   L                             u16
//   alphabet                      sigma bytes, ascending
//   C array                       sigma x u64
//   primary row                   u64
//   per level l = 1..L            spacing u64, sample_count u64, byte offset u64
//   B offset                      u64
//   level 1 .. level L tables     per level: columns in alphabet order, each
//                                 column sample_count x u64, positions ascending
//   B                             n bytes
//
// Only the header and level 1 are read when an index is opened. Everything
// after that goes through a TracedReader.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "access_trace.hpp"
#include "alphabet.hpp"
#include "bwt.hpp"
#include "error.hpp"
#include "rank_tables.hpp"

namespace seqfm {

inline constexpr std::string_view kMagic = "SQFM";
inline constexpr std::uint32_t kFormatVersion = 1;

constexpr std::uint64_t header_size(std::size_t sigma, std::size_t levels) {
    return 40 + 9 * sigma + 24 * levels;
}

namespace detail {

template <class T>
void put_le(std::string& out, T value) {
    for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(static_cast<char>((value >> (8 * k)) & 0xff));
}

template <class T>
T get_le(std::string_view in, std::uint64_t at) {
    T value = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k)
        value |= static_cast<T>(static_cast<std::uint8_t>(in[at + k])) << (8 * k);
    return value;
}

} // namespace detail

struct LevelHeader {
    std::uint64_t spacing = 0;
    std::uint64_t sample_count = 0;
    std::uint64_t offset = 0;

    friend bool operator==(const LevelHeader&, const LevelHeader&) = default;
};

// A contiguous byte range of the file with a name and its rank in file order
// (0 header, l for level l, L + 1 for B).
struct Region {
    std::string tag;
    std::uint32_t order = 0;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    std::uint64_t end() const noexcept { return offset + length; }
};

inline std::string serialize(const BwtResult& bwt, const std::vector<SampleTable>& tables,
                             const LevelSchedule& schedule, const Alphabet& alphabet) {
    const std::uint64_t n = bwt.bwt.size();
    const std::size_t sigma = alphabet.size();
    const std::size_t levels = schedule.levels();
    if (n == 0) throw error("empty text");
    if (levels == 0 || tables.size() != levels) throw error("tables do not match schedule");
    if (bwt.c_array.size() != sigma) throw error("C array does not match alphabet");
    if (levels > 0xffff) throw error("too many levels");
    for (std::size_t l = 0; l < levels; ++l) {
        const auto& t = tables[l];
        if (t.geometry != LevelGeometry(n, schedule.spacings[l]) || t.columns.size() != sigma)
            throw error("table for level " + std::to_string(l + 1) + " does not match schedule");
    }

    std::string out;
    out.append(kMagic);
    detail::put_le<std::uint32_t>(out, kFormatVersion);
    detail::put_le<std::uint64_t>(out, n);
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(sigma));
    detail::put_le<std::uint32_t>(out, schedule.rate);
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(levels));
    for (auto c : alphabet.symbols()) out.push_back(static_cast<char>(c));
    for (auto c : bwt.c_array) detail::put_le<std::uint64_t>(out, c);
    detail::put_le<std::uint64_t>(out, bwt.primary_row);

    std::uint64_t offset = header_size(sigma, levels);
    for (const auto& t : tables) {
        detail::put_le<std::uint64_t>(out, t.geometry.spacing());
        detail::put_le<std::uint64_t>(out, t.geometry.count());
        detail::put_le<std::uint64_t>(out, offset);
        offset += sigma * t.geometry.count() * kEntryBytes;
    }
    detail::put_le<std::uint64_t>(out, offset);

    for (const auto& t : tables)
        for (const auto& column : t.columns)
            for (auto v : column) detail::put_le<std::uint64_t>(out, v);
    out.append(bwt.bwt);
    return out;
}

inline void write_index(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw error("write failed: " + path.string());
}

class IndexFile {
public:
    static IndexFile open(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw error("cannot open " + path.string());
        IndexFile index;
        index.path_ = path;
        in.seekg(0, std::ios::end);
        index.file_size_ = static_cast<std::uint64_t>(in.tellg());
        in.seekg(0);

        const auto read_exact = [&](std::uint64_t offset, std::uint64_t length, std::string_view what) {
            if (offset + length > index.file_size_) throw format_error("truncated: " + std::string(what));
            std::string buf(length, '\0');
            in.seekg(static_cast<std::streamoff>(offset));
            in.read(buf.data(), static_cast<std::streamsize>(length));
            if (!in) throw error("read failed: " + path.string());
            return buf;
        };

        if (index.file_size_ < kMagic.size()) throw format_error("truncated: header");
        const std::string fixed = read_exact(0, std::min<std::uint64_t>(24, index.file_size_), "header");
        if (std::string_view(fixed).substr(0, 4) != kMagic) throw format_error("bad magic");
        if (fixed.size() < 24) throw format_error("truncated: header");
        if (detail::get_le<std::uint32_t>(fixed, 4) != kFormatVersion) throw format_error("bad version");

        index.n_ = detail::get_le<std::uint64_t>(fixed, 8);
        const std::size_t sigma = detail::get_le<std::uint16_t>(fixed, 16);
        index.rate_ = detail::get_le<std::uint32_t>(fixed, 18);
        const std::size_t levels = detail::get_le<std::uint16_t>(fixed, 22);
        if (index.n_ == 0) throw format_error("bad header: n");
        if (sigma < 1 || sigma > 256) throw format_error("bad header: sigma");
        if (index.rate_ < 2) throw format_error("bad header: rate");
        if (levels < 1) throw format_error("bad header: level count");

        const std::string header = read_exact(0, header_size(sigma, levels), "header");
        std::uint64_t at = 24;
        std::vector<std::uint8_t> symbols(sigma);
        for (auto& s : symbols) s = static_cast<std::uint8_t>(header[at++]);
        try {
            index.alphabet_ = Alphabet(std::move(symbols));
        } catch (const error&) {
            throw format_error("bad header: alphabet");
        }
        index.c_array_.resize(sigma);
        for (auto& c : index.c_array_) {
            c = detail::get_le<std::uint64_t>(header, at);
            at += 8;
        }
        if (index.c_array_[0] != 0 || !std::is_sorted(index.c_array_.begin(), index.c_array_.end()) ||
            index.c_array_.back() >= index.n_)
            throw format_error("bad header: C array");
        index.primary_row_ = detail::get_le<std::uint64_t>(header, at);
        at += 8;
        if (index.primary_row_ < 1 || index.primary_row_ > index.n_) throw format_error("bad header: primary row");

        std::uint64_t expected = header_size(sigma, levels);
        index.levels_.resize(levels);
        for (std::size_t l = 0; l < levels; ++l) {
            auto& lh = index.levels_[l];
            lh.spacing = detail::get_le<std::uint64_t>(header, at);
            lh.sample_count = detail::get_le<std::uint64_t>(header, at + 8);
            lh.offset = detail::get_le<std::uint64_t>(header, at + 16);
            at += 24;
            const std::string field = "bad header: level " + std::to_string(l + 1);
            if (lh.spacing == 0 || lh.sample_count != sample_count(index.n_, lh.spacing) || lh.offset != expected)
                throw format_error(field);
            if (l > 0 && index.levels_[l - 1].spacing != lh.spacing * index.rate_) throw format_error(field);
            expected += sigma * lh.sample_count * kEntryBytes;
        }
        index.bwt_offset_ = detail::get_le<std::uint64_t>(header, at);
        if (index.bwt_offset_ != expected) throw format_error("bad header: bwt offset");

        for (std::size_t l = 1; l <= levels; ++l) {
            const Region r = index.level_region(l);
            if (r.end() > index.file_size_) throw format_error("truncated: " + r.tag);
        }
        const Region b = index.bwt_region();
        if (b.end() > index.file_size_) throw format_error("truncated: bwt");
        if (b.end() < index.file_size_) throw format_error("trailing bytes after bwt");

        const Region r1 = index.level_region(1);
        const std::string raw = read_exact(r1.offset, r1.length, r1.tag);
        index.resident_ = index.decode_level(1, raw);
        return index;
    }

    const std::filesystem::path& path() const noexcept { return path_; }
    std::uint64_t file_size() const noexcept { return file_size_; }
    std::uint64_t n() const noexcept { return n_; }
    std::uint32_t rate() const noexcept { return rate_; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const std::vector<std::uint64_t>& c_array() const noexcept { return c_array_; }
    std::uint64_t primary_row() const noexcept { return primary_row_; }
    std::size_t levels() const noexcept { return levels_.size(); }
    const std::vector<LevelHeader>& level_headers() const noexcept { return levels_; }
    std::uint64_t bwt_offset() const noexcept { return bwt_offset_; }

    std::vector<std::uint64_t> spacings() const {
        std::vector<std::uint64_t> out;
        for (const auto& l : levels_) out.push_back(l.spacing);
        return out;
    }

    LevelGeometry geometry(std::size_t level) const {
        return LevelGeometry(n_, levels_.at(level - 1).spacing);
    }

    // Level 1, loaded at open.
    const SampleTable& resident() const noexcept { return resident_; }

    Region header_region() const { return {"header", 0, 0, header_size(alphabet_.size(), levels_.size())}; }

    Region level_region(std::size_t level) const {
        const auto& lh = levels_.at(level - 1);
        return {"level" + std::to_string(level), static_cast<std::uint32_t>(level), lh.offset,
                alphabet_.size() * lh.sample_count * kEntryBytes};
    }

    Region bwt_region() const {
        return {"bwt", static_cast<std::uint32_t>(levels_.size() + 1), bwt_offset_, n_};
    }

    std::uint64_t column_offset(std::size_t level, std::size_t column) const {
        const auto& lh = levels_.at(level - 1);
        return lh.offset + column * lh.sample_count * kEntryBytes;
    }

    std::uint64_t entry_offset(std::size_t level, std::size_t column, std::uint64_t index) const {
        return column_offset(level, column) + index * kEntryBytes;
    }

    // File offset of B[p], 1-based.
    std::uint64_t bwt_position_offset(std::uint64_t p) const { return bwt_offset_ + p - 1; }

    std::uint64_t table_bytes() const {
        std::uint64_t total = 0;
        for (std::size_t l = 1; l <= levels_.size(); ++l) total += level_region(l).length;
        return total;
    }

    // Decodes a whole level region.
    SampleTable decode_level(std::size_t level, std::string_view raw) const {
        SampleTable t;
        t.level = level;
        t.geometry = geometry(level);
        const std::uint64_t count = t.geometry.count();
        if (raw.size() != alphabet_.size() * count * kEntryBytes) throw error("level size mismatch");
        t.columns.assign(alphabet_.size(), std::vector<std::uint64_t>(count));
        for (std::size_t c = 0; c < alphabet_.size(); ++c)
            for (std::uint64_t k = 0; k < count; ++k)
                t.columns[c][k] = detail::get_le<std::uint64_t>(raw, (c * count + k) * kEntryBytes);
        return t;
    }

private:
    IndexFile() : alphabet_(std::vector<std::uint8_t>{0}) {}

    std::filesystem::path path_;
    std::uint64_t file_size_ = 0;
    std::uint64_t n_ = 0;
    std::uint32_t rate_ = 0;
    Alphabet alphabet_;
    std::vector<std::uint64_t> c_array_;
    std::uint64_t primary_row_ = 0;
    std::vector<LevelHeader> levels_;
    std::uint64_t bwt_offset_ = 0;
    SampleTable resident_;
};

// Per-query file cursor. Every read must stay inside the named region and is
// appended to the trace.
class TracedReader {
public:
    TracedReader(const IndexFile& index, SearchMode mode) : index_(&index), in_(index.path(), std::ios::binary) {
        if (!in_) throw error("cannot open " + index.path().string());
        trace_.mode = mode;
    }

    std::string read(const Region& region, std::uint64_t offset, std::uint64_t length) {
        if (offset < region.offset || offset + length > region.end())
            throw error("read [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                        ") outside region " + region.tag);
        std::string buf(length, '\0');
        in_.seekg(static_cast<std::streamoff>(offset));
        in_.read(buf.data(), static_cast<std::streamsize>(length));
        if (!in_) throw error("read failed: " + index_->path().string());
        trace_.records.push_back({region.tag, region.order, offset, length});
        return buf;
    }

    // Reads entries [first, last] of one column of a level.
    std::vector<std::uint64_t> read_entries(std::size_t level, std::size_t column, std::uint64_t first,
                                            std::uint64_t last) {
        const std::string raw = read(index_->level_region(level), index_->entry_offset(level, column, first),
                                     (last - first + 1) * kEntryBytes);
        std::vector<std::uint64_t> out(last - first + 1);
        for (std::uint64_t k = 0; k < out.size(); ++k) out[k] = detail::get_le<std::uint64_t>(raw, k * kEntryBytes);
        return out;
    }

    // Reads B[first..last], 1-based inclusive.
    std::string read_bwt(std::uint64_t first, std::uint64_t last) {
        return read(index_->bwt_region(), index_->bwt_position_offset(first), last - first + 1);
    }

    const AccessTrace& trace() const noexcept { return trace_; }
    AccessTrace take_trace() { return std::move(trace_); }

private:
    const IndexFile* index_;
    std::ifstream in_;
    AccessTrace trace_;
};

// Loads every table level and B; used for round trips and diagnostics.
struct LoadedIndex {
    BwtResult bwt;
    std::vector<SampleTable> tables;
    LevelSchedule schedule;
    Alphabet alphabet;
};

inline LoadedIndex load_index(const IndexFile& index) {
    TracedReader reader(index, SearchMode::sequential);
    LoadedIndex out{{}, {}, {}, index.alphabet()};
    for (std::size_t l = 1; l <= index.levels(); ++l) {
        const Region r = index.level_region(l);
        out.tables.push_back(index.decode_level(l, reader.read(r, r.offset, r.length)));
    }
    out.bwt.bwt = reader.read_bwt(1, index.n());
    out.bwt.c_array = index.c_array();
    out.bwt.primary_row = index.primary_row();
    out.schedule.rate = index.rate();
    out.schedule.spacings = index.spacings();
    return out;
}

} // namespace seqfm
