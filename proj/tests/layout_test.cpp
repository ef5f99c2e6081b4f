#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <random>

#include "test_util.hpp"

using namespace seqfm;
using namespace seqfm::testing;

namespace {

void dump(const std::filesystem::path& p, std::string_view bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Little-endian decode written independently of the library's codec.
std::uint64_t le(std::string_view bytes, std::size_t at, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t k = width; k-- > 0;) v = v * 256 + static_cast<unsigned char>(bytes[at + k]);
    return v;
}

std::string open_error(const std::filesystem::path& p) {
    try {
        IndexFile::open(p);
    } catch (const format_error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Layout, ExampleHeaderBytes) {
    const auto setup = example_setup();
    const std::string bytes = serialize(setup.bwt, setup.tables, setup.schedule, setup.alphabet);

    EXPECT_EQ(bytes.substr(0, 4), "SQFM");
    EXPECT_EQ(le(bytes, 4, 4), 1u);   // version
    EXPECT_EQ(le(bytes, 8, 8), 27u);  // n
    EXPECT_EQ(le(bytes, 16, 2), 2u);  // sigma
    EXPECT_EQ(le(bytes, 18, 4), 3u);  // rate
    EXPECT_EQ(le(bytes, 22, 2), 2u);  // L
    EXPECT_EQ(bytes.substr(24, 2), "01");
    EXPECT_EQ(le(bytes, 26, 8), 0u);  // C['0']
    EXPECT_EQ(le(bytes, 34, 8), 10u); // C['1']
    EXPECT_EQ(le(bytes, 42, 8), setup.bwt.primary_row);

    // Header: 40 + 9 * 2 + 24 * 2 = 106 bytes; level 1 has 2 * 3 entries, level 2 has 2 * 9.
    EXPECT_EQ(le(bytes, 50, 8), 9u);
    EXPECT_EQ(le(bytes, 58, 8), 3u);
    EXPECT_EQ(le(bytes, 66, 8), 106u);
    EXPECT_EQ(le(bytes, 74, 8), 3u);
    EXPECT_EQ(le(bytes, 82, 8), 9u);
    EXPECT_EQ(le(bytes, 90, 8), 106u + 48u);
    EXPECT_EQ(le(bytes, 98, 8), 106u + 48u + 144u);
    EXPECT_EQ(bytes.size(), 106u + 48u + 144u + 27u);
    EXPECT_EQ(bytes.substr(106 + 48 + 144), kExampleBwt);
}

TEST(Layout, ExampleSecondTableDecodes) {
    const auto setup = example_setup();
    const std::string bytes = serialize(setup.bwt, setup.tables, setup.schedule, setup.alphabet);
    std::vector<std::uint64_t> zeros, ones;
    for (std::size_t k = 0; k < 9; ++k) zeros.push_back(le(bytes, 154 + 8 * k, 8));
    for (std::size_t k = 0; k < 9; ++k) ones.push_back(le(bytes, 154 + 72 + 8 * k, 8));
    EXPECT_EQ(zeros, (std::vector<std::uint64_t>{1, 1, 2, 4, 6, 7, 7, 9, 10}));
    EXPECT_EQ(ones, (std::vector<std::uint64_t>{2, 5, 7, 8, 9, 11, 14, 15, 17}));
}

TEST(Layout, OpenExampleIndex) {
    const auto setup = example_setup();
    TempFile f;
    write_setup(setup, f.path());
    const IndexFile index = IndexFile::open(f.path());
    EXPECT_EQ(index.n(), 27u);
    EXPECT_EQ(index.alphabet().size(), 2u);
    EXPECT_EQ(index.rate(), 3u);
    EXPECT_EQ(index.spacings(), (std::vector<std::uint64_t>{9, 3}));
    EXPECT_EQ(index.c_array(), (std::vector<std::uint64_t>{0, 10}));
    EXPECT_EQ(index.resident(), setup.tables[0]);
    EXPECT_EQ(index.level_region(2).offset, 154u);
    EXPECT_EQ(index.bwt_region().offset, 298u);
    EXPECT_EQ(index.table_bytes(), 192u);
}

TEST(Layout, Deterministic) {
    const auto a = example_setup();
    const auto b = example_setup();
    EXPECT_EQ(serialize(a.bwt, a.tables, a.schedule, a.alphabet), serialize(b.bwt, b.tables, b.schedule, b.alphabet));
    const auto c = make_setup("110111100101110101010001110", explicit_schedule(3, {9, 3}));
    EXPECT_NE(serialize(a.bwt, a.tables, a.schedule, a.alphabet), serialize(c.bwt, c.tables, c.schedule, c.alphabet));
}

TEST(Layout, RoundTripRandom) {
    std::mt19937_64 rng(41);
    TempFile f;
    for (int trial = 0; trial < 100; ++trial) {
        const std::string t = random_text(rng, 1 + rng() % 300, 1 + rng() % 16);
        const auto alphabet = build_alphabet(t);
        const auto schedule =
            make_schedule(t.size(), 2 + rng() % 3, 1 + rng() % t.size(), rng() % 256, alphabet.size());
        const auto setup = make_setup(t, schedule);
        const std::string bytes = serialize(setup.bwt, setup.tables, setup.schedule, setup.alphabet);
        dump(f.path(), bytes);

        const IndexFile index = IndexFile::open(f.path());
        EXPECT_EQ(index.n(), t.size());
        EXPECT_EQ(index.alphabet(), alphabet);
        EXPECT_EQ(index.c_array(), setup.bwt.c_array);
        EXPECT_EQ(index.primary_row(), setup.bwt.primary_row);
        EXPECT_EQ(index.spacings(), schedule.spacings);

        const LoadedIndex loaded = load_index(index);
        EXPECT_EQ(loaded.bwt, setup.bwt);
        EXPECT_EQ(loaded.tables, setup.tables);
        EXPECT_EQ(serialize(loaded.bwt, loaded.tables, loaded.schedule, loaded.alphabet), bytes);
    }
}

TEST(Layout, RegionMapWalkMatchesTables) {
    std::mt19937_64 rng(43);
    TempFile f;
    for (int trial = 0; trial < 20; ++trial) {
        const std::string t = random_text(rng, 10 + rng() % 200, 2 + rng() % 5);
        const auto setup = make_setup(t, make_schedule(t.size(), 2, 1 + rng() % 4, 64, build_alphabet(t).size()));
        const std::string bytes = serialize(setup.bwt, setup.tables, setup.schedule, setup.alphabet);
        dump(f.path(), bytes);
        const IndexFile index = IndexFile::open(f.path());

        std::uint64_t prev_end = index.header_region().end();
        for (std::size_t l = 1; l <= index.levels(); ++l) {
            const auto& table = setup.tables[l - 1];
            EXPECT_EQ(index.level_region(l).offset, prev_end);
            for (std::size_t c = 0; c < table.columns.size(); ++c)
                for (std::uint64_t k = 0; k < table.geometry.count(); ++k)
                    EXPECT_EQ(le(bytes, index.entry_offset(l, c, k), 8), table.columns[c][k]);
            prev_end = index.level_region(l).end();
        }
        EXPECT_EQ(index.bwt_region().offset, prev_end);
        EXPECT_EQ(index.bwt_region().end(), bytes.size());
    }
}

TEST(Layout, BadMagicAndVersion) {
    const auto setup = example_setup();
    std::string bytes = serialize(setup.bwt, setup.tables, setup.schedule, setup.alphabet);
    TempFile f;
    std::string bad = bytes;
    bad[0] = 'X';
    dump(f.path(), bad);
    EXPECT_EQ(open_error(f.path()), "bad magic");
    bad = bytes;
    bad[4] = 2;
    dump(f.path(), bad);
    EXPECT_EQ(open_error(f.path()), "bad version");
    dump(f.path(), "SQ");
    EXPECT_EQ(open_error(f.path()), "truncated: header");
}

TEST(Layout, InconsistentHeaderRejected) {
    const auto setup = example_setup();
    const std::string bytes = serialize(setup.bwt, setup.tables, setup.schedule, setup.alphabet);
    TempFile f;
    std::string bad = bytes;
    bad[58] = 4; // level 1 sample count
    dump(f.path(), bad);
    EXPECT_EQ(open_error(f.path()), "bad header: level 1");
    bad = bytes;
    bad[25] = '0'; // alphabet no longer ascending
    dump(f.path(), bad);
    EXPECT_EQ(open_error(f.path()), "bad header: alphabet");
    dump(f.path(), bytes + "x");
    EXPECT_EQ(open_error(f.path()), "trailing bytes after bwt");
}

TEST(Layout, TruncationAtEveryRegionBoundary) {
    std::mt19937_64 rng(47);
    TempFile f;
    for (int trial = 0; trial < 10; ++trial) {
        const std::string t = trial == 0 ? kExampleText : random_text(rng, 5 + rng() % 100, 2 + rng() % 4);
        const auto schedule = trial == 0 ? explicit_schedule(3, {9, 3})
                                         : make_schedule(t.size(), 2, 1, 32, build_alphabet(t).size());
        const auto setup = make_setup(t, schedule);
        const std::string bytes = serialize(setup.bwt, setup.tables, setup.schedule, setup.alphabet);
        dump(f.path(), bytes);
        const IndexFile index = IndexFile::open(f.path());

        std::vector<Region> regions{index.header_region()};
        for (std::size_t l = 1; l <= index.levels(); ++l) regions.push_back(index.level_region(l));
        regions.push_back(index.bwt_region());

        for (const auto& r : regions) {
            // Cut inside the region (just before its end) and exactly at its start.
            for (std::uint64_t cut : {r.end() - 1, r.offset}) {
                if (cut < 4) continue; // too short to carry the magic
                dump(f.path(), std::string_view(bytes).substr(0, cut));
                EXPECT_EQ(open_error(f.path()), "truncated: " + r.tag) << "cut at " << cut;
            }
        }
    }
}

TEST(Trace, StatsDefinitions) {
    EXPECT_EQ(trace_stats(AccessTrace{}), TraceStats{});

    AccessTrace ascending;
    ascending.records = {{"bwt", 1, 100, 10}, {"bwt", 1, 110, 5}, {"bwt", 1, 200, 1}};
    const TraceStats a = trace_stats(ascending);
    EXPECT_EQ(a.backward_seeks, 0u);
    EXPECT_EQ(a.forward_skips, 1u);
    EXPECT_EQ(a.total_bytes, 16u);
    EXPECT_EQ(a.read_count, 3u);

    AccessTrace back;
    back.records = {{"bwt", 1, 100, 1}, {"bwt", 1, 50, 1}};
    const TraceStats b = trace_stats(back);
    EXPECT_EQ(b.backward_seeks, 1u);
    EXPECT_GE(b.max_backward_distance, 50u);
}

TEST(Trace, WriteFormat) {
    AccessTrace trace;
    trace.records = {{"level2", 2, 154, 16}, {"bwt", 3, 313, 2}};
    std::ostringstream os;
    write_trace(os, trace);
    EXPECT_EQ(os.str(), "level2,154,16\nbwt,313,2\n");
}

TEST(Trace, ReaderRecordsAndEnforcesRegions) {
    const auto setup = example_setup();
    TempFile f;
    write_setup(setup, f.path());
    const IndexFile index = IndexFile::open(f.path());
    TracedReader reader(index, SearchMode::naive);

    EXPECT_EQ(reader.read_bwt(5, 7), kExampleBwt.substr(4, 3));
    EXPECT_EQ(reader.read_entries(2, 1, 3, 4), (std::vector<std::uint64_t>{8, 9}));
    ASSERT_EQ(reader.trace().records.size(), 2u);
    EXPECT_EQ(reader.trace().records[0], (TraceRecord{"bwt", 3, 298 + 4, 3}));
    EXPECT_EQ(reader.trace().records[1], (TraceRecord{"level2", 2, 154 + 72 + 24, 16}));
    EXPECT_EQ(trace_stats(reader.trace()).backward_seeks, 1u);

    // A read straddling level 2 and B is refused and not recorded.
    const Region level2 = index.level_region(2);
    EXPECT_THROW(reader.read(level2, level2.end() - 4, 8), error);
    EXPECT_THROW(reader.read(level2, level2.offset - 1, 1), error);
    EXPECT_EQ(reader.trace().records.size(), 2u);
}
