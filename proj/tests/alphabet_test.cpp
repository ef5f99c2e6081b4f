#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"

using namespace seqfm;
using namespace seqfm::testing;

TEST(Alphabet, ExampleTextIsBinary) {
    const Alphabet a = build_alphabet(Text(kExampleText));
    EXPECT_EQ(a.size(), 2u);
    EXPECT_EQ(a.symbols(), (std::vector<std::uint8_t>{'0', '1'}));
    EXPECT_EQ(a.rank_of('1'), 1u);
    EXPECT_FALSE(a.rank_of('2').has_value());
}

TEST(Alphabet, SingleSymbol) {
    const Alphabet a = build_alphabet(Text("a"));
    EXPECT_EQ(a.size(), 1u);
    EXPECT_EQ(a.symbol(0), 'a');
}

TEST(Alphabet, EmptyTextRejected) {
    EXPECT_THROW(Text(""), error);
    EXPECT_THROW(build_alphabet(std::string_view{}), error);
    try {
        build_alphabet(std::string_view{});
    } catch (const error& e) {
        EXPECT_STREQ(e.what(), "empty text");
    }
}

TEST(Alphabet, RejectsUnsortedSymbols) {
    EXPECT_THROW(Alphabet({'b', 'a'}), error);
    EXPECT_THROW(Alphabet({'a', 'a'}), error);
}

TEST(Alphabet, RandomBytesMatchSortAndDedup) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 50; ++trial) {
        std::string s(500, '\0');
        for (auto& ch : s) ch = static_cast<char>(byte(rng));
        std::vector<std::uint8_t> expected(s.begin(), s.end());
        std::sort(expected.begin(), expected.end());
        expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
        EXPECT_EQ(build_alphabet(Text(s)).symbols(), expected);
    }
}

TEST(NaiveRank, ExampleValues) {
    EXPECT_EQ(naive_rank(kExampleBwt, '1', 27), 17u);
    EXPECT_EQ(naive_rank(kExampleBwt, '0', 17), 7u);
    EXPECT_EQ(naive_rank(kExampleBwt, '0', 0), 0u);
    EXPECT_EQ(naive_rank("", 'x', 0), 0u);
}

TEST(NaiveRank, OutOfRange) { EXPECT_THROW(naive_rank("abc", 'a', 4), error); }

TEST(NaiveRank, StepAndTotalProperties) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::string s = random_text(rng, 1 + rng() % 100, 1 + rng() % 6);
        const Alphabet a = build_alphabet(s);
        std::uint64_t total = 0;
        for (auto c : a.symbols()) {
            for (std::uint64_t i = 1; i <= s.size(); ++i) {
                const auto step = naive_rank(s, c, i) - naive_rank(s, c, i - 1);
                EXPECT_EQ(step, static_cast<std::uint8_t>(s[i - 1]) == c ? 1u : 0u);
            }
            total += naive_rank(s, c, s.size());
        }
        EXPECT_EQ(total, s.size());
    }
}

TEST(CyclicCount, ExamplePattern) { EXPECT_EQ(cyclic_count(Text(kExampleText), "0101"), 3u); }

TEST(CyclicCount, EmptyPatternMatchesEverywhere) { EXPECT_EQ(cyclic_count(Text(kExampleText), ""), 27u); }

TEST(CyclicCount, LongPatternRejected) {
    EXPECT_THROW(cyclic_count(Text("ab"), "aba"), query_error);
}

TEST(CyclicCount, WrapsAround) {
    // "ca" only occurs across the end of the text.
    EXPECT_EQ(cyclic_count(Text("abc"), "ca"), 1u);
    EXPECT_EQ(cyclic_count(Text("aaaa"), "aaaa"), 4u);
}

TEST(CyclicCount, MatchesRotationScan) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::string t = random_text(rng, 1 + rng() % 200, 2 + rng() % 3);
        const std::string p = random_text(rng, 1 + rng() % std::min<std::size_t>(8, t.size()), 3);
        std::uint64_t expected = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string rotation = t.substr(i) + t.substr(0, i);
            if (rotation.compare(0, p.size(), p) == 0) ++expected;
        }
        EXPECT_EQ(cyclic_count(Text(t), p), expected);
    }
}
