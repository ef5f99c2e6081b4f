#pragma once

// Input text model and the brute-force oracles everything else is checked against.
//
// All rank/search mathematics is 1-based: position p of a byte string maps to
// storage offset p - 1, and rank_c(0) = 0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace seqfm {

class Text {
public:
    explicit Text(std::string bytes) : bytes_(std::move(bytes)) {
        if (bytes_.empty()) throw error("empty text");
    }

    std::string_view bytes() const noexcept { return bytes_; }
    std::uint64_t size() const noexcept { return bytes_.size(); }

    // 1-based
    std::uint8_t at(std::uint64_t pos) const {
        return static_cast<std::uint8_t>(bytes_.at(pos - 1));
    }

private:
    std::string bytes_;
};

// Sorted distinct byte values of a text. The rank of a symbol (its index in
// the sorted list) is the column index used by the C array and sample tables.
class Alphabet {
public:
    static constexpr std::int16_t npos = -1;

    explicit Alphabet(std::vector<std::uint8_t> symbols) : symbols_(std::move(symbols)) {
        if (symbols_.empty()) throw error("alphabet must contain at least one symbol");
        rank_.fill(npos);
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (i > 0 && symbols_[i] <= symbols_[i - 1])
                throw error("alphabet symbols must be strictly ascending");
            rank_[symbols_[i]] = static_cast<std::int16_t>(i);
        }
    }

    std::size_t size() const noexcept { return symbols_.size(); }
    const std::vector<std::uint8_t>& symbols() const noexcept { return symbols_; }
    std::uint8_t symbol(std::size_t rank) const { return symbols_.at(rank); }

    bool contains(std::uint8_t c) const noexcept { return rank_[c] != npos; }

    std::optional<std::size_t> rank_of(std::uint8_t c) const noexcept {
        if (rank_[c] == npos) return std::nullopt;
        return static_cast<std::size_t>(rank_[c]);
    }

    friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

private:
    std::vector<std::uint8_t> symbols_;
    std::array<std::int16_t, 256> rank_{};
};

inline Alphabet build_alphabet(std::string_view bytes) {
    if (bytes.empty()) throw error("empty text");
    std::array<bool, 256> seen{};
    for (char ch : bytes) seen[static_cast<std::uint8_t>(ch)] = true;
    std::vector<std::uint8_t> symbols;
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (seen[c]) symbols.push_back(static_cast<std::uint8_t>(c));
    return Alphabet(std::move(symbols));
}

inline Alphabet build_alphabet(const Text& text) { return build_alphabet(text.bytes()); }

// Occurrences of c in s[1..i], by direct scan.
inline std::uint64_t naive_rank(std::string_view s, std::uint8_t c, std::uint64_t i) {
    if (i > s.size()) throw error("rank position " + std::to_string(i) + " out of range");
    std::uint64_t count = 0;
    for (std::uint64_t p = 0; p < i; ++p)
        if (static_cast<std::uint8_t>(s[p]) == c) ++count;
    return count;
}

// Number of start positions i in 1..n such that the text read cyclically from i
// begins with the pattern.
inline std::uint64_t cyclic_count(const Text& text, std::string_view pattern) {
    const std::uint64_t n = text.size();
    if (pattern.empty()) return n;
    if (pattern.size() > n) throw query_error("pattern longer than text");
    const std::string_view t = text.bytes();
    std::uint64_t count = 0;
    for (std::uint64_t start = 0; start < n; ++start) {
        bool match = true;
        for (std::uint64_t k = 0; k < pattern.size() && match; ++k)
            match = t[(start + k) % n] == pattern[k];
        if (match) ++count;
    }
    return count;
}

} // namespace seqfm
