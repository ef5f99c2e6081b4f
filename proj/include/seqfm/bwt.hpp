#pragma once

// Cyclic Burrows-Wheeler transform (no sentinel), C array and inversion.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "alphabet.hpp"
#include "error.hpp"

namespace seqfm {

struct BwtResult {
    std::string bwt;                    // B, one byte per symbol
    std::vector<std::uint64_t> c_array; // indexed by alphabet rank
    std::uint64_t primary_row = 0;      // 1-based row of the unrotated text

    friend bool operator==(const BwtResult&, const BwtResult&) = default;
};

// C[c] = number of bytes of b strictly smaller than c.
inline std::vector<std::uint64_t> compute_c(std::string_view b, const Alphabet& alphabet) {
    std::vector<std::uint64_t> hist(alphabet.size(), 0);
    for (char ch : b) {
        const auto r = alphabet.rank_of(static_cast<std::uint8_t>(ch));
        if (!r) throw error("byte " + std::to_string(static_cast<std::uint8_t>(ch)) + " outside alphabet");
        ++hist[*r];
    }
    std::vector<std::uint64_t> c(alphabet.size(), 0);
    std::exclusive_scan(hist.begin(), hist.end(), c.begin(), std::uint64_t{0});
    return c;
}

// Sorts rotation start offsets by comparing each pair over at most n bytes of
// the doubled text. Equal rotations keep start-offset order.
inline BwtResult build_bwt(const Text& text) {
    const std::uint64_t n = text.size();
    std::string doubled;
    doubled.reserve(2 * n);
    doubled.append(text.bytes());
    doubled.append(text.bytes());

    std::vector<std::uint64_t> starts(n);
    std::iota(starts.begin(), starts.end(), std::uint64_t{0});
    const auto* data = reinterpret_cast<const unsigned char*>(doubled.data());
    std::sort(starts.begin(), starts.end(), [&](std::uint64_t a, std::uint64_t b) {
        const int cmp = std::memcmp(data + a, data + b, n);
        return cmp != 0 ? cmp < 0 : a < b;
    });

    BwtResult result;
    result.bwt.resize(n);
    for (std::uint64_t row = 0; row < n; ++row) {
        const std::uint64_t start = starts[row];
        result.bwt[row] = doubled[start + n - 1];
        if (start == 0) result.primary_row = row + 1;
    }
    result.c_array = compute_c(result.bwt, build_alphabet(result.bwt));
    return result;
}

// LF-mapping walk from the primary row.
inline Text invert_bwt(const BwtResult& result, const Alphabet& alphabet) {
    const std::uint64_t n = result.bwt.size();
    if (n == 0) throw error("empty text");
    if (result.primary_row < 1 || result.primary_row > n) throw error("invalid primary row");
    if (result.c_array.size() != alphabet.size()) throw error("C array does not match alphabet");

    // lf[i] for 0-based row i; rank taken over B[1..i+1].
    std::vector<std::uint64_t> seen(alphabet.size(), 0);
    std::vector<std::uint64_t> lf(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto r = alphabet.rank_of(static_cast<std::uint8_t>(result.bwt[i]));
        if (!r) throw error("invalid primary row");
        lf[i] = result.c_array[*r] + ++seen[*r] - 1;
        if (lf[i] >= n) throw error("invalid primary row");
    }

    std::string out(n, '\0');
    std::uint64_t row = result.primary_row - 1;
    for (std::uint64_t k = n; k-- > 0;) {
        out[k] = result.bwt[row];
        row = lf[row];
    }
    return Text(std::move(out));
}

} // namespace seqfm
