#pragma once

// Command implementations behind the seqfm tool. Output is line-oriented
// key=value pairs. Exit codes: 0 success, 1 environment or format error,
// 2 invalid query.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "seqfm.hpp"

namespace seqfm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBadQuery = 2;

struct CliConfig {
    std::filesystem::path input;
    std::filesystem::path output;
    std::filesystem::path index;
    std::int64_t rate = 4;
    std::uint64_t finest = 64;
    std::optional<std::uint64_t> mem_budget; // default_mem_budget when absent
    bool strip_newline = false;
    SearchMode mode = SearchMode::sequential;
    std::string pattern;
    bool hex = false;
    std::optional<std::filesystem::path> trace;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// "30 31" and "3031" both decode to "01".
inline std::string decode_hex(const std::string& hex) {
    std::string digits;
    for (char ch : hex)
        if (ch != ' ') digits.push_back(ch);
    if (digits.size() % 2 != 0) throw query_error("hex pattern has odd length");
    const auto nibble = [](char ch) -> int {
        if (ch >= '0' && ch <= '9') return ch - '0';
        if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
        if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
        throw query_error(std::string("invalid hex digit '") + ch + "'");
    };
    std::string out;
    for (std::size_t i = 0; i < digits.size(); i += 2)
        out.push_back(static_cast<char>(nibble(digits[i]) * 16 + nibble(digits[i + 1])));
    return out;
}

template <class Range>
std::string join(const Range& values) {
    std::ostringstream os;
    bool first = true;
    for (const auto& v : values) {
        if (!first) os << ',';
        os << v;
        first = false;
    }
    return os.str();
}

inline void print_regions(std::ostream& out, const IndexFile& index) {
    const Region h = index.header_region();
    out << "region.header.offset=" << h.offset << "\nregion.header.bytes=" << h.length << '\n';
    for (std::size_t l = 1; l <= index.levels(); ++l) {
        const Region r = index.level_region(l);
        out << "region." << r.tag << ".offset=" << r.offset << '\n';
        out << "region." << r.tag << ".bytes=" << r.length << '\n';
    }
    const Region b = index.bwt_region();
    out << "region.bwt.offset=" << b.offset << "\nregion.bwt.bytes=" << b.length << '\n';
}

inline int cmd_build(const CliConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.rate < 2) throw error("rate must be >= 2");
        std::string bytes = read_file(config.input);
        if (config.strip_newline && !bytes.empty() && bytes.back() == '\n') {
            bytes.pop_back();
            if (!bytes.empty() && bytes.back() == '\r') bytes.pop_back();
        }
        const Text text(std::move(bytes));
        const Alphabet alphabet = build_alphabet(text);
        const std::uint64_t budget = config.mem_budget.value_or(default_mem_budget(text.size(), alphabet.size()));
        const LevelSchedule schedule = make_schedule(text.size(), static_cast<std::uint32_t>(config.rate),
                                                     config.finest, budget, alphabet.size());
        if (!schedule.resident_fits)
            err << "warning: level 1 exceeds mem budget " << budget << " bytes; kept resident regardless\n";

        const BwtResult bwt = build_bwt(text);
        const auto tables = build_tables(bwt.bwt, alphabet, schedule);
        write_index(config.output, serialize(bwt, tables, schedule, alphabet));

        const IndexFile index = IndexFile::open(config.output);
        std::uint64_t entries = 0;
        std::uint64_t analytic_bits = 0;
        for (auto s : schedule.spacings) {
            entries += alphabet.size() * sample_count(text.size(), s);
            analytic_bits += alphabet.size() * sample_count(text.size(), s) * 64;
        }
        out << "n=" << index.n() << '\n'
            << "sigma=" << index.alphabet().size() << '\n'
            << "rate=" << index.rate() << '\n'
            << "levels=" << index.levels() << '\n'
            << "spacings=" << join(index.spacings()) << '\n'
            << "mem_budget=" << budget << '\n';
        print_regions(out, index);
        out << "table_entries=" << entries << '\n'
            << "table_bits=" << index.table_bytes() * 8 << '\n'
            << "analytic_table_bits=" << analytic_bits << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

inline int cmd_count(const CliConfig& config, std::ostream& out, std::ostream& err) {
    std::optional<IndexFile> index;
    try {
        index = IndexFile::open(config.index);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    SearchOutcome result;
    try {
        const std::string pattern = config.hex ? decode_hex(config.pattern) : config.pattern;
        result = count(*index, pattern, config.mode);
    } catch (const query_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadQuery;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    out << "sp=" << result.sp << '\n'
        << "ep=" << result.ep << '\n'
        << "count=" << result.count << '\n'
        << "mode=" << to_string(result.mode) << '\n'
        << "bytes_read=" << result.stats.total_bytes << '\n'
        << "reads=" << result.stats.read_count << '\n'
        << "backward_seeks=" << result.stats.backward_seeks << '\n'
        << "forward_skips=" << result.stats.forward_skips << '\n'
        << "max_backward_distance=" << result.stats.max_backward_distance << '\n';
    if (config.trace) {
        std::ofstream trace_out(*config.trace);
        if (!trace_out) {
            err << "error: cannot write " << config.trace->string() << '\n';
            return kExitError;
        }
        write_trace(trace_out, result.trace);
    }
    return kExitOk;
}

inline int cmd_stats(const CliConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const IndexFile index = IndexFile::open(config.index);
        std::vector<unsigned> symbols(index.alphabet().symbols().begin(), index.alphabet().symbols().end());
        out << "n=" << index.n() << '\n'
            << "sigma=" << index.alphabet().size() << '\n'
            << "rate=" << index.rate() << '\n'
            << "levels=" << index.levels() << '\n'
            << "alphabet=" << join(symbols) << '\n'
            << "C=" << join(index.c_array()) << '\n'
            << "primary_row=" << index.primary_row() << '\n'
            << "spacings=" << join(index.spacings()) << '\n';
        for (std::size_t l = 1; l <= index.levels(); ++l) {
            const auto& lh = index.level_headers()[l - 1];
            out << "level" << l << ".spacing=" << lh.spacing << '\n'
                << "level" << l << ".samples=" << lh.sample_count << '\n';
        }
        print_regions(out, index);
        const double ratio = static_cast<double>(index.table_bytes()) / static_cast<double>(index.n());
        out << "table_bytes=" << index.table_bytes() << '\n'
            << "bwt_bytes=" << index.n() << '\n'
            << "table_to_bwt_ratio=" << std::fixed << std::setprecision(6) << ratio << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace seqfm::cli
