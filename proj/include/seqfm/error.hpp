#pragma once

#include <stdexcept>
#include <string>

namespace seqfm {

// Base for every failure raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The index file is malformed: bad magic, bad version, truncation, inconsistent header.
class format_error : public error {
public:
    using error::error;
};

// The query itself is invalid (e.g. the pattern is longer than the text).
class query_error : public error {
public:
    using error::error;
};

} // namespace seqfm
