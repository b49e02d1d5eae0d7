#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace topicbench::csv {

using Row = std::vector<std::string>;

/// Record-at-a-time reader for comma-separated text with RFC 4180 quoting:
/// fields may be wrapped in double quotes, embedded quotes are doubled, and
/// quoted fields may contain commas and line breaks. A leading UTF-8 BOM is
/// skipped. Throws InputError on malformed quoting, naming the record.
class Reader {
public:
    explicit Reader(std::string_view text);

    /// Reads the next record into `row`; returns false at end of input.
    bool next(Row& row);

    /// 1-based index of the record most recently returned (header = 1).
    std::size_t record() const noexcept { return record_; }
    /// 1-based physical line on which that record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t record_ = 0;
    std::size_t line_ = 1;
    std::size_t record_line_ = 1;
};

/// Parses a complete document into records.
std::vector<Row> parse(std::string_view text);

} // namespace topicbench::csv
