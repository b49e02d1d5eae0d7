#include "topicbench/csv.hpp"

#include "topicbench/error.hpp"

namespace topicbench::csv {

Reader::Reader(std::string_view text) : text_(text) {
    if (text_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
}

bool Reader::next(Row& row) {
    row.clear();
    if (pos_ >= text_.size()) return false;
    ++record_;
    record_line_ = line_;

    auto malformed = [&](std::string_view what) {
        throw InputError("malformed CSV at record " + std::to_string(record_) + " (line " +
                         std::to_string(record_line_) + "): " + std::string(what));
    };

    std::string field;
    while (true) {
        field.clear();
        if (pos_ < text_.size() && text_[pos_] == '"') {
            ++pos_;
            while (true) {
                if (pos_ >= text_.size()) malformed("unterminated quoted field");
                const char c = text_[pos_++];
                if (c == '"') {
                    if (pos_ < text_.size() && text_[pos_] == '"') {
                        field.push_back('"');
                        ++pos_;
                    } else {
                        break;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(c);
                }
            }
            if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' &&
                text_[pos_] != '\r')
                malformed("unexpected character after closing quote");
        } else {
            while (pos_ < text_.size()) {
                const char c = text_[pos_];
                if (c == ',' || c == '\n' || c == '\r') break;
                if (c == '"') malformed("quote inside unquoted field");
                field.push_back(c);
                ++pos_;
            }
        }
        row.push_back(field);

        if (pos_ >= text_.size()) return true;
        const char c = text_[pos_++];
        if (c == ',') continue;
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        ++line_;
        return true;
    }
}

std::vector<Row> parse(std::string_view text) {
    Reader reader(text);
    std::vector<Row> rows;
    Row row;
    while (reader.next(row)) rows.push_back(row);
    return rows;
}

} // namespace topicbench::csv
