#include "topicbench/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "topicbench/csv.hpp"
#include "topicbench/error.hpp"
#include "topicbench/hash.hpp"
#include "topicbench/porter.hpp"

namespace topicbench {

namespace detail {
extern const std::string_view kDefaultStopwords;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

int parse_int(std::string_view s, bool& ok) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    ok = ec == std::errc() && p == s.data() + s.size();
    return v;
}

// Accepts YYYY-MM-DD, MM/DD/YYYY and MM/DD/YY.
std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
    using namespace std::chrono;
    bool ok1 = false, ok2 = false, ok3 = false;
    int y = 0, m = 0, d = 0;
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        y = parse_int(s.substr(0, 4), ok1);
        m = parse_int(s.substr(5, 2), ok2);
        d = parse_int(s.substr(8, 2), ok3);
    } else if (auto a = s.find('/'), b = s.rfind('/'); a != std::string_view::npos && b > a) {
        m = parse_int(s.substr(0, a), ok1);
        d = parse_int(s.substr(a + 1, b - a - 1), ok2);
        const auto ys = s.substr(b + 1);
        y = parse_int(ys, ok3);
        if (ys.size() == 2) y += 2000;
    }
    if (!(ok1 && ok2 && ok3)) return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

bool only_x(std::string_view token) {
    return token.size() >= 2 &&
           std::all_of(token.begin(), token.end(), [](char c) { return c == 'x'; });
}

} // namespace

LoadResult parse_complaints(std::string_view csv_text, const IngestOptions& options) {
    csv::Reader reader(csv_text);
    csv::Row header;
    if (!reader.next(header)) throw InputError("CSV input has no header row");

    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto& cols = options.columns;
    const auto id_col = column(cols.id);
    const auto text_col = column(cols.narrative);
    if (!id_col) throw InputError("missing required column: " + cols.id);
    if (!text_col) throw InputError("missing required column: " + cols.narrative);
    const auto date_col = column(cols.date);
    const auto product_col = column(cols.product);
    const auto company_col = column(cols.company);

    LoadResult result;
    std::unordered_set<std::int64_t> seen;
    csv::Row row;
    while (reader.next(row)) {
        ++result.total_rows;
        const auto where = "record " + std::to_string(reader.record()) + " (line " +
                           std::to_string(reader.line()) + ")";
        if (row.size() != header.size())
            throw InputError(where + " has " + std::to_string(row.size()) + " fields, expected " +
                             std::to_string(header.size()));
        const std::string& narrative = row[*text_col];
        if (is_blank(narrative)) {
            ++result.dropped_rows;
            continue;
        }
        RawComplaint c;
        const std::string& id_text = row[*id_col];
        auto [p, ec] =
            std::from_chars(id_text.data(), id_text.data() + id_text.size(), c.complaint_id);
        if (ec != std::errc() || p != id_text.data() + id_text.size())
            throw InputError(where + ": complaint id is not an integer: '" + id_text + "'");
        if (!seen.insert(c.complaint_id).second)
            throw InputError(where + ": duplicate complaint id " + id_text);
        if (date_col && !row[*date_col].empty()) {
            c.date_received = parse_date(row[*date_col]);
            if (!c.date_received)
                throw InputError(where + ": unrecognized date '" + row[*date_col] + "'");
        }
        if (product_col) c.product = row[*product_col];
        if (company_col) c.company = row[*company_col];
        c.narrative = narrative;
        result.complaints.push_back(std::move(c));
    }
    return result;
}

LoadResult load_csv(const std::filesystem::path& path, const IngestOptions& options) {
    if (!std::filesystem::exists(path)) throw InputError("input file not found: " + path.string());
    return parse_complaints(read_file(path), options);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !only_x(current)) tokens.push_back(current);
        current.clear();
    };
    const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
    const std::int32_t length = static_cast<std::int32_t>(text.size());
    std::int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c >= 0 && u_isalpha(c)) {
            const UChar32 lower = u_tolower(c);
            char buf[U8_MAX_LENGTH];
            std::int32_t n = 0;
            U8_APPEND_UNSAFE(buf, n, lower);
            current.append(buf, static_cast<std::size_t>(n));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

const StopwordSet& default_stopwords() {
    static const StopwordSet words = [] {
        StopwordSet set;
        std::istringstream in{std::string(detail::kDefaultStopwords)};
        std::string line;
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '#') set.insert(line);
        return set;
    }();
    return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto toks = tokenize(line);
        if (toks.size() != 1) throw InputError("stopword file line is not a single word: " + line);
        set.insert(toks.front());
    }
    return set;
}

LemmaDictionary load_lemmas(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    LemmaDictionary dict;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || is_blank(line)) continue;
        std::istringstream fields(line);
        std::string form, lemma;
        fields >> form >> lemma;
        auto f = tokenize(form);
        auto l = tokenize(lemma);
        if (f.size() != 1 || l.size() != 1)
            throw InputError("lemma file line " + std::to_string(lineno) +
                             ": expected '<form> <lemma>' made of letters");
        dict[f.front()] = l.front();
    }
    return dict;
}

std::vector<std::string> normalize(std::vector<std::string> tokens, const StopwordSet& stopwords,
                                   bool stem) {
    NormalizeOptions options{stopwords, stem, {}};
    return normalize(std::move(tokens), options);
}

std::string normalize_word(std::string_view word, const NormalizeOptions& options) {
    std::string w(word);
    if (auto it = options.lemmas.find(w); it != options.lemmas.end()) w = it->second;
    if (options.stopwords.contains(w)) return {};
    if (options.stem) {
        w = porter_stem(w);
        // Stems can coincide with stopwords.
        if (options.stopwords.contains(w)) return {};
    }
    return w;
}

std::vector<std::string> normalize(std::vector<std::string> tokens,
                                   const NormalizeOptions& options) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (auto& t : tokens) {
        if (t.empty()) continue;
        auto w = normalize_word(t, options);
        if (!w.empty()) out.push_back(std::move(w));
    }
    return out;
}

std::string NormalizeOptions::fingerprint() const {
    std::vector<std::string> stops(stopwords.begin(), stopwords.end());
    std::sort(stops.begin(), stops.end());
    std::map<std::string, std::string> lem(lemmas.begin(), lemmas.end());
    std::string canon = stem ? "stem=1\n" : "stem=0\n";
    for (const auto& s : stops) canon += "s:" + s + "\n";
    for (const auto& [k, v] : lem) canon += "l:" + k + "=" + v + "\n";
    return sha256_hex(canon);
}

Corpus build_corpus(std::span<const RawComplaint> complaints, const NormalizeOptions& options,
                    std::string source) {
    Corpus corpus;
    corpus.source = std::move(source);
    corpus.options_fingerprint = options.fingerprint();
    corpus.documents.resize(complaints.size());
    const auto n = static_cast<std::ptrdiff_t>(complaints.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& c = complaints[static_cast<std::size_t>(i)];
        auto& doc = corpus.documents[static_cast<std::size_t>(i)];
        doc.id = std::to_string(c.complaint_id);
        doc.raw_text = c.narrative;
        doc.tokens = normalize(tokenize(c.narrative), options);
    }
    return corpus;
}

Corpus corpus_from_tokens(const std::vector<std::vector<std::string>>& docs) {
    Corpus corpus;
    corpus.documents.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        Document d;
        d.id = std::to_string(i);
        for (const auto& t : docs[i]) {
            if (!d.raw_text.empty()) d.raw_text += ' ';
            d.raw_text += t;
        }
        d.tokens = docs[i];
        corpus.documents.push_back(std::move(d));
    }
    return corpus;
}

} // namespace topicbench
