#include "topicbench/porter.hpp"

namespace topicbench {

namespace {

// State over b[0..k], with j marking the end of the stem after a suffix
// match, exactly as in the reference implementation.
class Stemmer {
public:
    explicit Stemmer(std::string_view w) : b_(w), k_(static_cast<int>(w.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    bool cons(int i) const {
        switch (b_[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return false;
        case 'y': return i == 0 ? true : !cons(i - 1);
        default: return true;
        }
    }

    // Number of VC sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_consonant(int j) const {
        if (j < 1) return false;
        if (b_[j] != b_[j - 1]) return false;
        return cons(j);
    }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = b_[i];
        return !(ch == 'w' || ch == 'x' || ch == 'y');
    }

    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ + 1 - len), s.size()) != s)
            return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measured(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (b_[k_] == 's') {
            if (ends("sses")) k_ -= 2;
            else if (ends("ies")) set_to("i");
            else if (b_[k_ - 1] != 's') --k_;
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) set_to("ate");
            else if (ends("bl")) set_to("ble");
            else if (ends("iz")) set_to("ize");
            else if (double_consonant(k_)) {
                --k_;
                const char ch = b_[k_];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
    }

    // Tries each (suffix, replacement) in order; the first suffix match ends
    // the step whether or not the measure condition allows the rewrite.
    template <std::size_t N>
    void rewrite(const std::pair<std::string_view, std::string_view> (&rules)[N]) {
        for (const auto& [suffix, repl] : rules) {
            if (ends(suffix)) {
                replace_if_measured(repl);
                return;
            }
        }
    }

    void step2() {
        switch (b_[k_ - 1]) {
        case 'a': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"ational", "ate"}, {"tional", "tion"}};
            rewrite(r);
            break;
        }
        case 'c': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"enci", "ence"}, {"anci", "ance"}};
            rewrite(r);
            break;
        }
        case 'e': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {{"izer", "ize"}};
            rewrite(r);
            break;
        }
        case 'l': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
            rewrite(r);
            break;
        }
        case 'o': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
            rewrite(r);
            break;
        }
        case 's': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
            rewrite(r);
            break;
        }
        case 't': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
            rewrite(r);
            break;
        }
        case 'g': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {{"logi", "log"}};
            rewrite(r);
            break;
        }
        default: break;
        }
    }

    void step3() {
        switch (b_[k_]) {
        case 'e': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
            rewrite(r);
            break;
        }
        case 'i': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {{"iciti", "ic"}};
            rewrite(r);
            break;
        }
        case 'l': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {
                {"ical", "ic"}, {"ful", ""}};
            rewrite(r);
            break;
        }
        case 's': {
            static constexpr std::pair<std::string_view, std::string_view> r[] = {{"ness", ""}};
            rewrite(r);
            break;
        }
        default: break;
        }
    }

    void step4() {
        auto any = [&](std::initializer_list<std::string_view> suffixes) {
            for (auto s : suffixes)
                if (ends(s)) return true;
            return false;
        };
        bool matched = false;
        switch (b_[k_ - 1]) {
        case 'a': matched = any({"al"}); break;
        case 'c': matched = any({"ance", "ence"}); break;
        case 'e': matched = any({"er"}); break;
        case 'i': matched = any({"ic"}); break;
        case 'l': matched = any({"able", "ible"}); break;
        case 'n': matched = any({"ant", "ement", "ment", "ent"}); break;
        case 'o':
            if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) matched = true;
            else matched = ends("ou");
            break;
        case 's': matched = any({"ism"}); break;
        case 't': matched = any({"ate", "iti"}); break;
        case 'u': matched = any({"ous"}); break;
        case 'v': matched = any({"ive"}); break;
        case 'z': matched = any({"ize"}); break;
        default: break;
        }
        if (matched && m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (b_[k_] == 'e') {
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[k_] == 'l' && double_consonant(k_) && m() > 1) --k_;
    }

    std::string b_;
    int k_;
    int j_ = 0;
};

} // namespace

std::string porter_stem(std::string_view word) {
    return Stemmer(word).run();
}

} // namespace topicbench
