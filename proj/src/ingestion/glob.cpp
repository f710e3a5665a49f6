#include "questd/ingestion/glob.hpp"

namespace questd::ingestion {

namespace {

bool match_from(std::string_view pat, std::size_t p, std::string_view str, std::size_t s) {
    while (p < pat.size()) {
        if (pat.compare(p, 2, "**") == 0) {
            const auto q = p + 2;
            if (q < pat.size() && pat[q] == '/') {
                if (match_from(pat, q + 1, str, s)) return true;
                for (auto i = s; i < str.size(); ++i) {
                    if (str[i] == '/' && match_from(pat, q + 1, str, i + 1)) return true;
                }
                return false;
            }
            for (auto i = s; i <= str.size(); ++i) {
                if (match_from(pat, q, str, i)) return true;
            }
            return false;
        }
        const char c = pat[p];
        if (c == '*') {
            for (auto i = s; i <= str.size(); ++i) {
                if (match_from(pat, p + 1, str, i)) return true;
                if (i < str.size() && str[i] == '/') break;
            }
            return false;
        }
        if (s >= str.size()) return false;
        if (c == '?') {
            if (str[s] == '/') return false;
        } else if (c != str[s]) {
            return false;
        }
        ++p;
        ++s;
    }
    return s == str.size();
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) { return match_from(pattern, 0, path, 0); }

}  // namespace questd::ingestion
