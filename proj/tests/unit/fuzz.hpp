#pragma once

#include <array>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace questd::testing {

/// Structure-aware mutations of seed documents: byte flips, truncation, deletion,
/// duplication and insertion of format tokens.
class Mutator {
public:
    explicit Mutator(std::uint64_t seed) : rng_(seed) {}

    std::string mutate(const std::string& seed) {
        std::string s = seed;
        const int rounds = 1 + static_cast<int>(pick(4));
        for (int r = 0; r < rounds; ++r) {
            switch (pick(6)) {
                case 0:
                    if (!s.empty()) s[pick(s.size())] = static_cast<char>(pick(256));
                    break;
                case 1:
                    s.resize(pick(s.size() + 1));
                    break;
                case 2:
                    if (!s.empty()) {
                        const auto at = pick(s.size());
                        s.erase(at, 1 + pick(32));
                    }
                    break;
                case 3:
                    if (!s.empty()) {
                        const auto at = pick(s.size());
                        const auto len = 1 + pick(64);
                        s.insert(pick(s.size() + 1), s.substr(at, len));
                    }
                    break;
                default: {
                    const auto token = kTokens[pick(kTokens.size())];
                    s.insert(pick(s.size() + 1), token);
                    break;
                }
            }
        }
        return s;
    }

    std::string random_bytes() {
        std::string s(pick(512), '\0');
        for (auto& c : s) c = static_cast<char>(pick(256));
        return s;
    }

private:
    static constexpr std::array<std::string_view, 30> kTokens = {
        "<", ">", "/>", "\"", "'", "&", "&amp;", "&#0;", "<![CDATA[", "]]>", "<!--", "-->",
        "<testcase name=\"x\">", "<testsuite tests=\"1\">", "</testsuite>", "<failure/>", "<skipped/>",
        "<counter type=\"LINE\" missed=\"1\" covered=\"2\"/>", "<class name=\"a/B\">", "</class>",
        "tests=\"-1\"", "18446744073709551616", "\n", "\r\n", "SF:x\n", "DA:1,-\n", "BRDA:1,0,0,-\n",
        "end_of_record\n", "LH:99999\n", "FNDA:1,f\n"};

    std::size_t pick(std::size_t n) { return n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    std::mt19937_64 rng_;
};

}  // namespace questd::testing
