#include "questd/ingestion/classify.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "questd/ingestion/glob.hpp"
#include "questd/ingestion/java_source.hpp"

namespace questd::ingestion {

namespace {

bool is_binary(std::string_view content) { return content.find('\0') != std::string_view::npos; }

std::string trim(std::string_view line) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = line.find_last_not_of(" \t\r");
    return std::string(line.substr(begin, end - begin + 1));
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        lines.push_back(trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return lines;
}

std::vector<PrintStatementAdded> added_prints(const std::optional<std::string>& prev, std::string_view next,
                                              const std::regex& pattern) {
    std::map<std::string, long> balance;
    for (const auto& line : lines_of(next)) {
        if (line.rfind("//", 0) != 0 && std::regex_search(line, pattern)) ++balance[line];
    }
    if (prev) {
        for (const auto& line : lines_of(*prev)) {
            if (auto it = balance.find(line); it != balance.end()) --it->second;
        }
    }
    std::vector<PrintStatementAdded> out;
    for (const auto& [line, count] : balance) {
        for (long i = 0; i < count; ++i) out.push_back(PrintStatementAdded{line});
    }
    return out;
}

using MethodMap = std::map<std::string, const MethodInfo*>;

MethodMap by_key(const std::vector<MethodInfo>& methods) {
    MethodMap map;
    for (const auto& m : methods) map.emplace(m.key(), &m);
    return map;
}

std::vector<const MethodInfo*> only_in(const MethodMap& a, const MethodMap& b) {
    std::vector<const MethodInfo*> out;
    for (const auto& [key, m] : a) {
        if (!b.count(key)) out.push_back(m);
    }
    return out;
}

bool has_statement(const std::vector<Token>& body) {
    return std::any_of(body.begin(), body.end(), [](const Token& t) { return t.kind == TokenKind::Punct && t.text == ";"; });
}

bool punct(const std::vector<Token>& tokens, std::size_t i, std::string_view text) {
    return i < tokens.size() && tokens[i].kind == TokenKind::Punct && tokens[i].text == text;
}

/// Replaces every statement-level call `[this.]helper(...);` in `body` with `helper_body`.
/// Returns nullopt when no such call exists.
std::optional<std::vector<Token>> expand_calls(const std::vector<Token>& body, const MethodInfo& helper) {
    std::vector<Token> out;
    bool replaced = false;
    std::size_t i = 0;
    while (i < body.size()) {
        std::size_t start = i;
        std::size_t name_at = i;
        if (body[i].kind == TokenKind::Identifier && body[i].text == "this" && punct(body, i + 1, ".")) name_at = i + 2;
        const bool at_statement_start = start == 0 || punct(body, start - 1, ";") || punct(body, start - 1, "{") ||
                                        punct(body, start - 1, "}");
        if (at_statement_start && name_at < body.size() && body[name_at].kind == TokenKind::Identifier &&
            body[name_at].text == helper.name && punct(body, name_at + 1, "(")) {
            int depth = 0;
            auto j = name_at + 1;
            for (; j < body.size(); ++j) {
                if (punct(body, j, "(")) ++depth;
                if (punct(body, j, ")") && --depth == 0) break;
            }
            if (j < body.size() && punct(body, j + 1, ";")) {
                out.insert(out.end(), helper.body.begin(), helper.body.end());
                replaced = true;
                i = j + 2;
                continue;
            }
        }
        out.push_back(body[i]);
        ++i;
    }
    if (!replaced) return std::nullopt;
    return out;
}

struct Versions {
    std::vector<MethodInfo> prev;
    std::vector<MethodInfo> next;
};

/// Helpers that exist only in `with_helper` and whose body was moved out of (or into) a test
/// method present in both versions. `before` is the version holding the code inline.
std::vector<RefactoringDetected> find_moves(const std::vector<MethodInfo>& inline_version,
                                            const std::vector<MethodInfo>& helper_version, RefactoringType type,
                                            const std::set<std::string>& excluded) {
    const auto inline_map = by_key(inline_version);
    const auto helper_map = by_key(helper_version);
    std::vector<RefactoringDetected> found;
    for (const auto* helper : only_in(helper_map, inline_map)) {
        if (helper->is_test() || excluded.count(helper->key()) || !has_statement(helper->body)) continue;
        for (const auto& [key, host_with_call] : helper_map) {
            if (key == helper->key() || host_with_call->class_name != helper->class_name) continue;
            const auto host_inline = inline_map.find(key);
            if (host_inline == inline_map.end() || !host_with_call->is_test() || !host_inline->second->is_test()) {
                continue;
            }
            const auto expanded = expand_calls(host_with_call->body, *helper);
            if (expanded && same_tokens(*expanded, host_inline->second->body)) {
                found.push_back(RefactoringDetected{type, helper->class_name, host_with_call->name, helper->name, true});
                break;
            }
        }
    }
    return found;
}

struct Renames {
    std::vector<RefactoringDetected> facts;
    std::set<std::string> targets;  // keys in the next version
};

Renames find_renames(const std::vector<MethodInfo>& prev, const std::vector<MethodInfo>& next) {
    const auto prev_map = by_key(prev);
    const auto next_map = by_key(next);
    const auto removed = only_in(prev_map, next_map);
    const auto added = only_in(next_map, prev_map);

    auto same_shape = [](const MethodInfo& a, const MethodInfo& b) {
        return a.class_name == b.class_name && a.params == b.params && a.name != b.name && same_tokens(a.body, b.body);
    };

    Renames renames;
    for (const auto* old_method : removed) {
        const MethodInfo* match = nullptr;
        int candidates = 0;
        for (const auto* new_method : added) {
            if (same_shape(*old_method, *new_method)) {
                match = new_method;
                ++candidates;
            }
        }
        if (candidates != 1) continue;
        const auto reverse = std::count_if(removed.begin(), removed.end(),
                                           [&](const MethodInfo* m) { return same_shape(*m, *match); });
        if (reverse != 1) continue;
        renames.facts.push_back(RefactoringDetected{RefactoringType::Rename, old_method->class_name, old_method->name,
                                                    match->name, old_method->is_test() || match->is_test()});
        renames.targets.insert(match->key());
    }
    return renames;
}

std::vector<RefactoringDetected> detect(const Versions& v, std::set<std::string>* rename_targets) {
    auto renames = find_renames(v.prev, v.next);
    std::set<std::string> renamed_sources;
    for (const auto& r : renames.facts) {
        for (const auto& m : v.prev) {
            if (m.class_name == r.class_name && m.name == r.method) renamed_sources.insert(m.key());
        }
    }
    auto facts = std::move(renames.facts);
    auto extracted = find_moves(v.prev, v.next, RefactoringType::ExtractMethod, renames.targets);
    auto inlined = find_moves(v.next, v.prev, RefactoringType::InlineMethod, renamed_sources);
    facts.insert(facts.end(), extracted.begin(), extracted.end());
    facts.insert(facts.end(), inlined.begin(), inlined.end());
    if (rename_targets) *rename_targets = std::move(renames.targets);
    return facts;
}

}  // namespace

FileClass classify_file(std::string_view path, std::string_view content, const ClassifyOptions& options) {
    for (const auto& root : options.test_roots) {
        if (glob_match(root, path)) return FileClass::Test;
    }
    if (!is_binary(content) && has_test_annotation(tokenize(content))) return FileClass::Test;
    return FileClass::Production;
}

std::vector<RefactoringDetected> detect_refactorings(std::string_view prev, std::string_view next) {
    if (is_binary(prev) || is_binary(next)) return {};
    const Versions versions{segment_methods(tokenize(prev)), segment_methods(tokenize(next))};
    return detect(versions, nullptr);
}

std::vector<ChangeFact> classify_change(const std::optional<std::string>& prev, std::string_view next,
                                        std::string_view /*path*/, const ClassifyOptions& options) {
    if (is_binary(next) || (prev && is_binary(*prev))) return {GenericEdit{}};

    const auto next_tokens = tokenize(next);
    const auto prev_tokens = prev ? tokenize(*prev) : std::vector<Token>{};
    if (prev && same_tokens(prev_tokens, next_tokens)) return {GenericEdit{}};

    const Versions versions{segment_methods(prev_tokens), segment_methods(next_tokens)};
    std::vector<ChangeFact> facts;

    std::set<std::string> rename_targets;
    const auto refactorings = prev ? detect(versions, &rename_targets) : std::vector<RefactoringDetected>{};

    const auto prev_map = by_key(versions.prev);
    for (const auto& method : versions.next) {
        if (!method.is_test()) continue;
        const auto old = prev_map.find(method.key());
        if (old == prev_map.end()) {
            if (!rename_targets.count(method.key())) facts.push_back(TestMethodAdded{method.class_name, method.name});
        } else if (count_assertions(method.body) > count_assertions(old->second->body)) {
            facts.push_back(AssertionAddedToTest{method.class_name, method.name});
        }
    }

    std::regex pattern;
    try {
        pattern = std::regex(options.print_pattern);
    } catch (const std::regex_error&) {
        pattern = std::regex(R"(System\.out\.println)");
    }
    for (auto& p : added_prints(prev, next, pattern)) facts.push_back(std::move(p));
    for (const auto& r : refactorings) facts.push_back(r);

    if (facts.empty()) facts.push_back(GenericEdit{});
    return facts;
}

}  // namespace questd::ingestion
