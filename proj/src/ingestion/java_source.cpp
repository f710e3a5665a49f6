#include "questd/ingestion/java_source.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace questd::ingestion {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' || static_cast<unsigned char>(c) >= 0x80;
}

bool ident_part(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

bool is_declaration_keyword(std::string_view text) {
    return text == "class" || text == "interface" || text == "enum" || text == "record";
}

bool is_control_keyword(std::string_view text) {
    return text == "if" || text == "for" || text == "while" || text == "switch" || text == "catch" ||
           text == "synchronized" || text == "new" || text == "return" || text == "try";
}

/// Index of the token closing the bracket opened at `open`, or tokens.size() if unbalanced.
std::size_t match_close(const std::vector<Token>& tokens, std::size_t open) {
    const auto& opener = tokens[open].text;
    const std::string closer = opener == "(" ? ")" : opener == "{" ? "}" : "]";
    int depth = 0;
    for (auto i = open; i < tokens.size(); ++i) {
        if (tokens[i].kind != TokenKind::Punct) continue;
        if (tokens[i].text == opener) {
            ++depth;
        } else if (tokens[i].text == closer && --depth == 0) {
            return i;
        }
    }
    return tokens.size();
}

bool is_punct(const Token& t, std::string_view text) { return t.kind == TokenKind::Punct && t.text == text; }

std::string join(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
    std::string out;
    for (auto i = begin; i < end && i < tokens.size(); ++i) {
        if (!out.empty()) out += ' ';
        out += tokens[i].text;
    }
    return out;
}

class Segmenter {
public:
    explicit Segmenter(const std::vector<Token>& tokens) : tokens_(tokens) {}

    std::vector<MethodInfo> run() {
        std::size_t i = 0;
        std::string package;
        while (i < tokens_.size()) {
            const auto& t = tokens_[i];
            if (t.kind == TokenKind::Identifier && t.text == "package") {
                std::size_t j = i + 1;
                while (j < tokens_.size() && !is_punct(tokens_[j], ";")) package += tokens_[j++].text;
                prefix_ = package.empty() ? "" : package + ".";
                i = j + 1;
                continue;
            }
            if (auto next = try_class(i, "")) {
                i = *next;
                continue;
            }
            if (is_punct(t, "{")) {
                i = match_close(tokens_, i) + 1;
                continue;
            }
            ++i;
        }
        return std::move(methods_);
    }

private:
    /// If a type declaration starts at `i`, parses it and returns the index after its body.
    std::optional<std::size_t> try_class(std::size_t i, const std::string& outer) {
        const auto& t = tokens_[i];
        if (t.kind != TokenKind::Identifier || !is_declaration_keyword(t.text)) return std::nullopt;
        if (i > 0 && is_punct(tokens_[i - 1], ".")) return std::nullopt;  // Foo.class
        if (i + 1 >= tokens_.size() || tokens_[i + 1].kind != TokenKind::Identifier) return std::nullopt;
        const auto name = outer.empty() ? prefix_ + tokens_[i + 1].text : outer + "$" + tokens_[i + 1].text;
        auto j = i + 2;
        while (j < tokens_.size() && !is_punct(tokens_[j], "{") && !is_punct(tokens_[j], ";")) {
            if (is_punct(tokens_[j], "(")) j = match_close(tokens_, j);  // record header
            ++j;
        }
        if (j >= tokens_.size() || is_punct(tokens_[j], ";")) return j + 1;
        return class_body(j, name);
    }

    /// Parses members of the class body opened at `open`; returns the index after its closing brace.
    std::size_t class_body(std::size_t open, const std::string& class_name) {
        const auto close = match_close(tokens_, open);
        auto header_start = open + 1;
        auto i = open + 1;
        while (i < close) {
            const auto& t = tokens_[i];
            if (is_punct(t, ";")) {
                header_start = ++i;
            } else if (auto next = try_class(i, class_name)) {
                i = header_start = *next;
            } else if (is_punct(t, "(") || is_punct(t, "[")) {
                i = match_close(tokens_, i) + 1;
            } else if (is_punct(t, "{")) {
                const auto end = match_close(tokens_, i);
                member_block(header_start, i, std::min(end, close), class_name);
                i = header_start = end + 1;
            } else {
                ++i;
            }
        }
        return close + 1;
    }

    void member_block(std::size_t header_start, std::size_t open, std::size_t close, const std::string& class_name) {
        MethodInfo method;
        method.class_name = class_name;
        auto i = header_start;
        // Annotations: @Name(.Name)* with optional argument list.
        while (i + 1 < open && is_punct(tokens_[i], "@") && tokens_[i + 1].kind == TokenKind::Identifier) {
            i += 1;
            std::string name = tokens_[i].text;
            while (i + 2 < open && is_punct(tokens_[i + 1], ".") && tokens_[i + 2].kind == TokenKind::Identifier) {
                i += 2;
                name = tokens_[i].text;
            }
            ++i;
            if (i < open && is_punct(tokens_[i], "(")) i = match_close(tokens_, i) + 1;
            method.annotations.push_back(name);
        }
        std::size_t paren = open;
        for (auto j = i; j < open; ++j) {
            if (is_punct(tokens_[j], "=") || is_punct(tokens_[j], "->")) return;  // field initializer
            if (is_punct(tokens_[j], "@") && j + 1 < open && tokens_[j + 1].kind == TokenKind::Identifier) {
                // Annotation after a modifier, e.g. `public @Nullable Foo bar()`.
                method.annotations.push_back(tokens_[j + 1].text);
                j += 1;
                if (j + 1 < open && is_punct(tokens_[j + 1], "(")) j = match_close(tokens_, j + 1);
                continue;
            }
            if (is_punct(tokens_[j], "(")) {
                paren = j;
                break;
            }
        }
        if (paren == open || paren == 0 || paren <= i) return;
        const auto& name = tokens_[paren - 1];
        if (name.kind != TokenKind::Identifier || is_control_keyword(name.text)) return;
        const auto params_close = match_close(tokens_, paren);
        if (params_close >= open) return;
        method.name = name.text;
        method.params = join(tokens_, paren + 1, params_close);
        method.body.assign(tokens_.begin() + static_cast<std::ptrdiff_t>(open + 1),
                           tokens_.begin() + static_cast<std::ptrdiff_t>(close));
        methods_.push_back(std::move(method));
    }

    const std::vector<Token>& tokens_;
    std::string prefix_;
    std::vector<MethodInfo> methods_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    std::size_t line = 1;
    const auto n = src.size();

    auto advance_to = [&](std::size_t end) {
        end = std::min(end, n);
        line += static_cast<std::size_t>(std::count(src.begin() + static_cast<std::ptrdiff_t>(i),
                                                    src.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
        i = end;
    };

    while (i < n) {
        const char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            const auto end = src.find('\n', i);
            i = end == std::string_view::npos ? n : end;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            const auto end = src.find("*/", i + 2);
            advance_to(end == std::string_view::npos ? n : end + 2);
        } else if (ident_start(c)) {
            auto j = i + 1;
            while (j < n && ident_part(src[j])) ++j;
            tokens.push_back(Token{TokenKind::Identifier, std::string(src.substr(i, j - i)), line});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            auto j = i + 1;
            while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '.' || src[j] == '_')) ++j;
            tokens.push_back(Token{TokenKind::Number, std::string(src.substr(i, j - i)), line});
            i = j;
        } else if (c == '"' && src.substr(i, 3) == "\"\"\"") {
            const auto end = src.find("\"\"\"", i + 3);
            const auto stop = end == std::string_view::npos ? n : end + 3;
            tokens.push_back(Token{TokenKind::String, std::string(src.substr(i, stop - i)), line});
            advance_to(stop);
        } else if (c == '"' || c == '\'') {
            auto j = i + 1;
            while (j < n && src[j] != c && src[j] != '\n') j += (src[j] == '\\') ? 2 : 1;
            const auto stop = std::min(n, j + 1);
            tokens.push_back(Token{c == '"' ? TokenKind::String : TokenKind::Char,
                                   std::string(src.substr(i, stop - i)), line});
            i = stop;
        } else if (c == '-' && i + 1 < n && src[i + 1] == '>') {
            tokens.push_back(Token{TokenKind::Punct, "->", line});
            i += 2;
        } else if (c == ':' && i + 1 < n && src[i + 1] == ':') {
            tokens.push_back(Token{TokenKind::Punct, "::", line});
            i += 2;
        } else {
            tokens.push_back(Token{TokenKind::Punct, std::string(1, c), line});
            ++i;
        }
    }
    return tokens;
}

bool same_tokens(const std::vector<Token>& a, const std::vector<Token>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

bool MethodInfo::is_test() const {
    return std::find(annotations.begin(), annotations.end(), "Test") != annotations.end();
}

std::string MethodInfo::key() const { return class_name + "#" + name + "(" + params + ")"; }

std::vector<MethodInfo> segment_methods(const std::vector<Token>& tokens) { return Segmenter(tokens).run(); }

std::size_t count_assertions(const std::vector<Token>& body) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const auto& t = body[i];
        if (t.kind != TokenKind::Identifier) continue;
        if (t.text.rfind("assert", 0) == 0) {
            ++n;
        } else if (t.text == "fail" && i + 1 < body.size() && is_punct(body[i + 1], "(")) {
            ++n;
        }
    }
    return n;
}

bool has_test_annotation(const std::vector<Token>& tokens) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (!is_punct(tokens[i], "@")) continue;
        auto j = i + 1;
        while (j + 2 < tokens.size() && is_punct(tokens[j + 1], ".")) j += 2;
        if (tokens[j].kind == TokenKind::Identifier && tokens[j].text == "Test") return true;
    }
    return false;
}

}  // namespace questd::ingestion
