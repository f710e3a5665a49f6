#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace questd::ingestion {

enum class TokenKind { Identifier, Number, String, Char, Punct };

struct Token {
    TokenKind kind = TokenKind::Punct;
    std::string text;
    std::size_t line = 0;

    bool operator==(const Token& other) const { return kind == other.kind && text == other.text; }
};

/// Splits Java source into tokens, dropping whitespace and comments. Never throws:
/// unterminated literals and comments run to end of input.
std::vector<Token> tokenize(std::string_view source);

bool same_tokens(const std::vector<Token>& a, const std::vector<Token>& b);

struct MethodInfo {
    std::string class_name;  // package-qualified, nested classes joined with '$'
    std::string name;
    std::string params;  // parameter list tokens joined by spaces
    std::vector<std::string> annotations;  // simple names, e.g. "Test"
    std::vector<Token> body;               // tokens between the braces

    bool is_test() const;
    /// class#name(params)
    std::string key() const;
};

/// Brace-matching segmentation of a compilation unit into methods with bodies.
/// Abstract methods, initializer blocks and field initializers are skipped.
std::vector<MethodInfo> segment_methods(const std::vector<Token>& tokens);

/// Number of `assert*` identifiers plus `fail(` calls.
std::size_t count_assertions(const std::vector<Token>& body);

/// True when an @Test annotation occurs anywhere in the source.
bool has_test_annotation(const std::vector<Token>& tokens);

}  // namespace questd::ingestion
