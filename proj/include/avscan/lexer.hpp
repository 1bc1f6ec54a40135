#pragma once

#include "avscan/ast.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avscan {

enum class TokenKind { Identifier, Number, String, HexString, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string_view text;   // raw slice of the source, quotes included for strings
    ast::Span span;
    std::string_view trivia; // whitespace/comments preceding the token
};

/// Raised for both lexical and grammatical errors. Carries the position and,
/// when known, the set of tokens the parser would have accepted.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::string path, int line, int col, std::string message,
                std::vector<std::string> expected = {});

    std::string const& path() const { return path_; }
    int line() const { return line_; }
    int col() const { return col_; }
    std::string const& detail() const { return detail_; }
    std::vector<std::string> const& expected() const { return expected_; }
    ast::Diagnostic diagnostic() const;

private:
    std::string path_;
    int line_;
    int col_;
    std::string detail_;
    std::vector<std::string> expected_;
};

/// Splits Solidity source into tokens. The final token is always End and its
/// trivia holds whatever follows the last real token.
std::vector<Token> tokenize(std::string_view source, std::string_view path = {});

}  // namespace avscan
