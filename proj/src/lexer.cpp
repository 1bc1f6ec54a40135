#include "avscan/lexer.hpp"

#include <algorithm>
#include <cctype>

namespace avscan {

namespace {

std::string format_message(std::string const& path, int line, int col, std::string const& message,
                           std::vector<std::string> const& expected) {
    std::string out = path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message;
    if (!expected.empty()) {
        out += " (expected one of:";
        for (auto const& e : expected) out += " '" + e + "'";
        out += ")";
    }
    return out;
}

// Longest first so that greedy matching picks e.g. ">>=" over ">>".
constexpr std::string_view kPuncts[] = {
    ">>>=", "<<=", ">>=", ">>>", "**=", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=",   "-=",  "*=",  "/=",  "%=",  "|=", "&=", "^=", "<<", ">>", "**", "->", "(",  ")",
    "[",    "]",   "{",   "}",   ";",   ",",  ".",  "?",  ":",  "=",  "+",  "-",  "*",  "/",
    "%",    "!",   "<",   ">",   "&",  "|",  "^",  "~"};

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

class Lexer {
public:
    Lexer(std::string_view src, std::string_view path) : src_(src), path_(path) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            std::size_t trivia_begin = pos_;
            skip_trivia();
            std::string_view trivia = src_.substr(trivia_begin, pos_ - trivia_begin);
            Token tok;
            tok.trivia = trivia;
            tok.span.begin = pos_;
            tok.span.line = line_;
            tok.span.col = col_;
            if (pos_ >= src_.size()) {
                tok.kind = TokenKind::End;
                tok.span.end = pos_;
                tok.span.end_line = line_;
                tok.span.end_col = col_;
                out.push_back(tok);
                return out;
            }
            tok.kind = scan_token();
            tok.span.end = pos_;
            tok.span.end_line = line_;
            tok.span.end_col = col_;
            tok.text = src_.substr(tok.span.begin, pos_ - tok.span.begin);
            out.push_back(tok);
        }
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(std::string message) const {
        throw SyntaxError(std::string(path_), line_, col_, std::move(message));
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                int line = line_, col = col_;
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size())
                    throw SyntaxError(std::string(path_), line, col, "unterminated block comment");
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    TokenKind scan_token() {
        char c = peek();
        if ((c == 'h' && peek(1) == 'e' && peek(2) == 'x' && (peek(3) == '"' || peek(3) == '\''))) {
            advance();
            advance();
            advance();
            scan_string_body();
            return TokenKind::HexString;
        }
        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_char(peek())) advance();
            return TokenKind::Identifier;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            scan_number();
            return TokenKind::Number;
        }
        if (c == '"' || c == '\'') {
            scan_string_body();
            return TokenKind::String;
        }
        for (auto p : kPuncts) {
            if (src_.substr(pos_, p.size()) == p) {
                for (std::size_t i = 0; i < p.size(); ++i) advance();
                return TokenKind::Punct;
            }
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    void scan_number() {
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            advance();
            advance();
            if (!std::isxdigit(static_cast<unsigned char>(peek()))) fail("malformed hex literal");
            while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            return;
        }
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) || peek(1) == '-')) {
            advance();
            if (peek() == '-') advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
    }

    void scan_string_body() {
        char quote = peek();
        int line = line_, col = col_;
        advance();
        while (pos_ < src_.size() && peek() != quote) {
            if (peek() == '\\' && pos_ + 1 < src_.size()) advance();
            if (peek() == '\n')
                throw SyntaxError(std::string(path_), line, col, "unterminated string literal");
            advance();
        }
        if (pos_ >= src_.size())
            throw SyntaxError(std::string(path_), line, col, "unterminated string literal");
        advance();
    }

    std::string_view src_;
    std::string_view path_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

SyntaxError::SyntaxError(std::string path, int line, int col, std::string message,
                         std::vector<std::string> expected)
    : std::runtime_error(format_message(path, line, col, message, expected)),
      path_(std::move(path)),
      line_(line),
      col_(col),
      detail_(std::move(message)),
      expected_(std::move(expected)) {}

ast::Diagnostic SyntaxError::diagnostic() const {
    std::string msg = detail_;
    if (!expected_.empty()) {
        msg += " (expected one of:";
        for (auto const& e : expected_) msg += " '" + e + "'";
        msg += ")";
    }
    return {path_, line_, col_, msg};
}

std::vector<Token> tokenize(std::string_view source, std::string_view path) {
    return Lexer(source, path).run();
}

}  // namespace avscan
