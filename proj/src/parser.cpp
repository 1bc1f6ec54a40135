#include "avscan/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace avscan {

using ast::Node;
using ast::NodeKind;
using ast::Span;

namespace {

const std::unordered_set<std::string_view> kNumberUnits{
    "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks", "years"};

const std::unordered_set<std::string_view> kStatementKeywords{
    "if", "else", "while", "do", "for", "return", "break", "continue", "throw", "emit",
    "assembly", "try", "unchecked", "delete", "new"};

const std::unordered_set<std::string_view> kBuiltinNamespaces{"msg", "tx", "block", "abi"};

const std::unordered_set<std::string_view> kVisibilityWords{"public", "private", "internal", "external"};

bool is_hex_address(std::string_view text) {
    if (text.size() != 42 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) return false;
    return std::all_of(text.begin() + 2, text.end(),
                       [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; });
}

bool has_numeric_suffix(std::string_view name, std::string_view prefix) {
    if (name.substr(0, prefix.size()) != prefix) return false;
    auto rest = name.substr(prefix.size());
    return std::all_of(rest.begin(), rest.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

Span join(Span const& a, Span const& b) {
    Span s = a;
    s.end = b.end;
    s.end_line = b.end_line;
    s.end_col = b.end_col;
    return s;
}

class Parser {
public:
    Parser(std::string_view text, std::string path)
        : src_(text), path_(std::move(path)), toks_(tokenize(text, path_)) {}

    ast::SourceUnit run() {
        ast::SourceUnit unit;
        unit.path = path_;
        while (!at_end()) {
            if (at("pragma")) {
                auto start = cur().span;
                advance();
                while (!at(";") && !at_end()) advance();
                unit.pragma = std::string(slice(join(start, prev().span)).substr(7));
                trim(*unit.pragma);
                expect(";");
            } else if (at("import")) {
                while (!at(";") && !at_end()) advance();
                expect(";");
            } else if (at("contract") || at("interface") || at("library") || at("abstract")) {
                auto contract = parse_contract();
                if (unit.find_contract(contract.name))
                    throw SyntaxError(path_, contract.span.line, contract.span.col,
                                      "duplicate contract '" + contract.name + "'");
                unit.contracts.push_back(std::move(contract));
            } else {
                fail_expected({"pragma", "import", "contract", "interface", "library"});
            }
        }
        for (auto& contract : unit.contracts) resolve_contract(contract, unit);
        unit.diagnostics = std::move(diags_);
        return unit;
    }

private:
    // ---- token helpers -------------------------------------------------

    Token const& cur() const { return toks_[pos_]; }
    Token const& peek_tok(std::size_t k = 1) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    Token const& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
    bool at_end() const { return cur().kind == TokenKind::End; }
    bool at(std::string_view text) const {
        return cur().kind != TokenKind::String && cur().kind != TokenKind::End && cur().text == text;
    }
    bool peek_is(std::size_t k, std::string_view text) const {
        auto const& t = peek_tok(k);
        return t.kind != TokenKind::String && t.kind != TokenKind::End && t.text == text;
    }
    bool at_ident() const { return cur().kind == TokenKind::Identifier; }
    void advance() {
        if (!at_end()) ++pos_;
    }
    bool accept(std::string_view text) {
        if (at(text)) {
            advance();
            return true;
        }
        return false;
    }
    Token const& expect(std::string_view text) {
        if (!at(text)) fail_expected({std::string(text)});
        advance();
        return prev();
    }
    std::string expect_ident() {
        if (!at_ident()) fail_expected({"identifier"});
        advance();
        return std::string(prev().text);
    }
    [[noreturn]] void fail_expected(std::vector<std::string> expected) const {
        std::string found = at_end() ? std::string("end of input") : "'" + std::string(cur().text) + "'";
        throw SyntaxError(path_, cur().span.line, cur().span.col, "unexpected " + found,
                          std::move(expected));
    }
    [[noreturn]] void fail(std::string message) const {
        throw SyntaxError(path_, cur().span.line, cur().span.col, std::move(message));
    }
    std::string_view slice(Span const& s) const { return src_.substr(s.begin, s.end - s.begin); }
    Span span_from(Span const& start) const { return join(start, prev().span); }
    static void trim(std::string& s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        std::size_t i = 0;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        s.erase(0, i);
    }

    void diag(Span const& at_span, std::string message) {
        diags_.push_back({path_, at_span.line, at_span.col, std::move(message)});
    }

    // Skips a balanced {...} group starting at the current '{'.
    void skip_braces() {
        expect("{");
        int depth = 1;
        while (depth > 0) {
            if (at_end()) fail_expected({"}"});
            if (at("{")) ++depth;
            if (at("}")) --depth;
            advance();
        }
    }

    void skip_to_semicolon() {
        int depth = 0;
        while (!at_end()) {
            if (at("(") || at("[") || at("{")) ++depth;
            if (at(")") || at("]") || at("}")) --depth;
            if (depth <= 0 && at(";")) break;
            advance();
        }
        expect(";");
    }

    // ---- declarations --------------------------------------------------

    ast::ContractDef parse_contract() {
        ast::ContractDef c;
        auto start = cur().span;
        accept("abstract");
        if (accept("interface")) c.kind = ast::ContractKind::Interface;
        else if (accept("library")) c.kind = ast::ContractKind::Library;
        else expect("contract");
        c.name = expect_ident();
        if (accept("is")) {
            do {
                std::string base = expect_ident();
                while (accept(".")) base += "." + expect_ident();
                if (at("(")) skip_parens();
                c.bases.push_back(base);
            } while (accept(","));
        }
        expect("{");
        while (!at("}")) {
            if (at_end()) fail_expected({"}"});
            parse_member(c);
        }
        expect("}");
        c.span = span_from(start);
        return c;
    }

    void skip_parens() {
        expect("(");
        int depth = 1;
        while (depth > 0) {
            if (at_end()) fail_expected({")"});
            if (at("(")) ++depth;
            if (at(")")) --depth;
            advance();
        }
    }

    void parse_member(ast::ContractDef& c) {
        if (at("function") || at("constructor") || ((at("fallback") || at("receive")) && peek_is(1, "("))) {
            auto f = parse_function(c.name);
            bool dup = std::any_of(c.functions.begin(), c.functions.end(), [&](auto const& g) {
                return g.kind == f.kind && g.name == f.name;
            });
            if (dup) diag(f.span, "overloaded function '" + f.display_name() + "' is not supported");
            c.functions.push_back(std::move(f));
        } else if (at("modifier")) {
            auto m = parse_modifier();
            if (c.find_modifier(m.name)) diag(m.span, "duplicate modifier '" + m.name + "'");
            c.modifiers.push_back(std::move(m));
        } else if (at("event") || at("using") || at("error")) {
            skip_to_semicolon();
        } else if (at("struct")) {
            c.structs.push_back(parse_struct());
        } else if (at("enum")) {
            advance();
            c.enums.push_back(expect_ident());
            skip_braces();
        } else {
            c.state_vars.push_back(parse_state_var());
        }
    }

    ast::StructDef parse_struct() {
        ast::StructDef s;
        auto start = cur().span;
        expect("struct");
        s.name = expect_ident();
        expect("{");
        while (!at("}")) {
            ast::Param field;
            auto fstart = cur().span;
            field.type = parse_type();
            field.name = expect_ident();
            expect(";");
            field.span = span_from(fstart);
            s.fields.push_back(std::move(field));
        }
        expect("}");
        s.span = span_from(start);
        return s;
    }

    ast::StateVarDecl parse_state_var() {
        ast::StateVarDecl v;
        auto start = cur().span;
        v.type = parse_type();
        while (true) {
            if (at("public")) v.visibility = ast::Visibility::Public;
            else if (at("private")) v.visibility = ast::Visibility::Private;
            else if (at("internal")) v.visibility = ast::Visibility::Internal;
            else if (at("constant") || at("immutable")) v.constant = true;
            else if (at("override")) {
                advance();
                if (at("(")) skip_parens();
                continue;
            } else break;
            advance();
        }
        v.name = expect_ident();
        if (accept("=")) v.initializer = parse_expression();
        expect(";");
        v.span = span_from(start);
        return v;
    }

    std::vector<ast::Param> parse_param_list() {
        std::vector<ast::Param> params;
        expect("(");
        if (!at(")")) {
            do {
                ast::Param p;
                auto start = cur().span;
                p.type = parse_type();
                while (at("memory") || at("storage") || at("calldata") || at("indexed") || at("payable"))
                    advance();
                if (at_ident()) p.name = expect_ident();
                p.span = span_from(start);
                params.push_back(std::move(p));
            } while (accept(","));
        }
        expect(")");
        return params;
    }

    ast::FunctionDef parse_function(std::string const& contract_name) {
        ast::FunctionDef f;
        auto start = cur().span;
        if (accept("constructor")) {
            f.kind = ast::FunctionKind::Constructor;
        } else if (accept("fallback")) {
            f.kind = ast::FunctionKind::Fallback;
        } else if (accept("receive")) {
            f.kind = ast::FunctionKind::Receive;
        } else {
            expect("function");
            if (at_ident()) f.name = expect_ident();
            if (f.name.empty()) f.kind = ast::FunctionKind::Fallback;
            else if (f.name == contract_name) f.kind = ast::FunctionKind::Constructor;
        }
        f.params = parse_param_list();
        while (!at("{") && !at(";")) {
            if (at_end()) fail_expected({"{", ";"});
            if (at("public")) f.visibility = ast::Visibility::Public;
            else if (at("external")) f.visibility = ast::Visibility::External;
            else if (at("internal")) f.visibility = ast::Visibility::Internal;
            else if (at("private")) f.visibility = ast::Visibility::Private;
            else if (at("payable")) f.mutability = ast::Mutability::Payable;
            else if (at("view") || at("constant")) f.mutability = ast::Mutability::View;
            else if (at("pure")) f.mutability = ast::Mutability::Pure;
            else if (at("virtual")) {
            } else if (at("override")) {
                advance();
                if (at("(")) skip_parens();
                continue;
            } else if (at("returns")) {
                advance();
                f.returns = parse_param_list();
                continue;
            } else if (at_ident()) {
                ast::ModifierUse use;
                auto ustart = cur().span;
                use.name = expect_ident();
                while (accept(".")) use.name += "." + expect_ident();
                if (at("(")) use.args = parse_call_args();
                use.span = span_from(ustart);
                f.applied_modifiers.push_back(std::move(use));
                continue;
            } else {
                fail_expected({"{", ";", "returns", "modifier"});
            }
            advance();
        }
        if (accept(";")) {
            f.span = span_from(start);
            return f;
        }
        f.body = parse_block();
        f.span = span_from(start);
        return f;
    }

    ast::ModifierDef parse_modifier() {
        ast::ModifierDef m;
        auto start = cur().span;
        expect("modifier");
        m.name = expect_ident();
        if (at("(")) m.params = parse_param_list();
        while (at("virtual") || at("override")) advance();
        m.body = parse_block();
        m.span = span_from(start);
        return m;
    }

    // ---- types ---------------------------------------------------------

    std::string parse_type() {
        std::string type;
        if (accept("mapping")) {
            expect("(");
            std::string key = parse_type();
            expect("=>");
            std::string value = parse_type();
            expect(")");
            type = "mapping(" + key + "=>" + value + ")";
        } else if (at("function")) {
            fail("function types are not supported");
        } else {
            if (!at_ident()) fail_expected({"type name"});
            if (kStatementKeywords.count(cur().text)) fail_expected({"type name"});
            type = expect_ident();
            if (type == "address" && at("payable")) advance();
            while (at(".") && peek_tok().kind == TokenKind::Identifier) {
                advance();
                type += "." + expect_ident();
            }
        }
        while (at("[")) {
            advance();
            if (accept("]")) {
                type += "[]";
                continue;
            }
            Node len = parse_expression();
            expect("]");
            type += "[" + ast::render(len) + "]";
        }
        return type;
    }

    // ---- statements ----------------------------------------------------

    Node parse_block() {
        auto start = cur().span;
        expect("{");
        Node block(NodeKind::Block);
        while (!at("}")) {
            if (at_end()) fail_expected({"}"});
            block.children.push_back(parse_statement());
        }
        expect("}");
        block.span = span_from(start);
        return block;
    }

    Node opaque_until_semicolon(Span const& start, std::string const& what) {
        skip_to_semicolon();
        Span s = span_from(start);
        diag(s, what + " parsed as opaque statement");
        return Node(NodeKind::Opaque, std::string(slice(s)), {}, s);
    }

    // Looks for `( Type name` which only occurs in tuple declarations.
    bool looks_like_tuple_decl() const {
        if (!at("(")) return false;
        std::size_t k = 1;
        while (peek_is(k, ",")) ++k;
        if (peek_tok(k).kind != TokenKind::Identifier) return false;
        auto const& second = peek_tok(k + 1);
        return second.kind == TokenKind::Identifier;
    }

    Node parse_statement() {
        auto start = cur().span;
        if (at("{")) return parse_block();
        if (accept("if")) {
            expect("(");
            Node cond = parse_expression();
            expect(")");
            Node then_branch = parse_statement();
            Node n(NodeKind::If, {}, {std::move(cond), std::move(then_branch)});
            if (accept("else")) n.children.push_back(parse_statement());
            n.span = span_from(start);
            return n;
        }
        if (accept("while")) {
            expect("(");
            Node cond = parse_expression();
            expect(")");
            Node body = parse_statement();
            return Node(NodeKind::While, {}, {std::move(cond), std::move(body)}, span_from(start));
        }
        if (accept("do")) {
            Node body = parse_statement();
            expect("while");
            expect("(");
            Node cond = parse_expression();
            expect(")");
            expect(";");
            return Node(NodeKind::DoWhile, {}, {std::move(body), std::move(cond)}, span_from(start));
        }
        if (accept("for")) {
            expect("(");
            Node init(NodeKind::Empty, {}, {}, cur().span);
            if (!accept(";")) init = parse_simple_statement();
            Node cond(NodeKind::Empty, {}, {}, cur().span);
            if (!at(";")) cond = parse_expression();
            expect(";");
            Node post(NodeKind::Empty, {}, {}, cur().span);
            if (!at(")")) post = parse_expression();
            expect(")");
            Node body = parse_statement();
            fix_empty_span(init, start);
            fix_empty_span(cond, start);
            fix_empty_span(post, start);
            return Node(NodeKind::For, {},
                        {std::move(init), std::move(cond), std::move(post), std::move(body)},
                        span_from(start));
        }
        if (accept("return")) {
            Node n(NodeKind::Return);
            if (!at(";")) n.children.push_back(parse_expression());
            expect(";");
            n.span = span_from(start);
            return n;
        }
        if (at("break") || at("continue") || at("throw")) {
            auto kind = at("break") ? NodeKind::Break : at("continue") ? NodeKind::Continue : NodeKind::Throw;
            advance();
            expect(";");
            return Node(kind, {}, {}, span_from(start));
        }
        if (at("_") && peek_is(1, ";")) {
            advance();
            advance();
            return Node(NodeKind::Placeholder, "_", {}, span_from(start));
        }
        if (accept("emit")) {
            Node call = parse_expression();
            expect(";");
            Node n(NodeKind::Emit, call.text, {}, span_from(start));
            if (call.kind == NodeKind::Call) n.children = std::move(call.children);
            return n;
        }
        if (at("assembly")) {
            advance();
            if (at_ident() || cur().kind == TokenKind::String) advance();
            skip_braces();
            Span s = span_from(start);
            diag(s, "inline assembly parsed as opaque statement");
            return Node(NodeKind::Opaque, std::string(slice(s)), {}, s);
        }
        if (at("try")) {
            advance();
            while (!at("{") && !at_end()) advance();
            skip_braces();
            while (at("catch")) {
                while (!at("{") && !at_end()) advance();
                skip_braces();
            }
            Span s = span_from(start);
            diag(s, "try/catch parsed as opaque statement");
            return Node(NodeKind::Opaque, std::string(slice(s)), {}, s);
        }
        if (at("unchecked") && peek_is(1, "{")) {
            advance();
            return parse_block();
        }
        if ((at("var") && peek_is(1, "(")) || looks_like_tuple_decl())
            return opaque_until_semicolon(start, "tuple declaration");

        Node n = parse_simple_statement();
        return n;
    }

    void fix_empty_span(Node& n, Span const& fallback) const {
        if (n.kind == NodeKind::Empty && n.span.line == 0) n.span = fallback;
        if (n.kind == NodeKind::Empty) n.span.end = n.span.begin;
        if (n.kind == NodeKind::Empty) {
            n.span.end_line = n.span.line;
            n.span.end_col = n.span.col;
        }
    }

    // Variable declaration or expression statement, consuming the trailing ';'.
    Node parse_simple_statement() {
        auto start = cur().span;
        if (auto decl = try_parse_local_decl()) {
            Node n = std::move(*decl);
            if (accept("=")) n.children.push_back(parse_expression());
            expect(";");
            n.span = span_from(start);
            return n;
        }
        Node expr = parse_expression();
        expect(";");
        Span s = span_from(start);
        if (expr.kind == NodeKind::Require || expr.kind == NodeKind::Assert || expr.kind == NodeKind::Revert) {
            expr.span = s;
            return expr;
        }
        return Node(NodeKind::ExprStmt, {}, {std::move(expr)}, s);
    }

    std::optional<Node> try_parse_local_decl() {
        if (!(at("mapping") || at_ident())) return std::nullopt;
        if (kStatementKeywords.count(cur().text) || at("true") || at("false")) return std::nullopt;
        auto saved = pos_;
        auto start = cur().span;
        try {
            std::string type = parse_type();
            Span type_span = span_from(start);
            while (at("memory") || at("storage") || at("calldata")) advance();
            if (!at_ident() || at("is")) {
                pos_ = saved;
                return std::nullopt;
            }
            auto name_span = cur().span;
            std::string name = expect_ident();
            if (!(at("=") || at(";"))) {
                pos_ = saved;
                return std::nullopt;
            }
            Node n(NodeKind::VarDecl, {},
                   {Node(NodeKind::TypeName, type, {}, type_span), Node(NodeKind::DeclName, name, {}, name_span)});
            return n;
        } catch (SyntaxError const&) {
            pos_ = saved;
            return std::nullopt;
        }
    }

    // ---- expressions ---------------------------------------------------

    Node parse_expression() { return parse_assignment(); }

    Node parse_assignment() {
        Node lhs = parse_conditional();
        static const std::set<std::string_view> ops{"=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=",
                                                    "<<=", ">>=", ">>>="};
        if (cur().kind == TokenKind::Punct && ops.count(cur().text)) {
            std::string op(cur().text);
            advance();
            Node rhs = parse_assignment();
            Span s = join(lhs.span, rhs.span);
            return Node(NodeKind::Assign, op, {std::move(lhs), std::move(rhs)}, s);
        }
        return lhs;
    }

    Node parse_conditional() {
        Node cond = parse_binary(0);
        if (accept("?")) {
            Node a = parse_assignment();
            expect(":");
            Node b = parse_assignment();
            Span s = join(cond.span, b.span);
            return Node(NodeKind::Conditional, {}, {std::move(cond), std::move(a), std::move(b)}, s);
        }
        return cond;
    }

    static int binary_precedence(std::string_view op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "==" || op == "!=") return 3;
        if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
        if (op == "|") return 5;
        if (op == "^") return 6;
        if (op == "&") return 7;
        if (op == "<<" || op == ">>" || op == ">>>") return 8;
        if (op == "+" || op == "-") return 9;
        if (op == "*" || op == "/" || op == "%") return 10;
        if (op == "**") return 11;
        return -1;
    }

    Node parse_binary(int min_prec) {
        Node lhs = parse_unary();
        while (cur().kind == TokenKind::Punct) {
            int prec = binary_precedence(cur().text);
            if (prec < 0 || prec < min_prec) break;
            std::string op(cur().text);
            advance();
            Node rhs = parse_binary(op == "**" ? prec : prec + 1);
            Span s = join(lhs.span, rhs.span);
            lhs = Node(NodeKind::Binary, op, {std::move(lhs), std::move(rhs)}, s);
        }
        return lhs;
    }

    Node parse_unary() {
        auto start = cur().span;
        if (cur().kind == TokenKind::Punct &&
            (at("!") || at("-") || at("~") || at("++") || at("--") || at("+"))) {
            std::string op(cur().text);
            advance();
            Node operand = parse_unary();
            return Node(NodeKind::Unary, op, {std::move(operand)}, span_from(start));
        }
        if (at("delete")) {
            advance();
            Node operand = parse_unary();
            return Node(NodeKind::Unary, "delete", {std::move(operand)}, span_from(start));
        }
        return parse_postfix();
    }

    std::vector<Node> parse_call_args() {
        std::vector<Node> args;
        expect("(");
        if (accept("{")) {
            // named arguments: keep values in source order
            if (!at("}")) {
                do {
                    expect_ident();
                    expect(":");
                    args.push_back(parse_expression());
                } while (accept(","));
            }
            expect("}");
            expect(")");
            return args;
        }
        if (!at(")")) {
            do {
                args.push_back(parse_expression());
            } while (accept(","));
        }
        expect(")");
        return args;
    }

    Node parse_postfix() {
        Node expr = parse_primary();
        while (true) {
            if (at(".")) {
                advance();
                if (!at_ident()) fail_expected({"member name"});
                std::string member = expect_ident();
                Span s = span_from(expr.span);
                expr = make_member(std::move(expr), member, s);
            } else if (at("[")) {
                advance();
                Node n(NodeKind::Index, {}, {std::move(expr)});
                if (!at("]")) n.children.push_back(parse_expression());
                expect("]");
                n.span = span_from(n.children.front().span);
                expr = std::move(n);
            } else if (at("(")) {
                Span callee_span = expr.span;
                auto args = parse_call_args();
                expr = make_call(std::move(expr), std::move(args), span_from(callee_span));
            } else if (at("++") || at("--")) {
                std::string op = "x" + std::string(cur().text);
                advance();
                Span s = span_from(expr.span);
                expr = Node(NodeKind::Unary, op, {std::move(expr)}, s);
            } else {
                return expr;
            }
        }
    }

    Node make_member(Node base, std::string const& member, Span s) {
        if (base.kind == NodeKind::Identifier && kBuiltinNamespaces.count(base.text)) {
            if (base.text == "msg" && member == "sender") return Node(NodeKind::MsgSender, {}, {}, s);
            if (base.text == "tx" && member == "origin") return Node(NodeKind::TxOrigin, {}, {}, s);
            return Node(NodeKind::BuiltinVar, base.text + "." + member, {}, s);
        }
        return Node(NodeKind::Member, member, {std::move(base)}, s);
    }

    // Builds a ValueCall from the `.value(v)` option node and the final argument list.
    Node make_value_call(Node option, std::vector<Node> args, Span s) {
        Node target = std::move(option.children[0]);
        Node value = std::move(option.children[1]);
        if (target.kind == NodeKind::MemberCall && target.text == "gas" && !target.children.empty()) {
            Node inner = std::move(target.children[0]);
            target = std::move(inner);
        }
        Node n(NodeKind::ValueCall);
        if (target.kind == NodeKind::Member && !target.children.empty()) {
            n.text = target.text;
            n.children.push_back(std::move(target.children[0]));
        } else {
            n.text = target.kind == NodeKind::Identifier ? target.text : std::string{};
            n.children.push_back(std::move(target));
        }
        n.children.push_back(std::move(value));
        for (auto& a : args) n.children.push_back(std::move(a));
        n.span = s;
        return n;
    }

    Node make_call(Node callee, std::vector<Node> args, Span s) {
        if (callee.kind == NodeKind::Identifier) {
            auto const& name = callee.text;
            if (name == "require") return Node(NodeKind::Require, {}, std::move(args), s);
            if (name == "assert") return Node(NodeKind::Assert, {}, std::move(args), s);
            if (name == "revert") return Node(NodeKind::Revert, {}, std::move(args), s);
            if (name == "selfdestruct" || name == "suicide")
                return Node(NodeKind::Selfdestruct, name, std::move(args), s);
            if (is_elementary_type_name(name) || name == "payable")
                return Node(NodeKind::TypeConversion, name, std::move(args), s);
            return Node(NodeKind::Call, name, std::move(args), s);
        }
        if (callee.kind == NodeKind::BuiltinVar) return Node(NodeKind::Call, callee.text, std::move(args), s);
        if (callee.kind == NodeKind::TypeName) return Node(NodeKind::TypeConversion, callee.text, std::move(args), s);
        if (callee.kind == NodeKind::MemberCall && callee.text == "value" && callee.children.size() == 2)
            return make_value_call(std::move(callee), std::move(args), s);
        if (callee.kind == NodeKind::MemberCall && callee.text == "gas" && callee.children.size() == 2) {
            Node target = std::move(callee.children[0]);
            return make_call(std::move(target), std::move(args), s);
        }
        if (callee.kind == NodeKind::New) {
            callee.children = std::move(args);
            callee.span = s;
            return callee;
        }
        if (callee.kind == NodeKind::Member && !callee.children.empty()) {
            auto const& member = callee.text;
            Node receiver = std::move(callee.children[0]);
            if (member == "transfer" && args.size() == 1) {
                return Node(NodeKind::Transfer, {}, {std::move(receiver), std::move(args[0])}, s);
            }
            NodeKind kind = NodeKind::MemberCall;
            if ((member == "send" && args.size() == 1) || member == "call" || member == "callcode" ||
                member == "delegatecall")
                kind = NodeKind::LowLevelCall;
            Node n(kind, member, {std::move(receiver)}, s);
            for (auto& a : args) n.children.push_back(std::move(a));
            return n;
        }
        Node n(NodeKind::MemberCall, {}, {std::move(callee)}, s);
        for (auto& a : args) n.children.push_back(std::move(a));
        return n;
    }

    Node parse_primary() {
        auto const& tok = cur();
        auto start = tok.span;
        switch (tok.kind) {
            case TokenKind::Number: {
                std::string text(tok.text);
                advance();
                if (is_hex_address(text)) return Node(NodeKind::AddressLit, text, {}, span_from(start));
                if (at_ident() && kNumberUnits.count(cur().text)) {
                    text += " " + std::string(cur().text);
                    advance();
                }
                return Node(NodeKind::NumberLit, text, {}, span_from(start));
            }
            case TokenKind::String:
            case TokenKind::HexString: {
                std::string text;
                while (cur().kind == TokenKind::String || cur().kind == TokenKind::HexString) {
                    auto t = cur().text;
                    auto open = t.find_first_of("\"'");
                    text += std::string(t.substr(open + 1, t.size() - open - 2));
                    advance();
                }
                return Node(NodeKind::StringLit, text, {}, span_from(start));
            }
            case TokenKind::Identifier: {
                std::string name(tok.text);
                if (name == "true" || name == "false") {
                    advance();
                    return Node(NodeKind::BoolLit, name, {}, span_from(start));
                }
                if (name == "new") {
                    advance();
                    std::string type = parse_type();
                    return Node(NodeKind::New, type, {}, span_from(start));
                }
                if (name == "this" || name == "now") {
                    advance();
                    return Node(NodeKind::BuiltinVar, name, {}, span_from(start));
                }
                if (name == "type" && peek_is(1, "(")) {
                    advance();
                    advance();
                    std::string t = parse_type();
                    expect(")");
                    return Node(NodeKind::BuiltinVar, "type(" + t + ")", {}, span_from(start));
                }
                if (kStatementKeywords.count(name) && name != "delete")
                    fail_expected({"expression"});
                advance();
                // elementary array type expressions such as `uint[]` in `new uint[](n)` are handled by
                // parse_type; a bare elementary name followed by '[' ']' is a type.
                if (is_elementary_type_name(name) && at("[") && peek_is(1, "]")) {
                    advance();
                    advance();
                    return Node(NodeKind::TypeName, name + "[]", {}, span_from(start));
                }
                if (name == "address" && at("payable")) {
                    advance();
                    return Node(NodeKind::TypeName, "address", {}, span_from(start));
                }
                return Node(NodeKind::Identifier, name, {}, span_from(start));
            }
            case TokenKind::Punct: {
                if (at("(")) {
                    advance();
                    Node tuple(NodeKind::Tuple);
                    if (!at(")")) {
                        do {
                            if (at(",") || at(")")) {
                                tuple.children.emplace_back(NodeKind::Empty, "", std::vector<Node>{}, cur().span);
                                tuple.children.back().span.end = tuple.children.back().span.begin;
                                continue;
                            }
                            tuple.children.push_back(parse_expression());
                        } while (accept(","));
                    }
                    expect(")");
                    if (tuple.children.size() == 1 && tuple.children[0].kind != NodeKind::Empty) {
                        // parenthesised expression: widen the span to include the parentheses
                        Node inner = std::move(tuple.children[0]);
                        inner.span = span_from(start);
                        return inner;
                    }
                    tuple.span = span_from(start);
                    return tuple;
                }
                if (at("[")) {
                    advance();
                    Node arr(NodeKind::Tuple, "[]");
                    if (!at("]")) {
                        do {
                            arr.children.push_back(parse_expression());
                        } while (accept(","));
                    }
                    expect("]");
                    arr.span = span_from(start);
                    return arr;
                }
                break;
            }
            default:
                break;
        }
        fail_expected({"expression"});
    }

    // ---- name resolution -----------------------------------------------

    struct Scope {
        std::vector<std::unordered_set<std::string>> frames;
        bool declared(std::string const& name) const {
            for (auto const& f : frames)
                if (f.count(name)) return true;
            return false;
        }
    };

    void resolve_contract(ast::ContractDef& c, ast::SourceUnit const& unit) {
        std::unordered_set<std::string> types;
        for (auto const& other : unit.contracts) types.insert(other.name);
        for (auto const& s : c.structs) types.insert(s.name);
        for (auto const& e : c.enums) types.insert(e);
        // structs/enums declared in other contracts are reachable as `C.S`; plain names are rare but
        // harmless to accept.
        for (auto const& other : unit.contracts) {
            for (auto const& s : other.structs) types.insert(s.name);
            for (auto const& e : other.enums) types.insert(e);
        }
        std::unordered_set<std::string> state;
        for (auto const& v : c.state_vars) state.insert(v.name);

        for (auto& v : c.state_vars) {
            if (!v.initializer) continue;
            Scope scope;
            resolve(*v.initializer, scope, state, types);
        }
        for (auto& m : c.modifiers) {
            Scope scope;
            scope.frames.emplace_back();
            for (auto const& p : m.params)
                if (!p.name.empty()) scope.frames.back().insert(p.name);
            resolve(m.body, scope, state, types);
        }
        for (auto& f : c.functions) {
            for (auto const& use : f.applied_modifiers)
                if (!c.find_modifier(use.name)) f.unresolved_modifiers.push_back(use.name);
            Scope scope;
            scope.frames.emplace_back();
            for (auto const& p : f.params)
                if (!p.name.empty()) scope.frames.back().insert(p.name);
            for (auto const& p : f.returns)
                if (!p.name.empty()) scope.frames.back().insert(p.name);
            for (auto& use : f.applied_modifiers)
                for (auto& a : use.args) resolve(a, scope, state, types);
            if (f.body) resolve(*f.body, scope, state, types);
        }
    }

    void resolve(Node& n, Scope& scope, std::unordered_set<std::string> const& state,
                 std::unordered_set<std::string> const& types) {
        switch (n.kind) {
            case NodeKind::Block: {
                scope.frames.emplace_back();
                for (auto& c : n.children) resolve(c, scope, state, types);
                scope.frames.pop_back();
                return;
            }
            case NodeKind::For: {
                scope.frames.emplace_back();
                for (auto& c : n.children) resolve(c, scope, state, types);
                scope.frames.pop_back();
                return;
            }
            case NodeKind::VarDecl: {
                if (n.children.size() > 2) resolve(n.children[2], scope, state, types);
                if (scope.frames.empty()) scope.frames.emplace_back();
                scope.frames.back().insert(n.children[1].text);
                return;
            }
            case NodeKind::Identifier: {
                if (state.count(n.text) && !scope.declared(n.text)) n.kind = NodeKind::StateVarRef;
                return;
            }
            case NodeKind::Call: {
                if (types.count(n.text) && n.children.size() == 1 && !scope.declared(n.text))
                    n.kind = NodeKind::TypeConversion;
                break;
            }
            default:
                break;
        }
        for (auto& c : n.children) resolve(c, scope, state, types);
    }

    std::string_view src_;
    std::string path_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<ast::Diagnostic> diags_;
};

}  // namespace

bool is_elementary_type_name(std::string_view name) {
    static const std::unordered_set<std::string_view> plain{"address", "bool", "string", "bytes", "byte",
                                                            "uint", "int", "var", "fixed", "ufixed"};
    if (plain.count(name)) return true;
    return has_numeric_suffix(name, "uint") || has_numeric_suffix(name, "int") ||
           has_numeric_suffix(name, "bytes");
}

ast::SourceUnit parse_source(std::string_view text, std::string path) {
    return Parser(text, std::move(path)).run();
}

std::vector<FunctionRef> enumerate_functions(ast::SourceUnit const& unit) {
    std::vector<FunctionRef> out;
    for (auto const& c : unit.contracts)
        for (auto const& f : c.functions) out.push_back({&c, &f});
    return out;
}

}  // namespace avscan
