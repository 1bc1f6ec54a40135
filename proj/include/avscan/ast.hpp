#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace avscan::ast {

/// Source range. Lines and columns are 1-based; byte offsets are a half-open
/// range [begin, end) into the original text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;

    bool valid() const { return line > 0 && begin <= end; }
    bool contains(Span const& other) const { return begin <= other.begin && other.end <= end; }
    bool operator==(Span const&) const = default;
};

/// Node kinds shared by statements, expressions and the per-function segment
/// tree. Child layout for each kind is documented next to it.
enum class NodeKind : std::uint8_t {
    // segment scaffolding
    Function,            // [ParamList, ReturnList, ModifierList, Block]; text = name
    ParamList,           // [Param...]
    ReturnList,          // [Param...]
    Param,               // [TypeName, DeclName?]
    ModifierList,        // [ModifierInvocation...]
    ModifierInvocation,  // [args...]; text = modifier name
    TypeName,            // text = canonical type string
    DeclName,            // text = declared identifier

    // statements
    Block,        // [stmt...]
    If,           // [cond, then, else?]
    While,        // [cond, body]
    DoWhile,      // [body, cond]
    For,          // [init, cond, post, body]; missing parts are Empty
    Require,      // [cond, message?]
    Assert,       // [cond]
    Revert,       // [message?]
    Throw,        // []
    Return,       // [expr?]
    Break,
    Continue,
    Emit,         // [args...]; text = event name
    ExprStmt,     // [expr]
    VarDecl,      // [TypeName, DeclName, init?]
    Placeholder,  // `_;` inside modifiers
    Opaque,       // unclassified construct; text = raw source
    Empty,

    // expressions
    Assign,          // [lhs, rhs]; text = operator
    Binary,          // [lhs, rhs]; text = operator
    Unary,           // [operand]; text = operator, postfix forms are "x++" / "x--"
    Conditional,     // [cond, then, else]
    Member,          // [base]; text = member name
    Index,           // [base, index?]
    Call,            // [args...]; text = callee name
    MemberCall,      // [receiver, args...]; text = member name
    LowLevelCall,    // [receiver, args...]; text = send | call | callcode | delegatecall
    Transfer,        // [receiver, amount]
    ValueCall,       // [receiver, value, args...]; text = called member (`call` for raw calls)
    Selfdestruct,    // [beneficiary]; text = selfdestruct | suicide
    MsgSender,
    TxOrigin,
    BuiltinVar,      // text = msg.value, block.number, now, this, ...
    Identifier,      // text = name
    StateVarRef,     // identifier resolved to a contract state variable
    NumberLit,       // text = literal including unit suffix
    AddressLit,      // 40-hex-digit literal
    StringLit,
    BoolLit,
    TypeConversion,  // [arg]; text = target type
    New,             // [args...]; text = type
    Tuple,           // [elems...]
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view name);

bool is_statement_kind(NodeKind kind);

/// Homogeneous AST node. Function bodies, modifier bodies and normalized
/// segments all use this one representation.
struct Node {
    NodeKind kind = NodeKind::Empty;
    std::string text;
    std::vector<Node> children;
    Span span;

    Node() = default;
    Node(NodeKind k, std::string t = {}, std::vector<Node> c = {}, Span s = {})
        : kind(k), text(std::move(t)), children(std::move(c)), span(s) {}

    /// Structural equality on (kind, text, children); spans are ignored.
    bool same_shape(Node const& other) const;
    std::size_t size() const;
};

enum class Visibility : std::uint8_t { Default, Public, External, Internal, Private };
enum class Mutability : std::uint8_t { None, Payable, View, Pure };
enum class FunctionKind : std::uint8_t { Function, Constructor, Fallback, Receive };
enum class ContractKind : std::uint8_t { Contract, Interface, Library };

std::string_view to_string(Visibility v);
std::string_view to_string(Mutability m);

struct Param {
    std::string type;
    std::string name;
    Span span;
};

struct ModifierUse {
    std::string name;
    std::vector<Node> args;
    Span span;
};

struct StateVarDecl {
    std::string type;
    std::string name;
    Visibility visibility = Visibility::Default;
    bool constant = false;
    std::optional<Node> initializer;
    Span span;
};

struct ModifierDef {
    std::string name;
    std::vector<Param> params;
    Node body;
    Span span;
};

struct FunctionDef {
    std::string name;
    FunctionKind kind = FunctionKind::Function;
    std::vector<Param> params;
    std::vector<Param> returns;
    Visibility visibility = Visibility::Default;
    Mutability mutability = Mutability::None;
    std::vector<ModifierUse> applied_modifiers;
    std::vector<std::string> unresolved_modifiers;
    std::optional<Node> body;  // absent for interface declarations
    Span span;

    bool is_public_entry() const {
        return visibility == Visibility::Public || visibility == Visibility::External ||
               visibility == Visibility::Default;
    }
    std::string display_name() const;
};

struct StructDef {
    std::string name;
    std::vector<Param> fields;
    Span span;
};

struct ContractDef {
    std::string name;
    ContractKind kind = ContractKind::Contract;
    std::vector<std::string> bases;
    std::vector<StateVarDecl> state_vars;
    std::vector<FunctionDef> functions;
    std::vector<ModifierDef> modifiers;
    std::vector<StructDef> structs;
    std::vector<std::string> enums;
    Span span;

    StateVarDecl const* find_state_var(std::string_view name) const;
    ModifierDef const* find_modifier(std::string_view name) const;
    FunctionDef const* find_function(std::string_view name) const;
};

struct Diagnostic {
    std::string path;
    int line = 0;
    int col = 0;
    std::string message;

    std::string format() const;
};

struct SourceUnit {
    std::string path;
    std::optional<std::string> pragma;
    std::vector<ContractDef> contracts;
    std::vector<Diagnostic> diagnostics;

    ContractDef const* find_contract(std::string_view name) const;
};

// Tree helpers used throughout the analyses.

template <typename Fn>
void walk(Node const& node, Fn&& fn) {
    fn(node);
    for (auto const& child : node.children) walk(child, fn);
}

bool contains_kind(Node const& node, NodeKind kind);

/// Root variable name of an lvalue/access chain (`a[i].b` -> "a"), empty when the
/// chain is not rooted in a named variable.
std::string access_root(Node const& node);
Node const* access_root_node(Node const& node);

/// Compact source-like rendering, used for equality of access paths and for
/// debugging output.
std::string render(Node const& node);

}  // namespace avscan::ast
