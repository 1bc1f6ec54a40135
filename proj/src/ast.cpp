#include "avscan/ast.hpp"

#include <array>
#include <utility>

namespace avscan::ast {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 50> kKindNames{{
    {NodeKind::Function, "Function"},
    {NodeKind::ParamList, "ParamList"},
    {NodeKind::ReturnList, "ReturnList"},
    {NodeKind::Param, "Param"},
    {NodeKind::ModifierList, "ModifierList"},
    {NodeKind::ModifierInvocation, "ModifierInvocation"},
    {NodeKind::TypeName, "TypeName"},
    {NodeKind::DeclName, "DeclName"},
    {NodeKind::Block, "Block"},
    {NodeKind::If, "If"},
    {NodeKind::While, "While"},
    {NodeKind::DoWhile, "DoWhile"},
    {NodeKind::For, "For"},
    {NodeKind::Require, "Require"},
    {NodeKind::Assert, "Assert"},
    {NodeKind::Revert, "Revert"},
    {NodeKind::Throw, "Throw"},
    {NodeKind::Return, "Return"},
    {NodeKind::Break, "Break"},
    {NodeKind::Continue, "Continue"},
    {NodeKind::Emit, "Emit"},
    {NodeKind::ExprStmt, "ExprStmt"},
    {NodeKind::VarDecl, "VarDecl"},
    {NodeKind::Placeholder, "Placeholder"},
    {NodeKind::Opaque, "Opaque"},
    {NodeKind::Empty, "Empty"},
    {NodeKind::Assign, "Assign"},
    {NodeKind::Binary, "Binary"},
    {NodeKind::Unary, "Unary"},
    {NodeKind::Conditional, "Conditional"},
    {NodeKind::Member, "Member"},
    {NodeKind::Index, "Index"},
    {NodeKind::Call, "Call"},
    {NodeKind::MemberCall, "MemberCall"},
    {NodeKind::LowLevelCall, "LowLevelCall"},
    {NodeKind::Transfer, "Transfer"},
    {NodeKind::ValueCall, "ValueCall"},
    {NodeKind::Selfdestruct, "Selfdestruct"},
    {NodeKind::MsgSender, "MsgSender"},
    {NodeKind::TxOrigin, "TxOrigin"},
    {NodeKind::BuiltinVar, "BuiltinVar"},
    {NodeKind::Identifier, "Identifier"},
    {NodeKind::StateVarRef, "StateVarRef"},
    {NodeKind::NumberLit, "NumberLit"},
    {NodeKind::AddressLit, "AddressLit"},
    {NodeKind::StringLit, "StringLit"},
    {NodeKind::BoolLit, "BoolLit"},
    {NodeKind::TypeConversion, "TypeConversion"},
    {NodeKind::New, "New"},
    {NodeKind::Tuple, "Tuple"},
}};

}  // namespace

std::string_view to_string(NodeKind kind) {
    for (auto const& [k, name] : kKindNames)
        if (k == kind) return name;
    return "Unknown";
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
    for (auto const& [k, n] : kKindNames)
        if (n == name) return k;
    return std::nullopt;
}

bool is_statement_kind(NodeKind kind) {
    switch (kind) {
        case NodeKind::Block:
        case NodeKind::If:
        case NodeKind::While:
        case NodeKind::DoWhile:
        case NodeKind::For:
        case NodeKind::Require:
        case NodeKind::Assert:
        case NodeKind::Revert:
        case NodeKind::Throw:
        case NodeKind::Return:
        case NodeKind::Break:
        case NodeKind::Continue:
        case NodeKind::Emit:
        case NodeKind::ExprStmt:
        case NodeKind::VarDecl:
        case NodeKind::Placeholder:
        case NodeKind::Opaque:
            return true;
        default:
            return false;
    }
}

bool Node::same_shape(Node const& other) const {
    if (kind != other.kind || text != other.text || children.size() != other.children.size())
        return false;
    for (std::size_t i = 0; i < children.size(); ++i)
        if (!children[i].same_shape(other.children[i])) return false;
    return true;
}

std::size_t Node::size() const {
    std::size_t n = 1;
    for (auto const& c : children) n += c.size();
    return n;
}

std::string_view to_string(Visibility v) {
    switch (v) {
        case Visibility::Public: return "public";
        case Visibility::External: return "external";
        case Visibility::Internal: return "internal";
        case Visibility::Private: return "private";
        case Visibility::Default: break;
    }
    return "default";
}

std::string_view to_string(Mutability m) {
    switch (m) {
        case Mutability::Payable: return "payable";
        case Mutability::View: return "view";
        case Mutability::Pure: return "pure";
        case Mutability::None: break;
    }
    return "none";
}

std::string FunctionDef::display_name() const {
    switch (kind) {
        case FunctionKind::Constructor: return "constructor";
        case FunctionKind::Fallback: return name.empty() ? "fallback" : name;
        case FunctionKind::Receive: return "receive";
        case FunctionKind::Function: break;
    }
    return name;
}

StateVarDecl const* ContractDef::find_state_var(std::string_view n) const {
    for (auto const& v : state_vars)
        if (v.name == n) return &v;
    return nullptr;
}

ModifierDef const* ContractDef::find_modifier(std::string_view n) const {
    for (auto const& m : modifiers)
        if (m.name == n) return &m;
    return nullptr;
}

FunctionDef const* ContractDef::find_function(std::string_view n) const {
    for (auto const& f : functions)
        if (f.name == n) return &f;
    return nullptr;
}

ContractDef const* SourceUnit::find_contract(std::string_view n) const {
    for (auto const& c : contracts)
        if (c.name == n) return &c;
    return nullptr;
}

std::string Diagnostic::format() const {
    return path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message;
}

bool contains_kind(Node const& node, NodeKind kind) {
    if (node.kind == kind) return true;
    for (auto const& c : node.children)
        if (contains_kind(c, kind)) return true;
    return false;
}

Node const* access_root_node(Node const& node) {
    switch (node.kind) {
        case NodeKind::Identifier:
        case NodeKind::StateVarRef:
        case NodeKind::MsgSender:
        case NodeKind::TxOrigin:
        case NodeKind::BuiltinVar:
            return &node;
        case NodeKind::Member:
        case NodeKind::Index:
            return node.children.empty() ? nullptr : access_root_node(node.children.front());
        case NodeKind::TypeConversion:
            return node.children.size() == 1 ? access_root_node(node.children.front()) : nullptr;
        default:
            return nullptr;
    }
}

std::string access_root(Node const& node) {
    auto const* root = access_root_node(node);
    if (!root) return {};
    if (root->kind == NodeKind::Identifier || root->kind == NodeKind::StateVarRef) return root->text;
    return {};
}

namespace {

std::string join_args(std::vector<Node> const& nodes, std::size_t from) {
    std::string out;
    for (std::size_t i = from; i < nodes.size(); ++i) {
        if (i > from) out += ", ";
        out += render(nodes[i]);
    }
    return out;
}

}  // namespace

std::string render(Node const& n) {
    auto child = [&](std::size_t i) -> std::string {
        return i < n.children.size() ? render(n.children[i]) : std::string{};
    };
    switch (n.kind) {
        case NodeKind::Identifier:
        case NodeKind::StateVarRef:
        case NodeKind::NumberLit:
        case NodeKind::AddressLit:
        case NodeKind::BoolLit:
        case NodeKind::BuiltinVar:
        case NodeKind::TypeName:
        case NodeKind::DeclName:
            return n.text;
        case NodeKind::StringLit: return "\"" + n.text + "\"";
        case NodeKind::MsgSender: return "msg.sender";
        case NodeKind::TxOrigin: return "tx.origin";
        case NodeKind::Member: return child(0) + "." + n.text;
        case NodeKind::Index: return child(0) + "[" + child(1) + "]";
        case NodeKind::Call: return n.text + "(" + join_args(n.children, 0) + ")";
        case NodeKind::MemberCall:
        case NodeKind::LowLevelCall:
            return child(0) + "." + n.text + "(" + join_args(n.children, 1) + ")";
        case NodeKind::Transfer: return child(0) + ".transfer(" + child(1) + ")";
        case NodeKind::ValueCall:
            return child(0) + "." + n.text + ".value(" + child(1) + ")(" + join_args(n.children, 2) + ")";
        case NodeKind::Selfdestruct: return n.text + "(" + child(0) + ")";
        case NodeKind::TypeConversion: return n.text + "(" + child(0) + ")";
        case NodeKind::New: return "new " + n.text + "(" + join_args(n.children, 0) + ")";
        case NodeKind::Tuple: return "(" + join_args(n.children, 0) + ")";
        case NodeKind::Assign:
        case NodeKind::Binary: return child(0) + " " + n.text + " " + child(1);
        case NodeKind::Unary:
            if (n.text.size() > 1 && n.text.front() == 'x') return child(0) + n.text.substr(1);
            return n.text + child(0);
        case NodeKind::Conditional: return child(0) + " ? " + child(1) + " : " + child(2);
        case NodeKind::Require: return "require(" + join_args(n.children, 0) + ")";
        case NodeKind::Assert: return "assert(" + child(0) + ")";
        case NodeKind::Revert: return "revert(" + join_args(n.children, 0) + ")";
        case NodeKind::Throw: return "throw";
        case NodeKind::Return: return "return " + child(0);
        case NodeKind::ExprStmt: return child(0);
        case NodeKind::VarDecl: {
            std::string out = child(0) + " " + child(1);
            if (n.children.size() > 2) out += " = " + child(2);
            return out;
        }
        case NodeKind::Emit: return "emit " + n.text + "(" + join_args(n.children, 0) + ")";
        default: break;
    }
    std::string out{to_string(n.kind)};
    if (!n.text.empty()) out += ":" + n.text;
    return out;
}

}  // namespace avscan::ast
