#pragma once

#include "avscan/ast.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace avscan {

enum class Opcode {
    DECL,
    ASSIGN,
    BINOP,
    READ_STATE,
    WRITE_STATE,
    REQUIRE,
    ASSERT,
    IF,
    CALL_BUILTIN,
    CALL_USER,
    RETURN,
    REVERT
};

std::string_view to_string(Opcode op);

enum class OperandKind { Var, State, Lit, Addr, Bool, Builtin, Temp, Placeholder };

struct Operand {
    OperandKind kind = OperandKind::Var;
    std::string text;

    bool is_state() const { return kind == OperandKind::State; }
    bool operator==(Operand const&) const = default;
};

inline constexpr char kDestPlaceholder[] = "*DEST*";
inline constexpr char kValuePlaceholder[] = "*VALUE*";

struct IrInstruction {
    Opcode op = Opcode::DECL;
    std::string sub;  // CALL_* callee, BINOP operator
    std::vector<Operand> operands;
    ast::Span span;   // span of the owning statement

    /// transfer / send / value: the money-transfer family that compares equal
    /// regardless of sub-tag.
    bool is_money_send() const;
    std::string render() const;
};

/// Opcode, normalized operands and state markers; `transfer`, `send` and
/// `value` calls compare equal to each other.
bool same_instruction(IrInstruction const& a, IrInstruction const& b);
/// Canonical key with the equality above: equal keys iff same_instruction.
std::string instruction_key(IrInstruction const& ins);

enum class EdgeKind { Seq, True, False, LoopBack };
std::string_view to_string(EdgeKind k);

enum class CfgNodeRole { Entry, Exit, RevertSink, Statement, Condition, ForInit, ForPost };

struct CfgNode {
    std::size_t id = 0;
    CfgNodeRole role = CfgNodeRole::Statement;
    std::vector<IrInstruction> ir;
    ast::Span span;
    ast::Node const* stmt = nullptr;  // owning statement (loop/if node for Condition)
};

struct CfgEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    EdgeKind kind = EdgeKind::Seq;
};

struct Cfg {
    std::vector<CfgNode> nodes;
    std::vector<CfgEdge> edges;
    std::size_t entry = 0;
    std::size_t exit = 1;
    std::size_t revert_sink = 2;

    std::vector<std::size_t> successors(std::size_t id, bool skip_back_edges = false) const;
    /// dom[n] = immediate dominator, entry maps to itself, unreachable nodes to npos.
    std::vector<std::size_t> immediate_dominators() const;
    bool dominates(std::vector<std::size_t> const& idom, std::size_t a, std::size_t b) const;
    std::vector<bool> reachable() const;
};

class UnsupportedConstruct : public std::runtime_error {
public:
    UnsupportedConstruct(ast::Span span, std::string what)
        : std::runtime_error(std::move(what)), span_(span) {}
    ast::Span const& span() const { return span_; }

private:
    ast::Span span_;
};

/// Lowers a statement list. In strict mode an Opaque statement raises
/// UnsupportedConstruct; otherwise it becomes an opaque CALL_USER.
Cfg build_cfg(std::vector<ast::Node> const& statements, bool strict = true);
Cfg build_cfg(ast::FunctionDef const& f, bool strict = true);

Operand normalize_operand(Operand const& op);
void normalize_instruction(IrInstruction& ins);
Cfg normalize_ir(Cfg cfg);

struct IrItem {
    IrInstruction ins;
    std::size_t node = 0;
};

struct IrSequence {
    std::vector<IrItem> items;
    std::string origin;

    std::size_t size() const { return items.size(); }
};

/// Removes loop-back edges and emits nodes in breadth-first order from the
/// entry, visiting successors in ascending id order.
IrSequence flatten(Cfg const& cfg, std::string origin = {});
std::vector<std::size_t> bfs_order(Cfg const& cfg);

std::string to_dot(Cfg const& cfg, std::string const& name);
nlohmann::json to_json(IrInstruction const& ins);
IrInstruction instruction_from_json(nlohmann::json const& j);
nlohmann::json to_json(IrSequence const& seq);
IrSequence sequence_from_json(nlohmann::json const& j);

}  // namespace avscan
