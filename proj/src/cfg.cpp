#include "avscan/cfg.hpp"

#include "avscan/normalize.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

namespace avscan {

using ast::Node;
using ast::NodeKind;
using nlohmann::json;

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

constexpr std::pair<Opcode, std::string_view> kOpcodeNames[] = {
    {Opcode::DECL, "DECL"},
    {Opcode::ASSIGN, "ASSIGN"},
    {Opcode::BINOP, "BINOP"},
    {Opcode::READ_STATE, "READ_STATE"},
    {Opcode::WRITE_STATE, "WRITE_STATE"},
    {Opcode::REQUIRE, "REQUIRE"},
    {Opcode::ASSERT, "ASSERT"},
    {Opcode::IF, "IF"},
    {Opcode::CALL_BUILTIN, "CALL_BUILTIN"},
    {Opcode::CALL_USER, "CALL_USER"},
    {Opcode::RETURN, "RETURN"},
    {Opcode::REVERT, "REVERT"},
};

constexpr std::pair<OperandKind, std::string_view> kOperandKindNames[] = {
    {OperandKind::Var, "var"},         {OperandKind::State, "state"}, {OperandKind::Lit, "lit"},
    {OperandKind::Addr, "addr"},       {OperandKind::Bool, "bool"},   {OperandKind::Builtin, "builtin"},
    {OperandKind::Temp, "temp"},       {OperandKind::Placeholder, "placeholder"},
};

std::string_view kind_name(OperandKind k) {
    for (auto const& [kind, name] : kOperandKindNames)
        if (kind == k) return name;
    return "var";
}

OperandKind kind_from_name(std::string_view n) {
    for (auto const& [kind, name] : kOperandKindNames)
        if (name == n) return kind;
    throw std::runtime_error("unknown operand kind '" + std::string(n) + "'");
}

Opcode opcode_from_name(std::string_view n) {
    for (auto const& [op, name] : kOpcodeNames)
        if (name == n) return op;
    throw std::runtime_error("unknown opcode '" + std::string(n) + "'");
}

// Lowers expressions and simple statements into a flat instruction list.
class Lowerer {
public:
    Lowerer(std::vector<IrInstruction>& out, ast::Span span, bool strict, int& tmp_counter)
        : out_(out), span_(span), strict_(strict), tmp_(tmp_counter) {}

    void statement(Node const& s) {
        switch (s.kind) {
            case NodeKind::ExprStmt:
                rvalue(s.children.at(0));
                return;
            case NodeKind::VarDecl: {
                std::vector<Operand> ops{{OperandKind::Var, s.children.at(1).text}};
                if (s.children.size() > 2) ops.push_back(rvalue(s.children[2]));
                emit(Opcode::DECL, {}, std::move(ops));
                return;
            }
            case NodeKind::Require:
                emit(Opcode::REQUIRE, {}, {condition(s)});
                return;
            case NodeKind::Assert:
                emit(Opcode::ASSERT, {}, {condition(s)});
                return;
            case NodeKind::Revert:
            case NodeKind::Throw:
                emit(Opcode::REVERT, {}, {});
                return;
            case NodeKind::Return: {
                std::vector<Operand> ops;
                if (!s.children.empty()) ops.push_back(rvalue(s.children[0]));
                emit(Opcode::RETURN, {}, std::move(ops));
                return;
            }
            case NodeKind::Emit: {
                std::vector<Operand> ops;
                for (auto const& a : s.children) ops.push_back(rvalue(a));
                emit(Opcode::CALL_USER, s.text, std::move(ops));
                return;
            }
            case NodeKind::Placeholder:
                emit(Opcode::CALL_USER, "_", {});
                return;
            case NodeKind::Opaque:
                opaque(s);
                return;
            default:
                rvalue(s);
                return;
        }
    }

    void branch(Node const& cond) {
        if (cond.kind == NodeKind::Empty) {
            emit(Opcode::IF, {}, {{OperandKind::Bool, "true"}});
            return;
        }
        emit(Opcode::IF, {}, {rvalue(cond)});
    }

private:
    Operand condition(Node const& s) {
        if (s.children.empty()) return {OperandKind::Bool, "true"};
        return rvalue(s.children[0]);
    }

    Operand emit(Opcode op, std::string sub, std::vector<Operand> operands) {
        IrInstruction ins;
        ins.op = op;
        ins.sub = std::move(sub);
        ins.operands = std::move(operands);
        ins.span = span_;
        out_.push_back(std::move(ins));
        return {OperandKind::Temp, "TMP_" + std::to_string(tmp_++)};
    }

    void opaque(Node const& n) {
        if (strict_) throw UnsupportedConstruct(n.span, "unsupported construct at line " + std::to_string(n.span.line));
        emit(Opcode::CALL_USER, "opaque", {});
    }

    // Evaluates index expressions along an access chain for their effects.
    void access_effects(Node const& n) {
        if (n.kind == NodeKind::Member) {
            access_effects(n.children.at(0));
        } else if (n.kind == NodeKind::Index) {
            access_effects(n.children.at(0));
            if (n.children.size() > 1) rvalue(n.children[1]);
        } else if (n.kind == NodeKind::TypeConversion && n.children.size() == 1) {
            access_effects(n.children[0]);
        }
    }

    Operand access(Node const& n) {
        Node const* root = ast::access_root_node(n);
        if (!root) {
            // chain rooted in a call result or other expression
            Node const* base = &n;
            while ((base->kind == NodeKind::Member || base->kind == NodeKind::Index) && !base->children.empty())
                base = &base->children[0];
            Operand b = rvalue(*base);
            access_effects(n);
            return b;
        }
        access_effects(n);
        switch (root->kind) {
            case NodeKind::StateVarRef:
                return emit(Opcode::READ_STATE, {}, {{OperandKind::State, root->text}});
            case NodeKind::Identifier:
                return {OperandKind::Var, root->text};
            default:
                return {OperandKind::Builtin, ast::render(n)};
        }
    }

    void store(Node const& lhs, Operand value) {
        switch (lhs.kind) {
            case NodeKind::Identifier:
                emit(Opcode::ASSIGN, {}, {{OperandKind::Var, lhs.text}, std::move(value)});
                return;
            case NodeKind::StateVarRef:
                emit(Opcode::ASSIGN, {}, {{OperandKind::State, lhs.text}, std::move(value)});
                return;
            case NodeKind::Member:
            case NodeKind::Index: {
                access_effects(lhs);
                Node const* root = ast::access_root_node(lhs);
                if (root && root->kind == NodeKind::StateVarRef) {
                    emit(Opcode::WRITE_STATE, {}, {{OperandKind::State, root->text}, std::move(value)});
                } else if (root && root->kind == NodeKind::Identifier) {
                    emit(Opcode::ASSIGN, {}, {{OperandKind::Var, root->text}, std::move(value)});
                } else {
                    emit(Opcode::ASSIGN, {}, {access(lhs), std::move(value)});
                }
                return;
            }
            case NodeKind::Tuple:
                for (auto const& e : lhs.children)
                    if (e.kind != NodeKind::Empty) store(e, value);
                return;
            default:
                emit(Opcode::ASSIGN, {}, {rvalue(lhs), std::move(value)});
                return;
        }
    }

    std::vector<Operand> args_from(Node const& n, std::size_t first) {
        std::vector<Operand> ops;
        for (std::size_t i = first; i < n.children.size(); ++i) ops.push_back(rvalue(n.children[i]));
        return ops;
    }

public:
    Operand rvalue(Node const& n) {
        switch (n.kind) {
            case NodeKind::Identifier: return {OperandKind::Var, n.text};
            case NodeKind::StateVarRef: return {OperandKind::State, n.text};
            case NodeKind::NumberLit:
            case NodeKind::StringLit: return {OperandKind::Lit, n.text};
            case NodeKind::AddressLit: return {OperandKind::Addr, n.text};
            case NodeKind::BoolLit: return {OperandKind::Bool, n.text};
            case NodeKind::MsgSender: return {OperandKind::Builtin, "msg.sender"};
            case NodeKind::TxOrigin: return {OperandKind::Builtin, "tx.origin"};
            case NodeKind::BuiltinVar: return {OperandKind::Builtin, n.text};
            case NodeKind::Member:
            case NodeKind::Index: return access(n);
            case NodeKind::Call: {
                auto ops = args_from(n, 0);
                if (is_builtin_function(n.text)) return emit(Opcode::CALL_BUILTIN, n.text, std::move(ops));
                return emit(Opcode::CALL_USER, n.text, std::move(ops));
            }
            case NodeKind::MemberCall: {
                auto ops = args_from(n, 0);
                if (is_builtin_member(n.text)) return emit(Opcode::CALL_BUILTIN, n.text, std::move(ops));
                return emit(Opcode::CALL_USER, n.text, std::move(ops));
            }
            case NodeKind::LowLevelCall: return emit(Opcode::CALL_BUILTIN, n.text, args_from(n, 0));
            case NodeKind::Transfer: {
                Operand t = emit(Opcode::CALL_BUILTIN, "transfer", args_from(n, 0));
                emit(Opcode::REQUIRE, {}, {t});
                return t;
            }
            case NodeKind::ValueCall: return emit(Opcode::CALL_BUILTIN, "value", args_from(n, 0));
            case NodeKind::Selfdestruct: return emit(Opcode::CALL_BUILTIN, "selfdestruct", args_from(n, 0));
            case NodeKind::Binary: {
                auto ops = args_from(n, 0);
                return emit(Opcode::BINOP, n.text, std::move(ops));
            }
            case NodeKind::Unary: {
                Operand v = rvalue(n.children.at(0));
                if (n.text == "delete") {
                    store(n.children[0], {OperandKind::Lit, "0"});
                    return v;
                }
                Operand t = emit(Opcode::BINOP, n.text, {v});
                if (n.text.find("++") != std::string::npos || n.text.find("--") != std::string::npos)
                    store(n.children[0], t);
                return t;
            }
            case NodeKind::Assign: {
                if (n.text == "=") {
                    Operand v = rvalue(n.children.at(1));
                    store(n.children[0], v);
                    return v;
                }
                Operand cur = rvalue(n.children.at(0));
                Operand r = rvalue(n.children.at(1));
                Operand t = emit(Opcode::BINOP, n.text.substr(0, n.text.size() - 1), {cur, r});
                store(n.children[0], t);
                return t;
            }
            case NodeKind::Conditional: return emit(Opcode::BINOP, "?:", args_from(n, 0));
            case NodeKind::TypeConversion:
                if (n.children.size() == 1) return rvalue(n.children[0]);
                return emit(Opcode::CALL_BUILTIN, n.text, args_from(n, 0));
            case NodeKind::New: return emit(Opcode::CALL_BUILTIN, "new", args_from(n, 0));
            case NodeKind::Tuple: {
                auto ops = args_from(n, 0);
                if (ops.size() == 1) return ops[0];
                return emit(Opcode::BINOP, "()", std::move(ops));
            }
            case NodeKind::Require:
            case NodeKind::Assert:
            case NodeKind::Revert:
                statement(n);
                return {OperandKind::Lit, ""};
            case NodeKind::Opaque:
                opaque(n);
                return {OperandKind::Lit, ""};
            default:
                return {OperandKind::Lit, n.text};
        }
    }

private:
    std::vector<IrInstruction>& out_;
    ast::Span span_;
    bool strict_;
    int& tmp_;
};

class Builder {
public:
    explicit Builder(bool strict) : strict_(strict) {
        add_node(CfgNodeRole::Entry, nullptr, {});
        add_node(CfgNodeRole::Exit, nullptr, {});
        add_node(CfgNodeRole::RevertSink, nullptr, {});
    }

    Cfg run(std::vector<Node> const& stmts) {
        std::vector<Pending> preds{{cfg_.entry, EdgeKind::Seq}};
        for (auto const& s : stmts) preds = build(s, std::move(preds));
        connect(preds, cfg_.exit);
        classify_back_edges();
        return std::move(cfg_);
    }

private:
    struct Pending {
        std::size_t node;
        EdgeKind kind;
    };
    struct Loop {
        std::vector<Pending> breaks;
        std::vector<Pending> continues;
    };

    std::size_t add_node(CfgNodeRole role, Node const* stmt, ast::Span span) {
        CfgNode n;
        n.id = cfg_.nodes.size();
        n.role = role;
        n.stmt = stmt;
        n.span = span;
        cfg_.nodes.push_back(std::move(n));
        return cfg_.nodes.back().id;
    }

    void connect(std::vector<Pending> const& preds, std::size_t to) {
        for (auto const& p : preds) cfg_.edges.push_back({p.node, to, p.kind});
    }

    std::size_t simple(Node const& s, CfgNodeRole role, std::vector<Pending> const& preds) {
        std::size_t id = add_node(role, &s, s.span);
        Lowerer(cfg_.nodes[id].ir, s.span, strict_, tmp_).statement(s);
        connect(preds, id);
        return id;
    }

    std::size_t condition(Node const& owner, Node const& cond, std::vector<Pending> const& preds) {
        ast::Span span = cond.kind == NodeKind::Empty ? owner.span : cond.span;
        std::size_t id = add_node(CfgNodeRole::Condition, &owner, span);
        Lowerer(cfg_.nodes[id].ir, span, strict_, tmp_).branch(cond);
        connect(preds, id);
        return id;
    }

    std::vector<Pending> build(Node const& s, std::vector<Pending> preds) {
        if (preds.empty()) return {};  // unreachable code
        switch (s.kind) {
            case NodeKind::Block:
                for (auto const& c : s.children) preds = build(c, std::move(preds));
                return preds;
            case NodeKind::If: {
                std::size_t hdr = condition(s, s.children.at(0), preds);
                auto out = build(s.children.at(1), {{hdr, EdgeKind::True}});
                std::vector<Pending> other{{hdr, EdgeKind::False}};
                if (s.children.size() > 2) other = build(s.children[2], std::move(other));
                out.insert(out.end(), other.begin(), other.end());
                return out;
            }
            case NodeKind::While: {
                std::size_t hdr = condition(s, s.children.at(0), preds);
                loops_.emplace_back();
                auto body = build(s.children.at(1), {{hdr, EdgeKind::True}});
                connect(body, hdr);
                Loop loop = std::move(loops_.back());
                loops_.pop_back();
                connect(loop.continues, hdr);
                std::vector<Pending> out{{hdr, EdgeKind::False}};
                out.insert(out.end(), loop.breaks.begin(), loop.breaks.end());
                return out;
            }
            case NodeKind::DoWhile: {
                std::size_t first = cfg_.nodes.size();
                loops_.emplace_back();
                auto body = build(s.children.at(0), preds);
                Loop loop = std::move(loops_.back());
                loops_.pop_back();
                std::size_t cond = condition(s, s.children.at(1), body);
                connect(loop.continues, cond);
                cfg_.edges.push_back({cond, first < cond ? first : cond, EdgeKind::True});
                std::vector<Pending> out{{cond, EdgeKind::False}};
                out.insert(out.end(), loop.breaks.begin(), loop.breaks.end());
                return out;
            }
            case NodeKind::For: {
                Node const& init = s.children.at(0);
                if (init.kind != NodeKind::Empty) {
                    std::size_t id = simple(init, CfgNodeRole::ForInit, preds);
                    preds = {{id, EdgeKind::Seq}};
                }
                std::size_t hdr = condition(s, s.children.at(1), preds);
                loops_.emplace_back();
                auto body = build(s.children.at(3), {{hdr, EdgeKind::True}});
                Loop loop = std::move(loops_.back());
                loops_.pop_back();
                body.insert(body.end(), loop.continues.begin(), loop.continues.end());
                Node const& post = s.children.at(2);
                if (post.kind != NodeKind::Empty && !body.empty()) {
                    std::size_t id = add_node(CfgNodeRole::ForPost, &post, post.span);
                    Lowerer(cfg_.nodes[id].ir, post.span, strict_, tmp_).rvalue(post);
                    connect(body, id);
                    cfg_.edges.push_back({id, hdr, EdgeKind::Seq});
                } else {
                    connect(body, hdr);
                }
                std::vector<Pending> out{{hdr, EdgeKind::False}};
                out.insert(out.end(), loop.breaks.begin(), loop.breaks.end());
                return out;
            }
            case NodeKind::Break:
                if (!loops_.empty()) {
                    loops_.back().breaks.insert(loops_.back().breaks.end(), preds.begin(), preds.end());
                    return {};
                }
                return preds;
            case NodeKind::Continue:
                if (!loops_.empty()) {
                    loops_.back().continues.insert(loops_.back().continues.end(), preds.begin(), preds.end());
                    return {};
                }
                return preds;
            case NodeKind::Require:
            case NodeKind::Assert: {
                std::size_t id = simple(s, CfgNodeRole::Statement, preds);
                cfg_.edges.push_back({id, cfg_.revert_sink, EdgeKind::False});
                return {{id, EdgeKind::True}};
            }
            case NodeKind::Revert:
            case NodeKind::Throw: {
                std::size_t id = simple(s, CfgNodeRole::Statement, preds);
                cfg_.edges.push_back({id, cfg_.revert_sink, EdgeKind::Seq});
                return {};
            }
            case NodeKind::Return: {
                std::size_t id = simple(s, CfgNodeRole::Statement, preds);
                cfg_.edges.push_back({id, cfg_.exit, EdgeKind::Seq});
                return {};
            }
            case NodeKind::Empty:
                return preds;
            default: {
                std::size_t id = simple(s, CfgNodeRole::Statement, preds);
                return {{id, EdgeKind::Seq}};
            }
        }
    }

    void classify_back_edges() {
        auto idom = cfg_.immediate_dominators();
        for (auto& e : cfg_.edges)
            if (idom[e.from] != npos && cfg_.dominates(idom, e.to, e.from)) e.kind = EdgeKind::LoopBack;
    }

    Cfg cfg_;
    bool strict_;
    int tmp_ = 0;
    std::vector<Loop> loops_;
};

}  // namespace

std::string_view to_string(Opcode op) {
    for (auto const& [o, name] : kOpcodeNames)
        if (o == op) return name;
    return "?";
}

std::string_view to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Seq: return "seq";
        case EdgeKind::True: return "true";
        case EdgeKind::False: return "false";
        case EdgeKind::LoopBack: return "loop-back";
    }
    return "?";
}

bool IrInstruction::is_money_send() const {
    return op == Opcode::CALL_BUILTIN && (sub == "transfer" || sub == "send" || sub == "value");
}

std::string IrInstruction::render() const {
    std::string out(to_string(op));
    if (!sub.empty()) out += "(" + sub + ")";
    for (std::size_t i = 0; i < operands.size(); ++i) {
        out += i ? ", " : " ";
        auto const& o = operands[i];
        out += o.text;
        if (o.is_state()) out += "@state";
    }
    return out;
}

std::string instruction_key(IrInstruction const& ins) {
    std::string key(to_string(ins.op));
    key += '|';
    key += ins.is_money_send() ? std::string("moneysend") : ins.sub;
    for (auto const& o : ins.operands) {
        key += '|';
        key += kind_name(o.kind);
        key += ':';
        key += o.text;
    }
    return key;
}

bool same_instruction(IrInstruction const& a, IrInstruction const& b) {
    if (a.op != b.op) return false;
    if (!(a.is_money_send() && b.is_money_send()) && a.sub != b.sub) return false;
    return a.operands == b.operands;
}

std::vector<std::size_t> Cfg::successors(std::size_t id, bool skip_back_edges) const {
    std::vector<std::size_t> out;
    for (auto const& e : edges)
        if (e.from == id && !(skip_back_edges && e.kind == EdgeKind::LoopBack)) out.push_back(e.to);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<bool> Cfg::reachable() const {
    std::vector<bool> seen(nodes.size(), false);
    std::vector<std::size_t> stack{entry};
    seen[entry] = true;
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        for (auto s : successors(n))
            if (!seen[s]) {
                seen[s] = true;
                stack.push_back(s);
            }
    }
    return seen;
}

std::vector<std::size_t> Cfg::immediate_dominators() const {
    std::size_t n = nodes.size();
    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    for (auto const& e : edges) {
        succ[e.from].push_back(e.to);
        pred[e.to].push_back(e.from);
    }
    for (auto& s : succ) std::sort(s.begin(), s.end());
    // reverse postorder by iterative DFS
    std::vector<std::size_t> post;
    std::vector<int> state(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{entry, 0}};
    state[entry] = 1;
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < succ[node].size()) {
            std::size_t next = succ[node][idx++];
            if (!state[next]) {
                state[next] = 1;
                stack.emplace_back(next, 0);
            }
        } else {
            post.push_back(node);
            stack.pop_back();
        }
    }
    std::vector<std::size_t> order_index(n, npos);
    for (std::size_t i = 0; i < post.size(); ++i) order_index[post[i]] = i;
    std::vector<std::size_t> idom(n, npos);
    idom[entry] = entry;
    auto intersect = [&](std::size_t a, std::size_t b) {
        while (a != b) {
            while (order_index[a] < order_index[b]) a = idom[a];
            while (order_index[b] < order_index[a]) b = idom[b];
        }
        return a;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = post.rbegin(); it != post.rend(); ++it) {
            std::size_t b = *it;
            if (b == entry) continue;
            std::size_t new_idom = npos;
            for (auto p : pred[b]) {
                if (idom[p] == npos) continue;
                new_idom = new_idom == npos ? p : intersect(p, new_idom);
            }
            if (new_idom != npos && idom[b] != new_idom) {
                idom[b] = new_idom;
                changed = true;
            }
        }
    }
    return idom;
}

bool Cfg::dominates(std::vector<std::size_t> const& idom, std::size_t a, std::size_t b) const {
    if (idom[b] == npos) return false;
    while (true) {
        if (a == b) return true;
        if (b == entry) return false;
        b = idom[b];
    }
}

Cfg build_cfg(std::vector<Node> const& statements, bool strict) { return Builder(strict).run(statements); }

Cfg build_cfg(ast::FunctionDef const& f, bool strict) {
    static const std::vector<Node> empty;
    return Builder(strict).run(f.body ? f.body->children : empty);
}

Operand normalize_operand(Operand const& op) {
    switch (op.kind) {
        case OperandKind::Var:
        case OperandKind::State:
        case OperandKind::Lit: return {op.kind, kWildcard};
        case OperandKind::Addr: return {op.kind, kAddrWildcard};
        case OperandKind::Temp: return {op.kind, "TMP"};
        default: return op;
    }
}

void normalize_instruction(IrInstruction& ins) {
    for (auto& o : ins.operands) o = normalize_operand(o);
    if (ins.is_money_send()) {
        if (!ins.operands.empty() && ins.operands[0].kind != OperandKind::Builtin &&
            ins.operands[0].kind != OperandKind::Addr)
            ins.operands[0] = {OperandKind::Placeholder, kDestPlaceholder};
        if (ins.operands.size() > 1 && ins.operands[1].kind != OperandKind::Builtin)
            ins.operands[1] = {OperandKind::Placeholder, kValuePlaceholder};
    }
    if (ins.op == Opcode::CALL_USER && !is_transfer_like_name(ins.sub)) ins.sub = kCallWildcard;
}

Cfg normalize_ir(Cfg cfg) {
    for (auto& n : cfg.nodes)
        for (auto& ins : n.ir) normalize_instruction(ins);
    return cfg;
}

std::vector<std::size_t> bfs_order(Cfg const& cfg) {
    std::vector<std::size_t> order;
    std::vector<bool> seen(cfg.nodes.size(), false);
    std::deque<std::size_t> queue{cfg.entry};
    seen[cfg.entry] = true;
    while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        order.push_back(n);
        for (auto s : cfg.successors(n, true))
            if (!seen[s]) {
                seen[s] = true;
                queue.push_back(s);
            }
    }
    return order;
}

IrSequence flatten(Cfg const& cfg, std::string origin) {
    IrSequence seq;
    seq.origin = std::move(origin);
    for (auto id : bfs_order(cfg))
        for (auto const& ins : cfg.nodes[id].ir) seq.items.push_back({ins, id});
    return seq;
}

namespace {

std::string dot_escape(std::string const& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(Cfg const& cfg, std::string const& name) {
    std::ostringstream os;
    os << "digraph \"" << dot_escape(name) << "\" {\n";
    for (auto const& n : cfg.nodes) {
        std::string label;
        switch (n.role) {
            case CfgNodeRole::Entry: label = "ENTRY"; break;
            case CfgNodeRole::Exit: label = "EXIT"; break;
            case CfgNodeRole::RevertSink: label = "REVERT"; break;
            default:
                for (auto const& ins : n.ir) label += ins.render() + "\\l";
                if (label.empty()) label = "(empty)";
        }
        os << "  n" << n.id << " [shape=box,label=\"" << n.id << ": " << dot_escape(label) << "\"];\n";
    }
    for (auto const& e : cfg.edges)
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << to_string(e.kind) << "\"];\n";
    os << "}\n";
    return os.str();
}

json to_json(IrInstruction const& ins) {
    json ops = json::array();
    for (auto const& o : ins.operands) ops.push_back({{"kind", kind_name(o.kind)}, {"text", o.text}});
    return json{{"op", to_string(ins.op)}, {"sub", ins.sub}, {"operands", std::move(ops)}, {"line", ins.span.line}};
}

IrInstruction instruction_from_json(json const& j) {
    IrInstruction ins;
    ins.op = opcode_from_name(j.at("op").get<std::string>());
    ins.sub = j.value("sub", std::string{});
    for (auto const& o : j.at("operands"))
        ins.operands.push_back({kind_from_name(o.at("kind").get<std::string>()), o.at("text").get<std::string>()});
    ins.span.line = j.value("line", 0);
    return ins;
}

json to_json(IrSequence const& seq) {
    json items = json::array();
    for (auto const& it : seq.items) items.push_back(to_json(it.ins));
    return items;
}

IrSequence sequence_from_json(json const& j) {
    IrSequence seq;
    for (auto const& it : j) seq.items.push_back({instruction_from_json(it), 0});
    return seq;
}

}  // namespace avscan
