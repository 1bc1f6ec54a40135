#include "avscan/rules.hpp"

#include "avscan/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

namespace avscan {

using ast::Node;
using ast::NodeKind;
using nlohmann::json;
using EK = Event::Kind;

std::string_view to_string(RuleId r) {
    switch (r) {
        case RuleId::UnexpectedRevert: return "R_UnexpectedRevert";
        case RuleId::ReentrancySlither: return "R_ReentrancySlither";
        case RuleId::TxOriginSlither: return "R_TxOriginSlither";
        case RuleId::TxOriginSmartCheck: return "R_TxOriginSmartCheck";
        case RuleId::UncheckedLLC: return "R_UncheckedLLC";
        case RuleId::Selfdestruct: return "R_Selfdestruct";
    }
    return "?";
}

std::string to_string(DmId d) { return "DM" + std::to_string(static_cast<int>(d)); }

std::optional<DmId> dm_from_string(std::string_view s) {
    std::string u;
    for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u.rfind("DM", 0) != 0 || u.size() < 3 || u.size() > 4) return std::nullopt;
    int n = 0;
    for (std::size_t i = 2; i < u.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(u[i]))) return std::nullopt;
        n = n * 10 + (u[i] - '0');
    }
    if (n < 1 || n > 10) return std::nullopt;
    return static_cast<DmId>(n);
}

std::vector<DmId> wired_dms(VulnType t) {
    switch (t) {
        case VulnType::Reentrancy: return {DmId::DM1, DmId::DM2, DmId::DM3, DmId::DM4, DmId::DM5};
        case VulnType::UnexpectedRevert: return {DmId::DM6, DmId::DM7};
        case VulnType::TxOriginAbuse: return {DmId::DM8};
        case VulnType::UncheckedLowLevelCall: return {DmId::DM9};
        case VulnType::SelfdestructAbuse: return {DmId::DM10};
    }
    return {};
}

std::string_view to_string(FindingSource s) {
    switch (s) {
        case FindingSource::Rule: return "rule";
        case FindingSource::Avs: return "avs";
        case FindingSource::Both: return "both";
    }
    return "?";
}

namespace {

Node const& strip_conversions(Node const& n) {
    Node const* p = &n;
    while (p->kind == NodeKind::TypeConversion && p->children.size() == 1) p = &p->children[0];
    return *p;
}

bool is_equality(Node const& n) { return n.kind == NodeKind::Binary && (n.text == "==" || n.text == "!="); }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool has_revert(Node const& n) { return ast::contains_kind(n, NodeKind::Revert) || ast::contains_kind(n, NodeKind::Throw); }

// Condition expression evaluated by a Condition node owned by `owner`.
Node const* condition_of(Node const& owner) {
    switch (owner.kind) {
        case NodeKind::If:
        case NodeKind::While: return &owner.children.at(0);
        case NodeKind::DoWhile: return &owner.children.at(1);
        case NodeKind::For: return &owner.children.at(1);
        default: return nullptr;
    }
}

bool is_loop(NodeKind k) { return k == NodeKind::While || k == NodeKind::DoWhile || k == NodeKind::For; }

void mark_loop_bodies(Node const& n, bool inside, std::set<Node const*>& out) {
    if (inside) out.insert(&n);
    bool child_inside = inside || is_loop(n.kind);
    for (auto const& c : n.children) mark_loop_bodies(c, child_inside, out);
}

bool compares_sender(Node const& cond) {
    bool found = false;
    ast::walk(cond, [&](Node const& n) {
        if (is_equality(n) && n.children.size() == 2 &&
            (strip_conversions(n.children[0]).kind == NodeKind::MsgSender ||
             strip_conversions(n.children[1]).kind == NodeKind::MsgSender))
            found = true;
    });
    return found;
}

struct TxUse {
    ast::Span span;
    bool vs_sender = false;
};

void tx_uses_in_expr(Node const& e, ast::Span span, std::vector<TxUse>& out) {
    if (is_equality(e) && e.children.size() == 2) {
        auto const& a = strip_conversions(e.children[0]);
        auto const& b = strip_conversions(e.children[1]);
        if ((a.kind == NodeKind::TxOrigin && b.kind == NodeKind::MsgSender) ||
            (b.kind == NodeKind::TxOrigin && a.kind == NodeKind::MsgSender)) {
            out.push_back({span, true});
            return;
        }
    }
    if (e.kind == NodeKind::TxOrigin) {
        out.push_back({span, false});
        return;
    }
    for (auto const& c : e.children) tx_uses_in_expr(c, span, out);
}

// tx.origin occurrences inside branch/loop conditions and require/assert.
void tx_uses(Node const& s, std::vector<TxUse>& out) {
    switch (s.kind) {
        case NodeKind::If:
        case NodeKind::While:
        case NodeKind::DoWhile:
        case NodeKind::For: {
            Node const* cond = condition_of(s);
            tx_uses_in_expr(*cond, cond->span.valid() ? cond->span : s.span, out);
            for (auto const& c : s.children)
                if (&c != cond) tx_uses(c, out);
            return;
        }
        case NodeKind::Require:
        case NodeKind::Assert:
            if (!s.children.empty()) tx_uses_in_expr(s.children[0], s.span, out);
            return;
        default:
            if (ast::is_statement_kind(s.kind))
                for (auto const& c : s.children) tx_uses(c, out);
            return;
    }
}

ast::ModifierDef const* find_modifier(ast::SourceUnit const& unit, ast::ContractDef const& c, std::string const& name,
                                      int depth = 0) {
    if (auto const* m = c.find_modifier(name)) return m;
    if (depth > 16) return nullptr;
    for (auto const& b : c.bases)
        if (auto const* bc = unit.find_contract(b))
            if (auto const* m = find_modifier(unit, *bc, name, depth + 1)) return m;
    return nullptr;
}

class Collector {
public:
    Collector(FunctionAnalysis const& fa, std::vector<Event>& out) : fa_(fa), out_(out) {}

    struct Ctx {
        std::size_t node = 0;
        ast::Span span;
        bool cond = false;
        bool check = false;
        bool reverts = false;
        bool loop = false;
    };

    void node(CfgNode const& cn, std::set<Node const*> const& loop_nodes) {
        if (!cn.stmt) return;
        seq_ = 0;
        Ctx c;
        c.node = cn.id;
        c.span = cn.span;
        Node const& s = *cn.stmt;
        c.loop = loop_nodes.count(&s) > 0;
        if (cn.role == CfgNodeRole::Condition) {
            c.cond = true;
            c.loop = c.loop || is_loop(s.kind);
            c.reverts = s.kind == NodeKind::If && has_revert(s);
            if (Node const* e = condition_of(s)) expr(*e, c);
            return;
        }
        if (cn.role == CfgNodeRole::ForPost) {
            c.loop = true;
            expr(s, c);
            return;
        }
        statement(s, c);
    }

private:
    Event& push(EK kind, Node const* e, Ctx const& c, std::string var = {}) {
        Event ev;
        ev.kind = kind;
        ev.var = std::move(var);
        ev.expr = e;
        ev.node = c.node;
        ev.seq = seq_++;
        ev.span = c.span;
        ev.in_condition = c.cond;
        ev.in_check = c.check;
        ev.condition_reverts = c.reverts;
        ev.in_loop = c.loop;
        out_.push_back(std::move(ev));
        return out_.back();
    }

    void statement(Node const& s, Ctx c) {
        switch (s.kind) {
            case NodeKind::VarDecl:
                if (s.children.size() > 2) expr(s.children[2], c);
                push(EK::Decl, &s, c, s.children.at(1).text);
                return;
            case NodeKind::Require:
            case NodeKind::Assert:
                c.check = true;
                if (!s.children.empty()) expr(s.children[0], c);
                return;
            case NodeKind::ExprStmt:
            case NodeKind::Return:
            case NodeKind::Emit:
                for (auto const& ch : s.children) expr(ch, c);
                return;
            case NodeKind::Revert:
            case NodeKind::Throw:
            case NodeKind::Placeholder:
            case NodeKind::Opaque:
            case NodeKind::Break:
            case NodeKind::Continue:
            case NodeKind::Empty:
                return;
            default:
                expr(s, c);
                return;
        }
    }

    void index_effects(Node const& n, Ctx const& c) {
        if (n.kind == NodeKind::Member || (n.kind == NodeKind::TypeConversion && n.children.size() == 1)) {
            index_effects(n.children.at(0), c);
        } else if (n.kind == NodeKind::Index) {
            index_effects(n.children.at(0), c);
            if (n.children.size() > 1) expr(n.children[1], c);
        }
    }

    bool param_keyed(Node const& n) const {
        bool keyed = false;
        Node const* p = &n;
        while (p && (p->kind == NodeKind::Member || p->kind == NodeKind::Index) && !p->children.empty()) {
            if (p->kind == NodeKind::Index && p->children.size() > 1) {
                auto const& key = strip_conversions(p->children[1]);
                if (key.kind == NodeKind::Identifier && fa_.is_param(key.text)) keyed = true;
            }
            p = &p->children[0];
        }
        return keyed;
    }

    void write(Node const& lhs, Ctx const& c) {
        switch (lhs.kind) {
            case NodeKind::StateVarRef:
                push(EK::StateWrite, &lhs, c, lhs.text);
                return;
            case NodeKind::Member:
            case NodeKind::Index: {
                index_effects(lhs, c);
                Node const* root = ast::access_root_node(lhs);
                if (root && root->kind == NodeKind::StateVarRef)
                    push(EK::StateWrite, &lhs, c, root->text).param_keyed = param_keyed(lhs);
                return;
            }
            case NodeKind::Tuple:
                for (auto const& e : lhs.children) write(e, c);
                return;
            default:
                return;
        }
    }

    bool bool_state(Node const& n) const {
        if (n.kind != NodeKind::StateVarRef) return false;
        auto const* d = fa_.contract().find_state_var(n.text);
        return d && d->type == "bool";
    }

    void equality(Node const& n, Ctx const& c) {
        auto const& a = strip_conversions(n.children[0]);
        auto const& b = strip_conversions(n.children[1]);
        for (auto [x, y] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
            if (x->kind == NodeKind::MsgSender && y->kind == NodeKind::StateVarRef && fa_.is_owner_like(y->text))
                push(EK::IdentityCheck, &n, c, y->text);
            if (bool_state(*x) && y->kind == NodeKind::BoolLit &&
                ((n.text == "==" && y->text == "false") || (n.text == "!=" && y->text == "true")))
                push(EK::LockCheck, &n, c, x->text);
        }
    }

    void expr(Node const& n, Ctx const& c) {
        switch (n.kind) {
            case NodeKind::StateVarRef:
                push(EK::StateRead, &n, c, n.text);
                return;
            case NodeKind::Identifier:
                if (c.cond || c.check) push(EK::CondUse, &n, c, n.text);
                return;
            case NodeKind::Member:
            case NodeKind::Index: {
                Node const* root = ast::access_root_node(n);
                if (root && root->kind == NodeKind::StateVarRef) {
                    index_effects(n, c);
                    push(EK::StateRead, &n, c, root->text);
                    return;
                }
                break;
            }
            case NodeKind::Assign: {
                Node const& lhs = n.children.at(0);
                if (n.text != "=") expr(lhs, c);
                expr(n.children.at(1), c);
                write(lhs, c);
                push(EK::Assign, &n, c, lhs.kind == NodeKind::Identifier ? lhs.text : std::string{});
                return;
            }
            case NodeKind::Unary: {
                Node const& operand = n.children.at(0);
                if (n.text == "++" || n.text == "--" || n.text == "x++" || n.text == "x--") {
                    expr(operand, c);
                    write(operand, c);
                    return;
                }
                if (n.text == "delete") {
                    write(operand, c);
                    return;
                }
                if (n.text == "!" && (c.cond || c.check) && bool_state(strip_conversions(operand)))
                    push(EK::LockCheck, &n, c, strip_conversions(operand).text);
                break;
            }
            case NodeKind::Binary:
                if (is_equality(n) && n.children.size() == 2 && (c.cond || c.check)) equality(n, c);
                break;
            case NodeKind::Transfer:
                for (auto const& ch : n.children) expr(ch, c);
                push(EK::MoneySend, &n, c);
                return;
            case NodeKind::LowLevelCall:
                for (auto const& ch : n.children) expr(ch, c);
                push(EK::LowLevelCall, &n, c);
                push(n.text == "send" ? EK::MoneySend : EK::ExternCall, &n, c);
                return;
            case NodeKind::ValueCall:
                for (auto const& ch : n.children) expr(ch, c);
                if (n.text == "call") push(EK::LowLevelCall, &n, c);
                push(EK::MoneySend, &n, c);
                push(EK::ExternCall, &n, c);
                return;
            case NodeKind::MemberCall:
                for (auto const& ch : n.children) expr(ch, c);
                if (is_transfer_like_name(n.text)) push(EK::ExternCall, &n, c);
                return;
            case NodeKind::Selfdestruct:
                for (auto const& ch : n.children) expr(ch, c);
                push(EK::Selfdestruct, &n, c);
                return;
            case NodeKind::TxOrigin:
                push(EK::TxOrigin, &n, c);
                return;
            default:
                break;
        }
        for (auto const& ch : n.children) expr(ch, c);
    }

    FunctionAnalysis const& fa_;
    std::vector<Event>& out_;
    std::size_t seq_ = 0;
};

}  // namespace

FunctionAnalysis::FunctionAnalysis(ast::SourceUnit const& unit, ast::ContractDef const& contract,
                                   ast::FunctionDef const& fn)
    : unit_(unit), contract_(contract), fn_(fn), cfg_(build_cfg(fn, false)) {
    for (auto const& v : contract_.state_vars) {
        auto n = lower(v.name);
        if (n.find("owner") != std::string::npos || n.find("admin") != std::string::npos) owner_like_.insert(v.name);
    }
    for (auto const& f : contract_.functions) {
        if (f.kind != ast::FunctionKind::Constructor || !f.body) continue;
        ast::walk(*f.body, [&](Node const& n) {
            if (n.kind == NodeKind::Assign && n.text == "=" && n.children.size() == 2 &&
                n.children[0].kind == NodeKind::StateVarRef &&
                strip_conversions(n.children[1]).kind == NodeKind::MsgSender)
                owner_like_.insert(n.children[0].text);
        });
    }
    idom_ = cfg_.immediate_dominators();
    std::size_t n = cfg_.nodes.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (auto const& e : cfg_.edges)
        if (e.kind != EdgeKind::LoopBack) succ[e.from].push_back(e.to);
    reach_.assign(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> stack(succ[s].begin(), succ[s].end());
        while (!stack.empty()) {
            auto x = stack.back();
            stack.pop_back();
            if (reach_[s][x]) continue;
            reach_[s][x] = true;
            for (auto y : succ[x]) stack.push_back(y);
        }
    }
    collect();
}

void FunctionAnalysis::collect() {
    std::set<Node const*> loop_nodes;
    if (fn_.body) mark_loop_bodies(*fn_.body, false, loop_nodes);
    auto live = cfg_.reachable();
    Collector col(*this, events_);
    for (auto const& cn : cfg_.nodes)
        if (live[cn.id]) col.node(cn, loop_nodes);

    // A low-level call is checked when it sits in a condition / require, or when
    // the local it is stored into is tested afterwards.
    for (auto& e : events_) {
        if (e.kind != EK::LowLevelCall) continue;
        e.checked = e.in_check || e.in_condition;
        if (e.checked) continue;
        std::string bound;
        for (auto const& d : events_) {
            if (d.node != e.node || d.seq <= e.seq) continue;
            if (d.kind == EK::Decl && d.expr->children.size() > 2 && &strip_conversions(d.expr->children[2]) == e.expr)
                bound = d.var;
            if (d.kind == EK::Assign && !d.var.empty() && &strip_conversions(d.expr->children[1]) == e.expr)
                bound = d.var;
        }
        if (bound.empty()) continue;
        for (auto const& u : events_)
            if (u.kind == EK::CondUse && u.var == bound && precedes(e, u)) e.checked = true;
    }
}

bool FunctionAnalysis::precedes(Event const& a, Event const& b) const {
    if (a.node == b.node) return a.seq < b.seq;
    return reach_[a.node][b.node];
}

bool FunctionAnalysis::dominates(Event const& a, Event const& b) const {
    if (a.node == b.node) return a.seq < b.seq;
    return cfg_.dominates(idom_, a.node, b.node);
}

bool FunctionAnalysis::is_owner_like(std::string const& v) const { return owner_like_.count(v) > 0; }

bool FunctionAnalysis::is_param(std::string const& name) const {
    for (auto const& p : fn_.params)
        if (p.name == name) return true;
    return false;
}

std::vector<ast::ModifierDef const*> FunctionAnalysis::applied_modifiers() const {
    std::vector<ast::ModifierDef const*> out;
    for (auto const& m : fn_.applied_modifiers)
        if (auto const* d = find_modifier(unit_, contract_, m.name)) out.push_back(d);
    return out;
}

namespace {

bool contains_address_literal(Node const& n) { return ast::contains_kind(n, NodeKind::AddressLit); }

}  // namespace

bool FunctionAnalysis::hardcoded_address(Node const& call) const {
    if (call.children.empty()) return false;
    Node const& recv = strip_conversions(call.children[0]);
    if (recv.kind == NodeKind::AddressLit) return true;
    Node const* root = ast::access_root_node(recv);
    if (!root) return false;
    if (root->kind == NodeKind::StateVarRef) {
        auto const* d = contract_.find_state_var(root->text);
        if (d && d->initializer && contains_address_literal(*d->initializer)) return true;
        std::size_t assigned = 0;
        bool all_literal = true;
        for (auto const& f : contract_.functions) {
            if (!f.body) continue;
            ast::walk(*f.body, [&](Node const& n) {
                if (n.kind == NodeKind::Assign && n.children.size() == 2 &&
                    n.children[0].kind == NodeKind::StateVarRef && n.children[0].text == root->text) {
                    ++assigned;
                    all_literal = all_literal && contains_address_literal(n.children[1]);
                }
            });
        }
        return assigned > 0 && all_literal;
    }
    if (root->kind == NodeKind::Identifier) {
        std::size_t bound = 0;
        bool all_literal = true;
        for (auto const& e : events_) {
            if (e.var != root->text) continue;
            if (e.kind == EK::Decl) {
                ++bound;
                all_literal = all_literal && e.expr->children.size() > 2 && contains_address_literal(e.expr->children[2]);
            } else if (e.kind == EK::Assign) {
                ++bound;
                all_literal = all_literal && contains_address_literal(e.expr->children[1]);
            }
        }
        return bound > 0 && all_literal;
    }
    return false;
}

bool FunctionAnalysis::bound_to_sender(std::string const& local) const {
    std::size_t bound = 0;
    for (auto const& e : events_) {
        if (e.var != local) continue;
        Node const* rhs = nullptr;
        if (e.kind == EK::Decl) {
            if (e.expr->children.size() <= 2) return false;
            rhs = &e.expr->children[2];
        } else if (e.kind == EK::Assign) {
            rhs = &e.expr->children[1];
        } else {
            continue;
        }
        ++bound;
        if (strip_conversions(*rhs).kind != NodeKind::MsgSender) return false;
    }
    return bound > 0;
}

bool modifier_has_identity_check(ast::ModifierDef const& m) {
    bool found = false;
    ast::walk(m.body, [&](Node const& n) {
        if (found) return;
        if ((n.kind == NodeKind::Require || n.kind == NodeKind::Assert) && !n.children.empty() &&
            compares_sender(n.children[0]))
            found = true;
        if (n.kind == NodeKind::If && compares_sender(n.children.at(0))) {
            for (std::size_t i = 1; i < n.children.size(); ++i)
                if (has_revert(n.children[i]) || ast::contains_kind(n.children[i], NodeKind::Placeholder)) found = true;
        }
    });
    return found;
}

namespace {

Candidate make_candidate(VulnType t, RuleId r, std::vector<ast::Span> spans, std::optional<std::size_t> anchor) {
    Candidate c;
    c.vuln_type = t;
    c.rule = r;
    c.spans = std::move(spans);
    c.anchor = anchor;
    return c;
}

Node const* money_dest(Node const& send) {
    return send.children.empty() ? nullptr : &strip_conversions(send.children[0]);
}

Node const* money_value(Node const& send) {
    if (send.children.size() < 2) return nullptr;
    return &strip_conversions(send.children[1]);
}

}  // namespace

std::vector<Candidate> rule_unexpected_revert(FunctionAnalysis const& fa) {
    std::vector<Candidate> out;
    auto const& ev = fa.events();
    for (std::size_t i = 0; i < ev.size(); ++i) {
        auto const& s = ev[i];
        if (s.kind != EK::MoneySend) continue;
        if (s.in_loop) out.push_back(make_candidate(VulnType::UnexpectedRevert, RuleId::UnexpectedRevert, {s.span}, i));

        Node const* dest = money_dest(*s.expr);
        if (!dest) continue;
        Node const* root = ast::access_root_node(*dest);
        bool declared = root && root->kind == NodeKind::StateVarRef;
        if (!declared) {
            // value variable declared or read before the transfer
            Node const* val = money_value(*s.expr);
            Node const* vroot = val ? ast::access_root_node(*val) : nullptr;
            if (vroot && (vroot->kind == NodeKind::Identifier || vroot->kind == NodeKind::StateVarRef)) {
                for (auto const& d : ev)
                    if ((d.kind == EK::Decl || d.kind == EK::StateRead) && d.var == vroot->text && fa.precedes(d, s))
                        declared = true;
            }
        }
        if (!declared) continue;
        std::string path = ast::render(*dest);
        for (auto const& a : ev) {
            if (a.kind != EK::Assign || a.expr->text != "=" || !fa.precedes(s, a)) continue;
            Node const& lhs = strip_conversions(a.expr->children[0]);
            if (strip_conversions(a.expr->children[1]).kind != NodeKind::MsgSender) continue;
            if (ast::render(lhs) != path) continue;
            out.push_back(make_candidate(VulnType::UnexpectedRevert, RuleId::UnexpectedRevert, {s.span, a.span}, i));
            break;
        }
    }
    return out;
}

std::vector<Candidate> rule_reentrancy(FunctionAnalysis const& fa) {
    std::vector<Candidate> out;
    auto const& ev = fa.events();
    for (std::size_t i = 0; i < ev.size(); ++i) {
        auto const& call = ev[i];
        if (call.kind != EK::ExternCall) continue;
        Candidate c = make_candidate(VulnType::Reentrancy, RuleId::ReentrancySlither, {}, i);
        for (auto const& w : ev) {
            if (w.kind != EK::StateWrite || !fa.precedes(call, w)) continue;
            for (auto const& r : ev) {
                if ((r.kind != EK::StateRead && r.kind != EK::StateWrite) || r.var != w.var || !fa.precedes(r, call))
                    continue;
                c.vars.insert(w.var);
                c.spans.push_back(r.span);
                c.spans.push_back(w.span);
                break;
            }
        }
        if (c.vars.empty()) continue;
        c.spans.push_back(call.span);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> rule_tx_origin(FunctionAnalysis const& fa, bool include_modifiers) {
    std::vector<TxUse> uses;
    if (fa.function().body) tx_uses(*fa.function().body, uses);
    if (include_modifiers)
        for (auto const* m : fa.applied_modifiers()) tx_uses(m->body, uses);
    if (uses.empty()) return {};
    std::optional<std::size_t> anchor;
    auto const& ev = fa.events();
    for (std::size_t i = 0; i < ev.size() && !anchor; ++i)
        if (ev[i].kind == EK::TxOrigin && (ev[i].in_condition || ev[i].in_check)) anchor = i;
    std::vector<ast::Span> spans;
    for (auto const& u : uses) spans.push_back(u.span);
    return {make_candidate(VulnType::TxOriginAbuse,
                           include_modifiers ? RuleId::TxOriginSmartCheck : RuleId::TxOriginSlither, std::move(spans),
                           anchor)};
}

std::vector<Candidate> rule_unchecked_llc(FunctionAnalysis const& fa) {
    std::vector<Candidate> out;
    auto const& ev = fa.events();
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev[i].kind == EK::LowLevelCall && !ev[i].checked)
            out.push_back(make_candidate(VulnType::UncheckedLowLevelCall, RuleId::UncheckedLLC, {ev[i].span}, i));
    return out;
}

std::vector<Candidate> rule_selfdestruct(FunctionAnalysis const& fa) {
    std::vector<Candidate> out;
    auto const& ev = fa.events();
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev[i].kind == EK::Selfdestruct)
            out.push_back(make_candidate(VulnType::SelfdestructAbuse, RuleId::Selfdestruct, {ev[i].span}, i));
    return out;
}

namespace {

std::set<std::string> reachable_from_public(ast::ContractDef const& c) {
    std::map<std::string, std::set<std::string>> calls;
    for (auto const& f : c.functions) {
        if (!f.body) continue;
        auto& callees = calls[f.name];
        ast::walk(*f.body, [&](Node const& n) {
            if (n.kind == NodeKind::Call) callees.insert(n.text);
            if (n.kind == NodeKind::MemberCall && !n.children.empty() && n.children[0].kind == NodeKind::BuiltinVar &&
                n.children[0].text == "this")
                callees.insert(n.text);
        });
    }
    std::set<std::string> seen;
    std::deque<std::string> work;
    for (auto const& f : c.functions)
        if (f.is_public_entry() && f.kind != ast::FunctionKind::Constructor) work.push_back(f.name);
    while (!work.empty()) {
        auto name = work.front();
        work.pop_front();
        for (auto const& callee : calls[name])
            if (seen.insert(callee).second) work.push_back(callee);
    }
    return seen;
}

bool dm_loop_sends(Candidate const& c, FunctionAnalysis const& fa, Event const*& send) {
    if (!c.anchor) return false;
    auto const& e = fa.events()[*c.anchor];
    if (e.kind != EK::MoneySend || !e.in_loop) return false;
    send = &e;
    return true;
}

}  // namespace

bool dm_holds(DmId dm, Candidate const& c, FunctionAnalysis const& fa) {
    auto const& ev = fa.events();
    Event const* anchor = c.anchor ? &ev[*c.anchor] : nullptr;
    switch (dm) {
        case DmId::DM1:
            if (!anchor) return false;
            for (auto const& e : ev)
                if (e.kind == EK::IdentityCheck && fa.dominates(e, *anchor)) return true;
            return false;
        case DmId::DM2:
            return anchor && fa.hardcoded_address(*anchor->expr);
        case DmId::DM3: {
            auto const& f = fa.function();
            if ((f.visibility == ast::Visibility::Private || f.visibility == ast::Visibility::Internal) &&
                reachable_from_public(fa.contract()).count(f.name) == 0)
                return true;
            for (auto const* m : fa.applied_modifiers())
                if (modifier_has_identity_check(*m)) return true;
            return false;
        }
        case DmId::DM4: {
            if (!anchor) return false;
            for (auto const& chk : ev) {
                if (chk.kind != EK::LockCheck || !fa.dominates(chk, *anchor)) continue;
                bool set_before = false, reset_after = false;
                for (auto const& a : ev) {
                    if (a.kind != EK::Assign || a.expr->text != "=") continue;
                    Node const& lhs = a.expr->children[0];
                    Node const& rhs = strip_conversions(a.expr->children[1]);
                    if (lhs.kind != NodeKind::StateVarRef || lhs.text != chk.var || rhs.kind != NodeKind::BoolLit)
                        continue;
                    if (rhs.text == "true" && fa.precedes(a, *anchor)) set_before = true;
                    if (rhs.text == "false" && fa.precedes(*anchor, a)) reset_after = true;
                }
                if (set_before && reset_after) return true;
            }
            return false;
        }
        case DmId::DM5: {
            if (!anchor) return false;
            std::size_t relevant = 0;
            for (auto const& w : ev) {
                if (w.kind != EK::StateWrite || w.param_keyed) continue;
                if (!c.vars.empty() && c.vars.count(w.var) == 0) continue;
                ++relevant;
                if (!fa.precedes(w, *anchor)) return false;
            }
            return relevant > 0;
        }
        case DmId::DM6: {
            Event const* send = nullptr;
            if (!dm_loop_sends(c, fa, send)) return false;
            if (send->expr->kind == NodeKind::Transfer) return false;
            return !(send->in_check || (send->in_condition && send->condition_reverts));
        }
        case DmId::DM7: {
            Event const* send = nullptr;
            if (!dm_loop_sends(c, fa, send)) return false;
            // every money transfer in a loop goes back to the caller
            for (auto const& e : ev) {
                if (e.kind != EK::MoneySend || !e.in_loop) continue;
                Node const* dest = money_dest(*e.expr);
                if (!dest) return false;
                if (dest->kind == NodeKind::MsgSender) continue;
                if (dest->kind == NodeKind::Identifier && fa.bound_to_sender(dest->text)) continue;
                return false;
            }
            return true;
        }
        case DmId::DM8: {
            std::vector<TxUse> uses;
            if (fa.function().body) tx_uses(*fa.function().body, uses);
            for (auto const* m : fa.applied_modifiers()) tx_uses(m->body, uses);
            if (uses.empty()) return false;
            return std::all_of(uses.begin(), uses.end(), [](TxUse const& u) { return u.vs_sender; });
        }
        case DmId::DM9:
            for (auto const& e : ev)
                if (e.kind == EK::LowLevelCall && !e.checked) return false;
            return true;
        case DmId::DM10: {
            if (!anchor) return false;
            for (auto const* m : fa.applied_modifiers())
                if (modifier_has_identity_check(*m)) return true;
            auto const& cfg = fa.cfg();
            auto idom = cfg.immediate_dominators();
            for (auto const& n : cfg.nodes) {
                if (n.id == anchor->node || !n.stmt) continue;
                bool guard = n.role == CfgNodeRole::Condition ||
                             (n.role == CfgNodeRole::Statement &&
                              (n.stmt->kind == NodeKind::Require || n.stmt->kind == NodeKind::Assert));
                if (guard && cfg.dominates(idom, n.id, anchor->node)) return true;
            }
            return false;
        }
    }
    return false;
}

json ScanConfig::to_json() const {
    json dms = json::array();
    for (auto d : disabled_dms) dms.push_back(to_string(d));
    return json{{"eta", match.eta},
                {"itv", match.itv},
                {"rules", use_rules},
                {"avs", use_avs},
                {"disabled_dms", std::move(dms)},
                {"tx_origin_rule", tx_origin_modifiers ? "smartcheck" : "slither"}};
}

Finding apply_dms(Candidate const& c, FunctionAnalysis const& fa, ScanConfig const& cfg) {
    Finding f;
    f.vuln_type = c.vuln_type;
    f.contract = fa.contract().name;
    f.function = fa.function().display_name();
    f.spans = c.spans;
    f.fired_rule = c.rule;
    if (!c.avs_id.empty()) f.matched_avs = c.avs_id;
    f.source = c.rule ? (c.avs_id.empty() ? FindingSource::Rule : FindingSource::Both) : FindingSource::Avs;
    for (auto dm : wired_dms(c.vuln_type))
        if (!cfg.disabled_dms.count(dm) && dm_holds(dm, c, fa)) f.suppressed_by.push_back(dm);
    return f;
}

PreparedStore prepare_store(std::vector<AvsSignature> const& store) {
    PreparedStore p;
    p.avs = &store;
    for (auto const& a : store) p.keys.push_back(sequence_keys(a.ir_signature));
    return p;
}

namespace {

bool anchor_kind(VulnType t, EK k, int pass) {
    switch (t) {
        case VulnType::Reentrancy: return pass == 0 ? k == EK::ExternCall : k == EK::MoneySend;
        case VulnType::UnexpectedRevert: return k == EK::MoneySend;
        case VulnType::TxOriginAbuse: return k == EK::TxOrigin;
        case VulnType::UncheckedLowLevelCall: return k == EK::LowLevelCall;
        case VulnType::SelfdestructAbuse: return k == EK::Selfdestruct;
    }
    return false;
}

std::optional<std::size_t> pick_anchor(FunctionAnalysis const& fa, VulnType t, std::set<std::size_t> const& nodes) {
    auto const& ev = fa.events();
    for (int scope = 0; scope < 2; ++scope)
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < ev.size(); ++i)
                if (anchor_kind(t, ev[i].kind, pass) && (scope == 1 || nodes.count(ev[i].node))) return i;
    return std::nullopt;
}

}  // namespace

std::vector<Candidate> scan_with_avs(PreparedStore const& store, FunctionAnalysis const& fa, MatchConfig const& cfg,
                                     std::vector<std::string>* warnings) {
    std::vector<Candidate> out;
    if (!store.avs || store.avs->empty() || !fa.function().body) return out;
    IrSequence target;
    try {
        target = flatten(normalize_ir(build_cfg(fa.function(), true)));
    } catch (UnsupportedConstruct const& e) {
        if (warnings) {
            std::ostringstream os;
            os << fa.unit().path << ':' << e.span().line << ':' << e.span().col << ": " << fa.contract().name << '.'
               << fa.function().display_name() << " skipped from AVS matching: " << e.what();
            warnings->push_back(os.str());
        }
        return out;
    }
    auto keys = sequence_keys(target);
    auto const& nodes = fa.cfg().nodes;
    for (std::size_t i = 0; i < store.avs->size(); ++i) {
        auto r = match_sequences(store.keys[i], keys, cfg);
        if (!r.matched) continue;
        auto const& avs = (*store.avs)[i];
        Candidate c;
        c.vuln_type = avs.vuln_type;
        c.avs_id = avs.id;
        std::set<std::size_t> hit;
        for (auto idx : r.matched_span) hit.insert(target.items[idx].node);
        for (auto n : hit) c.spans.push_back(nodes[n].span);
        c.anchor = pick_anchor(fa, avs.vuln_type, hit);
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

bool overlaps(ast::Span const& a, ast::Span const& b) { return a.begin < b.end && b.begin < a.end; }

bool overlaps(Candidate const& a, Candidate const& b) {
    for (auto const& x : a.spans)
        for (auto const& y : b.spans)
            if (overlaps(x, y)) return true;
    return false;
}

void sort_spans(std::vector<ast::Span>& spans) {
    std::sort(spans.begin(), spans.end(),
              [](ast::Span const& a, ast::Span const& b) { return std::tie(a.begin, a.end) < std::tie(b.begin, b.end); });
    spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
}

// Merges candidates of one type whose spans overlap; rule candidates keep their anchor.
std::vector<Candidate> merge(std::vector<Candidate> cands) {
    std::vector<Candidate> out;
    for (auto& c : cands) {
        sort_spans(c.spans);
        bool merged = false;
        for (auto& o : out) {
            if (o.vuln_type != c.vuln_type || !overlaps(o, c)) continue;
            if (!o.rule && c.rule) {
                o.rule = c.rule;
                o.anchor = c.anchor;
            }
            if (o.avs_id.empty()) o.avs_id = c.avs_id;
            if (!o.anchor) o.anchor = c.anchor;
            o.vars.insert(c.vars.begin(), c.vars.end());
            o.spans.insert(o.spans.end(), c.spans.begin(), c.spans.end());
            sort_spans(o.spans);
            merged = true;
            break;
        }
        if (!merged) out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

FileReport scan_unit(ast::SourceUnit const& unit, PreparedStore const& store, ScanConfig const& cfg) {
    FileReport rep;
    rep.path = unit.path;
    for (auto const& d : unit.diagnostics) rep.warnings.push_back(d.format());
    for (auto const& c : unit.contracts) {
        for (auto const& f : c.functions) {
            if (!f.body) continue;
            FunctionAnalysis fa(unit, c, f);
            std::vector<Candidate> cands;
            if (cfg.use_rules) {
                for (auto* rule : {&rule_reentrancy, &rule_unexpected_revert, &rule_unchecked_llc, &rule_selfdestruct}) {
                    auto r = (*rule)(fa);
                    cands.insert(cands.end(), r.begin(), r.end());
                }
                auto tx = rule_tx_origin(fa, cfg.tx_origin_modifiers);
                cands.insert(cands.end(), tx.begin(), tx.end());
            }
            if (cfg.use_avs) {
                auto a = scan_with_avs(store, fa, cfg.match, &rep.warnings);
                cands.insert(cands.end(), a.begin(), a.end());
            }
            for (auto const& m : merge(std::move(cands))) rep.findings.push_back(apply_dms(m, fa, cfg));
        }
    }
    std::stable_sort(rep.findings.begin(), rep.findings.end(), [](Finding const& a, Finding const& b) {
        auto ka = std::make_tuple(a.contract, a.function, static_cast<int>(a.vuln_type),
                                  a.spans.empty() ? std::size_t{0} : a.spans.front().begin);
        auto kb = std::make_tuple(b.contract, b.function, static_cast<int>(b.vuln_type),
                                  b.spans.empty() ? std::size_t{0} : b.spans.front().begin);
        return ka < kb;
    });
    return rep;
}

std::size_t Report::reported_count() const {
    std::size_t n = 0;
    for (auto const& f : files)
        for (auto const& x : f.findings) n += x.reported();
    return n;
}

std::size_t Report::suppressed_count() const {
    std::size_t n = 0;
    for (auto const& f : files)
        for (auto const& x : f.findings) n += !x.reported();
    return n;
}

json to_json(Finding const& f) {
    json spans = json::array();
    for (auto const& s : f.spans)
        spans.push_back({{"line", s.line}, {"col", s.col}, {"end_line", s.end_line}, {"end_col", s.end_col}});
    json dms = json::array();
    for (auto d : f.suppressed_by) dms.push_back(to_string(d));
    return json{{"vuln_type", to_string(f.vuln_type)},
                {"contract", f.contract},
                {"function", f.function},
                {"spans", std::move(spans)},
                {"source", to_string(f.source)},
                {"fired_rule", f.fired_rule ? json(std::string(to_string(*f.fired_rule))) : json(nullptr)},
                {"matched_avs", f.matched_avs ? json(*f.matched_avs) : json(nullptr)},
                {"suppressed_by", std::move(dms)},
                {"status", f.reported() ? "reported" : "suppressed"}};
}

json to_json(Report const& r) {
    json files = json::array();
    for (auto const& f : r.files) {
        json findings = json::array();
        for (auto const& x : f.findings) findings.push_back(to_json(x));
        files.push_back({{"path", f.path}, {"findings", std::move(findings)}, {"warnings", f.warnings}});
    }
    return json{{"schema_version", 1},
                {"tool_version", r.tool_version},
                {"config", r.config},
                {"summary", {{"reported", r.reported_count()}, {"suppressed", r.suppressed_count()}}},
                {"files", std::move(files)}};
}

namespace {

void text_finding(std::ostringstream& os, std::string const& path, Finding const& f) {
    os << "  " << path << ':' << (f.spans.empty() ? 0 : f.spans.front().line) << "  " << to_string(f.vuln_type)
       << "  " << f.contract << '.' << f.function << "  [" << to_string(f.source);
    if (f.fired_rule) os << ' ' << to_string(*f.fired_rule);
    if (f.matched_avs) os << ' ' << *f.matched_avs;
    os << ']';
    if (!f.reported()) {
        os << "  suppressed by";
        for (auto d : f.suppressed_by) os << ' ' << to_string(d);
    }
    os << '\n';
}

}  // namespace

std::string to_text(Report const& r) {
    std::ostringstream os;
    os << "Reported (" << r.reported_count() << "):\n";
    for (auto const& f : r.files)
        for (auto const& x : f.findings)
            if (x.reported()) text_finding(os, f.path, x);
    os << "Suppressed (" << r.suppressed_count() << "):\n";
    for (auto const& f : r.files)
        for (auto const& x : f.findings)
            if (!x.reported()) text_finding(os, f.path, x);
    bool any_warning = false;
    for (auto const& f : r.files)
        for (auto const& w : f.warnings) {
            if (!any_warning) os << "Warnings:\n";
            any_warning = true;
            os << "  " << w << '\n';
        }
    return os.str();
}

}  // namespace avscan
