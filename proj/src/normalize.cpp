#include "avscan/normalize.hpp"

#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace avscan {

using ast::Node;
using ast::NodeKind;
using nlohmann::json;

namespace {

const std::unordered_set<std::string_view> kBuiltinMembers{
    "balance", "length", "push", "pop", "transfer", "send", "call", "callcode", "delegatecall",
    "value", "gas", "data", "sig", "selector", "code", "codehash"};

const std::unordered_set<std::string_view> kBuiltinFunctions{
    "keccak256", "sha3", "sha256", "ripemd160", "ecrecover", "addmod", "mulmod", "blockhash",
    "gasleft", "abi.encode", "abi.encodePacked", "abi.encodeWithSelector", "abi.encodeWithSignature",
    "abi.decode", "block.blockhash"};

const std::unordered_set<std::string_view> kTransferLike{"transfer", "transferFrom", "send"};

void count_nodes(Node const& n, std::size_t& total) {
    ++total;
    for (auto const& c : n.children) count_nodes(c, total);
}

Node param_node(ast::Param const& p) {
    Node n(NodeKind::Param, {}, {Node(NodeKind::TypeName, p.type, {}, p.span)}, p.span);
    if (!p.name.empty()) n.children.emplace_back(NodeKind::DeclName, p.name, std::vector<Node>{}, p.span);
    return n;
}

}  // namespace

bool is_builtin_member(std::string_view name) { return kBuiltinMembers.count(name) > 0; }
bool is_builtin_function(std::string_view name) { return kBuiltinFunctions.count(name) > 0; }
bool is_transfer_like_name(std::string_view name) { return kTransferLike.count(name) > 0; }

std::string abstract_label(Node const& n) {
    switch (n.kind) {
        case NodeKind::Identifier:
        case NodeKind::StateVarRef:
        case NodeKind::DeclName:
        case NodeKind::NumberLit:
        case NodeKind::StringLit:
        case NodeKind::Opaque:
        case NodeKind::Emit:
            return kWildcard;
        case NodeKind::AddressLit:
            return kAddrWildcard;
        case NodeKind::MsgSender:
            return "msg.sender";
        case NodeKind::TxOrigin:
            return "tx.origin";
        case NodeKind::Member:
            return is_builtin_member(n.text) ? n.text : std::string(kWildcard);
        case NodeKind::Call:
            return is_builtin_function(n.text) ? n.text : std::string(kCallWildcard);
        case NodeKind::MemberCall:
            if (is_builtin_member(n.text) || is_transfer_like_name(n.text)) return n.text;
            return kCallWildcard;
        case NodeKind::ValueCall:
            return n.text == "call" || is_transfer_like_name(n.text) ? n.text : std::string(kCallWildcard);
        case NodeKind::ModifierInvocation:
            return kCallWildcard;
        default:
            return n.text;
    }
}

Node abstract_labels(Node const& node) {
    Node out(node.kind, abstract_label(node), {}, node.span);
    out.children.reserve(node.children.size());
    for (auto const& c : node.children) out.children.push_back(abstract_labels(c));
    return out;
}

std::vector<Node const*> NormalizedSegment::statements() const {
    std::vector<Node const*> out;
    for (auto const& c : root.children)
        if (ast::is_statement_kind(c.kind)) out.push_back(&c);
    return out;
}

NormalizedSegment normalize_function(ast::FunctionDef const& f, ast::ContractDef const& owner) {
    NormalizedSegment seg;
    seg.origin = {{}, owner.name, f.display_name(), f.span};
    Node root(NodeKind::Block, {}, {}, f.body ? f.body->span : f.span);
    if (!f.params.empty()) {
        Node list(NodeKind::ParamList, {}, {}, f.span);
        for (auto const& p : f.params) list.children.push_back(param_node(p));
        root.children.push_back(std::move(list));
    }
    if (!f.returns.empty()) {
        Node list(NodeKind::ReturnList, {}, {}, f.span);
        for (auto const& p : f.returns) list.children.push_back(param_node(p));
        root.children.push_back(std::move(list));
    }
    if (!f.applied_modifiers.empty()) {
        Node list(NodeKind::ModifierList, {}, {}, f.span);
        for (auto const& m : f.applied_modifiers)
            list.children.emplace_back(NodeKind::ModifierInvocation, m.name, m.args, m.span);
        root.children.push_back(std::move(list));
    }
    if (f.body)
        for (auto const& s : f.body->children) root.children.push_back(s);
    seg.root = abstract_labels(root);
    seg.node_count = 0;
    count_nodes(seg.root, seg.node_count);
    return seg;
}

NormalizedSegment make_segment(std::vector<Node> statements, SegmentOrigin origin) {
    NormalizedSegment seg;
    seg.origin = std::move(origin);
    seg.root = abstract_labels(Node(NodeKind::Block, {}, std::move(statements)));
    seg.node_count = 0;
    count_nodes(seg.root, seg.node_count);
    return seg;
}

namespace {

void fnv_bytes(std::uint64_t& h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h ^= 0xff;  // field separator
    h *= 1099511628211ull;
}

void fnv_node(std::uint64_t& h, Node const& n) {
    fnv_bytes(h, ast::to_string(n.kind));
    fnv_bytes(h, n.text);
    fnv_bytes(h, std::to_string(n.children.size()));
    for (auto const& c : n.children) fnv_node(h, c);
}

void key_into(std::string& out, Node const& n) {
    out += ast::to_string(n.kind);
    if (!n.text.empty()) {
        out += ':';
        out += n.text;
    }
    if (n.children.empty()) return;
    out += '(';
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ' ';
        key_into(out, n.children[i]);
    }
    out += ')';
}

}  // namespace

std::string fingerprint(Node const& root) {
    std::uint64_t h = 14695981039346656037ull;
    fnv_node(h, root);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string statement_key(Node const& stmt) {
    std::string out;
    key_into(out, stmt);
    return out;
}

json node_to_json(Node const& node) {
    json children = json::array();
    for (auto const& c : node.children) children.push_back(node_to_json(c));
    return json{{"kind", ast::to_string(node.kind)}, {"label", node.text}, {"children", std::move(children)}};
}

Node node_from_json(json const& j) {
    auto kind = ast::node_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("unknown node kind '" + j.at("kind").get<std::string>() + "'");
    Node n(*kind, j.at("label").get<std::string>());
    for (auto const& c : j.at("children")) n.children.push_back(node_from_json(c));
    return n;
}

json segment_to_json(NormalizedSegment const& s) {
    return json{{"origin",
                 {{"path", s.origin.path},
                  {"contract", s.origin.contract},
                  {"function", s.origin.function},
                  {"line", s.origin.span.line},
                  {"end_line", s.origin.span.end_line}}},
                {"node_count", s.node_count},
                {"root", node_to_json(s.root)}};
}

NormalizedSegment segment_from_json(json const& j) {
    NormalizedSegment s;
    auto const& o = j.at("origin");
    s.origin.path = o.value("path", std::string{});
    s.origin.contract = o.at("contract").get<std::string>();
    s.origin.function = o.at("function").get<std::string>();
    s.origin.span.line = o.value("line", 0);
    s.origin.span.end_line = o.value("end_line", 0);
    s.root = node_from_json(j.at("root"));
    s.node_count = 0;
    count_nodes(s.root, s.node_count);
    return s;
}

}  // namespace avscan
