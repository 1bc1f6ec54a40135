#include "checks.hpp"

#include "avscan/avs.hpp"
#include "avscan/cfg.hpp"
#include "avscan/cluster.hpp"
#include "avscan/corpus.hpp"
#include "avscan/lexer.hpp"
#include "avscan/matcher.hpp"
#include "avscan/normalize.hpp"
#include "avscan/parser.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <climits>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#ifndef AVSCAN_SOURCE_DIR
#error "AVSCAN_SOURCE_DIR must be defined"
#endif

namespace testsupport {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace avscan;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string quote(std::string const& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

ast::FunctionDef const* find_fn(ast::SourceUnit const& unit, std::string const& name) {
    for (auto const& ref : enumerate_functions(unit))
        if (ref.function->name == name && ref.function->body) return ref.function;
    return nullptr;
}

IrSequence target_sequence(ast::FunctionDef const& f) { return flatten(normalize_ir(build_cfg(f, true))); }

}  // namespace

fs::path source_dir() { return AVSCAN_SOURCE_DIR; }
fs::path cli_path() { return AVSCAN_CLI; }
fs::path store_builder_path() { return AVSCAN_STORE_BUILDER; }
fs::path scan_fixture(std::string const& stem) { return source_dir() / "fixtures/scan" / (stem + ".sol"); }
fs::path learn_fixture(std::string const& stem) {
    return source_dir() / "fixtures/learn/reentrancy" / (stem + ".sol");
}
fs::path bundled_store() { return source_dir() / "data/avs"; }

std::vector<fs::path> scan_fixtures() { return collect_sources({source_dir() / "fixtures/scan"}); }

fs::path temp_dir(std::string const& tag) {
    auto base = fs::temp_directory_path() / ("avscan-test-" + std::to_string(::getpid()));
    auto dir = base / tag;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliRun run_program(fs::path const& exe, std::vector<std::string> const& args) {
    static int counter = 0;
    auto dir = fs::temp_directory_path() / ("avscan-run-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto out = dir / ("out" + std::to_string(counter));
    auto err = dir / ("err" + std::to_string(counter++));
    std::string cmd = quote(exe.string());
    for (auto const& a : args) cmd += " " + quote(a);
    cmd += " > " + quote(out.string()) + " 2> " + quote(err.string());
    int status = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    fs::remove(out);
    fs::remove(err);
    return r;
}

CliRun run_cli(std::vector<std::string> const& args) { return run_program(cli_path(), args); }

FileReport scan_source(std::string const& text, std::string const& path, PreparedStore const& store,
                       ScanConfig const& cfg) {
    return scan_unit(parse_source(text, path), store, cfg);
}

std::string segments_dump(std::string const& text, std::string const& path) {
    auto unit = parse_source(text, path);
    json all = json::array();
    for (auto const& ref : enumerate_functions(unit)) {
        if (!ref.function->body) continue;
        auto seg = normalize_function(*ref.function, *ref.contract);
        seg.origin.path = path;
        all.push_back(segment_to_json(seg));
    }
    return all.dump();
}

// ---------------------------------------------------------------- perturbation

namespace {

bool protected_name(std::string const& name) {
    static const std::set<std::string> reserved{
        "sender", "origin", "timestamp", "number", "coinbase", "difficulty", "gaslimit", "blockhash", "now",
        "this", "msg", "tx", "block", "abi", "super", "keccak256", "sha256", "sha3", "ripemd160", "ecrecover",
        "require", "assert", "revert", "selfdestruct", "suicide", "address", "ether", "wei", "finney", "szabo",
        "seconds", "minutes", "hours", "days", "weeks", "years", "encodePacked", "encode", "_"};
    if (reserved.count(name) || is_builtin_member(name) || is_builtin_function(name) || is_transfer_like_name(name))
        return true;
    std::string lower;
    for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lower.find("owner") != std::string::npos || lower.find("admin") != std::string::npos;
}

bool is_keyword(std::string const& s) {
    static const std::set<std::string> words{
        "if", "is", "do", "in", "as", "of", "for", "new", "var", "let", "hex", "try", "else", "emit", "enum", "true",
        "false", "while", "break", "return", "returns", "delete", "public", "private", "internal", "external",
        "payable", "view", "pure", "constant", "memory", "storage", "calldata", "event", "struct", "modifier",
        "function", "contract", "library", "interface", "mapping", "throw", "using", "import", "pragma", "case",
        "final", "null", "type", "catch", "continue", "anonymous", "indexed", "constructor", "fallback", "receive"};
    return words.count(s) || is_elementary_type_name(s);
}

std::set<std::string> renamable(ast::SourceUnit const& unit) {
    std::set<std::string> vars, fixed;
    auto locals = [&](ast::Node const& body) {
        ast::walk(body, [&](ast::Node const& node) {
            if (node.kind == ast::NodeKind::VarDecl)
                for (auto const& c : node.children)
                    if (c.kind == ast::NodeKind::DeclName) vars.insert(c.text);
        });
    };
    for (auto const& c : unit.contracts) {
        fixed.insert(c.name);
        for (auto const& s : c.state_vars) vars.insert(s.name);
        for (auto const& st : c.structs) {
            fixed.insert(st.name);
            for (auto const& f : st.fields) vars.insert(f.name);
        }
        for (auto const& e : c.enums) fixed.insert(e);
        for (auto const& m : c.modifiers) {
            fixed.insert(m.name);
            for (auto const& p : m.params) vars.insert(p.name);
            locals(m.body);
        }
        for (auto const& f : c.functions) {
            fixed.insert(f.name);
            for (auto const& p : f.params) vars.insert(p.name);
            for (auto const& p : f.returns) vars.insert(p.name);
            if (f.body) locals(*f.body);
        }
    }
    std::set<std::string> out;
    for (auto const& v : vars)
        if (!v.empty() && !fixed.count(v) && !protected_name(v)) out.insert(v);
    return out;
}

}  // namespace

std::string perturb_source(std::string const& source, std::mt19937& rng) {
    auto unit = parse_source(source, "perturb");
    auto names = renamable(unit);
    auto toks = tokenize(source);
    std::set<std::string> taken;
    for (auto const& t : toks)
        if (t.kind == TokenKind::Identifier) taken.insert(std::string(t.text));

    std::uniform_int_distribution<int> letter(0, 25);
    std::map<std::string, std::string> rename;
    for (auto const& name : names) {
        if (rng() % 4 == 0) continue;  // leave some names alone
        for (int attempt = 0; attempt < 200; ++attempt) {
            std::string fresh = name;
            for (std::size_t i = 0; i < fresh.size(); ++i) {
                if (fresh[i] == '_' || std::isdigit(static_cast<unsigned char>(fresh[i]))) continue;
                char base = std::isupper(static_cast<unsigned char>(fresh[i])) ? 'A' : 'a';
                fresh[i] = static_cast<char>(base + letter(rng));
            }
            if (fresh == name || taken.count(fresh) || protected_name(fresh) || is_keyword(fresh)) continue;
            taken.insert(fresh);
            rename[name] = fresh;
            break;
        }
    }

    std::string out;
    std::size_t pos = 0;
    bool in_body = false;
    for (auto const& t : toks) {
        if (t.kind == TokenKind::End) break;
        std::string text(t.text);
        if (t.kind == TokenKind::Identifier && (text == "contract" || text == "library" || text == "interface"))
            in_body = true;
        std::string repl = text;
        if (t.kind == TokenKind::Identifier) {
            if (auto it = rename.find(text); it != rename.end()) repl = it->second;
        } else if (in_body && t.kind == TokenKind::Number) {
            bool decimal = std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
            bool zero = std::all_of(text.begin(), text.end(), [](char c) { return c == '0'; });
            if (decimal && !zero) {
                repl[0] = static_cast<char>('1' + rng() % 9);
                for (std::size_t i = 1; i < repl.size(); ++i) repl[i] = static_cast<char>('0' + rng() % 10);
            }
        } else if (in_body && t.kind == TokenKind::String && text.find('\\') == std::string::npos) {
            for (std::size_t i = 1; i + 1 < repl.size(); ++i) repl[i] = static_cast<char>('a' + letter(rng));
        }
        out.append(source, pos, t.span.begin - pos);
        out += repl;
        pos = t.span.end;
    }
    out.append(source, pos, std::string::npos);
    return out;
}

// ---------------------------------------------------------------- oracles

ast::Node random_tree(std::mt19937& rng, int max_nodes) {
    static const ast::NodeKind kinds[] = {ast::NodeKind::Block, ast::NodeKind::If, ast::NodeKind::Binary,
                                          ast::NodeKind::Identifier};
    static const char* texts[] = {"", "a", "b"};
    int n = std::uniform_int_distribution<int>(1, max_nodes)(rng);
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    for (int i = 1; i < n; ++i) parent[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, i - 1)(rng);
    std::vector<ast::Node> nodes(static_cast<std::size_t>(n));
    for (auto& node : nodes) {
        node.kind = kinds[rng() % 4];
        node.text = texts[rng() % 3];
    }
    // children attach in creation order, so build from the last node backwards
    std::vector<std::vector<int>> kids(static_cast<std::size_t>(n));
    for (int i = 1; i < n; ++i) kids[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])].push_back(i);
    std::function<ast::Node(int)> build = [&](int i) {
        ast::Node node = nodes[static_cast<std::size_t>(i)];
        for (int k : kids[static_cast<std::size_t>(i)]) node.children.push_back(build(k));
        return node;
    };
    return build(0);
}

namespace {

struct FlatTree {
    std::vector<ast::Node const*> nodes;  // preorder
    std::vector<std::vector<bool>> anc;   // anc[i][j]: i is a proper ancestor of j
};

FlatTree flat(ast::Node const& root) {
    FlatTree t;
    std::vector<int> parent;
    std::function<void(ast::Node const&, int)> rec = [&](ast::Node const& n, int p) {
        int id = static_cast<int>(t.nodes.size());
        t.nodes.push_back(&n);
        parent.push_back(p);
        for (auto const& c : n.children) rec(c, id);
    };
    rec(root, -1);
    std::size_t n = t.nodes.size();
    t.anc.assign(n, std::vector<bool>(n, false));
    for (std::size_t j = 0; j < n; ++j)
        for (int p = parent[j]; p >= 0; p = parent[static_cast<std::size_t>(p)]) t.anc[static_cast<std::size_t>(p)][j] = true;
    return t;
}

}  // namespace

int brute_force_ted(ast::Node const& a, ast::Node const& b) {
    auto ta = flat(a), tb = flat(b);
    std::size_t na = ta.nodes.size(), nb = tb.nodes.size();
    std::vector<std::pair<std::size_t, std::size_t>> mapping;
    int best = INT_MAX;
    // preorder of mapped nodes must agree, so targets are chosen in increasing order
    std::function<void(std::size_t, std::size_t, int)> rec = [&](std::size_t i, std::size_t min_j, int relabel) {
        if (i == na) {
            int m = static_cast<int>(mapping.size());
            best = std::min(best, relabel + static_cast<int>(na) - m + static_cast<int>(nb) - m);
            return;
        }
        rec(i + 1, min_j, relabel);
        for (std::size_t j = min_j; j < nb; ++j) {
            bool ok = true;
            for (auto [pi, pj] : mapping)
                if (ta.anc[pi][i] != tb.anc[pj][j]) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            auto const& x = *ta.nodes[i];
            auto const& y = *tb.nodes[j];
            int cost = (x.kind == y.kind && x.text == y.text) ? 0 : 1;
            mapping.emplace_back(i, j);
            rec(i + 1, j + 1, relabel + cost);
            mapping.pop_back();
        }
    };
    rec(0, 0, 0);
    return best;
}

std::size_t dp_lcs(std::vector<std::string> const& a, std::vector<std::string> const& b) {
    std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    return t[a.size()][b.size()];
}

std::string random_body(std::mt19937& rng, int max_stmts) {
    int budget = max_stmts;
    std::function<std::string(int)> block = [&](int depth) {
        std::string out;
        int count = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < count && budget > 0; ++i) {
            --budget;
            int choice = static_cast<int>(rng() % (depth >= 2 ? 3 : 7));
            switch (choice) {
                case 0: out += "x = x + 1; "; break;
                case 1: out += "require(x != " + std::to_string(rng() % 5) + "); "; break;
                case 2: out += "s = x; "; break;
                case 3: out += "if (x > 2) { " + block(depth + 1) + "} "; break;
                case 4: out += "if (x < 3) { " + block(depth + 1) + "} else { " + block(depth + 1) + "} "; break;
                case 5: out += "while (x < 10) { " + block(depth + 1) + "} "; break;
                case 6: out += "for (uint i = 0; i < n; i++) { " + block(depth + 1) + "} "; break;
            }
        }
        return out;
    };
    return block(0);
}

std::vector<std::size_t> reference_bfs(Cfg const& cfg) {
    std::size_t n = cfg.nodes.size();
    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    for (auto const& e : cfg.edges) {
        succ[e.from].push_back(e.to);
        pred[e.to].push_back(e.from);
    }
    // reachability, then iterative dominator sets
    std::vector<bool> reach(n, false);
    std::vector<std::size_t> stack{cfg.entry};
    reach[cfg.entry] = true;
    while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (auto v : succ[u])
            if (!reach[v]) {
                reach[v] = true;
                stack.push_back(v);
            }
    }
    std::vector<std::set<std::size_t>> dom(n);
    std::set<std::size_t> all;
    for (std::size_t i = 0; i < n; ++i)
        if (reach[i]) all.insert(i);
    for (std::size_t i = 0; i < n; ++i) dom[i] = all;
    dom[cfg.entry] = {cfg.entry};
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (!reach[v] || v == cfg.entry) continue;
            std::set<std::size_t> d = all;
            for (auto p : pred[v]) {
                if (!reach[p]) continue;
                std::set<std::size_t> x;
                std::set_intersection(d.begin(), d.end(), dom[p].begin(), dom[p].end(), std::inserter(x, x.end()));
                d = std::move(x);
            }
            d.insert(v);
            if (d != dom[v]) {
                dom[v] = std::move(d);
                changed = true;
            }
        }
    }
    std::vector<std::size_t> order;
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> q{cfg.entry};
    seen[cfg.entry] = true;
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        order.push_back(u);
        std::vector<std::size_t> next;
        for (auto v : succ[u])
            if (!dom[u].count(v)) next.push_back(v);
        std::sort(next.begin(), next.end());
        for (auto v : next)
            if (!seen[v]) {
                seen[v] = true;
                q.push_back(v);
            }
    }
    return order;
}

// ---------------------------------------------------------------- criteria

CheckResult check_fixture_fidelity() {
    auto t0 = Clock::now();
    auto run = run_cli({"scan", "--avs-dir", bundled_store().string(), (source_dir() / "fixtures/scan").string()});
    CheckResult r;
    r.seconds = since(t0);
    if (run.exit_code != 1) {
        r.detail = "unexpected exit code " + std::to_string(run.exit_code) + ": " + run.err;
        return r;
    }
    std::set<std::string> got;
    auto report = json::parse(run.out);
    for (auto const& f : report.at("files")) {
        auto stem = fs::path(f.at("path").get<std::string>()).stem().string();
        for (auto const& x : f.at("findings")) {
            std::string key = stem + " " + x.at("vuln_type").get<std::string>() + " " + x.at("status").get<std::string>();
            for (auto const& d : x.at("suppressed_by")) key += " " + d.get<std::string>();
            got.insert(key);
        }
    }
    std::set<std::string> expected{
        "cb01_auction UnexpectedRevert reported",
        "cb02_auction_potato UnexpectedRevert reported",
        "cb12_alice Reentrancy reported",
        "cb03_reg_documents Reentrancy suppressed DM3",
        "cb04_bancor_lender Reentrancy suppressed DM2",
        "cb05_zethr_bankroll Reentrancy suppressed DM4",
        "cb06_payout_loop UnexpectedRevert suppressed DM6",
        "cb07_withdraw_loop UnexpectedRevert suppressed DM7",
        "cb08_destroy_deed SelfdestructAbuse suppressed DM10",
        // CB6's send result is never checked, which the unchecked-call rule reports on its own
        "cb06_payout_loop UncheckedLowLevelCall reported",
    };
    std::vector<std::string> missing, extra;
    std::set_difference(expected.begin(), expected.end(), got.begin(), got.end(), std::back_inserter(missing));
    std::set_difference(got.begin(), got.end(), expected.begin(), expected.end(), std::back_inserter(extra));
    r.pass = missing.empty() && extra.empty() && r.seconds < 5.0;
    std::ostringstream d;
    d << got.size() << " findings";
    for (auto const& m : missing) d << "; missing '" << m << "'";
    for (auto const& e : extra) d << "; extra '" << e << "'";
    d << "; includes cb06 UncheckedLowLevelCall reported";
    r.detail = d.str();
    return r;
}

CheckResult check_clustering() {
    auto t0 = Clock::now();
    auto res = learn({scan_fixture("cb03_reg_documents"), learn_fixture("cb09_deposit_vault"),
                      learn_fixture("cb10_savings_pool"), learn_fixture("cb11_escrow_book")},
                     VulnType::Reentrancy, 50);
    CheckResult r;
    r.seconds = since(t0);
    auto idx = [&](std::string const& stem) {
        for (std::size_t i = 0; i < res.ids.size(); ++i)
            if (res.ids[i].rfind(stem + ":", 0) == 0) return i;
        return std::size_t(-1);
    };
    auto i3 = idx("cb03_reg_documents"), i9 = idx("cb09_deposit_vault"), i10 = idx("cb10_savings_pool"),
         i11 = idx("cb11_escrow_book");
    if (res.ids.size() != 4 || i3 > 3 || i9 > 3 || i10 > 3 || i11 > 3) {
        r.detail = "expected four labeled segments";
        return r;
    }
    auto d = [&](std::size_t a, std::size_t b) { return res.distances.at(a, b); };
    std::vector<std::vector<std::string>> want{{res.ids[i3]}, {res.ids[i9], res.ids[i10], res.ids[i11]}};
    auto got = res.clusters;
    for (auto& c : got) std::sort(c.begin(), c.end());
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    int min3 = std::min({d(i3, i9), d(i3, i10), d(i3, i11)});
    bool ordering = d(i9, i11) < d(i9, i10) && d(i9, i10) < d(i10, i11) && d(i10, i11) < min3;
    r.pass = got == want && ordering;
    std::ostringstream s;
    s << "clusters " << (got == want ? "ok" : "differ") << "; d(9,11)=" << d(i9, i11) << " d(9,10)=" << d(i9, i10)
      << " d(10,11)=" << d(i10, i11) << " min d(3,.)=" << min3;
    r.detail = s.str();
    return r;
}

CheckResult check_matching_paths() {
    auto t0 = Clock::now();
    CheckResult r;
    MatchConfig mc;  // eta 0.7
    auto cb1 = learn({scan_fixture("cb01_auction")}, VulnType::UnexpectedRevert, 50);
    auto cb9 = learn({learn_fixture("cb09_deposit_vault")}, VulnType::Reentrancy, 50);
    if (cb1.avs.size() != 1 || cb9.avs.size() != 1) {
        r.detail = "could not learn singleton signatures";
        return r;
    }
    auto curated = curate_avs(cb1.avs[0], {1, 2, 3});
    auto cb2 = parse_source(read_file(scan_fixture("cb02_auction_potato")), "cb02");
    auto cb10 = parse_source(read_file(learn_fixture("cb10_savings_pool")), "cb10");
    auto const* place_bid = find_fn(cb2, "placeBid");
    auto const* withdraw = find_fn(cb10, "withdrawSavings");
    if (!place_bid || !withdraw) {
        r.detail = "target functions missing";
        return r;
    }
    auto sig1 = sequence_keys(curated.ir_signature);
    auto tgt2 = sequence_keys(target_sequence(*place_bid));
    auto m1 = match_sequences(sig1, tgt2, mc);
    auto m2 = match_sequences(sequence_keys(cb9.avs[0].ir_signature), sequence_keys(target_sequence(*withdraw)), mc);
    r.seconds = since(t0);
    // the inclusion path is only taken after every window fell below eta
    bool inclusion = m1.matched && m1.method == MatchMethod::Inclusion && m1.similarity < mc.eta;
    bool direct = m2.matched && (m2.method == MatchMethod::Lcs || m2.method == MatchMethod::WindowedLcs) && std::abs(m2.similarity - 0.75) <= 0.05 + 1e-12;
    r.pass = inclusion && direct;
    std::ostringstream s;
    s << "CB1->CB2 " << to_string(m1.method) << " (best window " << m1.similarity << "); CB9->CB10 " << to_string(m2.method)
      << " sigma=" << m2.similarity;
    r.detail = s.str();
    return r;
}

CheckResult check_ted_oracle(int trials) {
    auto t0 = Clock::now();
    std::mt19937 rng(20240601);
    int mismatches = 0;
    for (int i = 0; i < trials; ++i) {
        auto a = random_tree(rng, 6), b = random_tree(rng, 6);
        if (tree_edit_distance(a, b) != brute_force_ted(a, b)) ++mismatches;
    }
    CheckResult r;
    r.seconds = since(t0);
    r.pass = mismatches == 0;
    r.detail = std::to_string(trials) + " tree pairs, " + std::to_string(mismatches) + " mismatches";
    return r;
}

CheckResult check_lcs_oracle(int trials) {
    auto t0 = Clock::now();
    std::mt19937 rng(77);
    int mismatches = 0;
    for (int i = 0; i < trials; ++i) {
        auto gen = [&] {
            std::vector<std::string> v(rng() % 13);
            for (auto& x : v) x = std::string(1, static_cast<char>('a' + rng() % 4));
            return v;
        };
        auto a = gen(), b = gen();
        auto res = lcs_similarity(a, b);
        std::size_t want = dp_lcs(a, b);
        double sim = a.empty() ? 0.0 : static_cast<double>(want) / static_cast<double>(a.size());
        bool ok = res.length == want && std::abs(res.similarity - sim) < 1e-12 &&
                  res.target_indices.size() == want &&
                  std::is_sorted(res.target_indices.begin(), res.target_indices.end()) &&
                  std::adjacent_find(res.target_indices.begin(), res.target_indices.end()) == res.target_indices.end();
        // the reported indices must pick an actual common subsequence
        if (ok) {
            std::vector<std::string> picked;
            for (auto j : res.target_indices) picked.push_back(b.at(j));
            ok = dp_lcs(a, picked) == want;
        }
        if (!ok) ++mismatches;
    }
    CheckResult r;
    r.seconds = since(t0);
    r.pass = mismatches == 0;
    r.detail = std::to_string(trials) + " sequence pairs, " + std::to_string(mismatches) + " mismatches";
    return r;
}

CheckResult check_bfs_oracle(int trials) {
    auto t0 = Clock::now();
    std::mt19937 rng(4242);
    int done = 0, mismatches = 0, attempts = 0;
    while (done < trials && attempts < trials * 200) {
        ++attempts;
        std::string src = "pragma solidity ^0.4.24;\ncontract T {\n uint s;\n function f(uint x, uint n) public {\n" +
                          random_body(rng, 5) + "\n }\n}\n";
        auto unit = parse_source(src, "bfs");
        auto cfg = build_cfg(unit.contracts.at(0).functions.at(0), false);
        if (cfg.nodes.size() > 10) continue;
        ++done;
        auto got = bfs_order(cfg);
        auto flat_seq = flatten(cfg);
        std::vector<std::size_t> flat_nodes;
        for (auto const& it : flat_seq.items)
            if (flat_nodes.empty() || flat_nodes.back() != it.node) flat_nodes.push_back(it.node);
        auto want = reference_bfs(cfg);
        std::vector<std::size_t> want_with_ir;
        for (auto id : want)
            if (!cfg.nodes[id].ir.empty()) want_with_ir.push_back(id);
        if (got != want || flat_nodes != want_with_ir) ++mismatches;
    }
    CheckResult r;
    r.seconds = since(t0);
    r.pass = done >= trials && mismatches == 0;
    r.detail = std::to_string(done) + " CFGs, " + std::to_string(mismatches) + " mismatches";
    return r;
}

CheckResult check_normalization_properties(int trials) {
    auto t0 = Clock::now();
    auto files = scan_fixtures();
    for (auto const& f : collect_sources({source_dir() / "fixtures/learn"})) files.push_back(f);
    auto store = load_store(bundled_store());
    auto prepared = prepare_store(store);
    ScanConfig cfg;
    std::mt19937 rng(1337);
    int failures = 0, changed = 0;
    std::string first_failure;
    // only perturbations that actually changed the source count as trials
    for (int t = 0; changed < trials && t < trials * 10; ++t) {
        auto const& path = files[static_cast<std::size_t>(t) % files.size()];
        auto text = read_file(path);
        auto mutated = perturb_source(text, rng);
        if (mutated == text) continue;
        ++changed;
        auto p = path.filename().string();
        bool same_segments = segments_dump(text, p) == segments_dump(mutated, p);
        auto a = scan_source(text, p, prepared, cfg), b = scan_source(mutated, p, prepared, cfg);
        json ja = json::array(), jb = json::array();
        for (auto const& f : a.findings) ja.push_back(to_json(f));
        for (auto const& f : b.findings) jb.push_back(to_json(f));
        if (!same_segments || ja.dump() != jb.dump()) {
            if (failures++ == 0) first_failure = p + (same_segments ? " findings differ" : " segments differ");
        }
    }
    CheckResult r;
    r.seconds = since(t0);
    r.pass = failures == 0 && changed == trials;
    r.detail = std::to_string(changed) + " perturbed sources, " + std::to_string(failures) + " differences" + (first_failure.empty() ? "" : ": " + first_failure);
    return r;
}

namespace {

std::set<std::string> reported_keys(FileReport const& rep) {
    std::set<std::string> out;
    for (auto const& f : rep.findings) {
        if (!f.reported()) continue;
        std::string key = f.contract + "." + f.function + " " + std::string(to_string(f.vuln_type));
        for (auto const& s : f.spans) key += " " + std::to_string(s.begin);
        out.insert(key);
    }
    return out;
}

}  // namespace

CheckResult check_dm_monotonicity(int synthetic) {
    auto t0 = Clock::now();
    auto store = load_store(bundled_store());
    auto prepared = prepare_store(store);
    ScanConfig on, off;
    for (int d = 1; d <= 10; ++d) off.disabled_dms.insert(static_cast<DmId>(d));
    std::vector<std::pair<std::string, std::string>> inputs;
    for (auto const& f : scan_fixtures()) inputs.emplace_back(f.filename().string(), read_file(f));
    std::mt19937 rng(99);
    for (int i = 0; i < synthetic; ++i) inputs.emplace_back("synth" + std::to_string(i) + ".sol", synth_contract(rng, i));
    int violations = 0, grew = 0;
    for (auto const& [name, text] : inputs) {
        auto with = reported_keys(scan_source(text, name, prepared, on));
        auto without = reported_keys(scan_source(text, name, prepared, off));
        if (!std::includes(without.begin(), without.end(), with.begin(), with.end())) ++violations;
        if (without.size() > with.size()) ++grew;
    }
    CheckResult r;
    r.seconds = since(t0);
    r.pass = violations == 0;
    r.detail = std::to_string(inputs.size()) + " inputs, " + std::to_string(violations) + " violations, " +
               std::to_string(grew) + " inputs with suppressed findings";
    return r;
}

CheckResult check_performance(int contracts) {
    std::mt19937 rng(2024);
    std::vector<std::string> texts;
    std::size_t lines = 0;
    for (int i = 0; i < contracts; ++i) {
        texts.push_back(synth_contract(rng, i));
        lines += static_cast<std::size_t>(std::count(texts.back().begin(), texts.back().end(), '\n'));
    }
    auto store = load_store(bundled_store());
    auto t0 = Clock::now();
    auto prepared = prepare_store(store);
    ScanConfig cfg;
    std::size_t findings = 0;
    for (std::size_t i = 0; i < texts.size(); ++i)
        findings += scan_source(texts[i], "synth" + std::to_string(i) + ".sol", prepared, cfg).findings.size();
    CheckResult r;
    r.seconds = since(t0);
    r.pass = store.size() == 42 && r.seconds < 120.0;
    std::ostringstream s;
    s << contracts << " contracts, " << lines / static_cast<std::size_t>(std::max(1, contracts)) << " LOC avg, "
      << store.size() << " signatures, " << findings << " findings";
    r.detail = s.str();
    return r;
}

CheckResult check_determinism() {
    auto t0 = Clock::now();
    auto scan_dir = (source_dir() / "fixtures/scan").string();
    std::vector<std::string> scan_args{"scan", "--avs-dir", bundled_store().string(), scan_dir};
    std::vector<std::string> learn_args{"learn", "--type", "reentrancy", "--audit",
                                        (source_dir() / "fixtures/learn").string(),
                                        scan_fixture("cb03_reg_documents").string()};
    auto s1 = run_cli(scan_args), s2 = run_cli(scan_args);
    auto l1 = run_cli(learn_args), l2 = run_cli(learn_args);
    auto parallel = scan_args;
    parallel.insert(parallel.begin(), {"-j", "4"});
    auto s3 = run_cli(parallel);
    CheckResult r;
    r.seconds = since(t0);
    bool scan_ok = !s1.out.empty() && s1.out == s2.out && s1.out == s3.out;
    bool learn_ok = l1.exit_code == 0 && !l1.out.empty() && l1.out == l2.out;
    r.pass = scan_ok && learn_ok;
    r.detail = std::string("scan ") + (scan_ok ? "identical" : "differs") + " (" + std::to_string(s1.out.size()) +
               " bytes, also with -j 4); learn " + (learn_ok ? "identical" : "differs") + " (" +
               std::to_string(l1.out.size()) + " bytes)";
    return r;
}

}  // namespace testsupport
