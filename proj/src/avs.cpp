#include "avscan/avs.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace avscan {

using ast::Node;
using nlohmann::json;

namespace {

constexpr std::pair<VulnType, std::string_view> kTypeNames[] = {
    {VulnType::Reentrancy, "Reentrancy"},
    {VulnType::TxOriginAbuse, "TxOriginAbuse"},
    {VulnType::UncheckedLowLevelCall, "UncheckedLowLevelCall"},
    {VulnType::UnexpectedRevert, "UnexpectedRevert"},
    {VulnType::SelfdestructAbuse, "SelfdestructAbuse"},
};

constexpr std::pair<VulnType, std::string_view> kShortNames[] = {
    {VulnType::Reentrancy, "reentrancy"},
    {VulnType::TxOriginAbuse, "tx-origin"},
    {VulnType::UncheckedLowLevelCall, "unchecked-llc"},
    {VulnType::UnexpectedRevert, "unexpected-revert"},
    {VulnType::SelfdestructAbuse, "selfdestruct"},
};

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

// Index pairs of one longest common subsequence, earliest positions first.
Pairs lcs_pairs(std::vector<std::string> const& a, std::vector<std::string> const& b) {
    std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<unsigned>> dp(n + 1, std::vector<unsigned>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
    Pairs out;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j] && dp[i][j] == dp[i + 1][j + 1] + 1) {
            out.emplace_back(i++, j++);
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

std::vector<std::string> keys_of(NormalizedSegment const& s) {
    std::vector<std::string> keys;
    for (auto const* st : s.statements()) keys.push_back(statement_key(*st));
    return keys;
}

json origin_json(SegmentOrigin const& o) {
    return json{{"path", o.path},
                {"contract", o.contract},
                {"function", o.function},
                {"line", o.span.line},
                {"end_line", o.span.end_line}};
}

SegmentOrigin origin_from_json(json const& j) {
    SegmentOrigin o;
    o.path = j.value("path", std::string{});
    o.contract = j.value("contract", std::string{});
    o.function = j.value("function", std::string{});
    o.span.line = j.value("line", 0);
    o.span.end_line = j.value("end_line", 0);
    return o;
}

std::string make_id(VulnType vt, NormalizedSegment const& body) {
    return std::string(short_name(vt)) + "-" + fingerprint(body.root).substr(0, 10);
}

std::vector<Node> statement_copies(NormalizedSegment const& s) {
    std::vector<Node> out;
    for (auto const* st : s.statements()) out.push_back(*st);
    return out;
}

}  // namespace

std::string_view to_string(VulnType t) {
    for (auto const& [v, name] : kTypeNames)
        if (v == t) return name;
    return "?";
}

std::string_view short_name(VulnType t) {
    for (auto const& [v, name] : kShortNames)
        if (v == t) return name;
    return "?";
}

std::optional<VulnType> vuln_type_from_string(std::string_view s) {
    for (auto const& [v, name] : kTypeNames)
        if (name == s) return v;
    for (auto const& [v, name] : kShortNames)
        if (name == s) return v;
    return std::nullopt;
}

std::vector<AlignmentSlot const*> Alignment::common() const {
    std::vector<AlignmentSlot const*> out;
    for (auto const& s : slots)
        if (s.status == AlignmentSlot::Status::Common) out.push_back(&s);
    return out;
}

Alignment progressive_align(std::vector<NormalizedSegment> const& cluster, std::vector<std::string> const& ids,
                            DistanceMatrix const& dm) {
    std::size_t n = cluster.size();
    if (n == 0) throw DegenerateCluster("empty cluster");
    std::vector<std::vector<std::string>> keys;
    for (std::size_t i = 0; i < n; ++i) {
        keys.push_back(keys_of(cluster[i]));
        if (keys.back().empty()) throw DegenerateCluster("instance '" + ids.at(i) + "' has no statements");
    }

    Alignment al;
    if (n == 1) {
        for (std::size_t p = 0; p < keys[0].size(); ++p)
            al.slots.push_back({AlignmentSlot::Status::Common, keys[0][p], {p}});
        al.fold_order = {0};
        return al;
    }

    // closest pair first; ties by the pair of ids
    std::size_t a = 0, b = 1;
    {
        int best = std::numeric_limits<int>::max();
        std::pair<std::string, std::string> best_key;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                int d = dm.at(dm.index_of(ids[i]), dm.index_of(ids[j]));
                auto mm = std::minmax(ids[i], ids[j]);
                std::pair<std::string, std::string> k{mm.first, mm.second};
                if (d < best || (d == best && k < best_key)) {
                    best = d;
                    best_key = k;
                    a = ids[i] <= ids[j] ? i : j;
                    b = ids[i] <= ids[j] ? j : i;
                }
            }
        }
    }
    al.fold_order = {a, b};

    auto make_slot = [&](AlignmentSlot::Status st, std::string key) {
        AlignmentSlot s;
        s.status = st;
        s.key = std::move(key);
        s.positions.assign(n, std::nullopt);
        return s;
    };

    {
        Pairs pairs = lcs_pairs(keys[a], keys[b]);
        std::size_t ia = 0, ib = 0;
        for (auto [pa, pb] : pairs) {
            for (; ia < pa; ++ia) {
                auto s = make_slot(AlignmentSlot::Status::Gap, keys[a][ia]);
                s.positions[a] = ia;
                al.slots.push_back(std::move(s));
            }
            for (; ib < pb; ++ib) {
                auto s = make_slot(AlignmentSlot::Status::Gap, keys[b][ib]);
                s.positions[b] = ib;
                al.slots.push_back(std::move(s));
            }
            auto s = make_slot(AlignmentSlot::Status::Common, keys[a][pa]);
            s.positions[a] = pa;
            s.positions[b] = pb;
            al.slots.push_back(std::move(s));
            ia = pa + 1;
            ib = pb + 1;
        }
        for (; ia < keys[a].size(); ++ia) {
            auto s = make_slot(AlignmentSlot::Status::Gap, keys[a][ia]);
            s.positions[a] = ia;
            al.slots.push_back(std::move(s));
        }
        for (; ib < keys[b].size(); ++ib) {
            auto s = make_slot(AlignmentSlot::Status::Gap, keys[b][ib]);
            s.positions[b] = ib;
            al.slots.push_back(std::move(s));
        }
        al.passes = 1;
    }

    std::vector<bool> folded(n, false);
    folded[a] = folded[b] = true;
    auto const first_statements = cluster[a].statements();

    while (al.fold_order.size() < n) {
        // consensus: the current common statements, in order
        std::vector<std::string> consensus;
        std::vector<std::size_t> consensus_slot;
        std::vector<Node> consensus_nodes;
        for (std::size_t s = 0; s < al.slots.size(); ++s) {
            if (al.slots[s].status != AlignmentSlot::Status::Common) continue;
            consensus.push_back(al.slots[s].key);
            consensus_slot.push_back(s);
            consensus_nodes.push_back(*first_statements[*al.slots[s].positions[a]]);
        }
        Node consensus_tree(ast::NodeKind::Block, {}, std::move(consensus_nodes));

        std::size_t next = n;
        int best = std::numeric_limits<int>::max();
        for (std::size_t i = 0; i < n; ++i) {
            if (folded[i]) continue;
            int d = tree_edit_distance(consensus_tree, cluster[i].root);
            if (d < best || (d == best && ids[i] < ids[next])) {
                best = d;
                next = i;
            }
        }

        Pairs pairs = lcs_pairs(consensus, keys[next]);
        std::vector<std::optional<std::size_t>> match_of_slot(al.slots.size());
        for (auto [c, p] : pairs) match_of_slot[consensus_slot[c]] = p;

        std::vector<AlignmentSlot> merged;
        std::size_t ip = 0;
        for (std::size_t s = 0; s < al.slots.size(); ++s) {
            AlignmentSlot slot = al.slots[s];
            if (slot.status == AlignmentSlot::Status::Common) {
                if (auto p = match_of_slot[s]) {
                    for (; ip < *p; ++ip) {
                        auto g = make_slot(AlignmentSlot::Status::Gap, keys[next][ip]);
                        g.positions[next] = ip;
                        merged.push_back(std::move(g));
                    }
                    slot.positions[next] = *p;
                    ip = *p + 1;
                } else {
                    slot.status = AlignmentSlot::Status::Gap;
                }
            }
            merged.push_back(std::move(slot));
        }
        for (; ip < keys[next].size(); ++ip) {
            auto g = make_slot(AlignmentSlot::Status::Gap, keys[next][ip]);
            g.positions[next] = ip;
            merged.push_back(std::move(g));
        }
        al.slots = std::move(merged);
        al.fold_order.push_back(next);
        folded[next] = true;
        ++al.passes;
    }
    return al;
}

IrSequence signature_sequence(NormalizedSegment const& body) {
    auto stmts = statement_copies(body);
    return flatten(normalize_ir(build_cfg(stmts, false)));
}

AvsSignature extract_avs(std::vector<NormalizedSegment> const& cluster, std::vector<std::string> const& ids,
                         DistanceMatrix const& dm, VulnType vt) {
    Alignment al = progressive_align(cluster, ids, dm);
    AvsSignature avs;
    avs.vuln_type = vt;
    for (auto idx : al.fold_order) avs.provenance.push_back(cluster[idx].origin);
    std::sort(avs.provenance.begin(), avs.provenance.end(), [](auto const& x, auto const& y) {
        return std::tie(x.path, x.contract, x.function) < std::tie(y.path, y.contract, y.function);
    });

    if (cluster.size() == 1) {
        avs.body = cluster[0];
    } else {
        std::size_t lead = al.fold_order.front();
        auto stmts = cluster[lead].statements();
        std::vector<Node> core;
        for (auto const* slot : al.common()) core.push_back(*stmts[*slot->positions[lead]]);
        if (core.empty()) {
            std::string names;
            for (auto const& id : ids) names += (names.empty() ? "" : ", ") + id;
            throw EmptyCore("no statement is common to all of: " + names);
        }
        avs.body = make_segment(std::move(core), {});
    }
    avs.min_core_statements = avs.body.statements().size();
    avs.id = make_id(vt, avs.body);
    avs.body.origin = {{}, {}, avs.id, {}};
    avs.ir_signature = signature_sequence(avs.body);
    avs.ir_signature.origin = avs.id;
    return avs;
}

AvsSignature curate_avs(AvsSignature const& avs, std::vector<std::size_t> const& keep) {
    if (keep.empty()) throw std::invalid_argument("curation must keep at least one statement");
    auto stmts = avs.body.statements();
    for (auto k : keep)
        if (k >= stmts.size())
            throw std::out_of_range("statement index " + std::to_string(k) + " out of range (body has " +
                                    std::to_string(stmts.size()) + " statements)");
    std::vector<std::size_t> all(stmts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (keep == all) return avs;

    AvsSignature out = avs;
    std::vector<Node> kept;
    for (auto k : keep) kept.push_back(*stmts[k]);
    out.body = make_segment(std::move(kept), {});
    out.curated = true;
    out.curated_from = avs.id;
    out.kept = keep;
    out.min_core_statements = keep.size();
    out.id = make_id(avs.vuln_type, out.body);
    out.body.origin = {{}, {}, out.id, {}};
    out.ir_signature = signature_sequence(out.body);
    out.ir_signature.origin = out.id;
    return out;
}

json to_json(AvsSignature const& avs) {
    json prov = json::array();
    for (auto const& o : avs.provenance) prov.push_back(origin_json(o));
    json j{{"id", avs.id},
           {"vuln_type", to_string(avs.vuln_type)},
           {"min_core_statements", avs.min_core_statements},
           {"provenance", std::move(prov)},
           {"curated", avs.curated},
           {"body", segment_to_json(avs.body)},
           {"ir_signature", to_json(avs.ir_signature)}};
    if (avs.curated) {
        j["curated_from"] = avs.curated_from;
        j["kept"] = avs.kept;
    }
    return j;
}

AvsSignature avs_from_json(json const& j) {
    AvsSignature avs;
    avs.id = j.at("id").get<std::string>();
    auto vt = vuln_type_from_string(j.at("vuln_type").get<std::string>());
    if (!vt) throw std::runtime_error("unknown vuln_type in AVS '" + avs.id + "'");
    avs.vuln_type = *vt;
    avs.min_core_statements = j.value("min_core_statements", std::size_t{1});
    for (auto const& o : j.at("provenance")) avs.provenance.push_back(origin_from_json(o));
    avs.curated = j.value("curated", false);
    avs.curated_from = j.value("curated_from", std::string{});
    if (j.contains("kept")) avs.kept = j.at("kept").get<std::vector<std::size_t>>();
    avs.body = segment_from_json(j.at("body"));
    avs.ir_signature = sequence_from_json(j.at("ir_signature"));
    avs.ir_signature.origin = avs.id;
    return avs;
}

std::filesystem::path write_avs(std::filesystem::path const& dir, AvsSignature const& avs) {
    std::filesystem::create_directories(dir);
    auto path = dir / (avs.id + ".avs.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(avs).dump(2) << '\n';
    return path;
}

std::vector<AvsSignature> load_store(std::filesystem::path const& dir) {
    if (!std::filesystem::is_directory(dir)) throw std::runtime_error("AVS directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (auto const& e : std::filesystem::directory_iterator(dir)) {
        auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 9 && name.ends_with(".avs.json")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<AvsSignature> out;
    for (auto const& f : files) {
        std::ifstream in(f, std::ios::binary);
        json j;
        try {
            in >> j;
            out.push_back(avs_from_json(j));
        } catch (std::exception const& e) {
            throw std::runtime_error(f.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace avscan
