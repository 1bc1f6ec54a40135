#include "avscan/corpus.hpp"

#include "avscan/cluster.hpp"
#include "avscan/lexer.hpp"
#include "avscan/parser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace avscan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(fs::path const& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> collect_sources(std::vector<fs::path> const& inputs) {
    std::vector<fs::path> out;
    for (auto const& in : inputs) {
        if (fs::is_directory(in)) {
            for (auto const& e : fs::recursive_directory_iterator(in))
                if (e.is_regular_file() && e.path().extension() == ".sol") out.push_back(e.path());
        } else if (fs::is_regular_file(in)) {
            out.push_back(in);
        } else {
            throw std::runtime_error("no such file or directory: " + in.string());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<NormalizedSegment> labeled_segments(std::string const& text, std::string const& path) {
    auto unit = parse_source(text, path);
    std::vector<int> markers;
    {
        int line = 1;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '\n') ++line;
            if (i >= pos && text.compare(i, 11, "@vulnerable") == 0) {
                markers.push_back(line);
                pos = i + 11;
            }
        }
    }
    std::vector<std::pair<ast::FunctionDef const*, ast::ContractDef const*>> fns;
    for (auto const& ref : enumerate_functions(unit))
        if (ref.function->body) fns.emplace_back(ref.function, ref.contract);
    std::stable_sort(fns.begin(), fns.end(),
                     [](auto const& a, auto const& b) { return a.first->span.line < b.first->span.line; });

    std::set<ast::FunctionDef const*> chosen;
    for (int m : markers)
        for (auto const& [f, c] : fns)
            if (f->span.line >= m) {
                chosen.insert(f);
                break;
            }

    std::vector<NormalizedSegment> out;
    for (auto const& [f, c] : fns) {
        bool take = markers.empty() ? f->kind != ast::FunctionKind::Constructor : chosen.count(f) > 0;
        if (!take) continue;
        auto seg = normalize_function(*f, *c);
        seg.origin.path = path;
        out.push_back(std::move(seg));
    }
    return out;
}

LearnResult learn(std::vector<fs::path> const& files, VulnType vt, int height_cutoff, unsigned jobs) {
    LearnResult r;
    std::map<std::string, int> seen;
    for (auto const& f : files) {
        std::vector<NormalizedSegment> segs;
        try {
            segs = labeled_segments(read_file(f), f.generic_string());
        } catch (SyntaxError const& e) {
            r.diagnostics.push_back(e.diagnostic().format());
            continue;
        } catch (std::exception const& e) {
            r.diagnostics.push_back(f.generic_string() + ": " + e.what());
            continue;
        }
        for (auto& s : segs) {
            std::string id = f.stem().string() + ":" + s.origin.function;
            if (int n = seen[id]++) id += "#" + std::to_string(n + 1);
            r.ids.push_back(id);
            r.segments.push_back(std::move(s));
        }
    }
    if (r.segments.empty()) return r;
    r.distances = pairwise_distances(r.segments, r.ids, jobs);
    r.clusters = cluster(r.distances, height_cutoff);
    for (auto const& members : r.clusters) {
        std::vector<NormalizedSegment> segs;
        for (auto const& id : members) {
            auto it = std::find(r.ids.begin(), r.ids.end(), id);
            segs.push_back(r.segments[static_cast<std::size_t>(it - r.ids.begin())]);
        }
        try {
            r.avs.push_back(extract_avs(segs, members, r.distances, vt));
        } catch (EmptyCore const& e) {
            r.diagnostics.push_back(std::string("skipped cluster: ") + e.what());
        } catch (DegenerateCluster const& e) {
            r.diagnostics.push_back(std::string("skipped cluster: ") + e.what());
        }
    }
    return r;
}

namespace {

std::string fnv_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::unordered_set<std::string_view> kKeywords{
    "pragma", "solidity", "import", "contract", "interface", "library", "is", "function", "modifier", "event",
    "struct", "enum", "mapping", "returns", "return", "if", "else", "for", "while", "do", "break", "continue",
    "public", "private", "internal", "external", "view", "pure", "constant", "payable", "memory", "storage",
    "calldata", "emit", "new", "delete", "require", "assert", "revert", "throw", "using", "address", "bool",
    "string", "bytes", "uint", "int", "uint256", "int256", "uint8", "bytes32", "true", "false", "msg", "tx",
    "block", "this", "now", "constructor", "fallback", "receive", "var", "selfdestruct", "suicide"};

}  // namespace

CorpusIndex index_corpus(fs::path const& root) {
    if (!fs::is_directory(root)) throw std::runtime_error("corpus directory not found: " + root.string());
    CorpusIndex idx;
    idx.root = root;
    std::vector<fs::path> entries;
    for (auto const& e : fs::directory_iterator(root)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());
    for (auto const& e : entries) {
        AccountFile acct;
        acct.account = e.filename().string();
        if (fs::is_directory(e)) {
            for (auto const& f : fs::recursive_directory_iterator(e))
                if (f.is_regular_file() && f.path().extension() == ".sol") acct.files.push_back(f.path());
            // contracts of one account in alphabetical order of file name
            std::sort(acct.files.begin(), acct.files.end(),
                      [](fs::path const& a, fs::path const& b) { return a.filename() < b.filename() || (a.filename() == b.filename() && a < b); });
        } else if (e.extension() == ".sol") {
            acct.files.push_back(e);
        }
        if (acct.files.empty()) continue;
        std::string all;
        bool ok = true;
        for (auto const& f : acct.files) {
            try {
                all += read_file(f);
                all += '\n';
            } catch (std::exception const& ex) {
                idx.warnings.push_back(std::string(ex.what()) + "; account '" + acct.account + "' skipped");
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        acct.size = all.size();
        acct.fingerprint = fnv_hex(all);
        idx.accounts.push_back(std::move(acct));
    }
    return idx;
}

std::vector<std::string> token_trigrams(std::string_view source) {
    auto toks = tokenize(source);
    std::vector<std::string> norm;
    for (auto const& t : toks) {
        switch (t.kind) {
            case TokenKind::Identifier:
                norm.emplace_back(kKeywords.count(t.text) ? std::string(t.text) : "ID");
                break;
            case TokenKind::Number: norm.emplace_back("NUM"); break;
            case TokenKind::String:
            case TokenKind::HexString: norm.emplace_back("STR"); break;
            case TokenKind::Punct: norm.emplace_back(t.text); break;
            case TokenKind::End: break;
        }
    }
    std::vector<std::string> grams;
    for (std::size_t i = 0; i + 2 < norm.size(); ++i) grams.push_back(norm[i] + ' ' + norm[i + 1] + ' ' + norm[i + 2]);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    return grams;
}

double trigram_jaccard(std::vector<std::string> const& a, std::vector<std::string> const& b) {
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

int bucket_index(double s) {
    if (s >= 1.0) return 10;
    int b = static_cast<int>(std::floor(s * 10.0));
    return std::clamp(b, 0, 9);
}

SimilarityHistogram similarity_histogram(CorpusIndex const& index, std::vector<std::string>* warnings) {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> grams;
    for (auto const& acct : index.accounts) {
        std::string all;
        try {
            for (auto const& f : acct.files) all += read_file(f) + '\n';
            grams.push_back(token_trigrams(all));
            names.push_back(acct.account);
        } catch (std::exception const& e) {
            if (warnings) warnings->push_back("account '" + acct.account + "' skipped: " + e.what());
        }
    }
    SimilarityHistogram h;
    for (int b = 0; b < 10; ++b) h.buckets.push_back({b * 10, b * 10 + 10, 0});
    h.buckets.push_back({100, 100, 0});
    std::vector<double> best(names.size(), 0.0);
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            double s = trigram_jaccard(grams[i], grams[j]);
            best[i] = std::max(best[i], s);
            best[j] = std::max(best[j], s);
        }
    for (std::size_t i = 0; i < names.size(); ++i) {
        ++h.buckets[static_cast<std::size_t>(bucket_index(best[i]))].count;
        h.per_account.emplace_back(names[i], best[i]);
    }
    h.total = names.size();
    return h;
}

json to_json(SimilarityHistogram const& h) {
    json buckets = json::array();
    for (auto const& b : h.buckets) buckets.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
    json accounts = json::array();
    for (auto const& [name, s] : h.per_account) accounts.push_back({{"account", name}, {"max_similarity", s}});
    return json{{"total", h.total}, {"buckets", std::move(buckets)}, {"accounts", std::move(accounts)}};
}

}  // namespace avscan
