// avscan command-line driver.

#include "avscan/avs.hpp"
#include "avscan/cfg.hpp"
#include "avscan/cluster.hpp"
#include "avscan/corpus.hpp"
#include "avscan/lexer.hpp"
#include "avscan/matcher.hpp"
#include "avscan/normalize.hpp"
#include "avscan/parser.hpp"
#include "avscan/rules.hpp"
#include "avscan/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace avscan;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitFatal = 2;

struct Fatal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(std::string const& path) {
    std::map<std::string, std::string> out;
    if (path.empty()) return out;
    std::ifstream in(path);
    if (!in) throw Fatal("cannot read config file " + path);
    std::string line;
    int no = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++no;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Fatal(path + ":" + std::to_string(no) + ": expected key = value");
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        out[trim(line.substr(0, eq))] = value;
    }
    return out;
}

std::vector<std::string> split_list(std::string const& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::set<DmId> parse_dms(std::vector<std::string> const& items) {
    std::set<DmId> out;
    for (auto const& item : items) {
        for (auto const& tok : split_list(item)) {
            if (tok == "all" || tok == "ALL") {
                for (int i = 1; i <= 10; ++i) out.insert(static_cast<DmId>(i));
                continue;
            }
            auto dm = dm_from_string(tok);
            if (!dm) throw Fatal("unknown defense mechanism '" + tok + "'");
            out.insert(*dm);
        }
    }
    return out;
}

VulnType parse_type(std::string const& s) {
    auto vt = vuln_type_from_string(s);
    if (!vt) throw Fatal("unknown vulnerability type '" + s + "'");
    return *vt;
}

ast::SourceUnit parse_file(fs::path const& p) { return parse_source(read_file(p), p.generic_string()); }

void write_output(std::string const& text, std::string const& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Fatal("cannot write " + out_path);
    out << text;
}

struct Common {
    std::string config_path;
    unsigned jobs = 1;
};

struct ScanOpts {
    std::vector<std::string> paths;
    std::string avs_dir;
    bool rules_only = false;
    bool avs_only = false;
    std::vector<std::string> disable_dm;
    double eta = 0.7;
    std::size_t itv = 0;
    std::string format = "json";
    std::string output;
    std::string tx_origin_rule = "smartcheck";
};

int run_scan(ScanOpts o, Common const& common, CLI::App const& cmd) {
    auto conf = read_config(common.config_path);
    auto from_conf = [&](char const* flag, char const* key, auto& field) {
        if (cmd.count(flag) == 0 && conf.count(key)) {
            using T = std::decay_t<decltype(field)>;
            if constexpr (std::is_same_v<T, std::string>) field = conf[key];
            else if constexpr (std::is_same_v<T, double>) field = std::stod(conf[key]);
            else if constexpr (std::is_same_v<T, std::size_t>) field = std::stoul(conf[key]);
            else if constexpr (std::is_same_v<T, bool>) field = conf[key] == "true" || conf[key] == "1";
        }
    };
    from_conf("--avs-dir", "avs_dir", o.avs_dir);
    from_conf("--eta", "eta", o.eta);
    from_conf("--itv", "itv", o.itv);
    from_conf("--format", "format", o.format);
    from_conf("--tx-origin-rule", "tx_origin_rule", o.tx_origin_rule);
    from_conf("--rules-only", "rules_only", o.rules_only);
    from_conf("--avs-only", "avs_only", o.avs_only);
    if (cmd.count("--disable-dm") == 0 && conf.count("disable_dm")) o.disable_dm = {conf["disable_dm"]};

    ScanConfig cfg;
    cfg.match.eta = o.eta;
    cfg.match.itv = o.itv;
    try {
        cfg.match.validate();
    } catch (std::exception const& e) {
        throw Fatal(e.what());
    }
    if (o.rules_only && o.avs_only) throw Fatal("--rules-only and --avs-only are mutually exclusive");
    cfg.use_avs = !o.rules_only;
    cfg.use_rules = !o.avs_only;
    cfg.disabled_dms = parse_dms(o.disable_dm);
    if (o.tx_origin_rule != "smartcheck" && o.tx_origin_rule != "slither")
        throw Fatal("--tx-origin-rule must be smartcheck or slither");
    cfg.tx_origin_modifiers = o.tx_origin_rule == "smartcheck";

    std::vector<AvsSignature> store;
    if (cfg.use_avs && !o.avs_dir.empty()) store = load_store(o.avs_dir);
    auto prepared = prepare_store(store);

    std::vector<fs::path> inputs(o.paths.begin(), o.paths.end());
    auto files = collect_sources(inputs);

    Report report;
    report.tool_version = kToolVersion;
    report.config = cfg.to_json();
    report.config["avs_count"] = store.size();
    report.files.resize(files.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < files.size();) {
            FileReport fr;
            try {
                fr = scan_unit(parse_file(files[i]), prepared, cfg);
            } catch (SyntaxError const& e) {
                fr.warnings.push_back(e.diagnostic().format());
            } catch (std::exception const& e) {
                fr.warnings.push_back(files[i].generic_string() + ": " + e.what());
            }
            fr.path = files[i].generic_string();
            report.files[i] = std::move(fr);
        }
    };
    unsigned n = std::max(1u, std::min<unsigned>(common.jobs, static_cast<unsigned>(files.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (o.format == "json") write_output(to_json(report).dump(2) + "\n", o.output);
    else if (o.format == "text") write_output(to_text(report), o.output);
    else throw Fatal("--format must be json or text");
    return report.reported_count() > 0 ? kExitFindings : kExitClean;
}

struct LearnOpts {
    std::vector<std::string> paths;
    std::string type;
    int cutoff = 50;
    std::string out_dir;
    bool audit = false;
};

int run_learn(LearnOpts o, Common const& common, CLI::App const& cmd) {
    auto conf = read_config(common.config_path);
    if (cmd.count("--cutoff") == 0 && conf.count("cutoff")) o.cutoff = std::stoi(conf["cutoff"]);
    VulnType vt = parse_type(o.type);
    std::vector<fs::path> inputs(o.paths.begin(), o.paths.end());
    auto res = learn(collect_sources(inputs), vt, o.cutoff, common.jobs);

    json summary{{"vuln_type", to_string(vt)}, {"cutoff", o.cutoff}};
    json clusters = json::array();
    for (auto const& c : res.clusters) clusters.push_back(c);
    summary["clusters"] = std::move(clusters);
    json ids = json::array();
    for (auto const& a : res.avs) {
        ids.push_back(a.id);
        if (!o.out_dir.empty()) write_avs(o.out_dir, a);
    }
    summary["avs"] = std::move(ids);
    summary["diagnostics"] = res.diagnostics;
    if (o.audit) {
        summary["distances"] = to_json(res.distances);
        if (!res.segments.empty()) summary["tree"] = to_json(complete_linkage(res.distances));
        json aligned = json::array();
        for (auto const& c : res.clusters) {
            std::vector<NormalizedSegment> segs;
            for (auto const& id : c) {
                auto it = std::find(res.ids.begin(), res.ids.end(), id);
                segs.push_back(res.segments[static_cast<std::size_t>(it - res.ids.begin())]);
            }
            json slots = json::array();
            try {
                auto al = progressive_align(segs, c, res.distances);
                for (auto const& s : al.slots) {
                    json pos = json::array();
                    for (auto const& p : s.positions) pos.push_back(p ? json(*p) : json(nullptr));
                    slots.push_back({{"status", s.status == AlignmentSlot::Status::Common ? "common" : "gap"},
                                     {"positions", std::move(pos)},
                                     {"key", s.key}});
                }
            } catch (std::exception const& e) {
                slots.push_back({{"error", e.what()}});
            }
            aligned.push_back({{"members", c}, {"alignment", std::move(slots)}});
        }
        summary["alignments"] = std::move(aligned);
    }
    std::cout << summary.dump(2) << "\n";
    for (auto const& d : res.diagnostics) std::cerr << d << "\n";
    if (res.avs.empty() && !res.diagnostics.empty()) return kExitFatal;
    return kExitClean;
}

struct CurateOpts {
    std::string avs_file;
    std::vector<std::size_t> keep;
    std::string out_dir;
};

int run_curate(CurateOpts const& o) {
    auto avs = avs_from_json(json::parse(read_file(o.avs_file)));
    AvsSignature out;
    try {
        out = curate_avs(avs, o.keep);
    } catch (std::exception const& e) {
        throw Fatal(e.what());
    }
    if (!o.out_dir.empty()) write_avs(o.out_dir, out);
    else std::cout << to_json(out).dump(2) << "\n";
    return kExitClean;
}

struct MatchOpts {
    std::string avs;  // file or directory
    std::string target;
    std::string function;
    double eta = 0.7;
    std::size_t itv = 0;
};

int run_match(MatchOpts const& o) {
    std::vector<AvsSignature> store;
    if (fs::is_directory(o.avs)) store = load_store(o.avs);
    else store.push_back(avs_from_json(json::parse(read_file(o.avs))));
    MatchConfig mc{o.eta, o.itv};
    mc.validate();
    auto unit = parse_file(o.target);
    json results = json::array();
    bool any = false;
    for (auto const& ref : enumerate_functions(unit)) {
        if (!ref.function->body) continue;
        if (!o.function.empty() && ref.function->display_name() != o.function) continue;
        IrSequence target;
        try {
            target = flatten(normalize_ir(build_cfg(*ref.function, true)));
        } catch (UnsupportedConstruct const& e) {
            std::cerr << unit.path << ":" << e.span().line << ": " << e.what() << "\n";
            continue;
        }
        auto keys = sequence_keys(target);
        for (auto const& a : store) {
            auto r = match_sequences(sequence_keys(a.ir_signature), keys, mc);
            any = any || r.matched;
            results.push_back({{"avs", a.id},
                               {"contract", ref.contract->name},
                               {"function", ref.function->display_name()},
                               {"matched", r.matched},
                               {"method", to_string(r.method)},
                               {"similarity", r.similarity},
                               {"matched_span", r.matched_span}});
        }
    }
    std::cout << results.dump(2) << "\n";
    return any ? kExitFindings : kExitClean;
}

int run_similarity(std::string const& dir, std::string const& format) {
    auto idx = index_corpus(dir);
    std::vector<std::string> warnings = idx.warnings;
    auto h = similarity_histogram(idx, &warnings);
    for (auto const& w : warnings) std::cerr << "warning: " << w << "\n";
    if (format == "json") {
        std::cout << to_json(h).dump(2) << "\n";
    } else {
        for (auto const& b : h.buckets) {
            if (b.lower == 100) std::cout << "   100%";
            else std::cout << (b.lower < 10 ? "  " : " ") << b.lower << "-" << b.upper << "%";
            std::cout << "  " << b.count << "\n";
        }
        std::cout << "total " << h.total << "\n";
    }
    return kExitClean;
}

struct DumpOpts {
    std::string file;
    std::string function;
    bool ast = false, normalized = false, cfg = false, ir = false;
};

int run_dump(DumpOpts const& o) {
    auto unit = parse_file(o.file);
    for (auto const& d : unit.diagnostics) std::cerr << "warning: " << d.format() << "\n";
    for (auto const& ref : enumerate_functions(unit)) {
        auto const& f = *ref.function;
        if (!f.body) continue;
        if (!o.function.empty() && f.display_name() != o.function) continue;
        std::string name = ref.contract->name + "." + f.display_name();
        if (o.ast) std::cout << name << "\n" << node_to_json(*f.body).dump(2) << "\n";
        if (o.normalized) {
            auto seg = normalize_function(f, *ref.contract);
            seg.origin.path = unit.path;
            std::cout << segment_to_json(seg).dump(2) << "\n";
        }
        if (o.cfg) std::cout << to_dot(build_cfg(f, false), name);
        if (o.ir) {
            auto seq = flatten(normalize_ir(build_cfg(f, false)), name);
            std::cout << "# " << name << "\n";
            for (auto const& it : seq.items) std::cout << it.node << "\t" << it.ins.render() << "\n";
        }
    }
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"avscan: vulnerability signatures and refined rules for Solidity"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "key = value configuration file");
    app.add_option("-j,--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);

    ScanOpts scan;
    auto* scan_cmd = app.add_subcommand("scan", "scan Solidity files for vulnerabilities");
    scan_cmd->add_option("paths", scan.paths, "files or directories")->required();
    scan_cmd->add_option("--avs-dir", scan.avs_dir, "AVS store directory");
    scan_cmd->add_flag("--rules-only", scan.rules_only, "skip AVS matching");
    scan_cmd->add_flag("--avs-only", scan.avs_only, "skip detection rules");
    scan_cmd->add_option("--disable-dm", scan.disable_dm, "comma separated DM ids, or 'all'");
    scan_cmd->add_option("--eta", scan.eta, "similarity threshold in (0, 1]");
    scan_cmd->add_option("--itv", scan.itv, "window step (0 = half the signature length)");
    scan_cmd->add_option("--format", scan.format, "json or text");
    scan_cmd->add_option("-o,--output", scan.output, "write the report here instead of stdout");
    scan_cmd->add_option("--tx-origin-rule", scan.tx_origin_rule, "smartcheck (with modifiers) or slither");

    LearnOpts learn_o;
    auto* learn_cmd = app.add_subcommand("learn", "learn AVS from labeled vulnerable functions");
    learn_cmd->add_option("paths", learn_o.paths, "labeled files or directories")->required();
    learn_cmd->add_option("--type", learn_o.type, "vulnerability type")->required();
    learn_cmd->add_option("--cutoff", learn_o.cutoff, "clustering height cutoff");
    learn_cmd->add_option("--out", learn_o.out_dir, "AVS store directory to write");
    learn_cmd->add_flag("--audit", learn_o.audit, "include distances, tree and alignments");

    CurateOpts curate;
    auto* curate_cmd = app.add_subcommand("curate", "keep a subset of an AVS body's statements");
    curate_cmd->add_option("avs", curate.avs_file, "AVS JSON file")->required()->check(CLI::ExistingFile);
    curate_cmd->add_option("--keep", curate.keep, "statement indices to keep")->required()->delimiter(',');
    curate_cmd->add_option("--out", curate.out_dir, "AVS store directory to write");

    MatchOpts match;
    auto* match_cmd = app.add_subcommand("match", "match AVS against the functions of one file");
    match_cmd->add_option("avs", match.avs, "AVS file or store directory")->required()->check(CLI::ExistingPath);
    match_cmd->add_option("target", match.target, "Solidity file")->required()->check(CLI::ExistingFile);
    match_cmd->add_option("--function", match.function, "only this function");
    match_cmd->add_option("--eta", match.eta, "similarity threshold in (0, 1]");
    match_cmd->add_option("--itv", match.itv, "window step");

    std::string sim_dir, sim_format = "text";
    auto* sim_cmd = app.add_subcommand("similarity", "file-similarity histogram of a corpus");
    sim_cmd->add_option("dir", sim_dir, "corpus directory, one subdirectory per account")->required();
    sim_cmd->add_option("--format", sim_format, "json or text");

    DumpOpts dump;
    auto* dump_cmd = app.add_subcommand("dump", "print AST, normalized segments, CFG or IR");
    dump_cmd->add_option("file", dump.file, "Solidity file")->required()->check(CLI::ExistingFile);
    dump_cmd->add_option("--function", dump.function, "only this function");
    dump_cmd->add_flag("--ast", dump.ast);
    dump_cmd->add_flag("--normalized", dump.normalized);
    dump_cmd->add_flag("--cfg", dump.cfg, "graphviz dot");
    dump_cmd->add_flag("--ir", dump.ir, "flattened normalized IR");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitFatal;
    }

    try {
        if (*scan_cmd) return run_scan(scan, common, *scan_cmd);
        if (*learn_cmd) return run_learn(learn_o, common, *learn_cmd);
        if (*curate_cmd) return run_curate(curate);
        if (*match_cmd) return run_match(match);
        if (*sim_cmd) return run_similarity(sim_dir, sim_format);
        if (*dump_cmd) {
            if (!dump.ast && !dump.normalized && !dump.cfg && !dump.ir) dump.ir = true;
            return run_dump(dump);
        }
    } catch (SyntaxError const& e) {
        std::cerr << "error: " << e.diagnostic().format() << "\n";
        return kExitFatal;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitFatal;
}
