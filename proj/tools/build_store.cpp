// Rebuilds the bundled AVS store from a training manifest.
//
//   avscan-build-store data/train/manifest.txt --out data/avs
//
// Each manifest line names a vulnerability type, a group directory relative to
// the manifest and optionally `keep=i,j,...`. All labeled functions of a group
// form one cluster and yield one AVS.

#include "avscan/avs.hpp"
#include "avscan/corpus.hpp"

#include <CLI11.hpp>

#include <climits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace avscan;

namespace {

struct Entry {
    VulnType type;
    std::string group;
    std::vector<std::size_t> keep;
    int line = 0;
};

std::vector<Entry> read_manifest(fs::path const& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<Entry> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ss(line);
        std::string type, group, extra;
        if (!(ss >> type)) continue;
        auto where = path.string() + ":" + std::to_string(n) + ": ";
        auto vt = vuln_type_from_string(type);
        if (!vt) throw std::runtime_error(where + "unknown vulnerability type '" + type + "'");
        if (!(ss >> group)) throw std::runtime_error(where + "missing group directory");
        Entry e{*vt, group, {}, n};
        while (ss >> extra) {
            if (extra.rfind("keep=", 0) != 0) throw std::runtime_error(where + "unexpected '" + extra + "'");
            std::istringstream ks(extra.substr(5));
            std::string idx;
            while (std::getline(ks, idx, ',')) e.keep.push_back(std::stoul(idx));
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rebuild the bundled AVS store"};
    std::string manifest, out_dir;
    bool clean = false;
    app.add_option("manifest", manifest, "training manifest")->required();
    app.add_option("--out", out_dir, "store directory")->required();
    app.add_flag("--clean", clean, "remove existing *.avs.json files first");
    CLI11_PARSE(app, argc, argv);

    try {
        fs::path base = fs::path(manifest).parent_path();
        auto entries = read_manifest(manifest);
        fs::create_directories(out_dir);
        if (clean)
            for (auto const& e : fs::directory_iterator(out_dir))
                if (e.path().string().ends_with(".avs.json")) fs::remove(e.path());

        int failures = 0;
        for (auto const& e : entries) {
            auto files = collect_sources({base / e.group});
            auto r = learn(files, e.type, INT_MAX);
            for (auto const& d : r.diagnostics) std::cerr << e.group << ": " << d << "\n";
            if (r.avs.size() != 1) {
                std::cerr << e.group << ": expected one AVS, got " << r.avs.size() << "\n";
                ++failures;
                continue;
            }
            auto avs = r.avs.front();
            // provenance relative to the manifest so output does not depend on the cwd
            for (auto& p : avs.provenance) p.path = fs::path(p.path).lexically_relative(base).generic_string();
            if (!e.keep.empty()) avs = curate_avs(avs, e.keep);
            auto path = write_avs(out_dir, avs);
            std::cout << path.filename().string() << "  " << e.group << "  " << avs.ir_signature.size()
                      << " ir\n";
        }
        return failures ? 2 : 0;
    } catch (std::exception const& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
