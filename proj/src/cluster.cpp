#include "avscan/cluster.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace avscan {

using ast::Node;

namespace {

// Postorder view of a tree used by the Zhang-Shasha recurrences. Indices are
// 1-based to keep the recurrences close to their textbook form.
struct Flat {
    std::vector<int> label;     // interned (kind, label)
    std::vector<int> leftmost;  // leftmost leaf descendant
    std::vector<int> keyroots;
};

class Interner {
public:
    int id(Node const& n) {
        std::string key(ast::to_string(n.kind));
        key += '\x1f';
        key += n.text;
        auto [it, inserted] = ids_.try_emplace(std::move(key), static_cast<int>(ids_.size()));
        return it->second;
    }

private:
    std::map<std::string, int> ids_;
};

int flatten_post(Node const& n, Flat& f, Interner& in) {
    int first_leaf = -1;
    for (auto const& c : n.children) {
        int leaf = flatten_post(c, f, in);
        if (first_leaf < 0) first_leaf = leaf;
    }
    f.label.push_back(in.id(n));
    int self = static_cast<int>(f.label.size()) - 1;
    if (first_leaf < 0) first_leaf = self;
    f.leftmost.push_back(first_leaf);
    return first_leaf;
}

Flat make_flat(Node const& root, Interner& in) {
    Flat f;
    f.label.push_back(-1);
    f.leftmost.push_back(0);
    flatten_post(root, f, in);
    int n = static_cast<int>(f.label.size()) - 1;
    // keyroots: the highest node for each distinct leftmost leaf
    std::vector<int> seen(n + 1, 0);
    for (int i = n; i >= 1; --i) {
        if (!seen[f.leftmost[i]]) {
            f.keyroots.push_back(i);
            seen[f.leftmost[i]] = 1;
        }
    }
    std::sort(f.keyroots.begin(), f.keyroots.end());
    return f;
}

}  // namespace

int tree_edit_distance(Node const& a, Node const& b) {
    Interner in;
    Flat fa = make_flat(a, in);
    Flat fb = make_flat(b, in);
    int n = static_cast<int>(fa.label.size()) - 1;
    int m = static_cast<int>(fb.label.size()) - 1;
    std::vector<std::vector<int>> td(n + 1, std::vector<int>(m + 1, 0));
    std::vector<std::vector<int>> fd(n + 2, std::vector<int>(m + 2, 0));

    for (int i : fa.keyroots) {
        for (int j : fb.keyroots) {
            int li = fa.leftmost[i];
            int lj = fb.leftmost[j];
            // fd is indexed with offsets so that row li-1 / column lj-1 is the empty forest
            auto F = [&](int x, int y) -> int& { return fd[x - li + 1][y - lj + 1]; };
            F(li - 1, lj - 1) = 0;
            for (int x = li; x <= i; ++x) F(x, lj - 1) = F(x - 1, lj - 1) + 1;
            for (int y = lj; y <= j; ++y) F(li - 1, y) = F(li - 1, y - 1) + 1;
            for (int x = li; x <= i; ++x) {
                for (int y = lj; y <= j; ++y) {
                    int del = F(x - 1, y) + 1;
                    int ins = F(x, y - 1) + 1;
                    if (fa.leftmost[x] == li && fb.leftmost[y] == lj) {
                        int rel = F(x - 1, y - 1) + (fa.label[x] == fb.label[y] ? 0 : 1);
                        F(x, y) = std::min({del, ins, rel});
                        td[x][y] = F(x, y);
                    } else {
                        int sub = F(fa.leftmost[x] - 1, fb.leftmost[y] - 1) + td[x][y];
                        F(x, y) = std::min({del, ins, sub});
                    }
                }
            }
        }
    }
    return td[n][m];
}

std::size_t DistanceMatrix::index_of(std::string const& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw std::out_of_range("no segment '" + label + "' in distance matrix");
    return static_cast<std::size_t>(it - labels.begin());
}

DistanceMatrix pairwise_distances(std::vector<NormalizedSegment> const& segs,
                                  std::vector<std::string> const& ids, unsigned jobs) {
    if (segs.size() != ids.size()) throw std::invalid_argument("segment/id count mismatch");
    DistanceMatrix dm;
    dm.labels = ids;
    std::size_t n = segs.size();
    dm.d.assign(n, std::vector<int>(n, 0));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t k = begin; k < pairs.size(); k += step) {
            auto [i, j] = pairs[k];
            int d = tree_edit_distance(segs[i].root, segs[j].root);
            dm.d[i][j] = d;
            dm.d[j][i] = d;
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, pairs.size()))));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t, jobs);
        for (auto& t : pool) t.join();
    }
    return dm;
}

ClusterTree complete_linkage(DistanceMatrix const& dm) {
    ClusterTree tree;
    tree.leaves = dm.labels;
    std::size_t n = dm.size();
    struct Active {
        std::size_t node;
        std::vector<std::size_t> members;
        std::string rep;  // smallest leaf id
    };
    std::vector<Active> active;
    for (std::size_t i = 0; i < n; ++i) active.push_back({i, {i}, dm.labels[i]});

    auto linkage = [&](Active const& a, Active const& b) {
        int worst = 0;
        for (auto i : a.members)
            for (auto j : b.members) worst = std::max(worst, dm.d[i][j]);
        return worst;
    };

    while (active.size() > 1) {
        std::size_t best_a = 0, best_b = 1;
        int best_h = std::numeric_limits<int>::max();
        std::pair<std::string, std::string> best_key;
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                int h = linkage(active[a], active[b]);
                auto key = std::minmax(active[a].rep, active[b].rep);
                std::pair<std::string, std::string> k{key.first, key.second};
                if (h < best_h || (h == best_h && k < best_key)) {
                    best_h = h;
                    best_a = a;
                    best_b = b;
                    best_key = std::move(k);
                }
            }
        }
        Active& A = active[best_a];
        Active& B = active[best_b];
        bool a_first = A.rep < B.rep;
        Merge m{a_first ? A.node : B.node, a_first ? B.node : A.node, best_h};
        tree.merges.push_back(m);
        Active merged{n + tree.merges.size() - 1, A.members, std::min(A.rep, B.rep)};
        merged.members.insert(merged.members.end(), B.members.begin(), B.members.end());
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
        active[best_a] = std::move(merged);
    }
    return tree;
}

std::vector<std::vector<std::string>> cut_tree(ClusterTree const& tree, int cutoff) {
    std::size_t n = tree.leaves.size();
    std::vector<std::vector<std::size_t>> members(n + tree.merges.size());
    std::vector<bool> alive(n + tree.merges.size(), false);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
        alive[i] = true;
    }
    for (std::size_t k = 0; k < tree.merges.size(); ++k) {
        auto const& m = tree.merges[k];
        if (m.height > cutoff) continue;
        std::size_t node = n + k;
        members[node] = members[m.left];
        members[node].insert(members[node].end(), members[m.right].begin(), members[m.right].end());
        alive[m.left] = alive[m.right] = false;
        alive[node] = true;
    }
    std::vector<std::vector<std::string>> out;
    for (std::size_t node = 0; node < alive.size(); ++node) {
        if (!alive[node]) continue;
        std::vector<std::string> ids;
        for (auto i : members[node]) ids.push_back(tree.leaves[i]);
        std::sort(ids.begin(), ids.end());
        out.push_back(std::move(ids));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::string>> cluster(DistanceMatrix const& dm, int height_cutoff) {
    if (dm.size() == 0) return {};
    return cut_tree(complete_linkage(dm), height_cutoff);
}

nlohmann::json to_json(DistanceMatrix const& dm) {
    return nlohmann::json{{"labels", dm.labels}, {"d", dm.d}};
}

nlohmann::json to_json(ClusterTree const& tree) {
    nlohmann::json merges = nlohmann::json::array();
    for (auto const& m : tree.merges)
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}});
    return nlohmann::json{{"leaves", tree.leaves}, {"merges", std::move(merges)}};
}

}  // namespace avscan
