#pragma once

#include "avscan/ast.hpp"
#include "avscan/normalize.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace avscan {

/// Ordered-tree edit distance with unit insert/delete/relabel costs. Two
/// nodes relabel for free iff kind and label are equal.
int tree_edit_distance(ast::Node const& a, ast::Node const& b);

struct DistanceMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<int>> d;

    std::size_t size() const { return labels.size(); }
    int at(std::size_t i, std::size_t j) const { return d[i][j]; }
    std::size_t index_of(std::string const& label) const;
};

DistanceMatrix pairwise_distances(std::vector<NormalizedSegment> const& segs,
                                  std::vector<std::string> const& ids, unsigned jobs = 1);

struct Merge {
    std::size_t left = 0;   // cluster node ids: leaves are 0..n-1, merge k creates node n+k
    std::size_t right = 0;
    int height = 0;
};

struct ClusterTree {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;
};

/// Complete-linkage agglomeration. Equal linkages merge the pair whose
/// (smaller, larger) representative ids sort first, where a cluster is
/// represented by its smallest leaf id.
ClusterTree complete_linkage(DistanceMatrix const& dm);

/// Partition obtained by applying every merge of height <= cutoff. Members are
/// sorted by id and clusters by their first member.
std::vector<std::vector<std::string>> cut_tree(ClusterTree const& tree, int cutoff);

std::vector<std::vector<std::string>> cluster(DistanceMatrix const& dm, int height_cutoff);

nlohmann::json to_json(DistanceMatrix const& dm);
nlohmann::json to_json(ClusterTree const& tree);

}  // namespace avscan
