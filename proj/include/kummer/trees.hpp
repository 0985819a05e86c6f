#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "kummer/distributions.hpp"

namespace kummer::trees {

// Undirected weighted tree: node weights c_i, edge weights c_{i,j}.  Node ids
// are arbitrary integers; vectors over nodes use the canonical order ids()
// (ascending).  Orientations (parent/children/postorder) are precomputed for
// every possible root at construction, so all queries are thread-safe.
class TreeSpec {
public:
    static TreeSpec make(const std::vector<std::pair<int, double>>& nodes,
                         const std::vector<std::tuple<int, int, double>>& edges);
    static TreeSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::size_t size() const { return ids_.size(); }
    const std::vector<int>& ids() const { return ids_; }
    std::size_t index_of(int id) const;  // DomainError if unknown
    bool is_leaf(int id) const;
    std::vector<int> leaves() const;
    double node_weight(int id) const;
    double edge_weight(int u, int v) const;

    // orientation rooted at `root`: children point away from the root
    struct Orientation {
        std::vector<std::size_t> postorder;            // children before parents
        std::vector<std::size_t> parent;               // parent index; root maps to itself
        std::vector<std::vector<std::size_t>> children;
    };
    const Orientation& oriented(int root) const;

private:
    TreeSpec() = default;
    std::vector<int> ids_;
    std::vector<double> node_w_;
    std::vector<std::vector<std::size_t>> adj_;
    std::map<std::pair<std::size_t, std::size_t>, double> edge_w_;  // key (min,max)
    std::vector<Orientation> orient_;  // per root index
};

// s_{i,(r)} = s_i * prod_{j in children_r(i)} (1 + (c_{i,j}/c_i) s_{j,(r)}),
// evaluated children-first; entries follow tree.ids() order
std::vector<double> phi_forward(const TreeSpec& tree, int root, std::span<const double> s);
// exact inverse: s_i = t_i / prod_{j in children_r(i)} (1 + (c_{i,j}/c_i) t_j)
std::vector<double> phi_inverse(const TreeSpec& tree, int root, std::span<const double> t);

// marginal law of each component of Phi_root(X) under the corollary, together
// with the scale: component_i = scale_i * (draw from law_i)
struct NodeMarginal {
    int id;
    dist::DistributionSpec law;
    double scale;
};
std::vector<NodeMarginal> corollary_marginals(const TreeSpec& tree, int root,
                                              std::span<const double> a, double c);

// joint sample whose image under Phi_{ref_leaf} has independent components
// with the corollary marginals; values[k] holds node ids()[k]'s n draws
struct TreeSample {
    std::vector<int> ids;
    std::vector<std::vector<double>> values;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};
TreeSample tree_joint_sample(const TreeSpec& tree, int ref_leaf, std::span<const double> a,
                             double c, std::size_t n, std::uint64_t seed);

}  // namespace kummer::trees
