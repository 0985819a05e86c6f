#include "kummer/trees.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "kummer/errors.hpp"

namespace kummer::trees {

TreeSpec TreeSpec::make(const std::vector<std::pair<int, double>>& nodes,
                        const std::vector<std::tuple<int, int, double>>& edges) {
    TreeSpec t;
    for (const auto& [id, w] : nodes) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw DomainError("tree: node weights must be strictly positive");
        t.ids_.push_back(id);
    }
    std::sort(t.ids_.begin(), t.ids_.end());
    if (std::adjacent_find(t.ids_.begin(), t.ids_.end()) != t.ids_.end())
        throw DomainError("tree: duplicate node id");
    if (t.ids_.size() < 2) throw DomainError("tree: needs at least two nodes");

    t.node_w_.resize(t.ids_.size());
    for (const auto& [id, w] : nodes) t.node_w_[t.index_of(id)] = w;

    t.adj_.resize(t.ids_.size());
    for (const auto& [u, v, w] : edges) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw DomainError("tree: edge weights must be strictly positive");
        if (u == v) throw DomainError("tree: self-loop");
        const std::size_t iu = t.index_of(u), iv = t.index_of(v);
        const std::pair<std::size_t, std::size_t> key{std::min(iu, iv), std::max(iu, iv)};
        if (t.edge_w_.count(key)) throw DomainError("tree: duplicate edge");
        t.edge_w_[key] = w;
        t.adj_[iu].push_back(iv);
        t.adj_[iv].push_back(iu);
    }
    if (edges.size() != t.ids_.size() - 1)
        throw DomainError("tree: edge count must be node count - 1");
    for (auto& a : t.adj_) std::sort(a.begin(), a.end());

    // connectivity; with |E| = |V|-1 this also rules out cycles
    std::vector<char> seen(t.ids_.size(), 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t cnt = 0;
    while (!q.empty()) {
        const std::size_t i = q.front();
        q.pop();
        ++cnt;
        for (std::size_t j : t.adj_[i])
            if (!seen[j]) {
                seen[j] = 1;
                q.push(j);
            }
    }
    if (cnt != t.ids_.size()) throw DomainError("tree: graph is not connected");

    // eager orientation for every root: BFS order gives parents-before-children,
    // its reverse is a valid postorder
    t.orient_.resize(t.ids_.size());
    for (std::size_t r = 0; r < t.ids_.size(); ++r) {
        Orientation& o = t.orient_[r];
        o.parent.assign(t.ids_.size(), r);
        o.children.assign(t.ids_.size(), {});
        std::vector<std::size_t> bfs{r};
        std::vector<char> vis(t.ids_.size(), 0);
        vis[r] = 1;
        for (std::size_t h = 0; h < bfs.size(); ++h) {
            const std::size_t i = bfs[h];
            for (std::size_t j : t.adj_[i])
                if (!vis[j]) {
                    vis[j] = 1;
                    o.parent[j] = i;
                    o.children[i].push_back(j);
                    bfs.push_back(j);
                }
        }
        o.postorder.assign(bfs.rbegin(), bfs.rend());
    }
    return t;
}

TreeSpec TreeSpec::from_json(const nlohmann::json& j) {
    std::vector<std::pair<int, double>> nodes;
    std::vector<std::tuple<int, int, double>> edges;
    try {
        for (const auto& n : j.at("nodes"))
            nodes.emplace_back(n.at("id").get<int>(), n.at("c").get<double>());
        for (const auto& e : j.at("edges"))
            edges.emplace_back(e.at("u").get<int>(), e.at("v").get<int>(),
                               e.at("c").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad tree json: ") + e.what());
    }
    return make(nodes, edges);
}

nlohmann::json TreeSpec::to_json() const {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ids_.size(); ++i)
        j["nodes"].push_back({{"id", ids_[i]}, {"c", node_w_[i]}});
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [k, w] : edge_w_)
        j["edges"].push_back({{"u", ids_[k.first]}, {"v", ids_[k.second]}, {"c", w}});
    return j;
}

std::size_t TreeSpec::index_of(int id) const {
    const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) throw DomainError("tree: unknown node id");
    return static_cast<std::size_t>(it - ids_.begin());
}

bool TreeSpec::is_leaf(int id) const { return adj_[index_of(id)].size() == 1; }

std::vector<int> TreeSpec::leaves() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (adj_[i].size() == 1) out.push_back(ids_[i]);
    return out;
}

double TreeSpec::node_weight(int id) const { return node_w_[index_of(id)]; }

double TreeSpec::edge_weight(int u, int v) const {
    const std::size_t iu = index_of(u), iv = index_of(v);
    const auto it = edge_w_.find({std::min(iu, iv), std::max(iu, iv)});
    if (it == edge_w_.end()) throw DomainError("tree: no such edge");
    return it->second;
}

const TreeSpec::Orientation& TreeSpec::oriented(int root) const {
    return orient_[index_of(root)];
}

namespace {

void require_tree_vector(const TreeSpec& tree, std::span<const double> s, const char* who) {
    if (s.size() != tree.size())
        throw DomainError(std::string(who) + ": vector length must equal node count");
    for (double v : s)
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(std::string(who) + ": entries must be strictly positive");
}

double edge_w_by_index(const TreeSpec& tree, std::size_t i, std::size_t j) {
    return tree.edge_weight(tree.ids()[i], tree.ids()[j]);
}

}  // namespace

std::vector<double> phi_forward(const TreeSpec& tree, int root, std::span<const double> s) {
    require_tree_vector(tree, s, "phi_forward");
    const auto& o = tree.oriented(root);
    std::vector<double> t(s.begin(), s.end());
    for (std::size_t i : o.postorder) {
        double prod = 1.0;
        for (std::size_t j : o.children[i])
            prod *= 1.0 + edge_w_by_index(tree, i, j) / tree.node_weight(tree.ids()[i]) * t[j];
        t[i] = s[i] * prod;
    }
    return t;
}

std::vector<double> phi_inverse(const TreeSpec& tree, int root, std::span<const double> t) {
    require_tree_vector(tree, t, "phi_inverse");
    const auto& o = tree.oriented(root);
    std::vector<double> s(t.begin(), t.end());
    for (std::size_t i = 0; i < tree.size(); ++i) {
        double prod = 1.0;
        for (std::size_t j : o.children[i])
            prod *= 1.0 + edge_w_by_index(tree, i, j) / tree.node_weight(tree.ids()[i]) * t[j];
        s[i] = t[i] / prod;
    }
    return s;
}

std::vector<NodeMarginal> corollary_marginals(const TreeSpec& tree, int root,
                                              std::span<const double> a, double c) {
    if (a.size() != tree.size())
        throw DomainError("corollary_marginals: one a per node required");
    for (double ai : a)
        if (!(ai > 0.0)) throw DomainError("corollary_marginals: a entries must be positive");
    if (!(c > 0.0)) throw DomainError("corollary_marginals: c must be positive");
    if (!tree.is_leaf(root))
        throw DomainError("corollary_marginals: root must be a leaf");

    const auto& o = tree.oriented(root);
    const std::size_t r = tree.index_of(root);
    std::vector<NodeMarginal> out;
    out.reserve(tree.size());
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const int id = tree.ids()[i];
        if (i == r) {
            out.push_back(
                {id, dist::DistributionSpec::gamma(a[i], c * tree.node_weight(id)), 1.0});
            continue;
        }
        const std::size_t p = o.parent[i];
        const int pid = tree.ids()[p];
        const double cpi = edge_w_by_index(tree, p, i);
        const double law_c = c * tree.node_weight(pid) * tree.node_weight(id) / cpi;
        out.push_back({id, dist::DistributionSpec::kummer(a[i], a[p] - a[i], law_c),
                       tree.node_weight(pid) / cpi});
    }
    return out;
}

TreeSample tree_joint_sample(const TreeSpec& tree, int ref_leaf, std::span<const double> a,
                             double c, std::size_t n, std::uint64_t seed) {
    const auto marg = corollary_marginals(tree, ref_leaf, a, c);
    const std::size_t p = tree.size();

    // independent components of Phi_{ref}(X), scaled to the component laws
    std::vector<std::vector<double>> t(p);
    for (std::size_t i = 0; i < p; ++i) {
        t[i] = dist::sample(marg[i].law, n, seed, i).values;
        if (marg[i].scale != 1.0)
            for (double& v : t[i]) v *= marg[i].scale;
    }

    // pull back through the inverse map, column by column
    const auto& o = tree.oriented(ref_leaf);
    TreeSample out;
    out.ids = tree.ids();
    out.seed = seed;
    out.n = n;
    out.values.assign(p, std::vector<double>(n));
    for (std::size_t i = 0; i < p; ++i) {
        const double ci = tree.node_weight(tree.ids()[i]);
        std::vector<std::pair<double, std::size_t>> ch;  // (c_{i,j}/c_i, child index)
        for (std::size_t j : o.children[i])
            ch.emplace_back(edge_w_by_index(tree, i, j) / ci, j);
        for (std::size_t k = 0; k < n; ++k) {
            double prod = 1.0;
            for (const auto& [w, j] : ch) prod *= 1.0 + w * t[j][k];
            out.values[i][k] = t[i][k] / prod;
        }
    }
    return out;
}

}  // namespace kummer::trees
