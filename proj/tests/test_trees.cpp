#include "kummer/trees.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "kummer/errors.hpp"
#include "kummer/rng.hpp"
#include "kummer/transforms.hpp"

using namespace kummer;
using trees::TreeSpec;

namespace {

TreeSpec path3() {
    return TreeSpec::make({{1, 1.0}, {2, 1.0}, {3, 1.0}},
                          {{1, 2, 1.0}, {2, 3, 1.0}});
}

TreeSpec random_tree(rng::Stream& g, int p) {
    std::vector<std::pair<int, double>> nodes;
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 1; i <= p; ++i) nodes.push_back({i, 0.5 + 1.5 * g.next_open01()});
    for (int i = 2; i <= p; ++i) {
        const int to = 1 + static_cast<int>(g.next_u64() % static_cast<std::uint64_t>(i - 1));
        edges.push_back({i, to, 0.5 + 1.5 * g.next_open01()});
    }
    return TreeSpec::make(nodes, edges);
}

}  // namespace

TEST_CASE("tree validation") {
    CHECK_THROWS_AS(TreeSpec::make({{1, 1.0}}, {}), DomainError);  // too small
    CHECK_THROWS_AS(TreeSpec::make({{1, 1.0}, {1, 2.0}}, {{1, 1, 1.0}}), DomainError);
    CHECK_THROWS_AS(TreeSpec::make({{1, 1.0}, {2, -1.0}}, {{1, 2, 1.0}}), DomainError);
    CHECK_THROWS_AS(TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 2, 0.0}}), DomainError);
    CHECK_THROWS_AS(TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 1, 1.0}}), DomainError);
    CHECK_THROWS_AS(
        TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 2, 1.0}, {1, 2, 2.0}}), DomainError);
    CHECK_THROWS_AS(
        TreeSpec::make({{1, 1.0}, {2, 1.0}, {3, 1.0}, {4, 1.0}},
                       {{1, 2, 1.0}, {3, 4, 1.0}, {1, 2, 2.0}}),
        DomainError);
    const auto t = path3();
    CHECK(t.size() == 3);
    CHECK(t.is_leaf(1));
    CHECK_FALSE(t.is_leaf(2));
    CHECK(t.leaves() == std::vector<int>{1, 3});
    CHECK_THROWS_AS(t.index_of(9), DomainError);
}

TEST_CASE("tree json round trip") {
    const auto t = TreeSpec::make({{1, 1.0}, {2, 1.5}, {3, 2.0}},
                                  {{1, 2, 2.0}, {2, 3, 0.5}});
    const auto back = TreeSpec::from_json(t.to_json());
    CHECK(back.to_json() == t.to_json());
    CHECK(back.edge_weight(1, 2) == 2.0);
    CHECK(back.edge_weight(2, 1) == 2.0);
    CHECK_THROWS_AS(TreeSpec::from_json(nlohmann::json::parse(R"({"nodes":[]})")), InputError);
}

TEST_CASE("phi_forward worked examples") {
    const auto t = path3();
    const std::vector<double> s{1.0, 1.0, 1.0};
    const auto out = phi_forward(t, 1, s);
    CHECK(out == std::vector<double>{3.0, 2.0, 1.0});
    // leaf not equal to the root maps to itself
    CHECK(out[2] == s[2]);

    const auto two = TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 2, 2.0}});
    const auto o2 = phi_forward(two, 1, std::vector<double>{1.0, 0.5});
    CHECK(o2 == std::vector<double>{2.0, 0.5});
    CHECK_THROWS_AS(phi_forward(t, 7, s), DomainError);
    CHECK_THROWS_AS(phi_forward(t, 1, std::vector<double>{1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(phi_forward(t, 1, std::vector<double>{1.0, -1.0, 1.0}), DomainError);
}

TEST_CASE("phi_inverse worked examples") {
    const auto t = path3();
    CHECK(phi_inverse(t, 1, std::vector<double>{3.0, 2.0, 1.0}) ==
          std::vector<double>{1.0, 1.0, 1.0});
    const auto two = TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 2, 2.0}});
    CHECK(phi_inverse(two, 1, std::vector<double>{2.0, 0.5}) ==
          std::vector<double>{1.0, 0.5});
}

TEST_CASE("two-node reduction has the HV shape") {
    const auto two = TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 2, 1.0}});
    rng::Stream g(4, 0, 0);
    for (int i = 0; i < 100; ++i) {
        const double s1 = 0.1 + g.next_open01(), s2 = 0.1 + g.next_open01();
        const auto out = phi_forward(two, 1, std::vector<double>{s1, s2});
        CHECK(out[0] == s1 * (1.0 + s2));
        CHECK(out[1] == s2);
    }
}

TEST_CASE("roundtrip over random 8-node trees") {
    rng::Stream g(12, 0, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = random_tree(g, 8);
        const auto lv = t.leaves();
        for (int draw = 0; draw < 5000; ++draw) {
            std::vector<double> s(8);
            for (double& v : s) v = std::pow(10.0, -3.0 + 6.0 * g.next_open01());
            const int root = lv[draw % lv.size()];
            const auto fwd = phi_forward(t, root, s);
            const auto back = phi_inverse(t, root, fwd);
            for (std::size_t i = 0; i < s.size(); ++i)
                worst = std::max(worst, std::abs(back[i] - s[i]) / s[i]);
            const auto fwd2 = phi_forward(t, root, back);
            for (std::size_t i = 0; i < s.size(); ++i)
                worst = std::max(worst, std::abs(fwd2[i] - fwd[i]) / fwd[i]);
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("corollary marginals on worked examples") {
    const auto two = TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 2, 1.0}});
    const std::vector<double> a{3.0, 2.0};
    const auto m = corollary_marginals(two, 2, a, 1.0);
    REQUIRE(m.size() == 2);
    CHECK(m[1].id == 2);
    CHECK(m[1].law.family() == dist::Family::gamma);
    CHECK(m[1].law.gamma_params().shape == 2.0);
    CHECK(m[1].law.gamma_params().rate == 1.0);
    CHECK(m[1].scale == 1.0);
    CHECK(m[0].id == 1);
    CHECK(m[0].law.family() == dist::Family::kummer);
    CHECK(m[0].law.kummer_params().a == 3.0);
    CHECK(m[0].law.kummer_params().b == -1.0);
    CHECK(m[0].law.kummer_params().c == 1.0);
    CHECK(m[0].scale == 1.0);

    const auto tw = TreeSpec::make({{1, 1.0}, {2, 1.0}}, {{1, 2, 2.0}});
    const auto mw = corollary_marginals(tw, 2, a, 1.0);
    CHECK(mw[0].law.kummer_params().c == 0.5);
    CHECK(mw[0].scale == 0.5);

    const auto t = path3();
    const std::vector<double> a3{4.0, 3.0, 2.0};
    const auto mp = corollary_marginals(t, 3, a3, 1.0);
    CHECK(mp[2].law.family() == dist::Family::gamma);
    CHECK(mp[2].law.gamma_params().shape == 2.0);
    CHECK(mp[1].law.kummer_params().a == 3.0);
    CHECK(mp[1].law.kummer_params().b == -1.0);
    CHECK(mp[0].law.kummer_params().a == 4.0);
    CHECK(mp[0].law.kummer_params().b == -1.0);

    CHECK_THROWS_AS(corollary_marginals(t, 2, a3, 1.0), DomainError);  // not a leaf
    CHECK_THROWS_AS(corollary_marginals(t, 3, a3, -1.0), DomainError);
    CHECK_THROWS_AS(corollary_marginals(t, 3, a, 1.0), DomainError);  // wrong length
}

TEST_CASE("tree joint sample: determinism, marginal mean, forward image") {
    const auto t = path3();
    const std::vector<double> a{4.0, 3.0, 2.0};
    const std::size_t n = 50000;
    const auto s1 = trees::tree_joint_sample(t, 3, a, 1.0, n, 99);
    const auto s2 = trees::tree_joint_sample(t, 3, a, 1.0, n, 99);
    CHECK(s1.values == s2.values);

    // push each draw forward; the root component must be Gamma(a_r, c c_r)
    const auto marg = corollary_marginals(t, 3, a, 1.0);
    double acc = 0.0, acc2 = 0.0;
    std::vector<double> col(3);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < 3; ++i) col[i] = s1.values[i][k];
        const auto fwd = phi_forward(t, 3, col);
        acc += fwd[2];
        acc2 += fwd[2] * fwd[2];
    }
    const double mean = acc / static_cast<double>(n);
    const double var = acc2 / static_cast<double>(n) - mean * mean;
    const double want = 2.0;  // a_r / (c c_r)
    CHECK(std::abs(mean - want) < 4.0 * std::sqrt(var / static_cast<double>(n)));
    CHECK(marg[2].law.gamma_params().shape == 2.0);
}
