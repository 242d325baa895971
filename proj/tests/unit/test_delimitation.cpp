#include <doctest.h>

#include <random>
#include <set>

#include "mizero/delimitation.hpp"
#include "support/oracles.hpp"

using namespace mizero;

namespace {

FeatureVector fv(const std::string& id, std::initializer_list<double> vals) {
    FeatureVector f;
    f.source_id = id;
    f.values.resize(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double v : vals) f.values[i++] = v;
    f.values.normalize();
    return f;
}

} // namespace

TEST_CASE("two identical protected vectors pick each other") {
    std::vector<FeatureVector> P = {fv("p0", {1.0, 0.0}), fv("p1", {1.0, 0.0})};
    std::vector<FeatureVector> N = {fv("n0", {-1.0, 0.0})};
    auto as = assign_neighbors(P, N);
    CHECK(as[0].y_star_id == "p1");
    CHECK(as[1].y_star_id == "p0");
    CHECK(as[0].pseudo_label == 1);
    CHECK(as[1].pseudo_label == 1);
}

TEST_CASE("a sample whose nearest neighbor is unprotected gets pseudo-label 0") {
    std::vector<FeatureVector> P = {fv("p0", {1.0, 0.0}), fv("p1", {-1.0, 0.2})};
    std::vector<FeatureVector> N = {fv("n0", {0.99, 0.05}), fv("n1", {-1.0, 0.0})};
    auto as = assign_neighbors(P, N);
    CHECK(as[0].x_id == "p0");
    CHECK(as[0].y_star_id == "n0");
    CHECK(as[0].pseudo_label == 0);
}

TEST_CASE("fewer than two samples is a capacity error") {
    std::vector<FeatureVector> P = {fv("p0", {1.0, 0.0})};
    std::vector<FeatureVector> N;
    CHECK_THROWS_AS(assign_neighbors(P, N), CapacityError);
}

TEST_CASE("4-sample assignments match the exhaustive pairwise scan") {
    std::vector<FeatureVector> P = {fv("p0", {1.0, 0.1}), fv("p1", {0.9, 0.3})};
    std::vector<FeatureVector> N = {fv("n0", {-0.2, 1.0}), fv("n1", {0.1, -1.0})};
    auto as = assign_neighbors(P, N);
    auto expect = oracle::neighbors(P, N);
    REQUIRE(as.size() == expect.size());
    for (std::size_t i = 0; i < as.size(); ++i) {
        CHECK(as[i].x_id == expect[i].x_id);
        CHECK(as[i].y_star_id == expect[i].y_id);
        CHECK(as[i].d_star == doctest::Approx(expect[i].d).epsilon(1e-12));
        CHECK(as[i].pseudo_label == (expect[i].y_protected ? 1 : 0));
    }
}

TEST_CASE("random assignments match the brute-force oracle") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 100; ++it) {
        int num = 2 + static_cast<int>(rng() % 5);
        auto P = oracle::random_features(rng, num, 4, "p");
        auto N = oracle::random_features(rng, num, 4, "n");
        auto as = assign_neighbors(P, N);
        auto expect = oracle::neighbors(P, N);
        for (std::size_t i = 0; i < as.size(); ++i) {
            REQUIRE(as[i].y_star_id == expect[i].y_id);
            REQUIRE(as[i].pseudo_label == (expect[i].y_protected ? 1 : 0));
        }
    }
}

TEST_CASE("pair-set rules at the sigma boundary") {
    NeighborAssignment a;
    a.x_id = "x";
    a.y_star_id = "p0";
    a.pseudo_label = 1;

    a.d_star = 0.9;
    auto ps = build_pair_sets({a}, 0.5);
    CHECK(ps.pp.size() == 1);
    CHECK(ps.pp[0].first == "x");
    CHECK(ps.pp[0].second == "p0");
    CHECK(ps.neg.empty());

    a.d_star = 0.4;
    ps = build_pair_sets({a}, 0.5);
    CHECK(ps.pp.empty());
    CHECK(ps.neg == std::vector<std::string>{"x"});

    a.d_star = 0.5; // boundary: pp requires strict d* > sigma
    ps = build_pair_sets({a}, 0.5);
    CHECK(ps.pp.empty());
}

TEST_CASE("six-assignment toy set matches the enumeration oracle") {
    std::mt19937_64 rng(77);
    auto P = oracle::random_features(rng, 3, 3, "p");
    auto N = oracle::random_features(rng, 3, 3, "n");
    auto as = assign_neighbors(P, N);
    auto nbrs = oracle::neighbors(P, N);
    for (double sigma : {-0.5, 0.0, 0.3, 0.9}) {
        auto ps = build_pair_sets(as, sigma);
        std::vector<std::string> pp_ids, neg_ids;
        oracle::pair_sets(nbrs, sigma, pp_ids, neg_ids);
        REQUIRE(ps.pp.size() == pp_ids.size());
        for (std::size_t i = 0; i < pp_ids.size(); ++i) CHECK(ps.pp[i].first == pp_ids[i]);
        CHECK(ps.neg == neg_ids);
    }
}

TEST_CASE("partition and sigma monotonicity over 200 random episodes") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> sig(-0.9, 0.9);
    for (int it = 0; it < 200; ++it) {
        int num = 2 + static_cast<int>(rng() % 6);
        auto P = oracle::random_features(rng, num, 5, "p");
        auto N = oracle::random_features(rng, num, 5, "n");
        auto as = assign_neighbors(P, N);
        double s1 = sig(rng);
        double s2 = s1 + 0.1;
        auto lo = build_pair_sets(as, s1);
        auto hi = build_pair_sets(as, s2);
        REQUIRE(lo.pp.size() + lo.neg.size() == static_cast<std::size_t>(2 * num));
        REQUIRE(hi.pp.size() + hi.neg.size() == static_cast<std::size_t>(2 * num));
        // raising sigma never moves a sample into pp
        std::set<std::string> lo_pp;
        for (const auto& [x, y] : lo.pp) lo_pp.insert(x);
        for (const auto& [x, y] : hi.pp) REQUIRE(lo_pp.count(x) == 1);
    }
}

TEST_CASE("cross entropy of perfect and inverted pseudo-labels") {
    std::map<std::string, int> truth = {{"a", 1}, {"b", 0}};
    NeighborAssignment a, b;
    a.x_id = "a";
    a.pseudo_label = 1;
    b.x_id = "b";
    b.pseudo_label = 0;
    CHECK(cross_entropy_loss({a, b}, truth) <= 1e-6);

    a.pseudo_label = 0;
    b.pseudo_label = 1;
    double loss = cross_entropy_loss({a, b}, truth);
    CHECK(loss == doctest::Approx(-std::log(1e-7)).epsilon(1e-6));
}

TEST_CASE("mixed 4-sample cross entropy matches hand arithmetic") {
    std::map<std::string, int> truth = {{"a", 1}, {"b", 1}, {"c", 0}, {"d", 0}};
    std::vector<NeighborAssignment> as(4);
    as[0].x_id = "a";
    as[0].pseudo_label = 1; // correct
    as[1].x_id = "b";
    as[1].pseudo_label = 0; // wrong
    as[2].x_id = "c";
    as[2].pseudo_label = 0; // correct
    as[3].x_id = "d";
    as[3].pseudo_label = 1; // wrong
    const double c = 1e-7;
    double hand = (-std::log(1.0 - c) - std::log(c) - std::log(1.0 - c) - std::log(c)) / 4.0;
    CHECK(cross_entropy_loss(as, truth) == doctest::Approx(hand).epsilon(1e-9));
}

TEST_CASE("cross entropy matches the oracle on random instances") {
    std::mt19937_64 rng(8);
    for (int it = 0; it < 100; ++it) {
        int n = 2 + static_cast<int>(rng() % 8);
        std::vector<NeighborAssignment> as(n);
        std::map<std::string, int> truth;
        for (int i = 0; i < n; ++i) {
            as[i].x_id = "s" + std::to_string(i);
            as[i].pseudo_label = static_cast<int>(rng() & 1);
            truth[as[i].x_id] = static_cast<int>(rng() & 1);
        }
        REQUIRE(oracle::rel_close(cross_entropy_loss(as, truth), oracle::cross_entropy(as, truth)));
    }
}

TEST_CASE("contrastive loss special cases") {
    // identical P vectors, far N -> 0
    std::vector<FeatureVector> P = {fv("p0", {1.0, 0.0}), fv("p1", {1.0, 0.0})};
    std::vector<FeatureVector> N = {fv("n0", {-1.0, 0.0}), fv("n1", {-1.0, 0.0})};
    CHECK(contrastive_loss(P, N, 1.0) == doctest::Approx(0.0));

    // single P pair at squared distance d^2, no hinge activity
    std::vector<FeatureVector> P2 = {fv("p0", {1.0, 0.0}), fv("p1", {0.0, 1.0})};
    double d2 = (P2[0].values - P2[1].values).squaredNorm();
    CHECK(contrastive_loss(P2, N, 1.0) == doctest::Approx(d2 / 4.0).epsilon(1e-12));

    // N coincident with a P vector -> that cross pair contributes m
    std::vector<FeatureVector> P3 = {fv("p0", {1.0, 0.0})};
    std::vector<FeatureVector> N3 = {fv("n0", {1.0, 0.0})};
    CHECK(contrastive_loss(P3, N3, 1.0) == doctest::Approx(1.0 / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS(contrastive_loss(P, N, 0.0), ContractError);
}

TEST_CASE("contrastive loss matches the oracle on random instances") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> marg(0.2, 3.0);
    for (int it = 0; it < 100; ++it) {
        int num = 2 + static_cast<int>(rng() % 6);
        auto P = oracle::random_features(rng, num, 6, "p");
        auto N = oracle::random_features(rng, num, 6, "n");
        double m = marg(rng);
        REQUIRE(oracle::rel_close(contrastive_loss(P, N, m), oracle::contrastive(P, N, m)));
    }
}

TEST_CASE("contrastive loss decreases when a positive pair tightens") {
    std::vector<FeatureVector> N = {fv("n0", {0.0, 1.0}), fv("n1", {0.1, 1.0})};
    std::vector<FeatureVector> loose = {fv("p0", {1.0, 0.0}), fv("p1", {0.7, 0.7})};
    std::vector<FeatureVector> tight = {fv("p0", {1.0, 0.0}), fv("p1", {0.99, 0.1})};
    CHECK(contrastive_loss(tight, N, 1.0) < contrastive_loss(loose, N, 1.0));
}
