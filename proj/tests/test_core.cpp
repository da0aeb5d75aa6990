#include <doctest.h>

#include "sgkd/core.hpp"
#include "sgkd/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace sgkd;

TEST_CASE("l2_normalize basic values") {
    CHECK(l2_normalize({3.0, 4.0}) == std::vector<double>{0.6, 0.8});
    CHECK(l2_normalize({0.0, 0.0}) == std::vector<double>{0.0, 0.0});
    CHECK(l2_normalize({1.0, 1.0, 1.0, 1.0}) ==
          std::vector<double>{0.5, 0.5, 0.5, 0.5});
}

TEST_CASE("l2_normalize produces unit norm above the epsilon branch") {
    RngStream rng(11, "test.norm");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(1 + rng.below(8));
        for (double& x : v) x = rng.normal(0.0, std::pow(10.0, rng.uniform(-3, 3)));
        if (norm2(v) <= kNormEps) continue;
        CHECK(std::abs(norm2(l2_normalize(v)) - 1.0) < 1e-12);
    }
}

TEST_CASE("softmax analytic values and stability") {
    auto uniform3 = softmax({0.0, 0.0, 0.0});
    for (double p : uniform3.probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));

    auto two_thirds = softmax({std::log(2.0), 0.0});
    CHECK(two_thirds.probs[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(two_thirds.probs[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));

    auto extreme = softmax({1000.0, 0.0});
    CHECK(extreme.probs[0] == doctest::Approx(1.0));
    CHECK(extreme.probs[1] < 1e-300);
    CHECK(std::isfinite(extreme.probs[0]));
}

TEST_CASE("softmax sums to one across extreme magnitudes") {
    RngStream rng(12, "test.softmax");
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> z(2 + rng.below(9));
        for (double& x : z) x = rng.uniform(-1e6, 1e6);
        auto d = softmax(z);
        double sum = 0.0;
        for (double p : d.probs) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("entropy analytic values and bounds") {
    RelationDistribution uniform50;
    uniform50.probs.assign(50, 1.0 / 50);
    CHECK(entropy(uniform50) == doctest::Approx(std::log(50.0)).epsilon(1e-12));

    RelationDistribution onehot;
    onehot.probs = {0.0, 1.0, 0.0};
    CHECK(entropy(onehot) == 0.0);

    RelationDistribution half;
    half.probs = {0.5, 0.5, 0.0, 0.0};
    CHECK(entropy(half) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

    RngStream rng(13, "test.entropy");
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(9));
        std::vector<double> z(n);
        for (double& x : z) x = rng.uniform(-30, 30);
        auto d = softmax(z);
        const double h = entropy(d);
        CHECK(h >= 0.0);
        CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
    }
}

TEST_CASE("kl_divergence analytic values") {
    RelationDistribution p, q;
    p.probs = {1.0, 0.0};
    q.probs = {0.5, 0.5};
    CHECK(kl_divergence(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    p.probs = {0.7, 0.3};
    // Frozen from an independent evaluation: 0.7 ln 1.4 + 0.3 ln 0.6.
    CHECK(kl_divergence(p, q) == doctest::Approx(0.08228287850505178).epsilon(1e-14));

    CHECK(kl_divergence(q, q) == 0.0);
}

TEST_CASE("kl_divergence is nonnegative and zero only at equality") {
    RngStream rng(14, "test.kl");
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(9));
        std::vector<double> zp(n), zq(n);
        for (double& x : zp) x = rng.uniform(-20, 20);
        for (double& x : zq) x = rng.uniform(-20, 20);
        auto p = softmax(zp);
        auto q = softmax(zq);
        CHECK(kl_divergence(p, q) >= -1e-12);
        CHECK(kl_divergence(p, p) >= -1e-12);
        CHECK(kl_divergence(p, p) <= 1e-10);
    }
}

TEST_CASE("kl_divergence rejects arity mismatch") {
    RelationDistribution p, q;
    p.probs = {0.5, 0.5};
    p.arity = Arity::FSpace;
    q.probs = {0.5, 0.5};
    q.arity = Arity::GSpace;
    CHECK_THROWS_AS(kl_divergence(p, q), std::invalid_argument);
    q.arity = Arity::FSpace;
    q.probs = {0.3, 0.3, 0.4};
    CHECK_THROWS_AS(kl_divergence(p, q), std::invalid_argument);
}

TEST_CASE("rng streams are reproducible and independent") {
    RngStream a(42, "stream.a");
    RngStream a_again(42, "stream.a");
    RngStream b(42, "stream.b");
    bool any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next_u64();
        CHECK(x == a_again.next_u64());
        if (x != b.next_u64()) any_diff = true;
    }
    CHECK(any_diff);

    RngStream idx0(42, "stream.c", 0);
    RngStream idx1(42, "stream.c", 1);
    CHECK(idx0.next_u64() != idx1.next_u64());
}

TEST_CASE("rng distributions stay in range") {
    RngStream rng(7, "test.ranges");
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.below(17) < 17);
    }
}

TEST_CASE("vocabulary invariants") {
    RelationVocabulary rels = RelationVocabulary::make_default(10);
    CHECK(rels.num_real() == 10);
    CHECK(rels.num_with_norel() == 11);
    CHECK(rels.no_relation_index() == 10);
    CHECK_NOTHROW(rels.validate());

    rels.relation_names[3] = "no-relation";
    CHECK_THROWS_AS(rels.validate(), std::invalid_argument);
    rels.relation_names[3] = rels.relation_names[4];
    CHECK_THROWS_AS(rels.validate(), std::invalid_argument);

    EntityVocabulary ents = EntityVocabulary::make_default(1);
    CHECK_THROWS_AS(ents.validate(), std::invalid_argument);
}

TEST_CASE("validate_sample enforces pair invariants") {
    EntityVocabulary ents = EntityVocabulary::make_default(3);
    RelationVocabulary rels = RelationVocabulary::make_default(4);

    SceneSample sample;
    sample.image_id = 0;
    sample.entity_classes = {0, 2};
    PairExample pair;
    pair.subject_index = 0;
    pair.object_index = 1;
    pair.subject_class = 0;
    pair.object_class = 2;
    pair.label = 3;
    sample.pairs.push_back(pair);
    CHECK_NOTHROW(validate_sample(sample, ents, rels));

    auto bad = sample;
    bad.pairs[0].object_index = 0;
    CHECK_THROWS_AS(validate_sample(bad, ents, rels), std::invalid_argument);

    bad = sample;
    bad.pairs[0].label = 4;
    CHECK_THROWS_AS(validate_sample(bad, ents, rels), std::invalid_argument);

    bad = sample;
    bad.pairs[0].true_relations = std::vector<int>{1, 2};
    CHECK_THROWS_AS(validate_sample(bad, ents, rels), std::invalid_argument);
    bad.pairs[0].true_relations = std::vector<int>{2, 3};
    CHECK_NOTHROW(validate_sample(bad, ents, rels));

    bad.pairs.push_back(bad.pairs[0]);
    CHECK_THROWS_AS(validate_sample(bad, ents, rels), std::invalid_argument);
}
