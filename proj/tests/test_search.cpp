#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "Oracles.h"
#include "spex/Search.h"

using namespace spex;

namespace {

Formula phi1() {
    return Formula::atom({{"x1", 1}, {"x2", -1}, {"x3", 1}}, Relation::Ge, 3);
}

Point featuresOf(Assignment const & model, Network const & net) {
    Point p;
    for (auto const & n : net.featureNames()) { p.push_back(model.at(n)); }
    return p;
}

} // namespace

TEST_CASE("sample of class c1 refutes psi") {
    auto net = testing::toyNetwork();
    auto psi = buildPsi(net, 0);
    auto phiS = encodeSample(Point{1, 1, 3}, net.featureNames());
    auto r = solve(PartitionedSystem(phiS, psi, 0));
    REQUIRE(r.unsat());
    REQUIRE(r.proof);
    CHECK(replayProof(*r.proof));
    CHECK(r.stats.lpCalls >= 1);

    auto core = coreLabels(*r.proof);
    std::vector<Formula> kept;
    for (auto const & c : conjuncts(phiS)) {
        if (core.contains(c.label())) { kept.push_back(c); }
    }
    CHECK(solve(PartitionedSystem(Formula::conj(kept), psi)).unsat());
}

TEST_CASE("psi alone is satisfiable with a counter-class model") {
    auto net = testing::toyNetwork();
    auto r = solve(PartitionedSystem(Formula::top(), buildPsi(net, 0)));
    REQUIRE(r.sat());
    CHECK(eval(buildPsi(net, 0), r.model));
    CHECK(classify(net, featuresOf(r.model, net)) == 1);
}

TEST_CASE("phi1 is refuted") {
    auto net = testing::toyNetwork();
    CHECK(solve(PartitionedSystem(phi1(), buildPsi(net, 0))).unsat());
}

TEST_CASE("single conjunct core and untouched conjuncts") {
    auto a = Formula::atom({{"x", 1}}, Relation::Ge, 1);
    auto irrelevant = Formula::atom({{"z", 1}}, Relation::Le, 5);
    auto b = Formula::atom({{"x", 1}}, Relation::Le, 0);
    auto r = solve(PartitionedSystem(Formula::conj({a, irrelevant}), b));
    REQUIRE(r.unsat());
    CHECK(coreLabels(*r.proof) == std::set<std::string>{defaultConjunctLabel(0)});
}

TEST_CASE("a-side disjunctions enter the core through splits") {
    auto a = Formula::disj({Formula::atom({{"x", 1}}, Relation::Ge, 2), Formula::atom({{"x", 1}}, Relation::Le, -2)});
    auto b = Formula::conj({Formula::atom({{"x", 1}}, Relation::Le, 1), Formula::atom({{"x", 1}}, Relation::Ge, -1)});
    auto r = solve(PartitionedSystem(a, b));
    REQUIRE(r.unsat());
    CHECK(replayProof(*r.proof));
    CHECK(coreLabels(*r.proof).size() == 1);
    REQUIRE(std::holds_alternative<ProofSplit>(r.proof->root.content));
    CHECK(std::get<ProofSplit>(r.proof->root.content).side == Side::A);
}

TEST_CASE("models satisfy both parts on random networks") {
    std::mt19937_64 rng(3);
    int sat = 0;
    int unsat = 0;
    for (int n = 0; n < 25; ++n) {
        auto net = testing::randomNetwork(rng);
        auto s = testing::randomPoint(rng, net);
        auto c = classify(net, s);
        for (std::size_t target = 0; target < net.classCount(); ++target) {
            auto psi = buildPsi(net, target);
            auto phiS = encodeSample(s, net.featureNames());
            auto r = solve(PartitionedSystem(phiS, psi, target));
            REQUIRE(r.status != SolveStatus::Timeout);
            CHECK(r.unsat() == (c == target));
            if (r.sat()) {
                ++sat;
                CHECK(eval(Formula::conj({phiS, psi}), r.model));
                CHECK(classify(net, featuresOf(r.model, net)) != target);
            } else {
                ++unsat;
                CHECK(replayProof(*r.proof));
            }
        }
    }
    CHECK(sat > 0);
    CHECK(unsat > 0);
}

TEST_CASE("expired deadline reports a timeout") {
    auto net = testing::toyNetwork();
    SolveOptions options{Clock::now() - std::chrono::seconds(1)};
    auto r = solve(PartitionedSystem(Formula::top(), buildPsi(net, 0)), options);
    CHECK(r.status == SolveStatus::Timeout);
}
