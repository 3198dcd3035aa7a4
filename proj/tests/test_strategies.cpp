#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "Oracles.h"
#include "spex/Strategies.h"

using namespace spex;

namespace {

Formula eq(char const * var, long value) {
    return Formula::atom({{var, 1}}, Relation::Eq, value);
}

Formula const x2x3 = Formula::conj({eq("x2", 1), eq("x3", 3)});
Point const s113{1, 1, 3};

/// Dropping any single top-level conjunct makes the validity query satisfiable.
bool irreducible(Formula const & f, ExplanationContext const & ctx) {
    auto parts = conjuncts(f);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        auto rest = parts;
        rest.erase(rest.begin() + static_cast<long>(i));
        if (checkValidity(Formula::conj(rest), ctx).valid) { return false; }
    }
    return true;
}

bool gridSound(Explanation const & e, Network const & net) {
    return testing::gridOracle(e.formula(), net, e.targetClass(), Rational(1, 4)).violations == 0;
}

} // namespace

TEST_CASE("x2 = 1 and x3 = 3 forces c1 on a fine grid") {
    auto net = testing::toyNetwork();
    auto v = testing::gridOracle(x2x3, net, 0, Rational(1, 4));
    CHECK(v.satisfying == 17);
    CHECK(v.violations == 0);
    // each conjunct alone admits a c2 point
    CHECK(testing::gridOracle(eq("x2", 1), net, 0, Rational(1, 4)).violations > 0);
    CHECK(testing::gridOracle(eq("x3", 3), net, 0, Rational(1, 4)).violations > 0);
}

TEST_CASE("explanations are validity-checked at construction") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    CHECK_NOTHROW(Explanation::fromFormula(x2x3, ctx));
    CHECK_THROWS_AS(Explanation::fromFormula(eq("x2", 1), ctx), ValidityError);
    CHECK_THROWS_AS(Explanation::fromFormula(Formula::atom({{"y_1_1", 1}}, Relation::Ge, 0), ctx), UnknownNameError);
    CHECK_THROWS_AS(Explanation::fromSample(Point{0, 4, 0}, ctx), Error);
}

TEST_CASE("generalize uses a single solver call and weakens") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto start = Explanation::fromSample(s113, ctx);
    for (auto p : {"stronger", "strong", "mid", "weak", "weaker"}) {
        CAPTURE(p);
        auto g = generalize(start, ctx, presetByName(p));
        CHECK(g.metrics().stages.back().solverCalls == 1);
        CHECK(implies(start.formula(), g.formula()));
        CHECK(eval(g.formula(), s113, net.featureNames()));
        CHECK(gridSound(g, net));
    }
}

TEST_CASE("generalize twice keeps implying") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto once = generalize(Explanation::fromSample(s113, ctx), ctx, presetByName("weak"));
    auto twice = generalize(once, ctx, presetByName("weak"));
    CHECK(implies(once.formula(), twice.formula()));
}

TEST_CASE("reduce keeps a core") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto phiS = Explanation::fromSample(s113, ctx);
    auto r = reduce(phiS, ctx);
    CHECK(countTerms(r.formula()) <= 3);
    CHECK(implies(phiS.formula(), r.formula()));
    auto single = Explanation::fromFormula(Formula::atom({{"x1", 1}, {"x2", -1}, {"x3", 1}}, Relation::Ge, 3), ctx);
    CHECK(reduce(single, ctx).formula() == single.formula());
}

TEST_CASE("reduce never splits clauses") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto weaker = generalize(Explanation::fromSample(s113, ctx), ctx, presetByName("weaker"));
    auto r = reduce(weaker, ctx);
    auto before = conjuncts(weaker.formula());
    for (auto const & c : conjuncts(r.formula())) { CHECK(std::find(before.begin(), before.end(), c) != before.end()); }
}

TEST_CASE("irreducible reduce and abductive agree on the toy sample") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto rmin = reduceMin(Explanation::fromSample(s113, ctx), ctx);
    auto a = abductive(s113, ctx);
    CHECK(rmin.formula() == x2x3);
    CHECK(a.formula() == x2x3);
    CHECK(a.metrics().solverCalls() == 3);
    CHECK(irreducible(rmin.formula(), ctx));
    CHECK(irreducible(a.formula(), ctx));
    CHECK(reduceMin(rmin, ctx).formula() == rmin.formula());
}

TEST_CASE("abductive on a network that ignores its inputs frees everything") {
    std::vector<Layer> layers(2);
    layers[0].weights = {{0}, {0}};
    layers[0].biases = {0};
    layers[1].weights = {{0, 0}};
    layers[1].biases = {1, 0};
    Network constant(2, {{0, 1}, {0, 1}}, {"c1", "c2"}, layers);
    ExplanationContext ctx(constant, 0);
    CHECK(abductive(Point{0, 0}, ctx).formula().isTrue());
}

TEST_CASE("capture separates selected features") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto c = capture(s113, VarSet{"x1", "x2"}, ctx, presetByName("weak"));
    auto parts = conjuncts(c.formula());
    CHECK(std::find(parts.begin(), parts.end(), eq("x3", 3)) != parts.end());
    for (auto const & p : parts) {
        if (p == eq("x3", 3)) { continue; }
        auto vars = variables(p);
        CHECK_FALSE(vars.contains("x3"));
    }
    CHECK(c.metrics().solverCalls() == 1);
    CHECK(gridSound(c, net));
}

TEST_CASE("interval widens an abductive explanation") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto a = abductive(s113, ctx);
    auto i = interval(a, ctx, 8);
    CHECK(implies(a.formula(), i.formula()));
    CHECK(eval(i.formula(), s113, net.featureNames()));
    CHECK(i.metrics().stages.back().solverCalls <= 2 * 2 * 8);
    CHECK(countTerms(i.formula()) == 4);
    CHECK_FALSE(implies(i.formula(), a.formula()));
    CHECK(gridSound(i, net));

    auto degenerate = interval(a, ctx, 0);
    CHECK(degenerate.metrics().stages.back().solverCalls == 0);
    CHECK(implies(degenerate.formula(), a.formula()));
    CHECK(implies(a.formula(), degenerate.formula()));
    CHECK_THROWS_AS(interval(Explanation::fromFormula(Formula::atom({{"x1", 1}, {"x2", -1}, {"x3", 1}}, Relation::Ge, 3), ctx),
                             ctx, 4),
                    Error);
}

TEST_CASE("pipeline descriptors") {
    auto net = testing::toyNetwork();
    auto stages = parsePipeline("A;I:8;G:weak", net);
    REQUIRE(stages.size() == 3);
    CHECK(stages[1].attempts == 8);
    CHECK(stages[2].preset == "weak");
    CHECK(parsePipeline("C:factor:1/3:x1,x2;Rmin", net)[0].preset == "factor:1/3");
    CHECK(parsePipeline("C:weak:x1,x2", net)[0].features == std::vector<std::string>{"x1", "x2"});
    for (auto bad : {"", "Q", "G", "G:best", "R:1", "I:8", "G:weak;A", "A;G:weak;I:2", "C:weak:x7", "C:weak:", "I:x",
                     "A;;R"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parsePipeline(bad, net), ParseError);
    }
}

TEST_CASE("pipelines weaken monotonically") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto stages = parsePipeline("A;I:8;G:weak", net);
    auto a = runPipeline({stages[0]}, s113, ctx);
    auto ia = runPipeline({stages[0], stages[1]}, s113, ctx);
    auto gia = runPipeline(stages, s113, ctx);
    CHECK(implies(a.formula(), ia.formula()));
    CHECK(implies(ia.formula(), gia.formula()));
    CHECK(gia.pipeline() == std::vector<std::string>{"A", "I:8", "G:weak"});
    CHECK(gia.metrics().stages.size() == 3);

    auto g = runPipeline(parsePipeline("G:weak", net), s113, ctx);
    auto direct = generalize(Explanation::fromSample(s113, ctx), ctx, presetByName("weak"));
    CHECK(g.formula() == direct.formula());
    CHECK(g.metrics().solverCalls() == 1);

    auto cr = runPipeline(parsePipeline("C:weak:x1,x2;Rmin", net), s113, ctx);
    CHECK(gridSound(cr, net));
}

TEST_CASE("a stage that runs out of time returns its input flagged") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    auto start = Explanation::fromSample(s113, ctx);
    ctx.stageTimeout = std::chrono::nanoseconds(0);
    auto g = generalize(start, ctx, presetByName("weak"));
    CHECK(g.formula() == start.formula());
    CHECK(g.metrics().timedOut());
}

TEST_CASE("order override changes traversal") {
    auto net = testing::toyNetwork();
    ExplanationContext ctx(net, 0);
    ctx.order = {2, 1, 0};
    auto a = abductive(s113, ctx);
    CHECK(irreducible(a.formula(), ctx));
}
