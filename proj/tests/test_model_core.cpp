#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "Oracles.h"
#include "spex/Error.h"

using namespace spex;

namespace {

Point pt(std::initializer_list<long> values) {
    Point p;
    for (auto v : values) { p.push_back(v); }
    return p;
}

std::string const toyText = R"({
  "inputs": 3,
  "domains": [[0, 4], [0, 4], [0, 4]],
  "classes": ["c1", "c2"],
  "layers": [
    { "weights": [[2, -1], [0, 1], [1, -1]], "biases": [0, 0] },
    { "weights": [[1, -1], [-4, 4]], "biases": [0, 0] }
  ]
})";

} // namespace

TEST_CASE("toy network loads from file with the expected shape") {
    auto net = loadNetwork(std::string(SPEX_TEST_DATA) + "/toy.json");
    CHECK(net.inputCount() == 3);
    CHECK(net.layerCount() == 2);
    CHECK(net.hiddenNeuronCount() == 2);
    CHECK(net.classCount() == 2);
    CHECK(net.featureNames() == std::vector<std::string>{"x1", "x2", "x3"});
    CHECK(net.classIndex("c2") == 1);
    CHECK_THROWS_AS(net.classIndex("c9"), UnknownNameError);
}

TEST_CASE("forward pass is exact on hand-computed points") {
    auto net = parseNetwork(toyText);
    CHECK(forward(net, pt({1, 1, 3})) == pt({5, -5}));
    CHECK(forward(net, pt({0, 0, 0})) == pt({0, 0}));
    CHECK(forward(net, pt({0, 4, 0})) == pt({-16, 16}));
    CHECK_THROWS_AS(forward(net, pt({1, 1})), DimensionError);
}

TEST_CASE("classification breaks ties toward the lowest index") {
    auto net = parseNetwork(toyText);
    CHECK(classify(net, pt({1, 1, 3})) == 0);
    CHECK(classify(net, pt({0, 0, 0})) == 0);
    CHECK(classify(net, pt({0, 4, 0})) == 1);
    // evaluation is total outside the domains too
    CHECK_NOTHROW(classify(net, pt({-10, 100, 7})));
}

TEST_CASE("decimal weights are parsed exactly") {
    auto text = toyText;
    text.replace(text.find("[[2, -1]"), 8, R"([["0.1", -1])");
    auto net = parseNetwork(text);
    CHECK(net.layers()[0].weights[0][0] == Rational(1, 10));
}

TEST_CASE("malformed networks are rejected") {
    SUBCASE("hidden matrix does not chain") {
        auto text = std::string(R"({"inputs": 4, "domains": [[0,1],[0,1],[0,1],[0,1]], "classes": ["a","b"],
            "layers": [{"weights": [[1,1,1],[1,1,1]], "biases": [0,0,0]}, {"weights": [[1,1],[1,1],[1,1]], "biases": [0,0]}]})");
        CHECK_THROWS_AS(parseNetwork(text), DimensionError);
    }
    SUBCASE("inverted domain") {
        auto text = toyText;
        text.replace(text.find("[[0, 4]"), 7, "[[5, 4]");
        CHECK_THROWS_AS(parseNetwork(text), DomainError);
    }
    SUBCASE("single class") {
        auto text = std::string(R"({"inputs": 1, "domains": [[0,1]], "classes": ["a"],
            "layers": [{"weights": [[1]], "biases": [0]}]})");
        CHECK_THROWS_AS(parseNetwork(text), DimensionError);
    }
    SUBCASE("binary float literal") {
        auto text = toyText;
        text.replace(text.find("[[2, -1]"), 8, "[[0.1, -1]");
        CHECK_THROWS_AS(parseNetwork(text), ParseError);
    }
    SUBCASE("not json") { CHECK_THROWS_AS(parseNetwork("{"), ParseError); }
}

TEST_CASE("output bias defaults to zero") {
    auto text = std::string(R"({"inputs": 1, "domains": [[0,1]], "classes": ["a","b"],
        "layers": [{"weights": [[1, -1]]}]})");
    auto net = parseNetwork(text);
    CHECK(net.layers()[0].biases == pt({0, 0}));
}

TEST_CASE("datasets") {
    auto net = parseNetwork(toyText);
    SUBCASE("plain row") {
        auto d = parseDataset("1,1,3\n", net);
        REQUIRE(d.points.size() == 1);
        CHECK(d.points[0] == pt({1, 1, 3}));
        CHECK_FALSE(d.labels.has_value());
    }
    SUBCASE("arity mismatch") { CHECK_THROWS_AS(parseDataset("1,1\n", net), DimensionError); }
    SUBCASE("declared label column") {
        auto d = parseDataset("1,1,3,c1\n", net, DatasetOptions{true});
        REQUIRE(d.labels.has_value());
        CHECK((*d.labels)[0] == "c1");
    }
    SUBCASE("unknown label") { CHECK_THROWS_AS(parseDataset("1,1,3,c7\n", net, DatasetOptions{true}), UnknownNameError); }
    SUBCASE("header row and decimals") {
        auto d = parseDataset("a,b,c\n0.5,1/4,2\n", net);
        REQUIRE(d.points.size() == 1);
        CHECK(d.points[0][0] == Rational(1, 2));
        CHECK(d.points[0][1] == Rational(1, 4));
        CHECK(d.featureNames == std::vector<std::string>{"a", "b", "c"});
    }
}

TEST_CASE("test-support toy network matches the file") {
    auto a = testing::toyNetwork();
    auto b = parseNetwork(toyText);
    for (auto const & p : testing::gridPoints(a, 1)) { CHECK(forward(a, p) == forward(b, p)); }
}
