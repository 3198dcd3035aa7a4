#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spex/Error.h"
#include "spex/Formula.h"

using namespace spex;

namespace {

Formula ge(LinearTerm t, long c) {
    return Formula::atom(std::move(t), Relation::Ge, c);
}

Assignment at(Rational x1, Rational x2, Rational x3) {
    return {{"x1", x1}, {"x2", x2}, {"x3", x3}};
}

} // namespace

TEST_CASE("natural variable order") {
    VarLess less;
    CHECK(less("x2", "x10"));
    CHECK_FALSE(less("x10", "x2"));
    CHECK(less("x1", "x2"));
    CHECK(less("x_1_2", "x_1_10"));
    CHECK(less("a", "b"));
    CHECK_FALSE(less("x3", "x3"));
}

TEST_CASE("rationals parse exactly") {
    CHECK(parseRational("3") == 3);
    CHECK(parseRational("-5/10") == Rational(-1, 2));
    CHECK(parseRational("0.125") == Rational(1, 8));
    CHECK(parseRational("1e-3") == Rational(1, 1000));
    CHECK(parseRational("-2.5E2") == -250);
    CHECK_THROWS_AS(parseRational("1/0"), ParseError);
    CHECK_THROWS_AS(parseRational("abc"), ParseError);
    CHECK(toString(parseRational("6/4")) == "3/2");
}

TEST_CASE("linear terms drop zero coefficients") {
    LinearTerm t{{"x1", 1}, {"x2", -1}};
    t.add("x1", -1);
    CHECK(t.size() == 1);
    CHECK(t.coefficient("x1") == 0);
    CHECK(t.coefficient("x2") == -1);
}

TEST_CASE("atoms compare modulo positive scaling") {
    Atom a{{{"x1", 2}, {"x2", -2}}, Relation::Le, 4};
    Atom b{{{"x1", 1}, {"x2", -1}}, Relation::Le, 2};
    Atom c{{{"x1", -1}, {"x2", 1}}, Relation::Ge, -2};
    CHECK(a == b);
    CHECK_FALSE(a == c);  // same set, different orientation
    Atom e{{{"x1", -3}}, Relation::Eq, 6};
    auto canon = e.canonical();
    CHECK(canon.term.coefficient("x1") == 1);
    CHECK(canon.constant == -2);
}

TEST_CASE("printing and parsing round-trip") {
    auto phi1 = ge({{"x1", 1}, {"x2", -1}, {"x3", 1}}, 3);
    CHECK(toString(phi1) == "(>= (+ x1 (* -1 x2) x3) 3)");
    CHECK(parseFormula(toString(phi1)) == phi1);

    auto f = Formula::conj({phi1, Formula::disj({Formula::atom({{"x1", Rational(1, 2)}}, Relation::Lt, 1),
                                                 Formula::atom({{"x2", 1}}, Relation::Eq, Rational(1, 3))})});
    auto text = toString(f);
    CHECK(parseFormula(text) == f);
    CHECK(toString(parseFormula(text)) == text);
    CHECK(parseFormula("true").isTrue());
    CHECK(parseFormula("(and)").isTrue());
    CHECK(parseFormula("(or)").isFalse());
    CHECK(parseFormula(" ( <=  x1   1/2 ) ") == Formula::atom({{"x1", 1}}, Relation::Le, Rational(1, 2)));
}

TEST_CASE("parse errors report positions") {
    auto position = [](char const * text) {
        try {
            parseFormula(text);
        } catch (ParseError const & e) {
            return e.position();
        }
        return ParseError::npos;
    };
    CHECK(position("(<= x1 1") == 8);
    CHECK(position("(~ x1 1)") == 1);
    CHECK(position("(<= (* a x1) 1)") == 7);
    CHECK(position("(<= x1 1) junk") == 10);
    CHECK(position("(<= 3 1)") == 4);
}

TEST_CASE("constructors simplify") {
    auto a = ge({{"x1", 1}}, 1);
    CHECK(Formula::conj({}).isTrue());
    CHECK(Formula::disj({}).isFalse());
    CHECK(Formula::conj({a}) == a);
    CHECK(Formula::conj({a, Formula::bottom()}).isFalse());
    CHECK(Formula::disj({a, Formula::top()}).isTrue());
    CHECK(Formula::conj({Formula::conj({a, a}), a}).children().size() == 3);
    CHECK(Formula::atom(LinearTerm{}, Relation::Le, 0).isTrue());
    CHECK(Formula::atom(LinearTerm{}, Relation::Lt, 0).isFalse());
}

TEST_CASE("labels survive flattening and are ignored by equality") {
    auto a = ge({{"x1", 1}}, 1);
    auto labeled = a.withLabel("x1");
    CHECK(labeled == a);
    auto f = Formula::conj({Formula::conj({a, a}).withLabel("group"), a});
    REQUIRE(f.children().size() == 2);
    CHECK(f.children()[0].label() == "group");
}

TEST_CASE("evaluation and substitution") {
    auto phi1 = ge({{"x1", 1}, {"x2", -1}, {"x3", 1}}, 3);
    CHECK(eval(phi1, at(1, 1, 3)));
    CHECK_FALSE(eval(phi1, at(1, 0, 0)));
    CHECK_THROWS_AS(eval(phi1, Assignment{{"x1", 1}}), UnknownNameError);

    auto sliced = substitute(phi1, {{"x3", 1}});
    CHECK(variables(sliced) == VarSet{"x1", "x2"});
    CHECK(sliced == ge({{"x1", 1}, {"x2", -1}}, 2));
    CHECK(substitute(phi1, {{"x1", 4}, {"x2", 0}, {"x3", 0}}).isTrue());
    CHECK(substitute(phi1, {{"x1", 0}, {"x2", 4}, {"x3", 0}}).isFalse());

    std::vector<Rational> p{1, 1, 3};
    std::vector<std::string> names{"x1", "x2", "x3"};
    CHECK(eval(phi1, p, names));
}

TEST_CASE("negation is exact") {
    auto eq = Formula::atom({{"x1", 1}}, Relation::Eq, 2);
    auto n = negate(eq);
    CHECK(n.isOr());
    for (Rational v : {Rational(1), Rational(2), Rational(5, 2)}) {
        Assignment a{{"x1", v}};
        CHECK(eval(n, a) != eval(eq, a));
    }
    auto f = Formula::conj({ge({{"x1", 1}}, 1), Formula::disj({ge({{"x2", 1}}, 2), Formula::atom({{"x3", 1}}, Relation::Lt, 0)})});
    for (int x1 = 0; x1 < 3; ++x1) {
        for (int x2 = 0; x2 < 4; ++x2) {
            for (int x3 = -1; x3 < 2; ++x3) {
                auto a = at(x1, x2, x3);
                CHECK(eval(negate(f), a) != eval(f, a));
            }
        }
    }
    CHECK(negate(Formula::top()).isFalse());
}

TEST_CASE("terms, variables and conjuncts") {
    auto a = ge({{"x1", 1}}, 1);
    auto b = ge({{"x2", 1}, {"x10", 1}}, 1);
    auto f = Formula::conj({a, Formula::disj({a, b})});
    CHECK(countTerms(f) == 3);
    CHECK(countTerms(Formula::top()) == 0);
    auto vars = variables(f);
    CHECK(std::vector<std::string>(vars.begin(), vars.end()) == std::vector<std::string>{"x1", "x2", "x10"});
    CHECK(conjuncts(f).size() == 2);
    CHECK(conjuncts(a).size() == 1);
    CHECK(conjuncts(Formula::top()).empty());
}
