#pragma once

#include "Rational.h"

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spex {

/// Orders identifiers with embedded numbers naturally: x2 < x10.
struct VarLess {
    bool operator()(std::string const & lhs, std::string const & rhs) const;
};

using VarSet = std::set<std::string, VarLess>;
using Assignment = std::map<std::string, Rational, VarLess>;

/// Sparse linear combination of variables. Zero coefficients are never stored.
class LinearTerm {
public:
    using Map = std::map<std::string, Rational, VarLess>;

    LinearTerm() = default;
    LinearTerm(std::initializer_list<std::pair<std::string const, Rational>> init);

    static LinearTerm variable(std::string name, Rational coefficient = 1);

    void add(std::string const & var, Rational const & coefficient);
    void addScaled(LinearTerm const & other, Rational const & factor);

    Rational coefficient(std::string const & var) const;
    bool empty() const { return coeffs.empty(); }
    std::size_t size() const { return coeffs.size(); }
    auto begin() const { return coeffs.begin(); }
    auto end() const { return coeffs.end(); }

    LinearTerm scaled(Rational const & factor) const;
    Rational evaluate(Assignment const & values) const;

    bool operator==(LinearTerm const &) const = default;

private:
    Map coeffs;
};

enum class Relation { Le, Lt, Eq, Ge, Gt };

std::string_view toString(Relation);
bool holds(Relation, Rational const & lhs, Rational const & rhs);
bool isStrict(Relation r);

/// term rel constant.
struct Atom {
    LinearTerm term;
    Relation rel;
    Rational constant;

    /// Positive rescaling so that coefficients are coprime integers; equalities also get a positive
    /// leading coefficient. Semantics are unchanged.
    Atom canonical() const;

    bool holdsAt(Assignment const & values) const { return holds(rel, term.evaluate(values), constant); }

    /// Equality modulo positive scaling.
    bool operator==(Atom const & other) const;
};

/// Immutable quantifier-free linear arithmetic formula. Copies share structure.
class Formula {
public:
    enum class Kind { True, False, Atom, And, Or };

    Formula();

    static Formula top();
    static Formula bottom();
    /// Atoms with an empty term fold to True/False.
    static Formula atom(Atom a);
    static Formula atom(LinearTerm term, Relation rel, Rational constant);
    /// Flattens unlabeled nested conjunctions, drops True, collapses on False and on a single child.
    static Formula conj(std::vector<Formula> children);
    static Formula disj(std::vector<Formula> children);

    Kind kind() const { return node->kind; }
    bool isTrue() const { return kind() == Kind::True; }
    bool isFalse() const { return kind() == Kind::False; }
    bool isAtom() const { return kind() == Kind::Atom; }
    bool isAnd() const { return kind() == Kind::And; }
    bool isOr() const { return kind() == Kind::Or; }

    /// Precondition: isAtom().
    Atom const & getAtom() const { return node->atom; }
    std::vector<Formula> const & children() const { return node->children; }

    std::string const & label() const { return node->label; }
    Formula withLabel(std::string label) const;

    /// Structural equality; atoms compare modulo positive scaling, labels are ignored.
    bool operator==(Formula const & other) const;

    /// Identity of the shared node; stable for the lifetime of any copy.
    void const * id() const { return node.get(); }

private:
    struct Node {
        Kind kind;
        Atom atom;
        std::vector<Formula> children;
        std::string label;
    };
    explicit Formula(std::shared_ptr<Node const> n) : node{std::move(n)} {}

    std::shared_ptr<Node const> node;
};

/// Throws UnknownNameError when a variable has no value.
bool eval(Formula const & f, Assignment const & values);
bool eval(Formula const & f, std::span<Rational const> point, std::span<std::string const> names);

Formula substitute(Formula const & f, Assignment const & values);
Formula negate(Formula const & f);
std::size_t countTerms(Formula const & f);
VarSet variables(Formula const & f);
/// Top-level conjuncts; True yields none, a non-conjunction yields itself.
std::vector<Formula> conjuncts(Formula const & f);

/// S-expression form, e.g. (>= (+ x1 (* -1 x2) x3) 3). Atoms are printed in canonical scale.
std::string toString(Formula const & f);
/// Throws ParseError with the offending position.
Formula parseFormula(std::string_view text);

} // namespace spex
