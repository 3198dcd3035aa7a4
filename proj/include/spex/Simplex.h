#pragma once

#include "Formula.h"
#include "Rational.h"

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spex {

/// real + delta * d for a symbolic positive infinitesimal d.
struct DeltaRational {
    Rational real;
    Rational delta;

    DeltaRational() = default;
    DeltaRational(Rational r, Rational d = 0) : real{std::move(r)}, delta{std::move(d)} {}

    std::strong_ordering operator<=>(DeltaRational const & other) const;
    bool operator==(DeltaRational const & other) const = default;

    DeltaRational operator+(DeltaRational const & o) const { return {real + o.real, delta + o.delta}; }
    DeltaRational operator-(DeltaRational const & o) const { return {real - o.real, delta - o.delta}; }
    DeltaRational operator*(Rational const & k) const { return {real * k, delta * k}; }
    DeltaRational & operator+=(DeltaRational const & o);

    Rational instantiate(Rational const & d) const { return real + delta * d; }
};

using AtomId = std::size_t;

struct LabeledAtom {
    AtomId id;
    Atom atom;
};

/// Each atom is read in oriented form: `term <= c` / `term < c` as is, `term >= c` / `term > c`
/// as `-term <= -c` / `-term < -c`, and `term = c` as an equation. Multipliers are non-negative
/// except on equations. The weighted sum of oriented atoms has no variables left and its constant
/// makes `0 <= combined` (or `0 < combined` when strict) false.
struct FarkasCertificate {
    std::map<AtomId, Rational> multipliers;
    Rational combinedConstant;
    bool strict = false;
};

/// +1 for <=, <, =; -1 for >=, >.
int orientation(Relation r);

/// Incremental general simplex over delta-rationals (bounds on variables, one slack per distinct
/// multi-variable term). Bland's rule for both leaving and entering variables.
class Simplex {
public:
    Simplex();
    ~Simplex();
    Simplex(Simplex const &) = delete;
    Simplex & operator=(Simplex const &) = delete;

    /// Fixes the column order; variables seen later are appended.
    void registerVariables(VarSet const & vars);
    void registerTerm(LinearTerm const & term);

    /// Tightens bounds; returns a certificate when a bound immediately contradicts another.
    std::optional<FarkasCertificate> assertAtom(AtomId id, Atom const & atom);

    /// Repairs the assignment; returns a certificate if the asserted bounds are infeasible.
    std::optional<FarkasCertificate> check();

    void push();
    void pop();

    /// Values of the original variables with the infinitesimal instantiated. Valid after a
    /// successful check().
    Assignment model() const;

    std::size_t checkCount() const;
    std::size_t pivotCount() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl;
};

struct LpResult {
    bool feasible = false;
    Assignment model;
    FarkasCertificate certificate;
};

/// Decides a conjunction of linear atoms.
LpResult lpCheck(std::span<LabeledAtom const> atoms);

/// Independent check of the certificate invariants by direct arithmetic.
bool certify(FarkasCertificate const & certificate, std::span<LabeledAtom const> atoms);

} // namespace spex
