#pragma once

#include "Encoder.h"
#include "Formula.h"
#include "Search.h"

#include <string>

namespace spex {

enum class TheoryKind { DecomposedFarkas, Farkas, Factor, DualFarkas, DualDecomposedFarkas };
enum class PropositionalKind { McMillan, DualMcMillan };

struct TheoryAlgo {
    TheoryKind kind = TheoryKind::Farkas;
    /// Only meaningful for Factor; in [0, 1].
    Rational factor = 0;

    /// Itp'(A, B) = not Itp(B, A) pairs DF with DF', F with F', and Factor(q) with Factor(1 - q).
    TheoryAlgo dual() const;
};

struct ItpAlgo {
    TheoryAlgo theory;
    PropositionalKind propositional = PropositionalKind::McMillan;
};

/// stronger, strong, mid, weak, weaker, or factor:<q>. `midFactor` is the factor used by "mid".
/// Throws Error on unknown names or a factor outside [0, 1].
ItpAlgo presetByName(std::string const & name, Rational const & midFactor = Rational(1, 2));
std::string describe(ItpAlgo const & algo);

/// Interpolant of one infeasible leaf. Atoms whose side equals `aSide` form the A part; the
/// result only mentions variables in `shared`.
Formula theoryInterpolant(FarkasCertificate const & certificate, ProofTree const & tree, VarSet const & shared,
                          TheoryAlgo const & algo, Side aSide = Side::A);

/// Propositional combination over the proof tree: A-side splits become disjunctions and B-side
/// splits conjunctions; the dual mode is obtained by swapping roles and negating.
Formula combine(ProofTree const & tree, VarSet const & shared, ItpAlgo const & algo);

struct InterpolationResult {
    Formula interpolant;
    SolveStats stats;
};

/// Throws SatError when a /\ b is satisfiable and TimeoutError when the budget runs out.
InterpolationResult interpolate(Formula const & a, Formula const & b, ItpAlgo const & algo,
                                SolveOptions const & options = {});

struct ContractCheck {
    bool implied = false;     // a implies I
    bool refutes = false;     // I /\ b is unsatisfiable
    bool vocabulary = false;  // vars(I) within vars(a) /\ vars(b)

    bool ok() const { return implied and refutes and vocabulary; }
};

ContractCheck checkCraigContract(Formula const & a, Formula const & b, Formula const & interpolant,
                                 SolveOptions const & options = {});

/// solve(antecedent /\ not consequent) is Unsat. Throws TimeoutError.
bool implies(Formula const & antecedent, Formula const & consequent, SolveOptions const & options = {});

} // namespace spex
