#include "spex/Interpolation.h"

#include "spex/Error.h"

#include <numeric>

namespace spex {

TheoryAlgo TheoryAlgo::dual() const {
    switch (kind) {
        case TheoryKind::DecomposedFarkas: return {TheoryKind::DualDecomposedFarkas, 0};
        case TheoryKind::Farkas: return {TheoryKind::DualFarkas, 0};
        case TheoryKind::Factor: return {TheoryKind::Factor, Rational(1) - factor};
        case TheoryKind::DualFarkas: return {TheoryKind::Farkas, 0};
        case TheoryKind::DualDecomposedFarkas: return {TheoryKind::DecomposedFarkas, 0};
    }
    return *this;
}

ItpAlgo presetByName(std::string const & name, Rational const & midFactor) {
    auto checkFactor = [](Rational const & q) {
        if (q < 0 or q > 1) { throw Error("interpolation factor " + toString(q) + " is outside [0, 1]"); }
        return q;
    };
    if (name == "stronger") { return {{TheoryKind::DecomposedFarkas, 0}, PropositionalKind::McMillan}; }
    if (name == "strong") { return {{TheoryKind::Farkas, 0}, PropositionalKind::McMillan}; }
    if (name == "mid") { return {{TheoryKind::Factor, checkFactor(midFactor)}, PropositionalKind::McMillan}; }
    if (name == "weak") { return {{TheoryKind::DualFarkas, 0}, PropositionalKind::McMillan}; }
    if (name == "weaker") { return {{TheoryKind::DualDecomposedFarkas, 0}, PropositionalKind::DualMcMillan}; }
    if (name.starts_with("factor:")) {
        Rational q;
        try {
            q = parseRational(name.substr(7));
        } catch (ParseError const &) {
            throw Error("invalid interpolation factor in '" + name + "'");
        }
        return {{TheoryKind::Factor, checkFactor(q)}, PropositionalKind::McMillan};
    }
    throw Error("unknown interpolation preset '" + name + "'");
}

std::string describe(ItpAlgo const & algo) {
    std::string theory;
    switch (algo.theory.kind) {
        case TheoryKind::DecomposedFarkas: theory = "DF"; break;
        case TheoryKind::Farkas: theory = "F"; break;
        case TheoryKind::Factor: theory = "Factor(" + toString(algo.theory.factor) + ")"; break;
        case TheoryKind::DualFarkas: theory = "F'"; break;
        case TheoryKind::DualDecomposedFarkas: theory = "DF'"; break;
    }
    return "(" + theory + "," + (algo.propositional == PropositionalKind::McMillan ? "M" : "M'") + ")";
}

namespace {

struct WeightedRow {
    AtomId id;
    LinearTerm term;  // oriented and weighted
    Rational constant;
    bool strict;      // strict atom with positive multiplier
    bool equation;
};

struct SideSum {
    LinearTerm term;
    Rational constant = 0;
    bool strict = false;
};

SideSum sumRows(std::vector<WeightedRow> const & rows) {
    SideSum sum;
    for (auto const & r : rows) {
        sum.term.addScaled(r.term, 1);
        sum.constant += r.constant;
        sum.strict = sum.strict or r.strict;
    }
    return sum;
}

std::vector<WeightedRow> rowsOf(FarkasCertificate const & certificate, ProofTree const & tree, Side side) {
    std::vector<WeightedRow> rows;
    for (auto const & [id, lambda] : certificate.multipliers) {
        if (lambda == 0) { continue; }
        auto const & record = tree.atoms.at(id);
        if (record.side != side) { continue; }
        Rational const weight = lambda * orientation(record.atom.rel);
        rows.push_back({id, record.atom.term.scaled(weight), record.atom.constant * weight,
                        isStrict(record.atom.rel) and lambda > 0, record.atom.rel == Relation::Eq});
    }
    return rows;
}

/// Finest grouping of rows connected through variables outside `shared`; each group's sum is then
/// free of those variables.
Formula decomposed(std::vector<WeightedRow> const & rows, VarSet const & shared) {
    std::vector<std::size_t> parent(rows.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) { i = parent[i] = parent[parent[i]]; }
        return i;
    };
    std::map<std::string, std::size_t, VarLess> owner;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (auto const & [var, c] : rows[i].term) {
            if (shared.contains(var)) { continue; }
            auto [it, inserted] = owner.try_emplace(var, i);
            if (not inserted) {
                auto x = find(i);
                auto y = find(it->second);
                if (x != y) { parent[std::max(x, y)] = std::min(x, y); }
            }
        }
    }
    std::map<std::size_t, std::vector<WeightedRow>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i) { groups[find(i)].push_back(rows[i]); }

    std::vector<Formula> parts;
    for (auto const & [root, members] : groups) {
        auto sum = sumRows(members);
        for (auto const & [var, c] : sum.term) {
            if (not shared.contains(var)) { throw Error("internal error: decomposition left a local variable"); }
        }
        bool const allEquations = std::all_of(members.begin(), members.end(), [](auto const & r) { return r.equation; });
        Relation rel = allEquations ? Relation::Eq : (sum.strict ? Relation::Lt : Relation::Le);
        parts.push_back(Formula::atom(std::move(sum.term), rel, sum.constant));
    }
    return Formula::conj(std::move(parts));
}

} // namespace

Formula theoryInterpolant(FarkasCertificate const & certificate, ProofTree const & tree, VarSet const & shared,
                          TheoryAlgo const & algo, Side aSide) {
    auto const aRows = rowsOf(certificate, tree, aSide);
    auto const a = sumRows(aRows);
    Rational const & b = certificate.combinedConstant;
    for (auto const & [var, c] : a.term) {
        if (not shared.contains(var)) { throw Error("certificate and side tags do not match the shared vocabulary"); }
    }

    auto farkas = [&]() { return Formula::atom(a.term, a.strict ? Relation::Lt : Relation::Le, a.constant); };
    auto dualFarkas = [&]() {
        bool const bStrict = sumRows(rowsOf(certificate, tree, opposite(aSide))).strict;
        return Formula::atom(a.term, bStrict ? Relation::Le : Relation::Lt, a.constant - b);
    };

    switch (algo.kind) {
        case TheoryKind::Farkas: return farkas();
        case TheoryKind::DualFarkas: return dualFarkas();
        case TheoryKind::Factor: {
            if (algo.factor < 0 or algo.factor > 1) { throw Error("interpolation factor outside [0, 1]"); }
            if (algo.factor == 0) { return farkas(); }
            if (algo.factor == 1) { return dualFarkas(); }
            Relation rel = (b == 0 and a.strict) ? Relation::Lt : Relation::Le;
            return Formula::atom(a.term, rel, a.constant - algo.factor * b);
        }
        case TheoryKind::DecomposedFarkas: return decomposed(aRows, shared);
        case TheoryKind::DualDecomposedFarkas:
            return negate(decomposed(rowsOf(certificate, tree, opposite(aSide)), shared));
    }
    return farkas();
}

namespace {

std::vector<Formula> unique(std::vector<Formula> items) {
    std::vector<Formula> result;
    for (auto & f : items) {
        if (std::find(result.begin(), result.end(), f) == result.end()) { result.push_back(std::move(f)); }
    }
    return result;
}

Formula combineMcMillan(ProofTree const & tree, ProofNode const & node, VarSet const & shared, TheoryAlgo const & theory,
                        Side aSide) {
    if (auto const * leaf = std::get_if<ProofLeaf>(&node.content)) {
        return theoryInterpolant(leaf->certificate, tree, shared, theory, aSide);
    }
    auto const & split = std::get<ProofSplit>(node.content);
    std::vector<Formula> parts;
    for (auto const & child : split.children) { parts.push_back(combineMcMillan(tree, child, shared, theory, aSide)); }
    // flattening may expose duplicates from sibling leaves
    if (split.side == aSide) {
        auto f = Formula::disj(std::move(parts));
        return f.isOr() ? Formula::disj(unique(f.children())) : f;
    }
    auto f = Formula::conj(std::move(parts));
    return f.isAnd() ? Formula::conj(unique(f.children())) : f;
}

} // namespace

Formula combine(ProofTree const & tree, VarSet const & shared, ItpAlgo const & algo) {
    if (algo.propositional == PropositionalKind::McMillan) {
        return combineMcMillan(tree, tree.root, shared, algo.theory, Side::A);
    }
    return negate(combineMcMillan(tree, tree.root, shared, algo.theory.dual(), Side::B));
}

InterpolationResult interpolate(Formula const & a, Formula const & b, ItpAlgo const & algo, SolveOptions const & options) {
    PartitionedSystem sys(a, b);
    auto result = solve(sys, options);
    if (result.status == SolveStatus::Timeout) { throw TimeoutError("interpolation query timed out"); }
    if (result.sat()) { throw SatError("interpolation query is satisfiable"); }
    return {combine(*result.proof, sys.shared, algo), result.stats};
}

bool implies(Formula const & antecedent, Formula const & consequent, SolveOptions const & options) {
    auto result = solve(PartitionedSystem(antecedent, negate(consequent)), options);
    if (result.status == SolveStatus::Timeout) { throw TimeoutError("implication check timed out"); }
    return result.unsat();
}

ContractCheck checkCraigContract(Formula const & a, Formula const & b, Formula const & interpolant,
                                 SolveOptions const & options) {
    ContractCheck check;
    check.implied = implies(a, interpolant, options);
    auto refutation = solve(PartitionedSystem(interpolant, b), options);
    if (refutation.status == SolveStatus::Timeout) { throw TimeoutError("contract check timed out"); }
    check.refutes = refutation.unsat();
    auto aVars = variables(a);
    auto bVars = variables(b);
    check.vocabulary = true;
    for (auto const & var : variables(interpolant)) {
        if (not aVars.contains(var) or not bVars.contains(var)) { check.vocabulary = false; }
    }
    return check;
}

} // namespace spex
