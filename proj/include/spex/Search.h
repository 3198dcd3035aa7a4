#pragma once

#include "Encoder.h"
#include "Formula.h"
#include "Simplex.h"

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace spex {

enum class Side { A, B };

inline Side opposite(Side s) {
    return s == Side::A ? Side::B : Side::A;
}

struct AtomRecord {
    Atom atom;
    Side side;
    /// Label of the enclosing top-level A conjunct; empty on the B side.
    std::string label;
};

struct DisjunctionRecord {
    Formula formula;
    Side side;
    std::string label;
};

struct ProofNode;

/// Infeasible branch: the certificate's multipliers range over `active`.
struct ProofLeaf {
    FarkasCertificate certificate;
    std::vector<AtomId> active;
};

/// One child per disjunct of the split disjunction, in order.
struct ProofSplit {
    std::size_t disjunction;
    Side side;
    std::vector<ProofNode> children;
};

struct ProofNode {
    std::variant<ProofLeaf, ProofSplit> content;
};

struct ProofTree {
    std::vector<AtomRecord> atoms;
    std::vector<DisjunctionRecord> disjunctions;
    ProofNode root;

    std::vector<LabeledAtom> labeledAtoms(std::vector<AtomId> const & ids) const;
};

enum class SolveStatus { Sat, Unsat, Timeout };

struct SolveStats {
    std::size_t lpCalls = 0;
    std::size_t splits = 0;
    double seconds = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Timeout;
    /// Full model (features and auxiliary variables) when Sat.
    Assignment model;
    std::optional<ProofTree> proof;
    SolveStats stats;

    bool sat() const { return status == SolveStatus::Sat; }
    bool unsat() const { return status == SolveStatus::Unsat; }
};

using Clock = std::chrono::steady_clock;

struct SolveOptions {
    std::optional<Clock::time_point> deadline;
};

/// Depth-first case splitting over disjunctions (A-part first, then B, both in syntactic order;
/// disjunctions uncovered inside a chosen disjunct are split next) with an LP check per node.
SolveResult solve(PartitionedSystem const & sys, SolveOptions const & options = {});
SolveResult solve(Formula const & f, SolveOptions const & options = {});

/// Label given to the i-th top-level A conjunct when it carries none.
std::string defaultConjunctLabel(std::size_t index);

/// Labels of A conjuncts that some leaf certificate or some A-side split depends on.
std::set<std::string> coreLabels(ProofTree const & tree);

/// Re-runs certify() at every leaf.
bool replayProof(ProofTree const & tree);

} // namespace spex
