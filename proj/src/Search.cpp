#include "spex/Search.h"

#include "spex/Error.h"

#include <deque>

namespace spex {

std::vector<LabeledAtom> ProofTree::labeledAtoms(std::vector<AtomId> const & ids) const {
    std::vector<LabeledAtom> result;
    result.reserve(ids.size());
    for (AtomId id : ids) { result.push_back({id, atoms.at(id).atom}); }
    return result;
}

std::string defaultConjunctLabel(std::size_t index) {
    return "#" + std::to_string(index);
}

namespace {

struct SolveTimeout {};

/// Mirror of a formula with atom and disjunction occurrences numbered.
struct Compiled {
    Formula::Kind kind;
    std::size_t index = 0; // atom id or disjunction id
    std::vector<Compiled> children;
};

class Search {
public:
    Search(PartitionedSystem const & sys, SolveOptions const & opts) : options{opts} {
        auto parts = conjuncts(sys.aPart);
        std::vector<Compiled> aItems;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            auto label = parts[i].label().empty() ? defaultConjunctLabel(i) : parts[i].label();
            aItems.push_back(compile(parts[i], Side::A, label));
        }
        roots.push_back(Compiled{Formula::Kind::And, 0, std::move(aItems)});
        roots.push_back(compile(sys.bPart, Side::B, {}));

        VarSet all = variables(sys.aPart);
        all.merge(variables(sys.bPart));
        simplex.registerVariables(all);
        for (auto const & record : tree.atoms) { simplex.registerTerm(record.atom.term); }
    }

    SolveResult run() {
        auto const start = Clock::now();
        SolveResult result;
        try {
            // popped from the back: A first
            std::vector<Compiled const *> pending{&roots[1], &roots[0]};
            auto node = explore(pending, {});
            if (node) {
                tree.root = std::move(*node);
                result.status = SolveStatus::Unsat;
                result.proof = std::move(tree);
            } else {
                result.status = SolveStatus::Sat;
                result.model = std::move(model);
            }
        } catch (SolveTimeout const &) {
            result.status = SolveStatus::Timeout;
        }
        result.stats.lpCalls = simplex.checkCount();
        result.stats.splits = splits;
        result.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        return result;
    }

private:
    Compiled compile(Formula const & f, Side side, std::string const & label) {
        Compiled c{f.kind(), 0, {}};
        switch (f.kind()) {
            case Formula::Kind::True: break;
            case Formula::Kind::False:
                c.kind = Formula::Kind::Atom;
                c.index = tree.atoms.size();
                tree.atoms.push_back({Atom{{}, Relation::Le, Rational(-1)}, side, label});
                break;
            case Formula::Kind::Atom:
                c.index = tree.atoms.size();
                tree.atoms.push_back({f.getAtom(), side, label});
                break;
            case Formula::Kind::Or:
                c.index = tree.disjunctions.size();
                tree.disjunctions.push_back({f, side, label});
                [[fallthrough]];
            case Formula::Kind::And:
                for (auto const & child : f.children()) { c.children.push_back(compile(child, side, label)); }
                break;
        }
        return c;
    }

    /// Returns nullopt when a model was found (stored in `model`).
    std::optional<ProofNode> explore(std::vector<Compiled const *> pending, std::deque<Compiled const *> open) {
        if (options.deadline and Clock::now() > *options.deadline) { throw SolveTimeout{}; }
        simplex.push();
        std::size_t const activeMark = active.size();
        auto leave = [&]() {
            simplex.pop();
            active.resize(activeMark);
        };

        std::vector<Compiled const *> discovered;
        std::optional<FarkasCertificate> conflict;
        while (not pending.empty() and not conflict) {
            Compiled const * item = pending.back();
            pending.pop_back();
            switch (item->kind) {
                case Formula::Kind::True:
                case Formula::Kind::False: break;
                case Formula::Kind::Atom:
                    active.push_back(item->index);
                    conflict = simplex.assertAtom(item->index, tree.atoms[item->index].atom);
                    break;
                case Formula::Kind::And:
                    for (auto it = item->children.rbegin(); it != item->children.rend(); ++it) { pending.push_back(&*it); }
                    break;
                case Formula::Kind::Or: discovered.push_back(item); break;
            }
        }
        if (not conflict) { conflict = simplex.check(); }
        if (conflict) {
            ProofNode leaf{ProofLeaf{std::move(*conflict), active}};
            leave();
            return leaf;
        }
        open.insert(open.begin(), discovered.begin(), discovered.end());
        if (open.empty()) {
            model = simplex.model();
            leave();
            return std::nullopt;
        }
        Compiled const * disjunction = open.front();
        open.pop_front();
        ++splits;
        ProofSplit split{disjunction->index, tree.disjunctions[disjunction->index].side, {}};
        for (auto const & child : disjunction->children) {
            auto sub = explore({&child}, open);
            if (not sub) {
                leave();
                return std::nullopt;
            }
            split.children.push_back(std::move(*sub));
        }
        leave();
        return ProofNode{std::move(split)};
    }

    SolveOptions options;
    ProofTree tree;
    std::vector<Compiled> roots;
    Simplex simplex;
    std::vector<AtomId> active;
    Assignment model;
    std::size_t splits = 0;
};

void collectCore(ProofTree const & tree, ProofNode const & node, std::set<std::string> & out) {
    if (auto const * leaf = std::get_if<ProofLeaf>(&node.content)) {
        for (auto const & [id, lambda] : leaf->certificate.multipliers) {
            auto const & record = tree.atoms.at(id);
            if (record.side == Side::A and lambda != 0) { out.insert(record.label); }
        }
        return;
    }
    auto const & split = std::get<ProofSplit>(node.content);
    if (split.side == Side::A) { out.insert(tree.disjunctions.at(split.disjunction).label); }
    for (auto const & child : split.children) { collectCore(tree, child, out); }
}

bool replay(ProofTree const & tree, ProofNode const & node) {
    if (auto const * leaf = std::get_if<ProofLeaf>(&node.content)) {
        auto atoms = tree.labeledAtoms(leaf->active);
        return certify(leaf->certificate, atoms);
    }
    auto const & split = std::get<ProofSplit>(node.content);
    auto const & disjunction = tree.disjunctions.at(split.disjunction).formula;
    if (split.children.size() != disjunction.children().size()) { return false; }
    for (auto const & child : split.children) {
        if (not replay(tree, child)) { return false; }
    }
    return true;
}

} // namespace

SolveResult solve(PartitionedSystem const & sys, SolveOptions const & options) {
    return Search(sys, options).run();
}

SolveResult solve(Formula const & f, SolveOptions const & options) {
    return solve(PartitionedSystem(f, Formula::top()), options);
}

std::set<std::string> coreLabels(ProofTree const & tree) {
    std::set<std::string> result;
    collectCore(tree, tree.root, result);
    return result;
}

bool replayProof(ProofTree const & tree) {
    return replay(tree, tree.root);
}

} // namespace spex
