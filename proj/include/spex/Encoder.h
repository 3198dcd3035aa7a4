#pragma once

#include "Formula.h"
#include "Network.h"

#include <optional>
#include <span>
#include <string>
#include <utility>

namespace spex {

/// Pre-activation variable of neuron `neuron` (1-based) in layer `layer` (1-based).
std::string preActivationVar(std::size_t layer, std::size_t neuron);
/// Post-ReLU variable of a hidden neuron.
std::string postActivationVar(std::size_t layer, std::size_t neuron);

/// Affine equalities of every layer plus one ReLU disjunction per hidden neuron.
Formula encodeNetwork(Network const & net);
/// L_i <= x_i and x_i <= U_i for every feature.
Formula encodeDomains(Network const & net);
/// Output is not class `target` under lowest-index tie-breaking: some lower index reaches
/// the target's output, or some higher index exceeds it.
Formula encodeNotClass(Network const & net, std::size_t target);

/// The query that is unsatisfiable exactly over the target's class space.
Formula buildPsi(Network const & net, std::size_t target);
Formula buildPsi(Network const & net, std::string const & className);

/// Conjunction of x_i = s_i, each conjunct labeled by its feature name.
Formula encodeSample(std::span<Rational const> sample, std::span<std::string const> names);

/// Splits a per-feature conjunction into the conjuncts over `selected` and the rest.
/// Throws UnknownNameError for unknown features and Error for multi-feature conjuncts.
std::pair<Formula, Formula> partitionSample(Formula const & sample, VarSet const & selected);

/// An interpolation/solving problem A /\ B with its shared vocabulary.
struct PartitionedSystem {
    PartitionedSystem(Formula a, Formula b, std::optional<std::size_t> target = std::nullopt);

    Formula aPart;
    Formula bPart;
    VarSet shared;
    /// Variables of B that A does not mention.
    VarSet auxiliary;
    std::optional<std::size_t> targetClass;
};

} // namespace spex
