#include "spex/Encoder.h"

#include "spex/Error.h"

#include <algorithm>

namespace spex {

std::string preActivationVar(std::size_t layer, std::size_t neuron) {
    return "y_" + std::to_string(layer) + "_" + std::to_string(neuron);
}

std::string postActivationVar(std::size_t layer, std::size_t neuron) {
    return "x_" + std::to_string(layer) + "_" + std::to_string(neuron);
}

Formula encodeNetwork(Network const & net) {
    std::vector<Formula> rows;
    std::vector<Formula> relus;
    auto const & layers = net.layers();
    std::vector<std::string> previous = net.featureNames();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        auto const & layer = layers[k];
        std::size_t const layerNo = k + 1;
        bool const hidden = k + 1 < layers.size();
        std::vector<std::string> current;
        for (std::size_t i = 0; i < layer.neuronCount(); ++i) {
            auto y = preActivationVar(layerNo, i + 1);
            LinearTerm term = LinearTerm::variable(y);
            for (std::size_t j = 0; j < previous.size(); ++j) { term.add(previous[j], -layer.weights[j][i]); }
            rows.push_back(Formula::atom(std::move(term), Relation::Eq, layer.biases[i]));
            if (hidden) {
                auto x = postActivationVar(layerNo, i + 1);
                auto inactive = Formula::conj({Formula::atom(LinearTerm::variable(y), Relation::Le, 0),
                                               Formula::atom(LinearTerm::variable(x), Relation::Eq, 0)});
                auto active = Formula::conj({Formula::atom(LinearTerm::variable(y), Relation::Ge, 0),
                                             Formula::atom(LinearTerm{{x, 1}, {y, -1}}, Relation::Eq, 0)});
                relus.push_back(Formula::disj({inactive, active}));
                current.push_back(x);
            } else {
                current.push_back(y);
            }
        }
        previous = std::move(current);
    }
    rows.insert(rows.end(), relus.begin(), relus.end());
    return Formula::conj(std::move(rows));
}

Formula encodeDomains(Network const & net) {
    std::vector<Formula> bounds;
    auto const & names = net.featureNames();
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto const & d = net.domains()[i];
        bounds.push_back(Formula::atom(LinearTerm::variable(names[i]), Relation::Ge, d.lower));
        bounds.push_back(Formula::atom(LinearTerm::variable(names[i]), Relation::Le, d.upper));
    }
    return Formula::conj(std::move(bounds));
}

Formula encodeNotClass(Network const & net, std::size_t target) {
    if (target >= net.classCount()) { throw UnknownNameError("class index " + std::to_string(target) + " out of range"); }
    std::size_t const outputLayer = net.layerCount();
    auto const targetVar = preActivationVar(outputLayer, target + 1);
    std::vector<Formula> others;
    for (std::size_t j = 0; j < net.classCount(); ++j) {
        if (j == target) { continue; }
        LinearTerm diff{{preActivationVar(outputLayer, j + 1), 1}, {targetVar, -1}};
        others.push_back(Formula::atom(std::move(diff), j < target ? Relation::Ge : Relation::Gt, 0));
    }
    return Formula::disj(std::move(others));
}

Formula buildPsi(Network const & net, std::size_t target) {
    return Formula::conj({encodeNetwork(net), encodeDomains(net), encodeNotClass(net, target)});
}

Formula buildPsi(Network const & net, std::string const & className) {
    return buildPsi(net, net.classIndex(className));
}

Formula encodeSample(std::span<Rational const> sample, std::span<std::string const> names) {
    if (sample.empty()) { throw DimensionError("cannot encode an empty sample"); }
    if (sample.size() != names.size()) {
        throw DimensionError("sample has " + std::to_string(sample.size()) + " values for " + std::to_string(names.size())
                             + " features");
    }
    std::vector<Formula> equalities;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        equalities.push_back(Formula::atom(LinearTerm::variable(names[i]), Relation::Eq, sample[i]).withLabel(names[i]));
    }
    if (equalities.size() == 1) { return equalities.front(); }
    return Formula::conj(std::move(equalities));
}

std::pair<Formula, Formula> partitionSample(Formula const & sample, VarSet const & selected) {
    if (selected.empty()) { throw Error("feature selection must not be empty"); }
    auto const parts = conjuncts(sample);
    VarSet present;
    std::vector<Formula> inside;
    std::vector<Formula> outside;
    for (auto const & c : parts) {
        auto vars = variables(c);
        if (vars.size() != 1) { throw Error("conjunct " + toString(c) + " does not constrain exactly one feature"); }
        auto const & var = *vars.begin();
        present.insert(var);
        (selected.contains(var) ? inside : outside).push_back(c);
    }
    for (auto const & var : selected) {
        if (not present.contains(var)) { throw UnknownNameError("unknown feature '" + var + "'"); }
    }
    return {Formula::conj(std::move(inside)), Formula::conj(std::move(outside))};
}

PartitionedSystem::PartitionedSystem(Formula a, Formula b, std::optional<std::size_t> target)
    : aPart{std::move(a)}, bPart{std::move(b)}, targetClass{target} {
    auto aVars = variables(aPart);
    for (auto const & var : variables(bPart)) {
        if (aVars.contains(var)) {
            shared.insert(var);
        } else {
            auxiliary.insert(var);
        }
    }
}

} // namespace spex
