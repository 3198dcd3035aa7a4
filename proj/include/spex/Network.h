#pragma once

#include "Rational.h"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spex {

using Point = std::vector<Rational>;

struct Interval {
    Rational lower;
    Rational upper;
};

/// One affine layer. weights[j][i] is the weight from input j (previous layer) to neuron i.
struct Layer {
    std::vector<std::vector<Rational>> weights;
    std::vector<Rational> biases;

    std::size_t inputCount() const { return weights.size(); }
    std::size_t neuronCount() const { return biases.size(); }
};

/// Feed-forward ReLU classifier: every layer but the last applies ReLU, the last is linear and
/// its neurons correspond to classes in order. Immutable after construction.
class Network {
public:
    /// Validates all invariants; throws DimensionError or DomainError.
    Network(std::size_t inputCount, std::vector<Interval> domains, std::vector<std::string> classNames,
            std::vector<Layer> layers);

    std::size_t inputCount() const { return inputs; }
    std::size_t classCount() const { return classes.size(); }
    std::size_t layerCount() const { return layerList.size(); }
    std::size_t hiddenNeuronCount() const;

    std::vector<Layer> const & layers() const { return layerList; }
    std::vector<Interval> const & domains() const { return domainList; }
    std::vector<std::string> const & classNames() const { return classes; }
    std::vector<std::string> const & featureNames() const { return features; }

    /// Throws UnknownNameError.
    std::size_t classIndex(std::string const & name) const;
    std::optional<std::size_t> featureIndex(std::string const & name) const;

private:
    std::size_t inputs;
    std::vector<Interval> domainList;
    std::vector<std::string> classes;
    std::vector<std::string> features;
    std::vector<Layer> layerList;
};

/// Loads the network JSON format. Numbers must be integers or decimal/fraction strings.
Network loadNetwork(std::filesystem::path const & path);
Network parseNetwork(std::string const & jsonText);

/// Output-layer pre-activations; hidden layers use ReLU. Exact.
std::vector<Rational> forward(Network const & net, std::span<Rational const> point);

/// Index of the maximal output; ties go to the lowest index.
std::size_t classify(Network const & net, std::span<Rational const> point);

struct Dataset {
    std::vector<Point> points;
    std::optional<std::vector<std::string>> labels;
    std::vector<std::string> featureNames;
};

struct DatasetOptions {
    /// Whether the last column holds class labels. A header row with inputCount + 1 columns
    /// also declares a label column.
    bool labeled = false;
};

/// CSV with an optional header row. Throws ParseError, DimensionError, UnknownNameError.
Dataset loadDataset(std::filesystem::path const & path, Network const & net, DatasetOptions options = {});
Dataset parseDataset(std::string const & csvText, Network const & net, DatasetOptions options = {});

} // namespace spex
