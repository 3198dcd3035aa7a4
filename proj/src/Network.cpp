#include "spex/Network.h"

#include "spex/Error.h"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace spex {

using nlohmann::json;

Network::Network(std::size_t inputCount, std::vector<Interval> domains, std::vector<std::string> classNames,
                 std::vector<Layer> layers)
    : inputs{inputCount}, domainList{std::move(domains)}, classes{std::move(classNames)}, layerList{std::move(layers)} {
    if (inputs == 0) { throw DimensionError("network must have at least one input"); }
    for (auto & d : domainList) {
        d.lower.canonicalize();
        d.upper.canonicalize();
    }
    for (auto & layer : layerList) {
        for (auto & row : layer.weights) {
            for (auto & w : row) { w.canonicalize(); }
        }
        for (auto & b : layer.biases) { b.canonicalize(); }
    }
    if (domainList.size() != inputs) {
        throw DimensionError("expected " + std::to_string(inputs) + " domains, got " + std::to_string(domainList.size()));
    }
    for (std::size_t i = 0; i < domainList.size(); ++i) {
        if (domainList[i].lower > domainList[i].upper) {
            throw DomainError("domain of feature x" + std::to_string(i + 1) + " is inverted");
        }
    }
    if (layerList.empty()) { throw DimensionError("network has no layers"); }
    std::size_t previous = inputs;
    for (std::size_t k = 0; k < layerList.size(); ++k) {
        auto const & layer = layerList[k];
        auto where = "layer " + std::to_string(k + 1);
        if (layer.weights.size() != previous) {
            throw DimensionError(where + ": weight matrix has " + std::to_string(layer.weights.size())
                                 + " rows but the previous layer has " + std::to_string(previous) + " outputs");
        }
        std::size_t const width = layer.biases.size();
        if (width == 0) { throw DimensionError(where + ": layer has no neurons"); }
        for (auto const & row : layer.weights) {
            if (row.size() != width) {
                throw DimensionError(where + ": weight row has " + std::to_string(row.size()) + " columns, expected "
                                     + std::to_string(width));
            }
        }
        previous = width;
    }
    if (previous < 2) { throw DimensionError("output layer must have at least 2 neurons"); }
    if (classes.empty()) {
        for (std::size_t i = 0; i < previous; ++i) { classes.push_back("c" + std::to_string(i + 1)); }
    }
    if (classes.size() != previous) {
        throw DimensionError("output layer has " + std::to_string(previous) + " neurons but "
                             + std::to_string(classes.size()) + " classes are named");
    }
    for (std::size_t i = 0; i < inputs; ++i) { features.push_back("x" + std::to_string(i + 1)); }
}

std::size_t Network::hiddenNeuronCount() const {
    std::size_t total = 0;
    for (std::size_t k = 0; k + 1 < layerList.size(); ++k) { total += layerList[k].neuronCount(); }
    return total;
}

std::size_t Network::classIndex(std::string const & name) const {
    auto it = std::find(classes.begin(), classes.end(), name);
    if (it == classes.end()) { throw UnknownNameError("unknown class '" + name + "'"); }
    return static_cast<std::size_t>(it - classes.begin());
}

std::optional<std::size_t> Network::featureIndex(std::string const & name) const {
    auto it = std::find(features.begin(), features.end(), name);
    if (it == features.end()) { return std::nullopt; }
    return static_cast<std::size_t>(it - features.begin());
}

namespace {
Rational numberFromJson(json const & value, std::string const & where) {
    if (value.is_string()) { return parseRational(value.get<std::string>()); }
    if (value.is_number_integer()) {
        if (value.is_number_unsigned()) { return Rational(mpz_class{std::to_string(value.get<std::uint64_t>())}); }
        return Rational(mpz_class{std::to_string(value.get<std::int64_t>())});
    }
    if (value.is_number_float()) {
        throw ParseError(where + ": non-integer numbers must be written as decimal strings");
    }
    throw ParseError(where + ": expected a number");
}

std::vector<Rational> vectorFromJson(json const & value, std::string const & where) {
    if (not value.is_array()) { throw ParseError(where + ": expected an array"); }
    std::vector<Rational> result;
    result.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        result.push_back(numberFromJson(value[i], where + "[" + std::to_string(i) + "]"));
    }
    return result;
}
} // namespace

Network parseNetwork(std::string const & jsonText) {
    json doc;
    try {
        doc = json::parse(jsonText);
    } catch (json::parse_error const & e) {
        throw ParseError(std::string("network JSON: ") + e.what(), e.byte);
    }
    if (not doc.is_object()) { throw ParseError("network JSON: top level must be an object"); }
    for (char const * key : {"inputs", "domains", "layers"}) {
        if (not doc.contains(key)) { throw ParseError(std::string("network JSON: missing key '") + key + "'"); }
    }
    if (not doc["inputs"].is_number_integer() or doc["inputs"].get<long long>() < 0) {
        throw ParseError("network JSON: 'inputs' must be a non-negative integer");
    }
    auto const inputCount = doc["inputs"].get<std::size_t>();

    std::vector<Interval> domains;
    auto const & domainsJson = doc["domains"];
    if (not domainsJson.is_array()) { throw ParseError("network JSON: 'domains' must be an array"); }
    for (std::size_t i = 0; i < domainsJson.size(); ++i) {
        auto bounds = vectorFromJson(domainsJson[i], "domains[" + std::to_string(i) + "]");
        if (bounds.size() != 2) { throw ParseError("domains[" + std::to_string(i) + "]: expected [lower, upper]"); }
        domains.push_back({bounds[0], bounds[1]});
    }

    std::vector<std::string> classNames;
    if (doc.contains("classes")) {
        if (not doc["classes"].is_array()) { throw ParseError("network JSON: 'classes' must be an array"); }
        for (auto const & name : doc["classes"]) {
            if (not name.is_string()) { throw ParseError("network JSON: class names must be strings"); }
            classNames.push_back(name.get<std::string>());
        }
    }

    std::vector<Layer> layers;
    auto const & layersJson = doc["layers"];
    if (not layersJson.is_array()) { throw ParseError("network JSON: 'layers' must be an array"); }
    for (std::size_t k = 0; k < layersJson.size(); ++k) {
        auto where = "layers[" + std::to_string(k) + "]";
        auto const & layerJson = layersJson[k];
        if (not layerJson.is_object() or not layerJson.contains("weights")) {
            throw ParseError(where + ": expected an object with 'weights'");
        }
        Layer layer;
        auto const & weightsJson = layerJson["weights"];
        if (not weightsJson.is_array()) { throw ParseError(where + ".weights: expected an array"); }
        for (std::size_t j = 0; j < weightsJson.size(); ++j) {
            layer.weights.push_back(vectorFromJson(weightsJson[j], where + ".weights[" + std::to_string(j) + "]"));
        }
        std::size_t const width = layer.weights.empty() ? 0 : layer.weights.front().size();
        if (layerJson.contains("biases")) {
            layer.biases = vectorFromJson(layerJson["biases"], where + ".biases");
            if (layer.biases.size() != width) {
                throw DimensionError("layer " + std::to_string(k + 1) + ": " + std::to_string(layer.biases.size())
                                     + " biases for " + std::to_string(width) + " neurons");
            }
        } else {
            layer.biases.assign(width, Rational(0));
        }
        layers.push_back(std::move(layer));
    }
    return Network(inputCount, std::move(domains), std::move(classNames), std::move(layers));
}

namespace {
std::string readFile(std::filesystem::path const & path) {
    std::ifstream in(path, std::ios::binary);
    if (not in) { throw Error("cannot open '" + path.string() + "'"); }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}
} // namespace

Network loadNetwork(std::filesystem::path const & path) {
    return parseNetwork(readFile(path));
}

std::vector<Rational> forward(Network const & net, std::span<Rational const> point) {
    if (point.size() != net.inputCount()) {
        throw DimensionError("point has " + std::to_string(point.size()) + " values, network expects "
                             + std::to_string(net.inputCount()));
    }
    std::vector<Rational> activations(point.begin(), point.end());
    auto const & layers = net.layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        auto const & layer = layers[k];
        std::vector<Rational> next = layer.biases;
        for (std::size_t j = 0; j < activations.size(); ++j) {
            if (activations[j] == 0) { continue; }
            for (std::size_t i = 0; i < next.size(); ++i) { next[i] += activations[j] * layer.weights[j][i]; }
        }
        if (k + 1 < layers.size()) {
            for (auto & value : next) {
                if (value < 0) { value = 0; }
            }
        }
        activations = std::move(next);
    }
    return activations;
}

std::size_t classify(Network const & net, std::span<Rational const> point) {
    auto outputs = forward(net, point);
    std::size_t best = 0;
    for (std::size_t i = 1; i < outputs.size(); ++i) {
        if (outputs[i] > outputs[best]) { best = i; }
    }
    return best;
}

namespace {
std::vector<std::string> splitCsvLine(std::string const & line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    for (auto & value : cells) {
        auto first = value.find_first_not_of(" \t\r");
        auto last = value.find_last_not_of(" \t\r");
        value = first == std::string::npos ? std::string{} : value.substr(first, last - first + 1);
    }
    return cells;
}

bool looksNumeric(std::string const & cell) {
    try {
        parseRational(cell);
        return true;
    } catch (ParseError const &) {
        return false;
    }
}
} // namespace

Dataset parseDataset(std::string const & csvText, Network const & net, DatasetOptions options) {
    Dataset data;
    std::size_t const m = net.inputCount();
    data.featureNames = net.featureNames();
    bool labeled = options.labeled;
    std::vector<std::string> labels;

    std::istringstream in(csvText);
    std::string line;
    std::size_t lineNo = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos) { continue; }
        auto cells = splitCsvLine(line);
        if (first) {
            first = false;
            bool header = std::any_of(cells.begin(), cells.end() - (labeled ? 1 : 0),
                                      [](auto const & c) { return not looksNumeric(c); });
            if (header) {
                if (cells.size() == m + 1) { labeled = true; }
                if (cells.size() != m + (labeled ? 1 : 0)) {
                    throw DimensionError("header has " + std::to_string(cells.size()) + " columns, expected "
                                         + std::to_string(m + (labeled ? 1 : 0)));
                }
                data.featureNames.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(m));
                continue;
            }
        }
        std::size_t const expected = m + (labeled ? 1 : 0);
        if (cells.size() != expected) {
            throw DimensionError("line " + std::to_string(lineNo) + ": " + std::to_string(cells.size())
                                 + " columns, expected " + std::to_string(expected));
        }
        Point p;
        p.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            try {
                p.push_back(parseRational(cells[i]));
            } catch (ParseError const & e) {
                throw ParseError("line " + std::to_string(lineNo) + ": " + e.what());
            }
        }
        if (labeled) {
            net.classIndex(cells[m]);
            labels.push_back(cells[m]);
        }
        data.points.push_back(std::move(p));
    }
    if (labeled) { data.labels = std::move(labels); }
    return data;
}

Dataset loadDataset(std::filesystem::path const & path, Network const & net, DatasetOptions options) {
    return parseDataset(readFile(path), net, options);
}

} // namespace spex
