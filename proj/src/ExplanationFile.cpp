#include "spex/ExplanationFile.h"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef SPEX_VERSION
#define SPEX_VERSION "0.1.0"
#endif

namespace spex {

using json = nlohmann::ordered_json;

std::string toolVersion() {
    return SPEX_VERSION;
}

std::string networkHash(Network const & net) {
    std::ostringstream canon;
    canon << net.inputCount() << '|';
    for (auto const & d : net.domains()) { canon << toString(d.lower) << ',' << toString(d.upper) << ';'; }
    canon << '|';
    for (auto const & c : net.classNames()) { canon << c << ';'; }
    for (auto const & layer : net.layers()) {
        canon << '|';
        for (auto const & row : layer.weights) {
            for (auto const & w : row) { canon << toString(w) << ','; }
            canon << ';';
        }
        canon << '/';
        for (auto const & b : layer.biases) { canon << toString(b) << ','; }
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

ExplanationRecord makeRecord(Explanation const & e, Network const & net, std::map<std::string, std::string> config,
                             bool timing) {
    ExplanationRecord r;
    r.formula = toString(e.formula());
    r.className = net.classNames()[e.targetClass()];
    r.sample = e.sample();
    r.pipeline = e.pipeline();
    r.terms = e.metrics().terms;
    r.relaxed = e.metrics().relaxed;
    r.stages = e.metrics().stages;
    if (not timing) {
        for (auto & s : r.stages) { s.seconds = 0; }
    }
    r.validity = "pass";
    r.networkHash = networkHash(net);
    r.version = toolVersion();
    r.config = std::move(config);
    return r;
}

std::string serialize(ExplanationRecord const & r) {
    json j;
    j["version"] = r.version;
    j["network_hash"] = r.networkHash;
    j["class"] = r.className;
    if (r.sample) {
        json s = json::array();
        for (auto const & v : *r.sample) { s.push_back(toString(v)); }
        j["sample"] = s;
    } else {
        j["sample"] = nullptr;
    }
    j["pipeline"] = r.pipeline;
    j["formula"] = r.formula;
    j["validity"] = r.validity;
    json m;
    m["terms"] = r.terms;
    m["relaxed"] = r.relaxed ? json(toString(*r.relaxed)) : json(nullptr);
    double seconds = 0;
    std::size_t calls = 0;
    json stages = json::array();
    for (auto const & s : r.stages) {
        seconds += s.seconds;
        calls += s.solverCalls;
        stages.push_back({{"stage", s.stage},
                          {"time_s", s.seconds},
                          {"solver_calls", s.solverCalls},
                          {"verification_calls", s.verificationCalls},
                          {"timed_out", s.timedOut}});
    }
    m["time_s"] = seconds;
    m["solver_calls"] = calls;
    m["stages"] = stages;
    j["metrics"] = m;
    j["config"] = r.config;
    return j.dump(2) + "\n";
}

ExplanationRecord parseRecord(std::string const & text) {
    try {
        auto j = json::parse(text);
        ExplanationRecord r;
        r.version = j.at("version").get<std::string>();
        r.networkHash = j.at("network_hash").get<std::string>();
        r.className = j.at("class").get<std::string>();
        if (j.contains("sample") and not j["sample"].is_null()) {
            Point p;
            for (auto const & v : j["sample"]) { p.push_back(parseRational(v.get<std::string>())); }
            r.sample = p;
        }
        r.pipeline = j.at("pipeline").get<std::vector<std::string>>();
        r.formula = j.at("formula").get<std::string>();
        r.validity = j.at("validity").get<std::string>();
        auto const & m = j.at("metrics");
        r.terms = m.at("terms").get<std::size_t>();
        if (not m.at("relaxed").is_null()) { r.relaxed = parseRational(m["relaxed"].get<std::string>()); }
        for (auto const & s : m.at("stages")) {
            r.stages.push_back({s.at("stage").get<std::string>(), s.at("time_s").get<double>(),
                                s.at("solver_calls").get<std::size_t>(), s.at("verification_calls").get<std::size_t>(),
                                s.at("timed_out").get<bool>()});
        }
        if (j.contains("config")) { r.config = j["config"].get<std::map<std::string, std::string>>(); }
        return r;
    } catch (json::exception const & e) {
        throw ParseError(std::string("malformed explanation file: ") + e.what());
    }
}

void writeRecord(std::filesystem::path const & path, ExplanationRecord const & record) {
    std::ofstream out(path, std::ios::binary);
    if (not out) { throw Error("cannot write " + path.string()); }
    out << serialize(record);
}

ExplanationRecord readRecord(std::filesystem::path const & path) {
    std::ifstream in(path, std::ios::binary);
    if (not in) { throw Error("cannot read " + path.string()); }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parseRecord(text.str());
    } catch (ParseError const & e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Explanation verifyRecord(ExplanationRecord const & record, Network const & net, SolveOptions const & options) {
    if (record.networkHash != networkHash(net)) { throw Error("explanation was computed for a different network"); }
    auto target = net.classIndex(record.className);
    ExplanationContext ctx(net, target);
    ctx.deadline = options.deadline;
    auto formula = parseFormula(record.formula);
    if (record.sample and record.sample->size() != net.inputCount()) {
        throw DimensionError("explanation sample does not match the network's inputs");
    }
    auto e = Explanation::fromFormula(formula, ctx, record.sample, "verify");
    e.metrics().relaxed = record.relaxed;
    return e;
}

} // namespace spex
