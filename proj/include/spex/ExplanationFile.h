#pragma once

#include "Strategies.h"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spex {

/// Version string baked in at build time.
std::string toolVersion();

/// FNV-1a over a canonical rendering of the network, as 16 hex digits.
std::string networkHash(Network const & net);

/// On-disk form of an explanation: the formula plus its provenance.
struct ExplanationRecord {
    std::string formula;
    std::string className;
    std::optional<Point> sample;
    std::vector<std::string> pipeline;
    std::size_t terms = 0;
    std::optional<Rational> relaxed;
    std::vector<StageMetrics> stages;
    /// "pass", "fail" or "timeout".
    std::string validity;
    std::string networkHash;
    std::string version;
    /// Run configuration, flattened to strings.
    std::map<std::string, std::string> config;
};

ExplanationRecord makeRecord(Explanation const & e, Network const & net, std::map<std::string, std::string> config,
                             bool timing = true);

std::string serialize(ExplanationRecord const & record);
/// Throws ParseError on malformed files.
ExplanationRecord parseRecord(std::string const & text);

void writeRecord(std::filesystem::path const & path, ExplanationRecord const & record);
ExplanationRecord readRecord(std::filesystem::path const & path);

/// Parses the formula and re-runs the validity check against `net`. Throws Error when the record
/// belongs to another network or class, ValidityError when the check fails.
Explanation verifyRecord(ExplanationRecord const & record, Network const & net, SolveOptions const & options = {});

} // namespace spex
