#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spex {

/// Process exit statuses of the command-line tool.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int validity = 2;
inline constexpr int timeout = 3;
} // namespace exit_code

struct RunConfig {
    std::filesystem::path network;
    std::filesystem::path data;
    bool labeled = false;
    std::vector<std::string> pipelines;
    /// Factor of the "mid" preset.
    std::string presetFactor = "1/2";
    double timeoutSeconds = 7200;
    double stageTimeoutSeconds = 60;
    /// Comma-separated feature names; empty keeps ascending order.
    std::string order;
    std::filesystem::path out = ".";
    std::size_t jobs = 0;
    bool timing = true;
};

int cmdExplain(RunConfig const & config, std::ostream & log);

struct CompareConfig {
    std::filesystem::path network;
    std::vector<std::filesystem::path> files;
    std::optional<std::filesystem::path> baseline;
    /// Two feature names; compares slices through each file's sample instead of whole spaces.
    std::vector<std::string> pair;
    std::optional<std::filesystem::path> details;
    double timeoutSeconds = 7200;
};

/// Prints "relation,percent" rows for ⊃, =, ⊂, NC.
int cmdCompare(CompareConfig const & config, std::ostream & out, std::ostream & log);

struct GridConfig {
    std::filesystem::path network;
    std::filesystem::path explanation;
    std::vector<std::string> pair;
    std::size_t resolution = 50;
    std::filesystem::path out = ".";
    std::size_t jobs = 0;
    double timeoutSeconds = 7200;
};

int cmdProject(GridConfig const & config, std::ostream & log);
int cmdSlice(GridConfig const & config, std::ostream & log);

struct EvalConfig {
    std::filesystem::path network;
    std::filesystem::path data;
    bool labeled = false;
};

/// Prints "index,class" rows (plus the label when the dataset has one).
int cmdEval(EvalConfig const & config, std::ostream & out, std::ostream & log);

/// Aggregate report over explanation files.
int cmdStats(std::vector<std::filesystem::path> const & files, std::ostream & out, std::ostream & log,
             bool timing = true);

/// "<stem>_<xa>_<xb>_<mode>.csv".
std::string gridFileName(std::filesystem::path const & explanation, std::string const & xa, std::string const & xb,
                         std::string const & mode);

} // namespace spex
