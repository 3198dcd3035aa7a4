#include "spex/Commands.h"

#include "spex/Analysis.h"
#include "spex/ExplanationFile.h"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace spex {

namespace {

/// Bad input the user can fix; maps to the config exit status.
class ConfigError : public Error {
public:
    using Error::Error;
};

Clock::duration seconds(double s) {
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
}

void requirePositive(double value, char const * flag) {
    if (not(value > 0)) { throw ConfigError(std::string(flag) + " must be positive"); }
}

void requireFile(std::filesystem::path const & path, char const * what) {
    if (path.empty()) { throw ConfigError(std::string("missing ") + what); }
    if (not std::filesystem::exists(path)) { throw ConfigError(std::string(what) + " '" + path.string() + "' does not exist"); }
}

Network networkFrom(std::filesystem::path const & path) {
    requireFile(path, "network file");
    try {
        return loadNetwork(path);
    } catch (Error const & e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<std::size_t> parseOrder(std::string const & text, Network const & net) {
    std::vector<std::size_t> order;
    if (text.empty()) {
        for (std::size_t i = 0; i < net.inputCount(); ++i) { order.push_back(i); }
        return order;
    }
    std::istringstream in(text);
    std::string name;
    std::vector<bool> seen(net.inputCount(), false);
    while (std::getline(in, name, ',')) {
        auto index = net.featureIndex(name);
        if (not index) { throw ConfigError("--order: unknown feature '" + name + "'"); }
        if (seen[*index]) { throw ConfigError("--order: feature '" + name + "' listed twice"); }
        seen[*index] = true;
        order.push_back(*index);
    }
    if (order.size() != net.inputCount()) { throw ConfigError("--order must list every feature exactly once"); }
    return order;
}

std::size_t workerCount(std::size_t requested) {
    if (requested > 0) { return requested; }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, n) on `jobs` threads.
template <typename Task>
void parallelFor(std::size_t n, std::size_t jobs, Task task) {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) { task(i); }
    };
    auto workers = std::min(jobs, n);
    if (workers <= 1) {
        work();
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) { pool.emplace_back(work); }
}

std::string slug(std::string const & text) {
    std::string out;
    for (char c : text) {
        bool keep = std::isalnum(static_cast<unsigned char>(c)) or c == '-';
        out += keep ? c : '_';
    }
    return out;
}

std::string formatDouble(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

std::string percent(Rational const & r) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << r.get_d();
    return s.str();
}

template <typename Body>
int guarded(std::ostream & log, Body body) {
    try {
        return body();
    } catch (ConfigError const & e) {
        log << "error: " << e.what() << '\n';
        return exit_code::config;
    } catch (ParseError const & e) {
        log << "error: " << e.what() << '\n';
        return exit_code::config;
    } catch (ValidityError const & e) {
        log << "validity failure: " << e.what() << '\n';
        return exit_code::validity;
    } catch (TimeoutError const & e) {
        log << "timeout: " << e.what() << '\n';
        return exit_code::timeout;
    } catch (std::exception const & e) {
        log << "error: " << e.what() << '\n';
        return exit_code::config;
    }
}

} // namespace

int cmdExplain(RunConfig const & config, std::ostream & log) {
    return guarded(log, [&] {
        requirePositive(config.timeoutSeconds, "--timeout");
        requirePositive(config.stageTimeoutSeconds, "--stage-timeout");
        if (config.pipelines.empty()) { throw ConfigError("no pipeline given"); }
        auto const net = networkFrom(config.network);
        requireFile(config.data, "dataset file");
        Dataset data;
        try {
            data = loadDataset(config.data, net, DatasetOptions{config.labeled});
        } catch (Error const & e) {
            throw ConfigError(config.data.string() + ": " + e.what());
        }
        std::vector<std::vector<PipelineStage>> pipelines;
        for (auto const & p : config.pipelines) { pipelines.push_back(parsePipeline(p, net)); }
        Rational midFactor;
        try {
            midFactor = parseRational(config.presetFactor);
        } catch (ParseError const &) {
            throw ConfigError("--preset-factor: not a rational number");
        }
        if (midFactor < 0 or midFactor > 1) { throw ConfigError("--preset-factor must lie in [0, 1]"); }
        auto const order = parseOrder(config.order, net);
        std::filesystem::create_directories(config.out);

        auto const deadline = Clock::now() + seconds(config.timeoutSeconds);
        struct Outcome {
            std::optional<Explanation> explanation;
            bool timedOut = false;
            bool invalid = false;
            std::string message;
        };
        std::size_t const tasks = data.points.size() * pipelines.size();
        std::vector<Outcome> outcomes(tasks);

        parallelFor(tasks, workerCount(config.jobs), [&](std::size_t t) {
            auto const & point = data.points[t / pipelines.size()];
            auto const & pipeline = pipelines[t % pipelines.size()];
            auto & outcome = outcomes[t];
            try {
                ExplanationContext ctx(net, classify(net, point));
                ctx.order = order;
                ctx.stageTimeout = seconds(config.stageTimeoutSeconds);
                ctx.deadline = deadline;
                ctx.midFactor = midFactor;
                auto e = runPipeline(pipeline, point, ctx);
                e.metrics().relaxed = relaxedFraction(e.formula(), point, net, SolveOptions{deadline});
                outcome.timedOut = e.metrics().timedOut();
                outcome.explanation = std::move(e);
            } catch (ValidityError const & e) {
                outcome.invalid = true;
                outcome.message = e.what();
            } catch (TimeoutError const & e) {
                outcome.timedOut = true;
                outcome.message = e.what();
            } catch (std::exception const & e) {
                outcome.invalid = true;
                outcome.message = e.what();
            }
        });

        std::map<std::string, std::string> recorded{
            {"network", config.network.string()},
            {"data", config.data.string()},
            {"labels", config.labeled ? "true" : "false"},
            {"preset_factor", toString(midFactor)},
            {"timeout_s", formatDouble(config.timeoutSeconds)},
            {"stage_timeout_s", formatDouble(config.stageTimeoutSeconds)},
            {"order", config.order.empty() ? "ascending" : config.order},
        };
        std::vector<Explanation> done;
        bool anyInvalid = false;
        bool anyTimeout = false;
        for (std::size_t t = 0; t < tasks; ++t) {
            auto const row = t / pipelines.size() + 1;
            auto const & descriptor = config.pipelines[t % pipelines.size()];
            auto & outcome = outcomes[t];
            anyInvalid = anyInvalid or outcome.invalid;
            anyTimeout = anyTimeout or outcome.timedOut;
            if (not outcome.explanation) {
                log << "sample " << row << " [" << descriptor << "]: "
                    << (outcome.invalid ? "failed: " : "timed out: ") << outcome.message << '\n';
                continue;
            }
            auto cfg = recorded;
            cfg["pipeline"] = descriptor;
            auto record = makeRecord(*outcome.explanation, net, cfg, config.timing);
            auto name = "sample" + std::to_string(row) + "_" + slug(descriptor) + ".json";
            writeRecord(config.out / name, record);
            done.push_back(std::move(*outcome.explanation));
        }
        std::ofstream report(config.out / "report.csv", std::ios::binary);
        if (not report) { throw ConfigError("cannot write report to " + config.out.string()); }
        writeReportCsv(report, aggregate(done), config.timing);
        log << done.size() << " of " << tasks << " explanations written to " << config.out.string() << '\n';
        if (anyInvalid) { return exit_code::validity; }
        if (anyTimeout) { return exit_code::timeout; }
        return exit_code::ok;
    });
}

int cmdCompare(CompareConfig const & config, std::ostream & out, std::ostream & log) {
    return guarded(log, [&] {
        requirePositive(config.timeoutSeconds, "--timeout");
        auto const net = networkFrom(config.network);
        std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
        if (config.baseline) {
            for (auto const & f : config.files) { pairs.emplace_back(f, *config.baseline); }
        } else {
            if (config.files.size() % 2 != 0) { throw ConfigError("compare needs files in pairs, or --baseline"); }
            for (std::size_t i = 0; i < config.files.size(); i += 2) { pairs.emplace_back(config.files[i], config.files[i + 1]); }
        }
        std::optional<std::pair<std::size_t, std::size_t>> plane;
        if (not config.pair.empty()) {
            if (config.pair.size() != 2) { throw ConfigError("--pair takes two feature names"); }
            auto a = net.featureIndex(config.pair[0]);
            auto b = net.featureIndex(config.pair[1]);
            if (not a or not b or *a == *b) { throw ConfigError("--pair needs two distinct features of the network"); }
            plane = std::pair{*a, *b};
        }
        SolveOptions options{Clock::now() + seconds(config.timeoutSeconds)};

        std::map<std::filesystem::path, Explanation> loaded;
        std::optional<std::size_t> target;
        auto load = [&](std::filesystem::path const & path) -> Explanation const & {
            if (auto it = loaded.find(path); it != loaded.end()) { return it->second; }
            requireFile(path, "explanation file");
            auto record = readRecord(path);
            if (record.networkHash != networkHash(net)) {
                throw ConfigError(path.string() + ": computed for a different network");
            }
            auto cls = net.classIndex(record.className);
            if (target and *target != cls) { throw ConfigError(path.string() + ": explains a different class"); }
            target = cls;
            return loaded.emplace(path, verifyRecord(record, net, options)).first->second;
        };

        std::vector<SpaceRelation> relations;
        std::ostringstream details;
        details << "first,second,relation\n";
        auto const domains = encodeDomains(net);
        for (auto const & [first, second] : pairs) {
            auto const & e1 = load(first);
            auto const & e2 = load(second);
            Assignment fixed;
            if (plane) {
                if (not e1.sample() or not e2.sample()) { throw ConfigError("slice comparison needs samples in both files"); }
                if (*e1.sample() != *e2.sample()) { throw ConfigError("slice comparison needs files of the same sample"); }
                for (std::size_t f = 0; f < net.inputCount(); ++f) {
                    if (f != plane->first and f != plane->second) { fixed[net.featureNames()[f]] = (*e1.sample())[f]; }
                }
            }
            auto result = compare(e1.formula(), e2.formula(), domains, net.featureNames(), fixed, options);
            relations.push_back(result.relation);
            details << first.string() << ',' << second.string() << ',' << toString(result.relation) << '\n';
        }
        if (config.details) {
            std::ofstream file(*config.details, std::ios::binary);
            if (not file) { throw ConfigError("cannot write " + config.details->string()); }
            file << details.str();
        }
        out << "relation,percent\n";
        auto shares = relationShares(relations);
        for (auto r : {SpaceRelation::Superset, SpaceRelation::Equal, SpaceRelation::Subset, SpaceRelation::NotComparable}) {
            out << toString(r) << ',' << percent(shares[r]) << '\n';
        }
        return exit_code::ok;
    });
}

std::string gridFileName(std::filesystem::path const & explanation, std::string const & xa, std::string const & xb,
                         std::string const & mode) {
    return explanation.stem().string() + "_" + xa + "_" + xb + "_" + mode + ".csv";
}

namespace {

int gridCommand(GridConfig const & config, std::ostream & log, GridMode mode) {
    return guarded(log, [&] {
        requirePositive(config.timeoutSeconds, "--timeout");
        if (config.resolution < 2) { throw ConfigError("--grid-res must be at least 2"); }
        auto const net = networkFrom(config.network);
        if (config.pair.size() != 2) { throw ConfigError("--pair takes two feature names"); }
        auto a = net.featureIndex(config.pair[0]);
        auto b = net.featureIndex(config.pair[1]);
        if (not a or not b or *a == *b) { throw ConfigError("--pair needs two distinct features of the network"); }
        requireFile(config.explanation, "explanation file");
        auto record = readRecord(config.explanation);
        if (record.networkHash != networkHash(net)) { throw ConfigError("explanation was computed for a different network"); }
        SolveOptions options{Clock::now() + seconds(config.timeoutSeconds)};
        auto e = verifyRecord(record, net, options);

        Grid grid;
        if (mode == GridMode::Slice) {
            if (not e.sample()) { throw ConfigError("slice needs an explanation with a sample"); }
            grid = sliceGrid(e.formula(), net, *a, *b, *e.sample(), config.resolution);
        } else {
            grid = projectGrid(e.formula(), net, *a, *b, config.resolution, options, workerCount(config.jobs));
        }
        std::filesystem::create_directories(config.out);
        auto path = config.out / gridFileName(config.explanation, config.pair[0], config.pair[1],
                                              mode == GridMode::Slice ? "slice" : "projection");
        std::ofstream file(path, std::ios::binary);
        if (not file) { throw ConfigError("cannot write " + path.string()); }
        writeGridCsv(file, grid);
        log << path.string() << '\n';
        return grid.count(Cell::Unknown) > 0 ? exit_code::timeout : exit_code::ok;
    });
}

} // namespace

int cmdProject(GridConfig const & config, std::ostream & log) {
    return gridCommand(config, log, GridMode::Projection);
}

int cmdSlice(GridConfig const & config, std::ostream & log) {
    return gridCommand(config, log, GridMode::Slice);
}

int cmdEval(EvalConfig const & config, std::ostream & out, std::ostream & log) {
    return guarded(log, [&] {
        auto const net = networkFrom(config.network);
        requireFile(config.data, "dataset file");
        Dataset data;
        try {
            data = loadDataset(config.data, net, DatasetOptions{config.labeled});
        } catch (Error const & e) {
            throw ConfigError(config.data.string() + ": " + e.what());
        }
        out << "index,class" << (data.labels ? ",label" : "") << '\n';
        for (std::size_t i = 0; i < data.points.size(); ++i) {
            out << i + 1 << ',' << net.classNames()[classify(net, data.points[i])];
            if (data.labels) { out << ',' << (*data.labels)[i]; }
            out << '\n';
        }
        return exit_code::ok;
    });
}

int cmdStats(std::vector<std::filesystem::path> const & files, std::ostream & out, std::ostream & log, bool timing) {
    return guarded(log, [&] {
        std::vector<ReportEntry> entries;
        for (auto const & path : files) {
            requireFile(path, "explanation file");
            auto record = readRecord(path);
            ReportEntry entry;
            for (std::size_t i = 0; i < record.pipeline.size(); ++i) {
                entry.pipeline += (i ? ";" : "") + record.pipeline[i];
            }
            entry.relaxed = record.relaxed;
            entry.terms = record.terms;
            for (auto const & s : record.stages) {
                entry.seconds += s.seconds;
                entry.solverCalls += s.solverCalls;
            }
            entries.push_back(entry);
        }
        writeReportCsv(out, aggregate(entries), timing);
        return exit_code::ok;
    });
}

} // namespace spex
