#pragma once

#include "Error.h"
#include "Interpolation.h"
#include "Network.h"

#include <optional>
#include <string>
#include <vector>

namespace spex {

struct StageMetrics {
    std::string stage;
    double seconds = 0;
    /// Top-level solver calls made by the strategy itself.
    std::size_t solverCalls = 0;
    /// Calls spent on the validity certificate of the stage's result.
    std::size_t verificationCalls = 0;
    bool timedOut = false;
};

struct ExplanationMetrics {
    std::size_t terms = 0;
    std::optional<Rational> relaxed;
    std::vector<StageMetrics> stages;

    double seconds() const;
    std::size_t solverCalls() const;
    bool timedOut() const;
};

/// Everything a strategy needs about the classifier and the explained class.
class ExplanationContext {
public:
    ExplanationContext(Network const & net, std::size_t targetClass);

    Network const & network() const { return *net; }
    std::size_t targetClass() const { return target; }
    Formula const & psi() const { return psiFormula; }
    Formula const & domains() const { return domainFormula; }

    /// Feature indices in traversal order for A, Rmin and I. Defaults to ascending.
    std::vector<std::size_t> order;
    /// Wall-clock budget of each pipeline stage.
    std::optional<Clock::duration> stageTimeout;
    /// Hard end of the whole run.
    std::optional<Clock::time_point> deadline;
    Rational midFactor = Rational(1, 2);

    /// Options for a stage that starts now.
    SolveOptions stageOptions() const;

private:
    Network const * net;
    std::size_t target;
    Formula psiFormula;
    Formula domainFormula;
};

struct ValidityCheck {
    bool valid = false;
    bool timedOut = false;
    /// Feature values of a point satisfying the formula but classified elsewhere.
    std::optional<Point> witness;
};

/// solve(formula /\ psi) = Unsat, with a counterexample otherwise.
ValidityCheck checkValidity(Formula const & formula, ExplanationContext const & ctx, SolveOptions const & options = {});

/// A formula over feature variables that provably implies the target class. Only strategies
/// (and fromFormula, which checks) can create one.
class Explanation {
public:
    Formula const & formula() const { return phi; }
    std::size_t targetClass() const { return target; }
    std::optional<Point> const & sample() const { return origin; }
    std::vector<std::string> const & pipeline() const { return stages; }
    ExplanationMetrics const & metrics() const { return stats; }
    ExplanationMetrics & metrics() { return stats; }

    /// Throws ValidityError when the formula does not imply the class, TimeoutError on timeout.
    static Explanation fromFormula(Formula formula, ExplanationContext const & ctx, std::optional<Point> sample = {},
                                   std::string stage = "input");
    /// phi_s of a sample classified to the context's class; throws Error otherwise.
    static Explanation fromSample(Point const & sample, ExplanationContext const & ctx);

private:
    friend struct StageRunner;
    Explanation() = default;

    Formula phi;
    std::size_t target = 0;
    std::optional<Point> origin;
    std::vector<std::string> stages;
    ExplanationMetrics stats;
};

class ValidityError : public Error {
public:
    ValidityError(std::string const & what, std::optional<Point> witness)
        : Error(what), witness(std::move(witness)) {}

    std::optional<Point> witness;
};

// Strategies. On a stage timeout the input explanation is returned with the stage flagged.

Explanation generalize(Explanation const & start, ExplanationContext const & ctx, ItpAlgo const & algo);
Explanation reduce(Explanation const & e, ExplanationContext const & ctx);
Explanation reduceMin(Explanation const & e, ExplanationContext const & ctx);
Explanation capture(Point const & sample, VarSet const & selected, ExplanationContext const & ctx, ItpAlgo const & algo);
Explanation abductive(Point const & sample, ExplanationContext const & ctx);
Explanation interval(Explanation const & a, ExplanationContext const & ctx, std::size_t attemptsPerBound);

struct PipelineStage {
    enum class Kind { G, R, Rmin, C, A, I };
    Kind kind;
    std::string preset;
    std::vector<std::string> features;
    std::size_t attempts = 0;

    std::string toString() const;
};

/// Parses "A;I:8;G:weak" style descriptors and checks stage compatibility against the network.
/// Throws ParseError or Error.
std::vector<PipelineStage> parsePipeline(std::string const & descriptor, Network const & net);

/// Runs a pipeline on a sample. Stages other than A and C start from phi_s.
Explanation runPipeline(std::vector<PipelineStage> const & stages, Point const & sample, ExplanationContext const & ctx);
/// Runs a pipeline that cannot contain A or C on an existing explanation.
Explanation runPipeline(std::vector<PipelineStage> const & stages, Explanation const & start, ExplanationContext const & ctx);

} // namespace spex
