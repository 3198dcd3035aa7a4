#include "spex/Strategies.h"

#include "spex/Encoder.h"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace spex {

double ExplanationMetrics::seconds() const {
    double total = 0;
    for (auto const & s : stages) { total += s.seconds; }
    return total;
}

std::size_t ExplanationMetrics::solverCalls() const {
    std::size_t total = 0;
    for (auto const & s : stages) { total += s.solverCalls; }
    return total;
}

bool ExplanationMetrics::timedOut() const {
    return std::any_of(stages.begin(), stages.end(), [](auto const & s) { return s.timedOut; });
}

ExplanationContext::ExplanationContext(Network const & net, std::size_t targetClass)
    : net{&net}, target{targetClass}, psiFormula{buildPsi(net, targetClass)}, domainFormula{encodeDomains(net)} {
    order.resize(net.inputCount());
    std::iota(order.begin(), order.end(), 0);
}

SolveOptions ExplanationContext::stageOptions() const {
    SolveOptions options;
    options.deadline = deadline;
    if (stageTimeout) {
        auto end = Clock::now() + *stageTimeout;
        if (not options.deadline or end < *options.deadline) { options.deadline = end; }
    }
    return options;
}

namespace {

Point featurePoint(Assignment const & model, Network const & net) {
    Point p;
    for (auto const & name : net.featureNames()) {
        auto it = model.find(name);
        p.push_back(it == model.end() ? Rational(0) : it->second);
    }
    return p;
}

SolveOptions runOptions(ExplanationContext const & ctx) {
    return SolveOptions{ctx.deadline};
}

bool unsatWith(Formula const & a, ExplanationContext const & ctx, SolveOptions const & options) {
    auto r = solve(PartitionedSystem(a, ctx.psi(), ctx.targetClass()), options);
    if (r.status == SolveStatus::Timeout) { throw TimeoutError("solver budget exhausted"); }
    return r.unsat();
}

/// x = c with a single variable, as (feature index, value).
std::optional<std::pair<std::size_t, Rational>> featureEquality(Formula const & f, Network const & net) {
    if (not f.isAtom()) { return std::nullopt; }
    auto const & atom = f.getAtom();
    if (atom.rel != Relation::Eq or atom.term.size() != 1) { return std::nullopt; }
    auto const & [var, coefficient] = *atom.term.begin();
    auto index = net.featureIndex(var);
    if (not index) { return std::nullopt; }
    return std::pair{*index, Rational(atom.constant / coefficient)};
}

/// Position of a conjunct in the traversal order: its lowest-ranked feature.
std::size_t rank(Formula const & conjunct, ExplanationContext const & ctx) {
    std::vector<std::size_t> position(ctx.order.size());
    for (std::size_t i = 0; i < ctx.order.size(); ++i) { position[ctx.order[i]] = i; }
    std::size_t best = ctx.order.size();
    for (auto const & var : variables(conjunct)) {
        if (auto index = ctx.network().featureIndex(var)) { best = std::min(best, position[*index]); }
    }
    return best;
}

} // namespace

ValidityCheck checkValidity(Formula const & formula, ExplanationContext const & ctx, SolveOptions const & options) {
    ValidityCheck check;
    auto r = solve(PartitionedSystem(formula, ctx.psi(), ctx.targetClass()), options);
    if (r.status == SolveStatus::Timeout) {
        check.timedOut = true;
        return check;
    }
    check.valid = r.unsat();
    if (r.sat()) { check.witness = featurePoint(r.model, ctx.network()); }
    return check;
}

struct StageRunner {
    static Explanation make(Formula formula, ExplanationContext const & ctx, std::optional<Point> origin,
                            std::vector<std::string> stages, ExplanationMetrics metrics) {
        Explanation e;
        e.phi = std::move(formula);
        e.target = ctx.targetClass();
        e.origin = std::move(origin);
        e.stages = std::move(stages);
        e.stats = std::move(metrics);
        e.stats.terms = countTerms(e.phi);
        e.stats.relaxed.reset();
        return e;
    }

    static void verify(Formula const & formula, ExplanationContext const & ctx, StageMetrics & stage) {
        ++stage.verificationCalls;
        auto check = checkValidity(formula, ctx, runOptions(ctx));
        if (check.timedOut) { throw TimeoutError("validity check timed out"); }
        if (not check.valid) {
            throw ValidityError("formula does not imply class " + ctx.network().classNames()[ctx.targetClass()] + ": " +
                                    toString(formula),
                                check.witness);
        }
    }

    /// `body` computes the new formula and counts its solver calls; `fallback` supplies the result
    /// when the stage runs out of time.
    template <typename Body, typename Fallback>
    static Explanation run(std::string name, ExplanationContext const & ctx, Fallback fallback, Body body) {
        auto const start = Clock::now();
        StageMetrics stage{name};
        auto options = ctx.stageOptions();
        try {
            auto [formula, origin, previous] = body(options, stage.solverCalls);
            verify(formula, ctx, stage);
            stage.seconds = std::chrono::duration<double>(Clock::now() - start).count();
            auto stages = previous.pipeline;
            stages.push_back(name);
            auto metrics = previous.metrics;
            metrics.stages.push_back(stage);
            return make(std::move(formula), ctx, std::move(origin), std::move(stages), std::move(metrics));
        } catch (TimeoutError const &) {
            if (ctx.deadline and Clock::now() > *ctx.deadline) { throw; }
            Explanation e = fallback();
            stage.timedOut = true;
            stage.seconds = std::chrono::duration<double>(Clock::now() - start).count();
            e.stages.push_back(name);
            e.stats.stages.push_back(stage);
            return e;
        }
    }

    struct History {
        std::vector<std::string> pipeline;
        ExplanationMetrics metrics;
    };

    static History history(Explanation const & e) { return {e.stages, e.stats}; }

    static void rename(Explanation & e, std::string const & name) {
        if (not e.stages.empty()) { e.stages.back() = name; }
        if (not e.stats.stages.empty()) { e.stats.stages.back().stage = name; }
    }
};

namespace {

struct StageOutput {
    Formula formula;
    std::optional<Point> origin;
    StageRunner::History previous;
};

void requireClass(Point const & sample, ExplanationContext const & ctx) {
    auto const & net = ctx.network();
    if (sample.size() != net.inputCount()) {
        throw DimensionError("sample has " + std::to_string(sample.size()) + " values, network expects " +
                             std::to_string(net.inputCount()));
    }
    auto cls = classify(net, sample);
    if (cls != ctx.targetClass()) {
        throw Error("sample is classified as " + net.classNames()[cls] + ", not " + net.classNames()[ctx.targetClass()]);
    }
}

} // namespace

Explanation Explanation::fromFormula(Formula formula, ExplanationContext const & ctx, std::optional<Point> sample,
                                     std::string stage) {
    auto const & names = ctx.network().featureNames();
    for (auto const & var : variables(formula)) {
        if (std::find(names.begin(), names.end(), var) == names.end()) {
            throw UnknownNameError("explanation mentions '" + var + "', which is not a feature");
        }
    }
    auto const start = Clock::now();
    StageMetrics metrics{std::move(stage)};
    StageRunner::verify(formula, ctx, metrics);
    metrics.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    ExplanationMetrics all;
    all.stages.push_back(metrics);
    return StageRunner::make(std::move(formula), ctx, std::move(sample), {}, std::move(all));
}

Explanation Explanation::fromSample(Point const & sample, ExplanationContext const & ctx) {
    requireClass(sample, ctx);
    auto e = fromFormula(encodeSample(sample, ctx.network().featureNames()), ctx, sample, "sample");
    return e;
}

Explanation generalize(Explanation const & start, ExplanationContext const & ctx, ItpAlgo const & algo) {
    return StageRunner::run("G:" + describe(algo), ctx, [&] { return start; },
                            [&](SolveOptions const & options, std::size_t & calls) {
                                ++calls;
                                auto result = interpolate(start.formula(), ctx.psi(), algo, options);
                                return StageOutput{result.interpolant, start.sample(), StageRunner::history(start)};
                            });
}

namespace {

std::vector<Formula> labeledConjuncts(Formula const & f) {
    auto parts = conjuncts(f);
    for (std::size_t i = 0; i < parts.size(); ++i) { parts[i] = parts[i].withLabel(defaultConjunctLabel(i)); }
    return parts;
}

Formula unlabeledConj(std::vector<Formula> const & parts) {
    std::vector<Formula> plain;
    for (auto const & p : parts) { plain.push_back(p.withLabel("")); }
    return Formula::conj(std::move(plain));
}

} // namespace

Explanation reduce(Explanation const & e, ExplanationContext const & ctx) {
    return StageRunner::run("R", ctx, [&] { return e; }, [&](SolveOptions const & options, std::size_t & calls) {
        auto parts = labeledConjuncts(e.formula());
        ++calls;
        auto r = solve(PartitionedSystem(Formula::conj(parts), ctx.psi(), ctx.targetClass()), options);
        if (r.status == SolveStatus::Timeout) { throw TimeoutError("reduce timed out"); }
        if (r.sat()) { throw SatError("reduce received an invalid explanation"); }
        auto core = coreLabels(*r.proof);
        std::vector<Formula> kept;
        for (auto const & p : parts) {
            if (core.contains(p.label())) { kept.push_back(p); }
        }
        return StageOutput{unlabeledConj(kept), e.sample(), StageRunner::history(e)};
    });
}

Explanation reduceMin(Explanation const & e, ExplanationContext const & ctx) {
    return StageRunner::run("Rmin", ctx, [&] { return e; }, [&](SolveOptions const & options, std::size_t & calls) {
        auto parts = conjuncts(e.formula());
        std::vector<std::size_t> visit(parts.size());
        std::iota(visit.begin(), visit.end(), 0);
        std::stable_sort(visit.begin(), visit.end(),
                         [&](std::size_t x, std::size_t y) { return rank(parts[x], ctx) < rank(parts[y], ctx); });
        std::vector<bool> keep(parts.size(), true);
        for (auto i : visit) {
            keep[i] = false;
            std::vector<Formula> candidate;
            for (std::size_t j = 0; j < parts.size(); ++j) {
                if (keep[j]) { candidate.push_back(parts[j]); }
            }
            ++calls;
            if (not unsatWith(unlabeledConj(candidate), ctx, options)) { keep[i] = true; }
        }
        std::vector<Formula> kept;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            if (keep[j]) { kept.push_back(parts[j]); }
        }
        return StageOutput{unlabeledConj(kept), e.sample(), StageRunner::history(e)};
    });
}

Explanation capture(Point const & sample, VarSet const & selected, ExplanationContext const & ctx, ItpAlgo const & algo) {
    requireClass(sample, ctx);
    if (selected.empty()) { throw Error("capture needs at least one feature"); }
    std::string name = "C:" + describe(algo) + ":";
    bool first = true;
    for (auto const & f : selected) {
        name += (first ? "" : ",") + f;
        first = false;
    }
    auto const phiS = encodeSample(sample, ctx.network().featureNames());
    return StageRunner::run(name, ctx, [&] { return Explanation::fromSample(sample, ctx); },
                            [&](SolveOptions const & options, std::size_t & calls) {
                                auto [inside, outside] = partitionSample(phiS, selected);
                                ++calls;
                                auto result = interpolate(unlabeledConj(conjuncts(inside)),
                                                          Formula::conj({outside, ctx.psi()}), algo, options);
                                auto formula = Formula::conj({result.interpolant, unlabeledConj(conjuncts(outside))});
                                return StageOutput{formula, sample, {}};
                            });
}

Explanation abductive(Point const & sample, ExplanationContext const & ctx) {
    requireClass(sample, ctx);
    auto const & names = ctx.network().featureNames();
    return StageRunner::run("A", ctx, [&] { return Explanation::fromSample(sample, ctx); },
                            [&](SolveOptions const & options, std::size_t & calls) {
                                std::vector<bool> fixed(sample.size(), true);
                                auto formulaOf = [&] {
                                    std::vector<Formula> parts;
                                    for (std::size_t i = 0; i < sample.size(); ++i) {
                                        if (fixed[i]) {
                                            parts.push_back(Formula::atom(LinearTerm::variable(names[i]), Relation::Eq,
                                                                          sample[i]));
                                        }
                                    }
                                    return Formula::conj(std::move(parts));
                                };
                                for (auto i : ctx.order) {
                                    fixed[i] = false;
                                    ++calls;
                                    if (not unsatWith(formulaOf(), ctx, options)) { fixed[i] = true; }
                                }
                                return StageOutput{formulaOf(), sample, {}};
                            });
}

Explanation interval(Explanation const & a, ExplanationContext const & ctx, std::size_t attemptsPerBound) {
    auto const & net = ctx.network();
    auto const & names = net.featureNames();
    std::vector<std::optional<Interval>> box(net.inputCount());
    for (auto const & conjunct : conjuncts(a.formula())) {
        auto eq = featureEquality(conjunct, net);
        if (not eq) { throw Error("interval needs a conjunction of feature equalities, got " + toString(conjunct)); }
        auto & slot = box[eq->first];
        if (slot and slot->lower != eq->second) { throw Error("conflicting equalities for " + names[eq->first]); }
        slot = Interval{eq->second, eq->second};
    }
    return StageRunner::run(
        "I:" + std::to_string(attemptsPerBound), ctx, [&] { return a; },
        [&](SolveOptions const & options, std::size_t & calls) {
            auto formulaOf = [&] {
                std::vector<Formula> parts;
                for (std::size_t i = 0; i < box.size(); ++i) {
                    if (not box[i]) { continue; }
                    parts.push_back(Formula::atom(LinearTerm::variable(names[i]), Relation::Ge, box[i]->lower));
                    parts.push_back(Formula::atom(LinearTerm::variable(names[i]), Relation::Le, box[i]->upper));
                }
                return Formula::conj(std::move(parts));
            };
            for (auto i : ctx.order) {
                if (not box[i]) { continue; }
                auto const & domain = net.domains()[i];
                for (bool lower : {true, false}) {
                    Rational & bound = lower ? box[i]->lower : box[i]->upper;
                    Rational limit = lower ? domain.lower : domain.upper;
                    for (std::size_t attempt = 0; attempt < attemptsPerBound and bound != limit; ++attempt) {
                        Rational const valid = bound;
                        bound = (valid + limit) / 2;
                        ++calls;
                        if (unsatWith(formulaOf(), ctx, options)) { continue; }
                        limit = bound;
                        bound = valid;
                    }
                }
            }
            return StageOutput{formulaOf(), a.sample(), StageRunner::history(a)};
        });
}

std::string PipelineStage::toString() const {
    switch (kind) {
        case Kind::G: return "G:" + preset;
        case Kind::R: return "R";
        case Kind::Rmin: return "Rmin";
        case Kind::A: return "A";
        case Kind::I: return "I:" + std::to_string(attempts);
        case Kind::C: {
            std::string out = "C:" + preset + ":";
            for (std::size_t i = 0; i < features.size(); ++i) { out += (i ? "," : "") + features[i]; }
            return out;
        }
    }
    return {};
}

namespace {

std::vector<std::string> split(std::string const & text, char separator) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, separator)) { out.push_back(item); }
    if (not text.empty() and text.back() == separator) { out.emplace_back(); }
    return out;
}

std::string trim(std::string const & s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) { return {}; }
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<PipelineStage> parsePipeline(std::string const & descriptor, Network const & net) {
    std::vector<PipelineStage> stages;
    std::size_t offset = 0;
    for (auto const & raw : split(descriptor, ';')) {
        auto text = trim(raw);
        auto fail = [&](std::string const & why) { throw ParseError("pipeline stage '" + text + "': " + why, offset); };
        auto fields = split(text, ':');
        if (text.empty() or fields.empty()) { fail("empty stage"); }
        PipelineStage step{};
        auto const & head = fields[0];
        auto presetAt = [&](std::size_t i) {
            if (fields.size() <= i) { fail("missing interpolation preset"); }
            // factor:<q> spans two fields
            std::string preset = fields[i];
            if (preset == "factor") {
                if (fields.size() <= i + 1) { fail("missing factor value"); }
                preset += ":" + fields[i + 1];
            }
            try {
                presetByName(preset);
            } catch (Error const & e) {
                fail(e.what());
            }
            return preset;
        };
        if (head == "G") {
            step.kind = PipelineStage::Kind::G;
            step.preset = presetAt(1);
            if (fields.size() != (step.preset.starts_with("factor:") ? 3u : 2u)) { fail("unexpected fields"); }
        } else if (head == "R" or head == "Rmin" or head == "A") {
            step.kind = head == "R" ? PipelineStage::Kind::R : head == "A" ? PipelineStage::Kind::A : PipelineStage::Kind::Rmin;
            if (fields.size() != 1) { fail("takes no arguments"); }
        } else if (head == "C") {
            step.kind = PipelineStage::Kind::C;
            step.preset = presetAt(1);
            std::size_t featureField = step.preset.starts_with("factor:") ? 3 : 2;
            if (fields.size() != featureField + 1) { fail("expected C:<preset>:<features>"); }
            for (auto const & f : split(fields[featureField], ',')) {
                auto name = trim(f);
                if (not net.featureIndex(name)) { fail("unknown feature '" + name + "'"); }
                if (std::find(step.features.begin(), step.features.end(), name) != step.features.end()) {
                    fail("feature '" + name + "' listed twice");
                }
                step.features.push_back(name);
            }
            if (step.features.empty()) { fail("no features selected"); }
        } else if (head == "I") {
            step.kind = PipelineStage::Kind::I;
            if (fields.size() != 2 or fields[1].empty() or
                fields[1].find_first_not_of("0123456789") != std::string::npos or fields[1].size() > 6) {
                fail("expected I:<attempts>");
            }
            step.attempts = std::stoul(fields[1]);
        } else {
            fail("unknown strategy '" + head + "'");
        }
        bool const first = stages.empty();
        if ((step.kind == PipelineStage::Kind::A or step.kind == PipelineStage::Kind::C) and not first) {
            fail("A and C must be the first stage");
        }
        if (step.kind == PipelineStage::Kind::I and (first or stages.back().kind != PipelineStage::Kind::A)) {
            fail("I must directly follow A");
        }
        stages.push_back(std::move(step));
        offset += raw.size() + 1;
    }
    if (stages.empty()) { throw ParseError("empty pipeline", 0); }
    return stages;
}

namespace {

Explanation applyStage(PipelineStage const & step, Explanation const & current, ExplanationContext const & ctx) {
    switch (step.kind) {
        case PipelineStage::Kind::G: return generalize(current, ctx, presetByName(step.preset, ctx.midFactor));
        case PipelineStage::Kind::R: return reduce(current, ctx);
        case PipelineStage::Kind::Rmin: return reduceMin(current, ctx);
        case PipelineStage::Kind::I: return interval(current, ctx, step.attempts);
        case PipelineStage::Kind::A:
        case PipelineStage::Kind::C: break;
    }
    throw Error("stage " + step.toString() + " needs a sample and must come first");
}

} // namespace

Explanation runPipeline(std::vector<PipelineStage> const & stages, Point const & sample, ExplanationContext const & ctx) {
    if (stages.empty()) { throw Error("empty pipeline"); }
    auto const & first = stages.front();
    std::optional<Explanation> current;
    std::size_t next = 1;
    if (first.kind == PipelineStage::Kind::A) {
        current = abductive(sample, ctx);
    } else if (first.kind == PipelineStage::Kind::C) {
        VarSet selected(first.features.begin(), first.features.end());
        current = capture(sample, selected, ctx, presetByName(first.preset, ctx.midFactor));
    } else {
        current = Explanation::fromSample(sample, ctx);
        next = 0;
    }
    if (next == 1) { StageRunner::rename(*current, first.toString()); }
    for (std::size_t i = next; i < stages.size(); ++i) {
        current = applyStage(stages[i], *current, ctx);
        StageRunner::rename(*current, stages[i].toString());
    }
    return *current;
}

Explanation runPipeline(std::vector<PipelineStage> const & stages, Explanation const & start, ExplanationContext const & ctx) {
    Explanation current = start;
    for (auto const & step : stages) {
        current = applyStage(step, current, ctx);
        StageRunner::rename(current, step.toString());
    }
    return current;
}

} // namespace spex
