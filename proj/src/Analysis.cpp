#include "spex/Analysis.h"

#include "spex/Encoder.h"

#include <atomic>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

namespace spex {

std::string toString(SpaceRelation r) {
    switch (r) {
        case SpaceRelation::Subset: return "⊂";
        case SpaceRelation::Equal: return "=";
        case SpaceRelation::Superset: return "⊃";
        case SpaceRelation::NotComparable: return "NC";
    }
    return "?";
}

SpaceRelation inverse(SpaceRelation r) {
    switch (r) {
        case SpaceRelation::Subset: return SpaceRelation::Superset;
        case SpaceRelation::Superset: return SpaceRelation::Subset;
        default: return r;
    }
}

namespace {

Point pointFrom(Assignment const & model, Assignment const & fixed, std::vector<std::string> const & names) {
    Point p;
    for (auto const & name : names) {
        if (auto it = fixed.find(name); it != fixed.end()) {
            p.push_back(it->second);
        } else if (auto m = model.find(name); m != model.end()) {
            p.push_back(m->second);
        } else {
            p.push_back(0);
        }
    }
    return p;
}

/// A point of `a` outside `b`, if any.
std::optional<Assignment> difference(Formula const & a, Formula const & b, Formula const & domains,
                                     SolveOptions const & options) {
    auto r = solve(PartitionedSystem(Formula::conj({a, domains}), negate(b)), options);
    if (r.status == SolveStatus::Timeout) { throw TimeoutError("comparison timed out"); }
    if (r.unsat()) { return std::nullopt; }
    return r.model;
}

} // namespace

ComparisonResult compare(Formula const & first, Formula const & second, Formula const & domains,
                         std::vector<std::string> const & featureNames, Assignment const & fixed,
                         SolveOptions const & options) {
    auto const f1 = fixed.empty() ? first : substitute(first, fixed);
    auto const f2 = fixed.empty() ? second : substitute(second, fixed);
    auto const dom = fixed.empty() ? domains : substitute(domains, fixed);
    ComparisonResult result;
    if (auto m = difference(f1, f2, dom, options)) { result.onlyFirst = pointFrom(*m, fixed, featureNames); }
    if (auto m = difference(f2, f1, dom, options)) { result.onlySecond = pointFrom(*m, fixed, featureNames); }
    if (result.onlyFirst and result.onlySecond) {
        result.relation = SpaceRelation::NotComparable;
    } else if (result.onlyFirst) {
        result.relation = SpaceRelation::Superset;
    } else if (result.onlySecond) {
        result.relation = SpaceRelation::Subset;
    } else {
        result.relation = SpaceRelation::Equal;
    }
    return result;
}

std::vector<bool> relaxedFeatures(Formula const & explanation, Point const & sample, Network const & net,
                                  SolveOptions const & options) {
    if (sample.size() != net.inputCount()) { throw DimensionError("sample does not match the network's inputs"); }
    auto const base = Formula::conj({explanation, encodeDomains(net)});
    std::vector<bool> out;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        auto x = LinearTerm::variable(net.featureNames()[i]);
        auto moved = Formula::disj({Formula::atom(x, Relation::Lt, sample[i]), Formula::atom(x, Relation::Gt, sample[i])});
        auto r = solve(PartitionedSystem(base, moved), options);
        if (r.status == SolveStatus::Timeout) { throw TimeoutError("relaxed-fraction query timed out"); }
        out.push_back(r.sat());
    }
    return out;
}

Rational relaxedFraction(Formula const & explanation, Point const & sample, Network const & net,
                         SolveOptions const & options) {
    auto flags = relaxedFeatures(explanation, sample, net, options);
    if (flags.empty()) { return 0; }
    Rational r(static_cast<long>(std::count(flags.begin(), flags.end(), true)), static_cast<long>(flags.size()));
    r.canonicalize();
    return r;
}

std::size_t Grid::count(Cell c) const {
    std::size_t n = 0;
    for (auto const & column : cells) { n += static_cast<std::size_t>(std::count(column.begin(), column.end(), c)); }
    return n;
}

std::vector<Rational> axis(Interval const & domain, std::size_t resolution) {
    if (resolution < 2) { throw Error("grid resolution must be at least 2"); }
    std::vector<Rational> values;
    Rational const step = (domain.upper - domain.lower) / static_cast<long>(resolution - 1);
    for (std::size_t i = 0; i < resolution; ++i) { values.push_back(domain.lower + step * static_cast<long>(i)); }
    return values;
}

namespace {

Grid emptyGrid(Network const & net, std::size_t xFeature, std::size_t yFeature, std::size_t resolution, GridMode mode) {
    if (xFeature >= net.inputCount() or yFeature >= net.inputCount()) { throw Error("grid feature out of range"); }
    if (xFeature == yFeature) { throw Error("grid needs two distinct features"); }
    Grid g;
    g.xFeature = xFeature;
    g.yFeature = yFeature;
    g.axisNames = {net.featureNames()[xFeature], net.featureNames()[yFeature]};
    g.resolution = resolution;
    g.mode = mode;
    g.xValues = axis(net.domains()[xFeature], resolution);
    g.yValues = axis(net.domains()[yFeature], resolution);
    g.cells.assign(resolution, std::vector<Cell>(resolution, Cell::Unknown));
    return g;
}

} // namespace

Grid projectGrid(Formula const & explanation, Network const & net, std::size_t xFeature, std::size_t yFeature,
                 std::size_t resolution, SolveOptions const & options, std::size_t jobs) {
    Grid g = emptyGrid(net, xFeature, yFeature, resolution, GridMode::Projection);
    auto const base = Formula::conj({explanation, encodeDomains(net)});
    auto const & names = net.featureNames();
    std::atomic<std::size_t> next{0};
    std::atomic<bool> expired{false};
    std::mutex failure;
    std::optional<std::string> error;

    auto work = [&] {
        for (std::size_t k = next++; k < resolution * resolution and not expired; k = next++) {
            auto i = k / resolution;
            auto j = k % resolution;
            Assignment pin{{names[xFeature], g.xValues[i]}, {names[yFeature], g.yValues[j]}};
            auto r = solve(substitute(base, pin), options);
            if (r.status == SolveStatus::Timeout) {
                expired = true;
                break;
            }
            if (r.sat()) {
                auto full = r.model;
                for (auto const & [var, value] : pin) { full[var] = value; }
                for (auto const & name : names) { full.try_emplace(name, 0); }
                if (not eval(base, full)) {
                    std::lock_guard lock(failure);
                    error = "projection witness does not satisfy the explanation";
                    expired = true;
                    break;
                }
            }
            g.cells[i][j] = r.sat() ? Cell::In : Cell::Out;
        }
    };
    std::size_t const workers = std::max<std::size_t>(1, std::min(jobs, resolution * resolution));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) { pool.emplace_back(work); }
    }
    if (error) { throw Error(*error); }
    return g;
}

Grid sliceGrid(Formula const & explanation, Network const & net, std::size_t xFeature, std::size_t yFeature,
               Point const & sample, std::size_t resolution) {
    if (sample.size() != net.inputCount()) { throw DimensionError("sample does not match the network's inputs"); }
    Grid g = emptyGrid(net, xFeature, yFeature, resolution, GridMode::Slice);
    auto const & names = net.featureNames();
    for (std::size_t f = 0; f < names.size(); ++f) {
        if (f != xFeature and f != yFeature) { g.fixed[names[f]] = sample[f]; }
    }
    auto const restricted = substitute(explanation, g.fixed);
    for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
            Assignment at{{names[xFeature], g.xValues[i]}, {names[yFeature], g.yValues[j]}};
            g.cells[i][j] = eval(restricted, at) ? Cell::In : Cell::Out;
        }
    }
    return g;
}

void writeGridCsv(std::ostream & out, Grid const & grid) {
    out << "x=" << grid.axisNames[0] << ",y=" << grid.axisNames[1]
        << ",mode=" << (grid.mode == GridMode::Projection ? "projection" : "slice") << '\n';
    for (std::size_t i = 0; i < grid.resolution; ++i) {
        for (std::size_t j = 0; j < grid.resolution; ++j) {
            char c = grid.cells[i][j] == Cell::In ? '1' : grid.cells[i][j] == Cell::Out ? '0' : '?';
            out << toString(grid.xValues[i]) << ',' << toString(grid.yValues[j]) << ',' << c << '\n';
        }
    }
}

ReportEntry reportEntry(Explanation const & e) {
    ReportEntry entry;
    for (std::size_t i = 0; i < e.pipeline().size(); ++i) { entry.pipeline += (i ? ";" : "") + e.pipeline()[i]; }
    entry.relaxed = e.metrics().relaxed;
    entry.terms = e.metrics().terms;
    entry.seconds = e.metrics().seconds();
    entry.solverCalls = e.metrics().solverCalls();
    return entry;
}

std::vector<ReportRow> aggregate(std::vector<ReportEntry> const & entries) {
    std::vector<ReportRow> rows;
    std::vector<std::size_t> relaxedCounts;
    for (auto const & e : entries) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](auto const & r) { return r.pipeline == e.pipeline; });
        if (it == rows.end()) {
            rows.push_back({e.pipeline});
            relaxedCounts.push_back(0);
            it = rows.end() - 1;
        }
        ++it->count;
        it->terms += static_cast<double>(e.terms);
        it->seconds += e.seconds;
        it->solverCalls += static_cast<double>(e.solverCalls);
        if (e.relaxed) {
            it->relaxed += e.relaxed->get_d();
            ++relaxedCounts[static_cast<std::size_t>(it - rows.begin())];
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto n = static_cast<double>(rows[i].count);
        rows[i].terms /= n;
        rows[i].seconds /= n;
        rows[i].solverCalls /= n;
        if (relaxedCounts[i] > 0) { rows[i].relaxed /= static_cast<double>(relaxedCounts[i]); }
    }
    return rows;
}

std::vector<ReportRow> aggregate(std::vector<Explanation> const & explanations) {
    std::vector<ReportEntry> entries;
    for (auto const & e : explanations) { entries.push_back(reportEntry(e)); }
    return aggregate(entries);
}

void writeReportCsv(std::ostream & out, std::vector<ReportRow> const & rows, bool timing) {
    out << "pipeline,relaxed,terms,time_s,solver_calls\n";
    auto flags = out.flags();
    out << std::fixed << std::setprecision(4);
    for (auto const & r : rows) {
        out << '"' << r.pipeline << '"' << ',' << r.relaxed << ',' << r.terms << ',' << (timing ? r.seconds : 0.0) << ','
            << r.solverCalls << '\n';
    }
    out.flags(flags);
}

std::map<SpaceRelation, Rational> relationShares(std::vector<SpaceRelation> const & relations) {
    std::map<SpaceRelation, Rational> shares;
    for (auto r : {SpaceRelation::Superset, SpaceRelation::Equal, SpaceRelation::Subset, SpaceRelation::NotComparable}) {
        shares[r] = 0;
    }
    if (relations.empty()) { return shares; }
    for (auto r : relations) { shares[r] += 1; }
    for (auto & [r, v] : shares) { v = v * 100 / static_cast<long>(relations.size()); }
    return shares;
}

} // namespace spex
