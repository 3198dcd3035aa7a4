#pragma once

#include "Strategies.h"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spex {

enum class SpaceRelation { Subset, Equal, Superset, NotComparable };

/// "⊂", "=", "⊃", "NC".
std::string toString(SpaceRelation);
SpaceRelation inverse(SpaceRelation);

struct ComparisonResult {
    SpaceRelation relation = SpaceRelation::Equal;
    /// In the first space but not the second.
    std::optional<Point> onlyFirst;
    /// In the second space but not the first.
    std::optional<Point> onlySecond;
};

/// Subset relation of the spaces of two formulas within `domains`. With `fixed`, both formulas are
/// first restricted to the slice given by those values; witnesses then keep the fixed values.
/// Throws TimeoutError.
ComparisonResult compare(Formula const & first, Formula const & second, Formula const & domains,
                         std::vector<std::string> const & featureNames, Assignment const & fixed = {},
                         SolveOptions const & options = {});

/// Fraction of features that can deviate from the sample inside the explanation's space.
Rational relaxedFraction(Formula const & explanation, Point const & sample, Network const & net,
                         SolveOptions const & options = {});
/// Per-feature verdicts behind relaxedFraction, true when the feature can deviate.
std::vector<bool> relaxedFeatures(Formula const & explanation, Point const & sample, Network const & net,
                                  SolveOptions const & options = {});

enum class GridMode { Projection, Slice };
enum class Cell { Out, In, Unknown };

struct Grid {
    std::size_t xFeature = 0;
    std::size_t yFeature = 0;
    std::vector<std::string> axisNames;
    std::size_t resolution = 0;
    GridMode mode = GridMode::Projection;
    /// Values of the other features in slice mode.
    Assignment fixed;
    /// Axis coordinates, resolution evenly spaced values from the domain's lower to upper bound.
    std::vector<Rational> xValues;
    std::vector<Rational> yValues;
    /// cells[i][j] is at (xValues[i], yValues[j]).
    std::vector<std::vector<Cell>> cells;

    std::size_t count(Cell c) const;
};

/// Evenly spaced values from lower to upper, both included. Requires resolution >= 2.
std::vector<Rational> axis(Interval const & domain, std::size_t resolution);

/// Cell is In iff some point of the domain with those two coordinates satisfies the formula.
/// Cells left when the budget runs out are Unknown. Every In cell's model is re-checked with eval.
Grid projectGrid(Formula const & explanation, Network const & net, std::size_t xFeature, std::size_t yFeature,
                 std::size_t resolution, SolveOptions const & options = {}, std::size_t jobs = 1);

/// Fixes every other feature to the sample's value and evaluates each cell directly.
Grid sliceGrid(Formula const & explanation, Network const & net, std::size_t xFeature, std::size_t yFeature,
               Point const & sample, std::size_t resolution);

/// Header "x=<feat>,y=<feat>,mode=<projection|slice>", then "u,v,{0|1|?}" rows.
void writeGridCsv(std::ostream & out, Grid const & grid);

struct ReportRow {
    std::string pipeline;
    std::size_t count = 0;
    double relaxed = 0;
    double terms = 0;
    double seconds = 0;
    double solverCalls = 0;
};

/// Metrics of one explanation as they enter the report.
struct ReportEntry {
    std::string pipeline;
    std::optional<Rational> relaxed;
    std::size_t terms = 0;
    double seconds = 0;
    std::size_t solverCalls = 0;
};

ReportEntry reportEntry(Explanation const & e);

/// Per-pipeline averages in order of first appearance.
std::vector<ReportRow> aggregate(std::vector<ReportEntry> const & entries);
std::vector<ReportRow> aggregate(std::vector<Explanation> const & explanations);
/// Columns pipeline, relaxed, terms, time_s, solver_calls.
void writeReportCsv(std::ostream & out, std::vector<ReportRow> const & rows, bool timing = true);

/// Percentages of each relation over a list of comparisons.
std::map<SpaceRelation, Rational> relationShares(std::vector<SpaceRelation> const & relations);

} // namespace spex
