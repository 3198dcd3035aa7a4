#include "spex/Commands.h"
#include "spex/ExplanationFile.h"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char ** argv) {
    using namespace spex;
    CLI::App app{"Space explanations for ReLU classifiers"};
    app.set_version_flag("--version", toolVersion());
    app.require_subcommand(1);

    RunConfig run;
    auto * explain = app.add_subcommand("explain", "Explain the predicted class of every dataset point");
    explain->add_option("--network", run.network, "Network JSON")->required();
    explain->add_option("--data", run.data, "Dataset CSV")->required();
    explain->add_flag("--labels", run.labeled, "Dataset has a trailing label column");
    explain->add_option("--pipeline", run.pipelines, "Strategy pipeline, e.g. \"A;I:8;G:weak\" (repeatable)")
        ->required();
    explain->add_option("--preset-factor", run.presetFactor, "Factor of the mid preset")->capture_default_str();
    explain->add_option("--timeout", run.timeoutSeconds, "Whole-run budget in seconds")->capture_default_str();
    explain->add_option("--stage-timeout", run.stageTimeoutSeconds, "Per-stage budget in seconds")
        ->capture_default_str();
    explain->add_option("--order", run.order, "Feature traversal order, comma-separated");
    explain->add_option("--out", run.out, "Output directory")->capture_default_str();
    explain->add_option("--jobs", run.jobs, "Worker threads (0: all cores)")->capture_default_str();
    bool noTiming = false;
    explain->add_flag("--no-timing", noTiming, "Write zero times for byte-identical reruns");

    CompareConfig cmp;
    auto * compare = app.add_subcommand("compare", "Subset relations between explanation spaces");
    compare->add_option("--network", cmp.network, "Network JSON")->required();
    compare->add_option("files", cmp.files, "Explanation files, taken in pairs unless --baseline is given")
        ->required();
    compare->add_option("--baseline", cmp.baseline, "Compare every file against this one");
    compare->add_option("--pair", cmp.pair, "Compare slices through the sample on two features")->delimiter(',')
        ->expected(2);
    compare->add_option("--out", cmp.details, "Per-pair relation CSV");
    compare->add_option("--timeout", cmp.timeoutSeconds, "Budget in seconds")->capture_default_str();

    GridConfig grid;
    auto addGridOptions = [&](CLI::App * sub) {
        sub->add_option("--network", grid.network, "Network JSON")->required();
        sub->add_option("explanation", grid.explanation, "Explanation file")->required();
        sub->add_option("--pair", grid.pair, "Two features, e.g. x1,x2")->delimiter(',')->expected(2)->required();
        sub->add_option("--grid-res", grid.resolution, "Cells per axis")->capture_default_str();
        sub->add_option("--out", grid.out, "Output directory")->capture_default_str();
        sub->add_option("--jobs", grid.jobs, "Worker threads (0: all cores)")->capture_default_str();
        sub->add_option("--timeout", grid.timeoutSeconds, "Budget in seconds")->capture_default_str();
    };
    auto * project = app.add_subcommand("project", "Projection grid of an explanation onto two features");
    addGridOptions(project);
    auto * slice = app.add_subcommand("slice", "Slice grid of an explanation through its sample");
    addGridOptions(slice);

    EvalConfig ev;
    auto * eval = app.add_subcommand("eval", "Classify every dataset point");
    eval->add_option("--network", ev.network, "Network JSON")->required();
    eval->add_option("--data", ev.data, "Dataset CSV")->required();
    eval->add_flag("--labels", ev.labeled, "Dataset has a trailing label column");

    std::vector<std::filesystem::path> statFiles;
    bool statsNoTiming = false;
    auto * stats = app.add_subcommand("stats", "Aggregate report over explanation files");
    stats->add_option("files", statFiles, "Explanation files");
    stats->add_flag("--no-timing", statsNoTiming, "Report zero times");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const & e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_code::config;
    }

    if (*explain) {
        run.timing = not noTiming;
        return cmdExplain(run, std::cerr);
    }
    if (*compare) { return cmdCompare(cmp, std::cout, std::cerr); }
    if (*project) { return cmdProject(grid, std::cerr); }
    if (*slice) { return cmdSlice(grid, std::cerr); }
    if (*eval) { return cmdEval(ev, std::cout, std::cerr); }
    if (*stats) { return cmdStats(statFiles, std::cout, std::cerr, not statsNoTiming); }
    return exit_code::config;
}
