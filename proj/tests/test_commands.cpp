#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "Oracles.h"
#include "spex/Commands.h"
#include "spex/ExplanationFile.h"

#include <fstream>
#include <sstream>

using namespace spex;
namespace fs = std::filesystem;

namespace {

std::string const data = SPEX_TEST_DATA;

fs::path scratch(std::string const & name) {
    auto dir = fs::temp_directory_path() / ("spex_commands_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(fs::path const & p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig explainConfig(std::string pipeline, fs::path out) {
    RunConfig c;
    c.network = data + "/toy.json";
    c.data = data + "/sample.csv";
    c.pipelines = {std::move(pipeline)};
    c.out = std::move(out);
    c.jobs = 1;
    return c;
}

fs::path writeExplanation(fs::path const & dir, std::string const & name, Formula const & f) {
    auto net = loadNetwork(data + "/toy.json");
    ExplanationContext ctx(net, 0);
    auto e = Explanation::fromFormula(f, ctx, Point{1, 1, 3});
    auto path = dir / name;
    writeRecord(path, makeRecord(e, net, {}));
    return path;
}

Formula const phi1 = Formula::atom({{"x1", 1}, {"x2", -1}, {"x3", 1}}, Relation::Ge, 3);
Formula const phi1Star = Formula::atom({{"x1", 1}, {"x2", -1}, {"x3", 1}}, Relation::Gt, 0);

} // namespace

TEST_CASE("explain writes one verified file per sample") {
    auto dir = scratch("explain");
    std::ostringstream log;
    REQUIRE(cmdExplain(explainConfig("G:weak", dir), log) == exit_code::ok);
    auto record = readRecord(dir / "sample1_G_weak.json");
    CHECK(record.validity == "pass");
    CHECK(record.className == "c1");
    CHECK(record.pipeline == std::vector<std::string>{"G:weak"});
    std::size_t calls = 0;
    for (auto const & s : record.stages) { calls += s.solverCalls; }
    CHECK(calls == 1);
    CHECK(record.networkHash == networkHash(loadNetwork(data + "/toy.json")));
    CHECK(record.config.at("pipeline") == "G:weak");
    CHECK(fs::exists(dir / "report.csv"));
    CHECK_NOTHROW(verifyRecord(record, loadNetwork(data + "/toy.json")));
}

TEST_CASE("explain with the abductive pipeline") {
    auto dir = scratch("abductive");
    std::ostringstream log;
    REQUIRE(cmdExplain(explainConfig("A", dir), log) == exit_code::ok);
    auto record = readRecord(dir / "sample1_A.json");
    CHECK(parseFormula(record.formula) ==
          Formula::conj({Formula::atom({{"x2", 1}}, Relation::Eq, 1), Formula::atom({{"x3", 1}}, Relation::Eq, 3)}));
    CHECK(record.relaxed == Rational(1, 3));
}

TEST_CASE("configuration errors") {
    auto dir = scratch("config");
    std::ostringstream log;
    CHECK(cmdExplain(explainConfig("G:best", dir), log) == exit_code::config);
    CHECK(log.str().find("G:best") != std::string::npos);
    auto missing = explainConfig("A", dir);
    missing.network = dir / "nope.json";
    CHECK(cmdExplain(missing, log) == exit_code::config);
    auto badTimeout = explainConfig("A", dir);
    badTimeout.stageTimeoutSeconds = 0;
    CHECK(cmdExplain(badTimeout, log) == exit_code::config);
    auto badOrder = explainConfig("A", dir);
    badOrder.order = "x1,x1,x2";
    CHECK(cmdExplain(badOrder, log) == exit_code::config);
    auto badFactor = explainConfig("G:mid", dir);
    badFactor.presetFactor = "3/2";
    CHECK(cmdExplain(badFactor, log) == exit_code::config);
}

TEST_CASE("identical runs produce identical files") {
    auto first = scratch("det1");
    auto second = scratch("det2");
    std::ostringstream log;
    for (auto const & dir : {first, second}) {
        auto c = explainConfig("A;I:8;G:weak", dir);
        c.pipelines.push_back("C:strong:x1,x2;Rmin");
        c.timing = false;
        c.jobs = dir == first ? 1 : 4;
        REQUIRE(cmdExplain(c, log) == exit_code::ok);
    }
    std::size_t files = 0;
    for (auto const & entry : fs::directory_iterator(first)) {
        ++files;
        CHECK(slurp(entry.path()) == slurp(second / entry.path().filename()));
    }
    CHECK(files == 3);
}

TEST_CASE("every emitted file re-verifies under compare") {
    auto dir = scratch("reverify");
    std::ostringstream log;
    auto c = explainConfig("G:weaker", dir);
    c.pipelines.push_back("A;I:4");
    REQUIRE(cmdExplain(c, log) == exit_code::ok);
    CompareConfig cmp;
    cmp.network = data + "/toy.json";
    cmp.files = {dir / "sample1_G_weaker.json", dir / "sample1_A_I_4.json"};
    std::ostringstream out;
    CHECK(cmdCompare(cmp, out, log) == exit_code::ok);
}

TEST_CASE("compare reports shares") {
    auto dir = scratch("compare");
    auto a = writeExplanation(dir, "phi1.json", phi1);
    auto b = writeExplanation(dir, "phi1star.json", phi1Star);
    CompareConfig cmp;
    cmp.network = data + "/toy.json";
    cmp.files = {a, b};
    cmp.details = dir / "pairs.csv";
    std::ostringstream out;
    std::ostringstream log;
    REQUIRE(cmdCompare(cmp, out, log) == exit_code::ok);
    CHECK(out.str() == "relation,percent\n⊃,0.00\n=,0.00\n⊂,100.00\nNC,0.00\n");
    CHECK(slurp(dir / "pairs.csv").find(",⊂\n") != std::string::npos);

    cmp.files = {a, a};
    std::ostringstream self;
    REQUIRE(cmdCompare(cmp, self, log) == exit_code::ok);
    CHECK(self.str().find("=,100.00") != std::string::npos);

    cmp.files = {a, b, b, a};
    std::ostringstream mixed;
    REQUIRE(cmdCompare(cmp, mixed, log) == exit_code::ok);
    CHECK(mixed.str() == "relation,percent\n⊃,50.00\n=,0.00\n⊂,50.00\nNC,0.00\n");

    cmp.files = {b};
    cmp.baseline = a;
    cmp.pair = {"x1", "x2"};
    std::ostringstream sliced;
    REQUIRE(cmdCompare(cmp, sliced, log) == exit_code::ok);
    CHECK(sliced.str().find("⊃,100.00") != std::string::npos);
}

TEST_CASE("compare rejects mismatched contexts") {
    auto dir = scratch("mismatch");
    auto a = writeExplanation(dir, "phi1.json", phi1);
    auto net = loadNetwork(data + "/toy.json");
    ExplanationContext ctx(net, 1);
    auto other = Explanation::fromFormula(parseFormula("(and (= x1 0) (= x3 0) (>= x2 1))"), ctx);
    writeRecord(dir / "c2.json", makeRecord(other, net, {}));
    CompareConfig cmp;
    cmp.network = data + "/toy.json";
    cmp.files = {a, dir / "c2.json"};
    std::ostringstream out;
    std::ostringstream log;
    CHECK(cmdCompare(cmp, out, log) == exit_code::config);

    auto record = readRecord(a);
    record.networkHash = "0000000000000000";
    writeRecord(dir / "foreign.json", record);
    cmp.files = {a, dir / "foreign.json"};
    CHECK(cmdCompare(cmp, out, log) == exit_code::config);

    record = readRecord(a);
    record.formula = "(>= x1 0)";
    writeRecord(dir / "invalid.json", record);
    cmp.files = {a, dir / "invalid.json"};
    CHECK(cmdCompare(cmp, out, log) == exit_code::validity);
}

TEST_CASE("grid commands") {
    auto dir = scratch("grids");
    auto p = writeExplanation(dir, "phi1.json", phi1);
    auto s = writeExplanation(dir, "sample.json", encodeSample(Point{1, 1, 3}, std::vector<std::string>{"x1", "x2", "x3"}));
    auto t = writeExplanation(dir, "x2x3.json", Formula::conj({Formula::atom({{"x2", 1}}, Relation::Eq, 1),
                                                               Formula::atom({{"x3", 1}}, Relation::Eq, 3)}));
    GridConfig g;
    g.network = data + "/toy.json";
    g.pair = {"x1", "x2"};
    g.resolution = 5;
    g.out = dir;
    g.jobs = 2;
    std::ostringstream log;

    g.explanation = p;
    REQUIRE(cmdProject(g, log) == exit_code::ok);
    auto text = slurp(dir / gridFileName(p, "x1", "x2", "projection"));
    CHECK(text.starts_with("x=x1,y=x2,mode=projection\n"));
    CHECK(text.find("\n0,4,0\n") != std::string::npos);
    CHECK(text.find("\n4,0,1\n") != std::string::npos);

    g.explanation = s;
    REQUIRE(cmdSlice(g, log) == exit_code::ok);
    text = slurp(dir / "sample_x1_x2_slice.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 26);
    std::size_t ones = 0;
    for (std::size_t pos = 0; (pos = text.find(",1\n", pos)) != std::string::npos; ++pos) { ++ones; }
    CHECK(ones == 1);

    g.explanation = t;
    g.pair = {"x1", "x3"};
    REQUIRE(cmdProject(g, log) == exit_code::ok);
    text = slurp(dir / "x2x3_x1_x3_projection.csv");
    ones = 0;
    for (std::size_t pos = 0; (pos = text.find(",1\n", pos)) != std::string::npos; ++pos) { ++ones; }
    CHECK(ones == 5);

    g.pair = {"x1", "x1"};
    CHECK(cmdProject(g, log) == exit_code::config);
}

TEST_CASE("eval and stats") {
    EvalConfig e;
    e.network = data + "/toy.json";
    e.data = data + "/eval.csv";
    std::ostringstream out;
    std::ostringstream log;
    REQUIRE(cmdEval(e, out, log) == exit_code::ok);
    CHECK(out.str() == "index,class\n1,c1\n2,c1\n3,c2\n");

    std::ostringstream empty;
    CHECK(cmdStats({}, empty, log) == exit_code::ok);
    CHECK(empty.str() == "pipeline,relaxed,terms,time_s,solver_calls\n");

    auto dir = scratch("stats");
    REQUIRE(cmdExplain(explainConfig("A", dir), log) == exit_code::ok);
    std::ostringstream report;
    CHECK(cmdStats({dir / "sample1_A.json"}, report, log, false) == exit_code::ok);
    CHECK(report.str() == "pipeline,relaxed,terms,time_s,solver_calls\n\"A\",0.3333,2.0000,0.0000,3.0000\n");
}
