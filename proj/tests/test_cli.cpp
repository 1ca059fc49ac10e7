#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Exercises the installed binary end to end through a shell, checking exit
// codes (0 ok, 2 usage, 3 io, 4 data format) and artifact behavior.

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

fs::path test_root() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() /
                     ("branchlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return root;
}

fs::path fresh_dir(const std::string& hint) {
    static int counter = 0;
    fs::path p = test_root() / (hint + "_" + std::to_string(counter++));
    fs::create_directories(p);
    return p;
}

CliResult run_cli(const std::vector<std::string>& args, const fs::path& dir) {
    std::ostringstream cmd;
    cmd << "cd '" << dir.string() << "' && '" << BRANCHLAB_BIN << "'";
    for (const std::string& a : args) cmd << " '" << a << "'";
    cmd << " >cli_stdout.txt 2>cli_stderr.txt";
    int status = std::system(cmd.str().c_str());
    CliResult r;
    r.code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "cli_stdout.txt");
    r.err = slurp(dir / "cli_stderr.txt");
    return r;
}

} // namespace

TEST_CASE("cli: help and bad invocations use the usage exit code") {
    fs::path d = fresh_dir("usage");
    CHECK(run_cli({"--help"}, d).code == 0);
    CHECK(run_cli({}, d).code == 2);             // a subcommand is required
    CHECK(run_cli({"frobnicate"}, d).code == 2); // unknown subcommand
    CHECK(run_cli({"gen", "--kind", "uniform"}, d).code == 2);  // missing --out
    CHECK(run_cli({"gen", "--kind", "nope", "--out", "x.el"}, d).code == 2);
}

TEST_CASE("cli: gen validates parameters") {
    fs::path d = fresh_dir("gen");
    CHECK(run_cli({"gen", "--kind", "uniform", "--n", "0", "--m", "5", "--out", "x.el"}, d).code ==
          2);
    CHECK(run_cli({"gen", "--kind", "kron", "--scale", "30", "--out", "x.el"}, d).code == 2);
    CliResult ok =
        run_cli({"gen", "--kind", "uniform", "--n", "16", "--m", "40", "--seed", "7", "--out",
                 "g.el"},
                d);
    CHECK(ok.code == 0);
    CHECK(ok.out.find("wrote 40 edges") != std::string::npos);
    CHECK(fs::exists(d / "g.el"));
}

TEST_CASE("cli: gen is deterministic for a fixed seed") {
    fs::path d = fresh_dir("gen_det");
    REQUIRE(run_cli({"gen", "--kind", "kron", "--scale", "6", "--ef", "4", "--seed", "3", "--out",
                     "a.el"},
                    d)
                .code == 0);
    REQUIRE(run_cli({"gen", "--kind", "kron", "--scale", "6", "--ef", "4", "--seed", "3", "--out",
                     "b.el"},
                    d)
                .code == 0);
    CHECK(slurp(d / "a.el") == slurp(d / "b.el"));
    REQUIRE(run_cli({"gen", "--kind", "kron", "--scale", "6", "--ef", "4", "--seed", "4", "--out",
                     "c.el"},
                    d)
                .code == 0);
    CHECK(slurp(d / "a.el") != slurp(d / "c.el"));
}

TEST_CASE("cli: run reports io and format errors distinctly") {
    fs::path d = fresh_dir("run_err");
    CHECK(run_cli({"run", "--kernel", "bfs", "--graph", "missing.el", "--out", "t.gbpt"}, d)
              .code == 3);
    spit(d / "bad.el", "0 1\nnot numbers\n");
    CHECK(run_cli({"run", "--kernel", "bfs", "--graph", "bad.el", "--out", "t.gbpt"}, d).code ==
          4);
    spit(d / "ok.el", "0 1\n1 2\n");
    CHECK(run_cli({"run", "--kernel", "sssp", "--graph", "ok.el", "--out", "t.gbpt"}, d).code ==
          2);
    CHECK(run_cli({"run", "--kernel", "bfs", "--graph", "ok.el", "--reorder", "bogus", "--out",
                   "t.gbpt"},
                  d)
              .code == 2);
    // bfs source outside the graph
    CHECK(run_cli({"run", "--kernel", "bfs", "--graph", "ok.el", "--source", "99", "--out",
                   "t.gbpt"},
                  d)
              .code == 2);
}

TEST_CASE("cli: run produces a loadable trace and per-site counts") {
    fs::path d = fresh_dir("run_ok");
    spit(d / "g.el", "0 1\n1 2\n0 2\n");
    CliResult r = run_cli({"run", "--kernel", "tc", "--graph", "g.el", "--out", "t.gbpt"}, d);
    CHECK(r.code == 0);
    // tc silently requires symmetry; the tool says so and proceeds.
    CHECK(r.out.find("building undirected") != std::string::npos);
    CHECK(r.out.find("tc triangles: 1") != std::string::npos);
    CHECK(r.out.find("site tc_58:") != std::string::npos);
    CHECK(fs::exists(d / "t.gbpt"));

    CliResult b = run_cli({"run", "--kernel", "bfs", "--graph", "g.el", "--undirected", "--out",
                           "b.gbpt"},
                          d);
    CHECK(b.code == 0);
    CHECK(b.out.find("bfs reached 3 nodes") != std::string::npos);
}

TEST_CASE("cli: simulate writes per-predictor CSVs and summaries") {
    fs::path d = fresh_dir("sim");
    spit(d / "g.el", "0 1\n1 2\n0 2\n2 3\n3 4\n");
    REQUIRE(run_cli({"run", "--kernel", "pr", "--graph", "g.el", "--undirected", "--out",
                     "t.gbpt"},
                    d)
                .code == 0);

    CliResult r = run_cli({"simulate", "--trace", "t.gbpt", "--pred", "kind=gshare", "--out-dir",
                           "reports"},
                          d);
    CHECK(r.code == 0);
    CHECK(r.out.find("gshare: events=") != std::string::npos);
    std::string csv = slurp(d / "reports" / "t.gshare.csv");
    CHECK(csv.find("site,kernel,line_tag,") == 0);
    CHECK(csv.find("pr_46,") != std::string::npos);
    CHECK(csv.find("TOTAL,") != std::string::npos);

    // Usage errors: no predictor at all, malformed config text.
    CHECK(run_cli({"simulate", "--trace", "t.gbpt"}, d).code == 2);
    CHECK(run_cli({"simulate", "--trace", "t.gbpt", "--pred", "kind=bogus"}, d).code == 2);
    CHECK(run_cli({"simulate", "--trace", "nope.gbpt", "--pred", "kind=gshare"}, d).code == 3);
    spit(d / "junk.gbpt", "this is not a trace");
    CHECK(run_cli({"simulate", "--trace", "junk.gbpt", "--pred", "kind=gshare"}, d).code == 4);
}

TEST_CASE("cli: simulate --baseline emits delta CSVs") {
    fs::path d = fresh_dir("sim_delta");
    spit(d / "g.el", "0 1\n1 2\n0 2\n2 3\n");
    REQUIRE(run_cli({"run", "--kernel", "cc", "--graph", "g.el", "--out", "t.gbpt"}, d).code ==
            0);
    CliResult r = run_cli({"simulate", "--trace", "t.gbpt", "--baseline", "kind=one_bit",
                           "--pred", "kind=gshare", "--out-dir", "out"},
                          d);
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "out" / "t.one_bit.csv"));
    CHECK(fs::exists(d / "out" / "t.gshare.csv"));
    std::string delta = slurp(d / "out" / "t.gshare_vs_one_bit.delta.csv");
    CHECK(delta.find("improvement_pct") != std::string::npos);
    CHECK(delta.find("TOTAL,") != std::string::npos);
}

TEST_CASE("cli: simulate --sweep covers the zoo in a fixed order") {
    fs::path d = fresh_dir("sim_sweep");
    spit(d / "g.el", "0 1\n1 2\n0 2\n2 3\n");
    REQUIRE(run_cli({"run", "--kernel", "bfs", "--graph", "g.el", "--undirected", "--out",
                     "t.gbpt"},
                    d)
                .code == 0);
    CliResult r =
        run_cli({"simulate", "--trace", "t.gbpt", "--sweep", "--out-dir", "sweep"}, d);
    CHECK(r.code == 0);
    for (const char* name :
         {"perfect", "one_bit", "gshare", "local", "loop", "perceptron", "tage", "plbp_modulo",
          "plbp_curr_pc_hash", "plbp_last_n_pc_hash"}) {
        CAPTURE(name);
        CHECK(fs::exists(d / "sweep" / ("t." + std::string(name) + ".csv")));
    }
    std::string combined = slurp(d / "sweep" / "t.sweep.csv");
    CHECK(combined.find("predictor,site,") == 0);
    CHECK(combined.find("perfect,") != std::string::npos);
    CHECK(combined.find("plbp_last_n_pc_hash,TOTAL,") != std::string::npos);
    // Summary lines come out in zoo order regardless of thread scheduling.
    CHECK(r.out.find("perfect:") < r.out.find("one_bit:"));
    CHECK(r.out.find("one_bit:") < r.out.find("gshare:"));
    CHECK(r.out.find("tage:") < r.out.find("plbp_modulo:"));
}

TEST_CASE("cli: critical ranks from a trace or a report, not both") {
    fs::path d = fresh_dir("crit");
    spit(d / "g.el", "0 1\n1 2\n0 2\n");
    REQUIRE(run_cli({"run", "--kernel", "tc", "--graph", "g.el", "--out", "t.gbpt"}, d).code ==
            0);
    CliResult r = run_cli({"critical", "--trace", "t.gbpt"}, d);
    CHECK(r.code == 0);
    CHECK(r.out.find("rank,site,kernel,line_tag,") == 0);
    CHECK(r.out.find("tc_") != std::string::npos);

    REQUIRE(run_cli({"simulate", "--trace", "t.gbpt", "--pred", "kind=gshare", "--out-dir", "."},
                    d)
                .code == 0);
    CliResult r2 = run_cli({"critical", "--report", "t.gshare.csv", "--out", "crit.csv"}, d);
    CHECK(r2.code == 0);
    CHECK(slurp(d / "crit.csv").find("rank,site,") == 0);

    CHECK(run_cli({"critical"}, d).code == 2);
    CHECK(run_cli({"critical", "--trace", "t.gbpt", "--report", "t.gshare.csv"}, d).code == 2);
    CHECK(run_cli({"critical", "--trace", "t.gbpt", "--coverage", "1.5"}, d).code == 2);
}

TEST_CASE("cli: reorder exports a relabeled graph") {
    fs::path d = fresh_dir("reorder");
    spit(d / "g.el", "0 1\n0 2\n0 3\n3 4\n");
    CliResult r = run_cli({"reorder", "--graph", "g.el", "--undirected", "--mode", "degree_sort",
                           "--out", "r.el"},
                          d);
    CHECK(r.code == 0);
    REQUIRE(fs::exists(d / "r.el"));
    // Vertex 0 (degree 3) becomes vertex 0 under degree_sort; the hub keeps
    // its three edges.
    std::string out = slurp(d / "r.el");
    CHECK(out.find("0 ") != std::string::npos);
    CHECK(run_cli({"reorder", "--graph", "g.el", "--mode", "nope", "--out", "x.el"}, d).code ==
          2);
}

TEST_CASE("cli: BRANCHLAB_THREADS is validated") {
    fs::path d = fresh_dir("threads");
    spit(d / "g.el", "0 1\n1 2\n");
    REQUIRE(run_cli({"run", "--kernel", "cc", "--graph", "g.el", "--out", "t.gbpt"}, d).code ==
            0);
    std::ostringstream cmd;
    cmd << "cd '" << d.string() << "' && BRANCHLAB_THREADS=bogus '" << BRANCHLAB_BIN
        << "' simulate --trace t.gbpt --pred kind=gshare >o.txt 2>e.txt";
    int status = std::system(cmd.str().c_str());
    CHECK((WIFEXITED(status) ? WEXITSTATUS(status) : -1) == 2);

    std::ostringstream ok;
    ok << "cd '" << d.string() << "' && BRANCHLAB_THREADS=1 '" << BRANCHLAB_BIN
       << "' simulate --trace t.gbpt --pred kind=gshare >o.txt 2>e.txt";
    status = std::system(ok.str().c_str());
    CHECK((WIFEXITED(status) ? WEXITSTATUS(status) : -1) == 0);
}
