#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the command-line tool: exit codes, file outputs,
// determinism. GRAPHOPT_CLI_PATH is injected by the build.

namespace {

std::string tmpdir;

struct TmpDirFixture {
    TmpDirFixture() {
        if (tmpdir.empty()) {
            char templ[] = "/tmp/graphopt_cli_XXXXXX";
            const char *made = mkdtemp(templ);
            REQUIRE(made != nullptr);
            tmpdir = made;
        }
    }
};

int run(const std::string &args) {
    std::string cmd = std::string(GRAPHOPT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string path(const std::string &name) { return tmpdir + "/" + name; }

} // namespace

TEST_CASE_FIXTURE(TmpDirFixture, "gen outputs are deterministic files") {
    CHECK(run("gen layered 1000 16 2 7 -o " + path("a.el")) == 0);
    CHECK(run("gen layered 1000 16 2 7 -o " + path("b.el")) == 0);
    CHECK(slurp(path("a.el")) == slurp(path("b.el")));

    CHECK(run("gen chain 5 -o " + path("chain.el")) == 0);
    std::string chain = slurp(path("chain.el"));
    CHECK(chain.find("p dag 5 4") == 0);

    CHECK(run("gen band 100 3 -o " + path("band.mtx")) == 0);
    CHECK(slurp(path("band.mtx")).find("%%MatrixMarket") == 0);
}

TEST_CASE_FIXTURE(TmpDirFixture, "partition then run with check passes") {
    REQUIRE(run("gen band 200 4 -o " + path("sys.mtx")) == 0);
    CHECK(run("partition --format mtx --threads 4 -o " + path("sys.sched") + " " +
              path("sys.mtx")) == 0);
    CHECK(run("run sptrsv --matrix " + path("sys.mtx") + " --schedule " + path("sys.sched") +
              " --threads 4 --reps 3 --check") == 0);
}

TEST_CASE_FIXTURE(TmpDirFixture, "partition is byte-deterministic") {
    REQUIRE(run("gen layered 2000 16 2 7 -o " + path("g.el")) == 0);
    CHECK(run("partition --format edgelist --threads 4 --seed 3 -o " + path("s1.sched") + " " +
              path("g.el")) == 0);
    CHECK(run("partition --format edgelist --threads 4 --seed 3 -o " + path("s2.sched") + " " +
              path("g.el")) == 0);
    CHECK(slurp(path("s1.sched")) == slurp(path("s2.sched")));
}

TEST_CASE_FIXTURE(TmpDirFixture, "usage errors exit with 64") {
    CHECK(run("partition --format mtx --threads 0 -o /dev/null /dev/null") == 64);
    CHECK(run("partition --format nonsense --threads 2 -o /dev/null /dev/null") == 64);
    CHECK(run("frobnicate") == 64);
}

TEST_CASE_FIXTURE(TmpDirFixture, "parse errors exit with 1") {
    std::ofstream(path("broken.mtx")) << "this is not a matrix\n";
    CHECK(run("partition --format mtx --threads 2 -o " + path("x.sched") + " " +
              path("broken.mtx")) == 1);
    CHECK(run("partition --format mtx --threads 2 -o " + path("x.sched") + " " +
              path("no_such_file.mtx")) == 1);
}

TEST_CASE_FIXTURE(TmpDirFixture, "tampered schedules exit with 4 or fail validation") {
    REQUIRE(run("gen band 50 2 -o " + path("m.mtx")) == 0);
    REQUIRE(run("gen band 50 3 -o " + path("m2.mtx")) == 0);
    REQUIRE(run("partition --format mtx --threads 2 -o " + path("m.sched") + " " + path("m.mtx")) ==
            0);
    // schedule belongs to m.mtx, not m2.mtx
    CHECK(run("run sptrsv --matrix " + path("m2.mtx") + " --schedule " + path("m.sched") +
              " --reps 1") == 4);
}

TEST_CASE_FIXTURE(TmpDirFixture, "circuit pipeline runs end to end") {
    std::ofstream(path("c.ac")) << "l 0 0\nl 1 1\np 2 0 1\ns 3 2 2\n";
    CHECK(run("partition --format circuit --threads 2 -o " + path("c.sched") + " " +
              path("c.ac")) == 0);
    CHECK(run("run circuit --circuit " + path("c.ac") + " --schedule " + path("c.sched") +
              " --input ones --reps 2 --check") == 0);
}

TEST_CASE_FIXTURE(TmpDirFixture, "compare prints both methods") {
    REQUIRE(run("gen layered 800 16 2 5 -o " + path("cmp.el")) == 0);
    std::string cmd = std::string(GRAPHOPT_CLI_PATH) + " compare --format edgelist --threads 2" +
                      " --reps 2 --csv " + path("cmp.el") + " > " + path("cmp.csv") + " 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::string csv = slurp(path("cmp.csv"));
    CHECK(csv.find("superlayer,2,") != std::string::npos);
    CHECK(csv.find("layerwise,2,") != std::string::npos);
}
