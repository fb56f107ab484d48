#include <sys/wait.h>

#include <cstdlib>

#include "doctest.h"
#include "measp/harness.hpp"
#include "temp_dir.hpp"

using namespace measp;
using detail::TempDir;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

// Runs the CLI with `args`, stdout captured, stderr discarded.
Result run(const TempDir& dir, const std::string& args) {
    const auto out = dir.path() / "stdout";
    const std::string cmd = std::string("'") + MEASP_CLI_PATH + "' " + args + " > '" + out.string() + "' 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, detail::read_file(out)};
}

}  // namespace

TEST_CASE("command line") {
    TempDir dir;
    const auto d = dir.path().string();
    dir.write("t1", "p1 solved-sat 0\np2 solved-sat 0\n");
    dir.write("t2", "p1 solved-unsat 0.05\np2 timeout 0\n");
    dir.write("registry",
              "# mock portfolio\n"
              "engine g grounder nonground-text ground-numeric " MEASP_MOCK_PATH
              " --table " + d + "/t1 --instance {instance} --mode {mode} --format ground-numeric {input}\n"
              "engine s solver ground-numeric answer-sets " MEASP_MOCK_PATH
              " --table " + d + "/t2 --instance {instance} --mode {mode} --format ground-numeric {input}\n");
    std::filesystem::create_directories(dir.path() / "dom");
    dir.write("dom/p1.lp", "a.\nb :- a, not c.\n");
    dir.write("dom/p2.lp", "x | y.\n");
    dir.write("ground.txt", "a.\nb :- a.\n");

    SUBCASE("features") {
        const auto g = run(dir, "extract-ground " + d + "/ground.txt");
        CHECK(g.code == 0);
        CHECK(g.out.rfind("n_rules 2\n", 0) == 0);
        const auto n = run(dir, "extract-nonground --csv " + d + "/dom/p1.lp " + d + "/dom/p2.lp");
        CHECK(n.code == 0);
        CHECK(n.out.rfind("instance_id,n_disj_rules,", 0) == 0);
        CHECK(std::count(n.out.begin(), n.out.end(), '\n') == 3);
    }
    SUBCASE("solve maps the answer to the exit code") {
        const auto r = run(dir, "--engines " + d + "/registry --timeout 1 solve --trace none " + d + "/dom/p1.lp");
        CHECK(r.code == 20);
        CHECK(r.out == "UNSATISFIABLE\n");
        CHECK(run(dir, "--engines " + d + "/registry --timeout 1 solve " + d + "/dom/p2.lp").code == 124);
        CHECK(run(dir, "--engines " + d + "/missing solve " + d + "/dom/p1.lp").code == 1);
    }
    SUBCASE("bench, stats and cactus") {
        const auto b = run(dir, "--engines " + d + "/registry --timeout 1 --jobs 2 bench --out " + d + "/rt.csv " + d +
                                    "/dom/p1.lp " + d + "/dom/p2.lp");
        CHECK(b.code == 0);
        const auto table = read_runtime_csv(dir.path() / "rt.csv");
        CHECK(table.records.size() == 4);
        CHECK(table.limit == 1);
        CHECK(table.instances[0].domain == "dom");
        CHECK(table.find("p2", "s")->status == RunStatus::Timeout);

        const auto s = run(dir, "stats --sota " + d + "/rt.csv");
        CHECK(s.code == 0);
        CHECK(s.out.rfind("engine,n_solved,total_time,mean_time_solved\n", 0) == 0);
        CHECK(s.out.find("\nsota,2,") != std::string::npos);
        const auto c = run(dir, "cactus " + d + "/rt.csv");
        CHECK(c.out.rfind("config,k,cpu_seconds\n", 0) == 0);
    }
    SUBCASE("bad usage") {
        CHECK(run(dir, "").code != 0);
        CHECK(run(dir, "frobnicate").code != 0);
        CHECK(run(dir, "stats /nonexistent.csv").code != 0);
    }
}
