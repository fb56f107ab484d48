// Stand-in engine that replays a runtime table under real process limits.
//
//   measp-mock --table T --instance I --mode ground|solve [--format F] INPUT

#include <sys/resource.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <vector>

#include "CLI11.hpp"
#include "measp/engines.hpp"
#include "measp/error.hpp"

namespace {

double cpu_used() {
    rusage u{};
    ::getrusage(RUSAGE_SELF, &u);
    return static_cast<double>(u.ru_utime.tv_sec + u.ru_stime.tv_sec) +
           static_cast<double>(u.ru_utime.tv_usec + u.ru_stime.tv_usec) / 1e6;
}

volatile std::uint64_t sink = 0;

// Spins until `seconds` of CPU time are consumed; forever when negative.
void burn(double seconds) {
    while (seconds < 0 || cpu_used() < seconds) {
        for (int i = 0; i < 100000; ++i) sink = sink * 6364136223846793005ull + 1;
    }
}

[[noreturn]] void exhaust_memory() {
    std::vector<std::unique_ptr<char[]>> blocks;
    constexpr std::size_t block = std::size_t{64} << 20;
    try {
        for (int i = 0; i < 4096; ++i) {
            blocks.emplace_back(new char[block]);
            std::memset(blocks.back().get(), 1, block);
        }
    } catch (const std::bad_alloc&) {
        blocks.clear();
    }
    std::fputs("out of memory\n", stderr);
    std::exit(1);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw measp::Error("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Replays a runtime table as an engine"};
    std::string table_path, instance, mode = "solve", format = "ground-numeric", input;
    app.add_option("--table", table_path, "mock table (<instance> <status> <cpu_seconds>)")->required();
    app.add_option("--instance", instance, "instance id")->required();
    app.add_option("--mode", mode, "ground or solve")->check(CLI::IsMember({"ground", "solve"}));
    app.add_option("--format", format, "ground format written in ground mode");
    app.add_option("input", input, "input file")->required();
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(table_path);
        if (!in) throw measp::Error("cannot read table " + table_path);
        const auto table = measp::parse_mock_table(in);
        auto it = table.find(instance);
        if (it == table.end()) throw measp::Error("no entry for instance '" + instance + "'");
        const auto entry = it->second;
        switch (entry.status) {
            case measp::RunStatus::Timeout: burn(-1); break;
            case measp::RunStatus::Memout: exhaust_memory();
            case measp::RunStatus::Error:
                std::cerr << "mock engine failure for " << instance << '\n';
                return 1;
            default: break;
        }
        const std::string program = slurp(input);
        burn(entry.cpu_seconds);
        if (mode == "ground") {
            std::cout << measp::mock_ground_output(program, measp::parse_format(format));
            return 0;
        }
        std::cout << measp::mock_solver_output(entry.status) << std::flush;
        return entry.status == measp::RunStatus::SolvedSat ? 10 : 20;
    } catch (const std::exception& e) {
        std::cerr << "measp-mock: " << e.what() << '\n';
        return 1;
    }
}
