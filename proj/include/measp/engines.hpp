#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace measp {

enum class EngineRole { Grounder, Solver, Both };

enum class DataFormat { NonGroundText, GroundNumeric, GroundText, AnswerSets };

enum class RunStatus { SolvedSat, SolvedUnsat, Timeout, Memout, Error };

// Mode of one invocation; `both` engines substitute it for `{mode}`.
enum class EngineMode { Ground, Solve };

std::string_view to_string(EngineRole role);
std::string_view to_string(DataFormat format);
std::string_view to_string(RunStatus status);
std::string_view to_string(EngineMode mode);
EngineRole parse_role(std::string_view text);
DataFormat parse_format(std::string_view text);
RunStatus parse_status(std::string_view text);

inline bool is_solved(RunStatus s) { return s == RunStatus::SolvedSat || s == RunStatus::SolvedUnsat; }
inline bool is_ground_format(DataFormat f) { return f == DataFormat::GroundNumeric || f == DataFormat::GroundText; }

struct Limits {
    double cpu_seconds = 600;
    std::uint64_t memory_bytes = std::uint64_t{2} << 30;
};

struct MockEntry {
    RunStatus status = RunStatus::SolvedSat;
    double cpu_seconds = 0;

    bool operator==(const MockEntry&) const = default;
};

using MockTable = std::map<std::string, MockEntry, std::less<>>;

struct EngineSpec {
    std::string name;
    EngineRole role = EngineRole::Solver;
    // argv template; placeholders {input}, {output}, {instance}, {mode}.
    std::vector<std::string> command;
    DataFormat input_format = DataFormat::GroundNumeric;
    // Solvers: AnswerSets. Grounders and `both` engines: the ground format they emit.
    DataFormat output_format = DataFormat::AnswerSets;
    // Mock engines under a simulated clock answer from this table without a subprocess.
    std::shared_ptr<const MockTable> simulated;

    bool can_ground() const { return role != EngineRole::Solver; }
    bool can_solve() const { return role != EngineRole::Grounder; }
    // Format read when run in `mode`.
    DataFormat consumes(EngineMode mode) const;
    // Format written when run in `mode`.
    DataFormat produces(EngineMode mode) const;
};

struct RunRecord {
    std::string instance_id;
    std::string engine_name;
    RunStatus status = RunStatus::Error;
    double cpu_seconds = 0;
    double wall_seconds = 0;
    std::optional<std::string> answer_digest;

    bool operator==(const RunRecord&) const = default;
};

struct EngineRun {
    RunRecord record;
    std::string output;       // stdout, or the {output} file when the template names one
    std::string diagnostics;  // stderr and runner notes
};

struct RunOptions {
    std::string instance_id;  // defaults to the input file stem
    EngineMode mode = EngineMode::Solve;
};

// Throws ConfigError when the platform cannot enforce `limits`.
void check_limit_support(const Limits& limits);

// Runs `spec` on `input` under CPU-time and address-space limits, with a
// wall-clock guard at twice the CPU limit. Engine failures are reported in the
// record, never thrown.
EngineRun run_engine(const EngineSpec& spec, const std::filesystem::path& input, const Limits& limits,
                     const RunOptions& options = {});

// Status from exit information and output tokens. Precedence: memout, timeout, output.
struct ProcessOutcome {
    bool exited = false;
    int exit_code = 0;
    int signal = 0;
    bool killed_by_watchdog = false;
    double cpu_seconds = 0;
    std::uint64_t max_rss_bytes = 0;
};
RunStatus classify_run(const ProcessOutcome& outcome, const std::string& output, const std::string& diagnostics,
                       const Limits& limits, EngineMode mode);

// First answer set in competition (`Answer: n` / `{a, b}`) output, atoms sorted.
std::optional<std::vector<std::string>> first_answer_set(std::string_view output);
// FNV-1a 64 of the sorted atoms, as 16 hex digits.
std::string answer_digest(const std::vector<std::string>& atoms);

// `engine <name> <grounder|solver|both> <input-fmt> <output-fmt> <argv...>`, `#` comments.
std::vector<EngineSpec> parse_registry(std::istream& in);
std::vector<EngineSpec> registry_load(const std::filesystem::path& path);

// Mock engines ---------------------------------------------------------------

struct MockOptions {
    EngineRole role = EngineRole::Solver;
    DataFormat input_format = DataFormat::GroundNumeric;
    DataFormat output_format = DataFormat::AnswerSets;
    bool simulated_clock = true;
    // Real-clock mode: the measp-mock binary and where to write its table.
    std::filesystem::path executable;
    std::filesystem::path table_path;
};

EngineSpec mock_engine(std::string name, MockTable table, const MockOptions& options = {});

// `<instance> <status> <cpu_seconds>` lines, `#` comments.
MockTable parse_mock_table(std::istream& in);
void write_mock_table(const MockTable& table, std::ostream& out);

// What a mock engine prints. Grounding renders the non-ground program
// propositionally (atoms kept verbatim, comparisons and queries dropped) in
// `format`; solving prints a competition-style verdict. Throws on unparsable input.
std::string mock_ground_output(std::string_view program_text, DataFormat format);
std::string mock_solver_output(RunStatus status);

}  // namespace measp
