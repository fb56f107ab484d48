#include <algorithm>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "measp/engines.hpp"
#include "measp/error.hpp"

namespace measp {

std::string_view to_string(EngineRole role) {
    switch (role) {
        case EngineRole::Grounder: return "grounder";
        case EngineRole::Solver: return "solver";
        case EngineRole::Both: return "both";
    }
    return "solver";
}

std::string_view to_string(DataFormat format) {
    switch (format) {
        case DataFormat::NonGroundText: return "nonground-text";
        case DataFormat::GroundNumeric: return "ground-numeric";
        case DataFormat::GroundText: return "ground-text";
        case DataFormat::AnswerSets: return "answer-sets";
    }
    return "answer-sets";
}

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::SolvedSat: return "solved-sat";
        case RunStatus::SolvedUnsat: return "solved-unsat";
        case RunStatus::Timeout: return "timeout";
        case RunStatus::Memout: return "memout";
        case RunStatus::Error: return "error";
    }
    return "error";
}

std::string_view to_string(EngineMode mode) { return mode == EngineMode::Ground ? "ground" : "solve"; }

EngineRole parse_role(std::string_view text) {
    for (auto r : {EngineRole::Grounder, EngineRole::Solver, EngineRole::Both}) {
        if (to_string(r) == text) return r;
    }
    throw Error("unknown engine role '" + std::string(text) + "'");
}

DataFormat parse_format(std::string_view text) {
    for (auto f : {DataFormat::NonGroundText, DataFormat::GroundNumeric, DataFormat::GroundText, DataFormat::AnswerSets}) {
        if (to_string(f) == text) return f;
    }
    throw Error("unknown data format '" + std::string(text) + "'");
}

RunStatus parse_status(std::string_view text) {
    for (auto s : {RunStatus::SolvedSat, RunStatus::SolvedUnsat, RunStatus::Timeout, RunStatus::Memout, RunStatus::Error}) {
        if (to_string(s) == text) return s;
    }
    throw Error("unknown run status '" + std::string(text) + "'");
}

DataFormat EngineSpec::consumes(EngineMode mode) const {
    if (role == EngineRole::Both && mode == EngineMode::Solve) return output_format;
    return input_format;
}

DataFormat EngineSpec::produces(EngineMode mode) const {
    if (role == EngineRole::Both && mode == EngineMode::Solve) return DataFormat::AnswerSets;
    return output_format;
}

namespace {

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        std::size_t lead = line.find_first_not_of(" \t");
        out.push_back(lead == std::string::npos ? std::string() : line.substr(lead));
        start = end + 1;
    }
    return out;
}

bool contains_any(const std::string& haystack, std::initializer_list<std::string_view> needles) {
    return std::any_of(needles.begin(), needles.end(),
                       [&](std::string_view n) { return haystack.find(n) != std::string::npos; });
}

}  // namespace

std::optional<std::vector<std::string>> first_answer_set(std::string_view output) {
    const auto lines = lines_of(output);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        std::string atoms_text;
        if (line.rfind("Answer:", 0) == 0) {
            atoms_text = i + 1 < lines.size() ? lines[i + 1] : std::string();
        } else if (!line.empty() && line.front() == '{' && line.back() == '}') {
            atoms_text = line.substr(1, line.size() - 2);
            std::replace(atoms_text.begin(), atoms_text.end(), ',', ' ');
        } else {
            continue;
        }
        std::istringstream in(atoms_text);
        std::vector<std::string> atoms;
        std::string a;
        while (in >> a) atoms.push_back(a);
        std::sort(atoms.begin(), atoms.end());
        return atoms;
    }
    return std::nullopt;
}

std::string answer_digest(const std::vector<std::string>& atoms) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    };
    for (const auto& a : atoms) {
        for (char c : a) mix(static_cast<unsigned char>(c));
        mix(0);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunStatus classify_run(const ProcessOutcome& outcome, const std::string& output, const std::string& diagnostics,
                       const Limits& limits, EngineMode mode) {
    const bool clean_exit = outcome.exited && (outcome.exit_code == 0 || outcome.exit_code == 10 || outcome.exit_code == 20);
    const bool memory_message = contains_any(diagnostics, {"bad_alloc", "out of memory", "Out of memory",
                                                           "Cannot allocate memory", "MEMOUT", "Memory limit"});
    const bool near_memory_limit =
        limits.memory_bytes > 0 && outcome.max_rss_bytes >= limits.memory_bytes / 100 * 95;
    if (!clean_exit && (memory_message || near_memory_limit)) return RunStatus::Memout;

#ifdef SIGXCPU
    const bool cpu_signal = !outcome.exited && outcome.signal == SIGXCPU;
#else
    const bool cpu_signal = false;
#endif
    if (outcome.killed_by_watchdog || cpu_signal || outcome.cpu_seconds >= limits.cpu_seconds) return RunStatus::Timeout;

    if (mode == EngineMode::Ground) return outcome.exited && outcome.exit_code == 0 ? RunStatus::SolvedSat : RunStatus::Error;

    if (outcome.exited) {
        for (const auto& line : lines_of(output)) {
            if (line == "UNSATISFIABLE" || line == "INCONSISTENT") return RunStatus::SolvedUnsat;
            if (line == "SATISFIABLE" || line == "OPTIMUM FOUND" || line.rfind("Answer:", 0) == 0 ||
                (!line.empty() && line.front() == '{' && line.back() == '}')) {
                return RunStatus::SolvedSat;
            }
        }
        if (outcome.exit_code == 10) return RunStatus::SolvedSat;
        if (outcome.exit_code == 20) return RunStatus::SolvedUnsat;
    }
    return RunStatus::Error;
}

std::vector<EngineSpec> parse_registry(std::istream& in) {
    std::vector<EngineSpec> specs;
    std::set<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream words(line);
        std::vector<std::string> w;
        std::string word;
        while (words >> word) w.push_back(word);
        if (w.empty() || w.front().front() == '#') continue;
        if (w.front() != "engine") throw ParseError("expected 'engine', got '" + w.front() + "'", line_no, 1);
        if (w.size() < 6) throw ParseError("engine line needs name, role, input and output formats and a command", line_no);
        EngineSpec spec;
        spec.name = w[1];
        try {
            spec.role = parse_role(w[2]);
            spec.input_format = parse_format(w[3]);
            spec.output_format = parse_format(w[4]);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
        spec.command.assign(w.begin() + 5, w.end());

        const bool ok = spec.role == EngineRole::Solver
                            ? is_ground_format(spec.input_format) && spec.output_format == DataFormat::AnswerSets
                            : spec.input_format == DataFormat::NonGroundText && is_ground_format(spec.output_format);
        if (!ok) {
            throw ParseError("engine '" + spec.name + "': " + std::string(to_string(spec.role)) + " cannot read " +
                                 std::string(to_string(spec.input_format)) + " and write " +
                                 std::string(to_string(spec.output_format)),
                             line_no);
        }
        if (!names.insert(spec.name).second) throw ParseError("duplicate engine name '" + spec.name + "'", line_no);
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::vector<EngineSpec> registry_load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open engine registry " + path.string());
    return parse_registry(in);
}

}  // namespace measp
