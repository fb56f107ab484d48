#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "measp/engines.hpp"
#include "measp/error.hpp"
#include "measp/features.hpp"
#include "measp/ground_program.hpp"
#include "measp/nonground_program.hpp"

namespace measp {

EngineSpec mock_engine(std::string name, MockTable table, const MockOptions& options) {
    EngineSpec spec;
    spec.name = std::move(name);
    spec.role = options.role;
    spec.input_format = options.input_format;
    spec.output_format = options.output_format;
    if (options.simulated_clock) {
        spec.simulated = std::make_shared<const MockTable>(std::move(table));
        spec.command = {"<simulated>"};
        return spec;
    }
    if (options.executable.empty() || options.table_path.empty()) {
        throw ConfigError("real-clock mock engine needs the mock executable and a table path");
    }
    std::ofstream out(options.table_path);
    if (!out) throw Error("cannot write mock table " + options.table_path.string());
    write_mock_table(table, out);
    spec.command = {options.executable.string(), "--table", options.table_path.string(),
                    "--instance", "{instance}", "--mode", "{mode}",
                    "--format", std::string(to_string(spec.produces(EngineMode::Ground))), "{input}"};
    return spec;
}

MockTable parse_mock_table(std::istream& in) {
    MockTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream words(line);
        std::string id, status, cpu, extra;
        if (!(words >> id) || id.front() == '#') continue;
        if (!(words >> status >> cpu) || (words >> extra)) {
            throw ParseError("expected '<instance> <status> <cpu_seconds>'", line_no);
        }
        MockEntry entry;
        try {
            entry.status = parse_status(status);
            std::size_t used = 0;
            entry.cpu_seconds = std::stod(cpu, &used);
            if (used != cpu.size() || entry.cpu_seconds < 0) throw Error("bad cpu seconds '" + cpu + "'");
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        } catch (const std::exception&) {
            throw ParseError("bad cpu seconds '" + cpu + "'", line_no);
        }
        if (!table.emplace(id, entry).second) throw ParseError("duplicate instance '" + id + "'", line_no);
    }
    return table;
}

void write_mock_table(const MockTable& table, std::ostream& out) {
    for (const auto& [id, entry] : table) {
        out << id << ' ' << to_string(entry.status) << ' ' << format_number(entry.cpu_seconds) << '\n';
    }
}

std::string mock_ground_output(std::string_view program_text, DataFormat format) {
    const NonGroundProgram program = parse_nonground(program_text);
    std::ostringstream text;
    for (const auto& rule : program.rules) {
        if (rule.is_query) continue;
        if (rule.head.empty() && rule.pos_body.empty() && rule.neg_body.empty()) continue;
        for (std::size_t i = 0; i < rule.head.size(); ++i) text << (i ? " | " : "") << rule.head[i].text;
        bool first = true;
        auto literal = [&](const std::string& lit) {
            text << (first ? (rule.head.empty() ? ":- " : " :- ") : ", ") << lit;
            first = false;
        };
        for (const auto& a : rule.pos_body) literal(a.text);
        for (const auto& a : rule.neg_body) literal("not " + a.text);
        text << ".\n";
    }
    switch (format) {
        case DataFormat::GroundText: return text.str();
        case DataFormat::GroundNumeric: return emit_numeric(parse_text_ground(text.str()));
        default: throw Error("mock grounder cannot emit " + std::string(to_string(format)));
    }
}

std::string mock_solver_output(RunStatus status) {
    switch (status) {
        case RunStatus::SolvedSat: return "Answer: 1\n\nSATISFIABLE\n";
        case RunStatus::SolvedUnsat: return "UNSATISFIABLE\n";
        default: return {};
    }
}

}  // namespace measp
