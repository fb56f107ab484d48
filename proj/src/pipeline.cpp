#include "measp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "measp/ground_features.hpp"
#include "measp/ground_program.hpp"
#include "measp/nonground_features.hpp"
#include "measp/nonground_program.hpp"
#include "temp_dir.hpp"

namespace measp {

std::string_view to_string(BridgeMode mode) { return mode == BridgeMode::Canonical ? "canonical" : "reground"; }

BridgeMode parse_bridge_mode(std::string_view text) {
    if (text == "canonical") return BridgeMode::Canonical;
    if (text == "reground") return BridgeMode::Reground;
    throw ConfigError("unknown bridge mode '" + std::string(text) + "' (expected canonical or reground)");
}

std::string_view to_string(Step step) {
    switch (step) {
        case Step::NonGroundFeatures: return "nonground-features";
        case Step::GrounderSelection: return "grounder-selection";
        case Step::Grounding: return "grounding";
        case Step::GroundFeatures: return "ground-features";
        case Step::SolverSelection: return "solver-selection";
        case Step::Solving: return "solving";
    }
    return "solving";
}

int exit_code(RunStatus status) {
    switch (status) {
        case RunStatus::SolvedSat: return 10;
        case RunStatus::SolvedUnsat: return 20;
        case RunStatus::Timeout: return 124;
        default: return 1;
    }
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

const EngineSpec* find_engine(const std::vector<EngineSpec>& registry, const std::string& name) {
    auto it = std::find_if(registry.begin(), registry.end(), [&](const EngineSpec& e) { return e.name == name; });
    return it == registry.end() ? nullptr : &*it;
}

// Numeric grounder used to re-instantiate textual ground output.
const EngineSpec* regrounder(const PipelineConfig& cfg) {
    for (const auto& e : cfg.registry) {
        if (e.can_ground() && e.produces(EngineMode::Ground) == DataFormat::GroundNumeric) return &e;
    }
    return nullptr;
}

GroundProgram parse_ground(const std::string& text, DataFormat format) {
    return format == DataFormat::GroundNumeric ? parse_numeric(text) : parse_text_ground(text);
}

std::string pick(const std::vector<const EngineSpec*>& candidates, const Selector& selector,
                 const std::string& instance_id, const FeatureVector& features, const char* role,
                 const std::function<std::string()>& model) {
    std::string name;
    if (candidates.size() == 1) {
        name = candidates.front()->name;
    } else if (selector) {
        name = selector(instance_id, features);
    } else {
        name = model();
    }
    if (std::none_of(candidates.begin(), candidates.end(), [&](const EngineSpec* e) { return e->name == name; })) {
        throw ConfigError(std::string("selected ") + role + " '" + name + "' is not a " + role + " in the registry");
    }
    return name;
}

}  // namespace

BridgeResult bridge_formats(const std::string& ground_output, DataFormat from, DataFormat to, const PipelineConfig& cfg,
                            const std::string& instance_id) {
    if (!is_ground_format(from) || !is_ground_format(to)) {
        throw Error("bridging needs ground formats, got " + std::string(to_string(from)) + " -> " +
                    std::string(to_string(to)));
    }
    BridgeResult result;
    if (from == to) {
        result.text = ground_output;
        result.description = "identity";
        return result;
    }
    if (to == DataFormat::GroundText) {
        result.text = emit_text_ground(parse_numeric(ground_output));
        result.description = "numeric->text";
        return result;
    }
    if (cfg.bridge_mode == BridgeMode::Canonical) {
        result.text = emit_numeric(parse_text_ground(ground_output));
        result.description = "text->numeric";
        return result;
    }

    const EngineSpec* engine = regrounder(cfg);
    if (!engine) throw ConfigError("reground bridging needs a grounder that writes ground-numeric");
    detail::TempDir dir;
    const auto input = dir.write("ground.lp", ground_output);
    EngineRun run = run_engine(*engine, input, cfg.limits, {instance_id, EngineMode::Ground});
    result.runs.push_back(run.record);
    if (!is_solved(run.record.status)) {
        throw Error("regrounding with '" + engine->name + "' failed (" + std::string(to_string(run.record.status)) +
                    "): " + run.diagnostics);
    }
    result.text = std::move(run.output);
    result.description = "regrounded:" + engine->name;
    return result;
}

PipelineResult evaluate(const std::filesystem::path& program, const PipelineConfig& cfg, const std::string& instance_id) {
    if (cfg.grounder_model && cfg.grounder_model->manifest_id != kNonGroundManifest) {
        throw ConfigError("grounder model must use the nonground-11 features, not " + cfg.grounder_model->manifest_id);
    }
    if (cfg.solver_model && cfg.solver_model->manifest_id != kGroundManifest) {
        throw ConfigError("solver model must use the ground-52 features, not " + cfg.solver_model->manifest_id);
    }
    std::vector<const EngineSpec*> grounders, solvers;
    for (const auto& e : cfg.registry) {
        if (e.can_ground()) grounders.push_back(&e);
        if (e.can_solve()) solvers.push_back(&e);
    }
    if (grounders.empty()) throw ConfigError("the registry has no grounder");
    if (solvers.empty()) throw ConfigError("the registry has no solver");

    PipelineResult result;
    PipelineTrace& trace = result.trace;
    trace.instance_id = instance_id.empty() ? program.stem().string() : instance_id;
    auto fail = [&](const std::string& message, std::optional<RunRecord> run = {}) {
        throw PipelineError(trace.instance_id + ": " + message, trace, std::move(run));
    };
    auto record_run = [&](const RunRecord& r) {
        trace.engine_runs.push_back(r);
        trace.engine_seconds += r.cpu_seconds;
    };

    // (i)
    auto start = Clock::now();
    const std::string source = detail::read_file(program);
    trace.nonground_features = extract_nonground(parse_nonground(source));
    double t = since(start);
    trace.steps.push_back({Step::NonGroundFeatures, t, std::to_string(trace.nonground_features.size()) + " features"});
    trace.selection_seconds += t;

    // (ii)
    start = Clock::now();
    trace.selected_grounder = pick(grounders, cfg.grounder_selector, trace.instance_id, trace.nonground_features,
                                   "grounder", [&] {
                                       if (!cfg.grounder_model) throw ConfigError("no grounder model or selector");
                                       return predict_part(*cfg.grounder_model, trace.nonground_features);
                                   });
    t = since(start);
    trace.steps.push_back({Step::GrounderSelection, t, trace.selected_grounder});
    trace.selection_seconds += t;
    const EngineSpec& grounder = *find_engine(cfg.registry, trace.selected_grounder);

    // (iii)
    EngineRun grounding = run_engine(grounder, program, cfg.limits, {trace.instance_id, EngineMode::Ground});
    record_run(grounding.record);
    trace.steps.push_back({Step::Grounding, grounding.record.cpu_seconds, std::string(to_string(grounding.record.status))});
    if (!is_solved(grounding.record.status)) {
        fail("grounding with '" + grounder.name + "' failed (" + std::string(to_string(grounding.record.status)) +
                 ")" + (grounding.diagnostics.empty() ? "" : ": " + grounding.diagnostics),
             grounding.record);
    }
    const DataFormat native = grounder.produces(EngineMode::Ground);

    // (iv)
    std::optional<BridgeResult> regrounded;
    start = Clock::now();
    double feature_seconds = 0;
    try {
        if (native == DataFormat::GroundText && cfg.bridge_mode == BridgeMode::Reground) {
            regrounded = bridge_formats(grounding.output, native, DataFormat::GroundNumeric, cfg, trace.instance_id);
            for (const auto& r : regrounded->runs) record_run(r);
            // The external regrounding is engine time, not selection overhead.
            const auto measure = Clock::now();
            trace.ground_features = extract_ground(parse_numeric(regrounded->text));
            feature_seconds = since(measure);
            trace.ground_feature_source = regrounded->description;
        } else {
            trace.ground_features = extract_ground(parse_ground(grounding.output, native));
            feature_seconds = since(start);
            trace.ground_feature_source = native == DataFormat::GroundNumeric ? "numeric" : "text";
        }
    } catch (const std::exception& e) {
        fail(std::string("ground output of '") + grounder.name + "' is unusable: " + e.what(), grounding.record);
    }
    trace.steps.push_back({Step::GroundFeatures, feature_seconds, trace.ground_feature_source});
    trace.selection_seconds += feature_seconds;

    // (v)
    start = Clock::now();
    trace.selected_solver = pick(solvers, cfg.solver_selector, trace.instance_id, trace.ground_features, "solver", [&] {
        if (!cfg.solver_model) throw ConfigError("no solver model or selector");
        return predict_knn(*cfg.solver_model, trace.ground_features);
    });
    t = since(start);
    trace.steps.push_back({Step::SolverSelection, t, trace.selected_solver});
    trace.selection_seconds += t;
    const EngineSpec& solver = *find_engine(cfg.registry, trace.selected_solver);

    // (vi)
    std::string solver_input;
    const DataFormat wanted = solver.consumes(EngineMode::Solve);
    if (&solver == &grounder) {
        trace.bridge = "combined";
        solver_input = std::move(grounding.output);
    } else if (regrounded && wanted == DataFormat::GroundNumeric) {
        trace.bridge = regrounded->description;
        solver_input = std::move(regrounded->text);
    } else {
        start = Clock::now();
        try {
            BridgeResult bridged = bridge_formats(grounding.output, native, wanted, cfg, trace.instance_id);
            for (const auto& r : bridged.runs) record_run(r);
            trace.bridge = bridged.description;
            solver_input = std::move(bridged.text);
        } catch (const std::exception& e) {
            fail(std::string("cannot feed '") + grounder.name + "' output to '" + solver.name + "': " + e.what());
        }
        trace.bridge_seconds = since(start);
    }

    detail::TempDir dir;
    const auto ground_file = dir.write(wanted == DataFormat::GroundNumeric ? "ground.sm" : "ground.txt",
                                       solver_input);
    EngineRun solving = run_engine(solver, ground_file, cfg.limits, {trace.instance_id, EngineMode::Solve});
    record_run(solving.record);
    trace.steps.push_back({Step::Solving, solving.record.cpu_seconds, std::string(to_string(solving.record.status))});
    result.answer = solving.record;
    result.solver_output = std::move(solving.output);
    return result;
}

void write_trace(std::ostream& out, const PipelineResult& result) {
    const auto& tr = result.trace;
    out << "instance: " << tr.instance_id << '\n';
    for (const auto& s : tr.steps) {
        out << to_string(s.step) << ": " << format_number(s.seconds) << " s";
        if (!s.detail.empty()) out << " (" << s.detail << ')';
        out << '\n';
    }
    out << "grounder: " << tr.selected_grounder << '\n';
    out << "solver: " << tr.selected_solver << '\n';
    out << "ground-features-source: " << tr.ground_feature_source << '\n';
    out << "bridge: " << tr.bridge << '\n';
    for (const auto& r : tr.engine_runs) {
        out << "run: " << r.engine_name << ' ' << to_string(r.status) << ' ' << format_number(r.cpu_seconds) << '\n';
    }
    out << "selection-seconds: " << format_number(tr.selection_seconds) << '\n';
    out << "engine-seconds: " << format_number(tr.engine_seconds) << '\n';
    out << "bridge-seconds: " << format_number(tr.bridge_seconds) << '\n';
    out << "status: " << to_string(result.answer.status) << '\n';
    if (result.answer.answer_digest) out << "answer-digest: " << *result.answer.answer_digest << '\n';
}

void write_trace_csv_header(std::ostream& out) {
    out << "instance,grounder,solver,status,exit_code,solver_cpu_seconds,engine_seconds,selection_seconds,"
           "bridge_seconds,ground_feature_source,bridge\n";
}

void write_trace_csv(std::ostream& out, const PipelineResult& result) {
    const auto& tr = result.trace;
    out << tr.instance_id << ',' << tr.selected_grounder << ',' << tr.selected_solver << ','
        << to_string(result.answer.status) << ',' << exit_code(result.answer.status) << ','
        << format_number(result.answer.cpu_seconds) << ',' << format_number(tr.engine_seconds) << ','
        << format_number(tr.selection_seconds) << ',' << format_number(tr.bridge_seconds) << ','
        << tr.ground_feature_source << ',' << tr.bridge << '\n';
}

}  // namespace measp
