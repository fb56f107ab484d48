#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "measp/classifiers.hpp"
#include "measp/engines.hpp"
#include "measp/error.hpp"
#include "measp/features.hpp"

namespace measp {

// How a grounder's output reaches a solver expecting another ground format.
enum class BridgeMode {
    Canonical,  // in-process conversion of the single grounding
    Reground,   // numeric features from a second grounding; text output converted by an external grounder
};

std::string_view to_string(BridgeMode mode);
BridgeMode parse_bridge_mode(std::string_view text);

// Chooses an engine name for an instance from its features.
using Selector = std::function<std::string(const std::string& instance_id, const FeatureVector& features)>;

struct PipelineConfig {
    std::optional<DecisionList> grounder_model;  // nonground-11
    std::optional<KnnModel> solver_model;        // ground-52
    std::vector<EngineSpec> registry;
    Limits limits;
    BridgeMode bridge_mode = BridgeMode::Canonical;
    // Override the learned models when set (e.g. an oracle selector in evaluations).
    Selector grounder_selector;
    Selector solver_selector;
};

enum class Step { NonGroundFeatures, GrounderSelection, Grounding, GroundFeatures, SolverSelection, Solving };
std::string_view to_string(Step step);

struct TraceStep {
    Step step;
    double seconds = 0;  // measured for feature/selection steps; engine CPU time for grounding/solving
    std::string detail;
};

struct PipelineTrace {
    std::string instance_id;
    std::vector<TraceStep> steps;
    FeatureVector nonground_features;
    FeatureVector ground_features;
    std::string selected_grounder;
    std::string selected_solver;
    std::string ground_feature_source;  // numeric, text or regrounded:<engine>
    std::string bridge;
    std::vector<RunRecord> engine_runs;  // every engine invocation, in order
    double selection_seconds = 0;        // steps i, ii, iv, v
    double engine_seconds = 0;           // CPU seconds of all engine runs
    double bridge_seconds = 0;           // in-process format conversion
};

struct PipelineResult {
    RunRecord answer;
    PipelineTrace trace;
    std::string solver_output;
};

// Failure before the solver could run (grounding, feature extraction, bridging).
class PipelineError : public Error {
public:
    PipelineError(const std::string& message, PipelineTrace trace, std::optional<RunRecord> failed_run = {})
        : Error(message), trace_(std::move(trace)), failed_run_(std::move(failed_run)) {}

    const PipelineTrace& trace() const { return trace_; }
    const std::optional<RunRecord>& failed_run() const { return failed_run_; }

private:
    PipelineTrace trace_;
    std::optional<RunRecord> failed_run_;
};

// Non-ground features, grounder selection, grounding, ground features,
// solver selection, solving. Throws ConfigError for unusable configurations
// and PipelineError when grounding fails.
PipelineResult evaluate(const std::filesystem::path& program, const PipelineConfig& cfg,
                        const std::string& instance_id = {});

struct BridgeResult {
    std::string text;
    std::string description;
    std::vector<RunRecord> runs;  // external conversions
};

// Converts ground output between ground formats; identical formats pass through
// unchanged. Throws Error for constructs the target format cannot express.
BridgeResult bridge_formats(const std::string& ground_output, DataFormat from, DataFormat to,
                            const PipelineConfig& cfg, const std::string& instance_id = "bridge");

// 10 sat, 20 unsat, 124 timeout, 1 otherwise.
int exit_code(RunStatus status);

void write_trace(std::ostream& out, const PipelineResult& result);
void write_trace_csv_header(std::ostream& out);
void write_trace_csv(std::ostream& out, const PipelineResult& result);

}  // namespace measp
