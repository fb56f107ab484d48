#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "measp/classifiers.hpp"
#include "measp/engines.hpp"
#include "measp/features.hpp"

namespace measp {

struct Instance {
    std::string id;
    std::string domain;
    std::filesystem::path path;
};

struct RuntimeTable {
    std::vector<Instance> instances;
    std::vector<std::string> engines;  // registry order; breaks label ties
    std::map<std::pair<std::string, std::string>, RunRecord> records;  // (instance, engine)
    double limit = 600;

    const RunRecord* find(const std::string& instance, const std::string& engine) const;
    // True when every (instance, engine) pair has a record.
    bool complete() const;
};

// Runs every engine on every instance with up to `jobs` concurrent runs.
// Grounders run in ground mode, everything else in solve mode. Pairs already
// present in `resume` are copied, not rerun. Per-run failures become Error records.
RuntimeTable collect(const std::vector<Instance>& instances, const std::vector<EngineSpec>& registry,
                     const Limits& limits, std::size_t jobs = 1, const RuntimeTable* resume = nullptr);

// `# limit=<s>` line, then `instance,domain,engine,status,cpu_seconds`.
void write_runtime_csv(std::ostream& out, const RuntimeTable& table);
// Engines and instances keep their order of first appearance.
RuntimeTable read_runtime_csv(std::istream& in);
RuntimeTable read_runtime_csv(const std::filesystem::path& path);

struct Labeling {
    TrainingSet data;
    std::vector<std::string> instance_ids;      // one per training row
    std::vector<std::string> unsolved;          // solved by no engine, excluded
    std::vector<std::string> missing_features;  // no feature vector given, excluded
};

// Label = fastest solving engine; exact ties go to the earlier engine.
Labeling label_training(const RuntimeTable& table, const std::map<std::string, FeatureVector>& features);

struct SotaEntry {
    std::string instance;
    std::optional<std::string> engine;  // absent when nobody solved it
    double cpu_seconds = 0;             // best time, or the limit when unsolved
};

struct Sota {
    std::vector<SotaEntry> entries;
    std::size_t n_solved = 0;
    std::optional<double> mean_time;  // over solved instances
};

Sota sota(const RuntimeTable& table);
// The virtual best engine as one run per instance, engine name `config`.
std::vector<RunRecord> sota_runs(const RuntimeTable& table, const std::string& config = "sota");
// All records of the table, grouped by engine in table order.
std::vector<RunRecord> table_runs(const RuntimeTable& table);

struct EngineSummary {
    std::string name;
    std::size_t n_solved = 0;
    double total_time = 0;            // solved runs only
    std::optional<double> mean_time;  // absent when n_solved = 0
};

EngineSummary summarize(std::string name, std::size_t n_solved, double total_time);
// One summary per engine name, in order of first appearance.
std::vector<EngineSummary> stats(const std::vector<RunRecord>& runs);
std::vector<EngineSummary> stats(const RuntimeTable& table);
void write_stats(std::ostream& out, const std::vector<EngineSummary>& summaries);

struct CactusPoint {
    std::string config;
    std::size_t k = 0;
    double cpu_seconds = 0;

    bool operator==(const CactusPoint&) const = default;
};

// Per configuration (engine name), the k-th fastest solved run.
std::vector<CactusPoint> cactus(const std::vector<RunRecord>& runs);
void write_cactus_csv(std::ostream& out, const std::vector<CactusPoint>& points);

enum class Algorithm { Knn, Part };
Algorithm parse_algorithm(std::string_view text);

struct CvParams {
    Algorithm algorithm = Algorithm::Knn;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t k = 1;
    std::size_t min_leaf = 2;
};

struct FoldReport {
    std::size_t size = 0;
    std::size_t correct = 0;
    double accuracy = 0;
};

struct CvResult {
    double accuracy = 0;  // pooled over all rows
    std::vector<FoldReport> folds;
    std::vector<std::size_t> fold_of;                                   // per row
    std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (actual, predicted)
};

// Stratified folds: rows are shuffled within each label and dealt round-robin.
// Throws ConfigError unless 2 <= folds <= rows.
std::vector<std::size_t> assign_folds(const TrainingSet& data, std::size_t folds, std::uint64_t seed);
CvResult cross_validate(const TrainingSet& data, const CvParams& params);
void write_cv_report(std::ostream& out, const CvResult& result);

}  // namespace measp
