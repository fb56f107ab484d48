#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "measp/features.hpp"

namespace measp {

struct TrainingRow {
    FeatureVector features;
    std::string label;
};

struct TrainingSet {
    std::vector<TrainingRow> rows;
    // Tie-break priority (e.g. registry order). Labels missing here are appended
    // in order of first appearance.
    std::vector<std::string> labels;

    // Throws ConfigError if empty or rows disagree on manifest or length.
    void validate() const;
    std::vector<std::string> label_order() const;
};

struct KnnModel {
    std::size_t k = 1;
    std::string manifest_id;
    std::vector<std::string> feature_names;
    std::vector<double> min;
    std::vector<double> max;
    std::vector<std::vector<double>> exemplars;  // normalized
    std::vector<std::string> exemplar_labels;
    std::vector<std::string> label_priority;

    bool operator==(const KnnModel&) const = default;
};

KnnModel train_knn(const TrainingSet& data, std::size_t k = 1);

// Min-max normalization with the model's parameters, clamped to [0,1];
// constant features map to 0.
std::vector<double> normalize(const KnnModel& model, const FeatureVector& x);

std::string predict_knn(const KnnModel& model, const FeatureVector& x);

struct Condition {
    std::size_t feature = 0;
    std::string name;
    bool less_equal = true;  // `name <= threshold`, else `name > threshold`
    double threshold = 0;

    bool holds(const std::vector<double>& values) const {
        return less_equal ? values[feature] <= threshold : values[feature] > threshold;
    }
    bool operator==(const Condition&) const = default;
};

struct DecisionRule {
    std::vector<Condition> conditions;
    std::string label;
    std::size_t coverage = 0;

    bool matches(const std::vector<double>& values) const;
    bool operator==(const DecisionRule&) const = default;
};

struct DecisionList {
    std::string manifest_id;
    std::vector<std::string> feature_names;
    std::vector<DecisionRule> rules;
    std::string default_label;

    bool operator==(const DecisionList&) const = default;
};

// Separate-and-conquer rule induction from partial decision trees (PART without
// error-based pruning). Binary splits `f <= t` at midpoints, chosen by gain ratio.
DecisionList train_part(const TrainingSet& data, std::size_t min_leaf = 2);

std::string predict_part(const DecisionList& model, const FeatureVector& x);

using InductiveModel = std::variant<KnnModel, DecisionList>;

std::string predict(const InductiveModel& model, const FeatureVector& x);
const std::string& manifest_of(const InductiveModel& model);

inline constexpr int kModelFormatVersion = 1;

void save_model(const InductiveModel& model, std::ostream& out);
void save_model(const InductiveModel& model, const std::filesystem::path& path);
// Throws VersionError for other format versions, ModelError for corrupt files.
InductiveModel load_model(std::istream& in);
InductiveModel load_model(const std::filesystem::path& path);

}  // namespace measp
