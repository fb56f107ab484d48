#include <algorithm>
#include <cmath>
#include <map>

#include "measp/classifiers.hpp"
#include "measp/error.hpp"

namespace measp {

void TrainingSet::validate() const {
    if (rows.empty()) throw ConfigError("empty training set");
    const auto& first = rows.front().features;
    for (const auto& row : rows) {
        if (row.features.manifest_id != first.manifest_id || row.features.size() != first.size()) {
            throw ConfigError("training rows mix feature manifests");
        }
        for (double v : row.features.values) {
            if (!std::isfinite(v)) throw ConfigError("non-finite feature value in training set");
        }
    }
}

std::vector<std::string> TrainingSet::label_order() const {
    std::vector<std::string> order = labels;
    for (const auto& row : rows) {
        if (std::find(order.begin(), order.end(), row.label) == order.end()) order.push_back(row.label);
    }
    return order;
}

KnnModel train_knn(const TrainingSet& data, std::size_t k) {
    data.validate();
    if (k == 0 || k > data.rows.size()) {
        throw ConfigError("k must be in [1, " + std::to_string(data.rows.size()) + "], got " + std::to_string(k));
    }
    const auto& first = data.rows.front().features;
    const std::size_t dim = first.size();

    KnnModel model;
    model.k = k;
    model.manifest_id = first.manifest_id;
    model.feature_names = first.names;
    model.min = first.values;
    model.max = first.values;
    for (const auto& row : data.rows) {
        for (std::size_t f = 0; f < dim; ++f) {
            model.min[f] = std::min(model.min[f], row.features.values[f]);
            model.max[f] = std::max(model.max[f], row.features.values[f]);
        }
    }
    for (const auto& row : data.rows) {
        model.exemplars.push_back(normalize(model, row.features));
        model.exemplar_labels.push_back(row.label);
    }
    model.label_priority = data.label_order();
    return model;
}

std::vector<double> normalize(const KnnModel& model, const FeatureVector& x) {
    if (x.manifest_id != model.manifest_id || x.size() != model.min.size()) {
        throw ModelError("feature manifest mismatch: model expects " + model.manifest_id + " (" +
                         std::to_string(model.min.size()) + " values), got " + x.manifest_id + " (" +
                         std::to_string(x.size()) + " values)");
    }
    std::vector<double> out(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
        const double range = model.max[f] - model.min[f];
        out[f] = range > 0 ? std::clamp((x.values[f] - model.min[f]) / range, 0.0, 1.0) : 0.0;
    }
    return out;
}

std::string predict_knn(const KnnModel& model, const FeatureVector& x) {
    const std::vector<double> q = normalize(model, x);
    const std::size_t n = model.exemplars.size();
    if (n == 0 || model.k == 0 || model.k > n) throw ModelError("kNN model is empty or k is out of range");

    // Squared distances preserve the order of Euclidean distances.
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0;
        const auto& e = model.exemplars[i];
        for (std::size_t f = 0; f < q.size(); ++f) {
            const double diff = e[f] - q[f];
            d += diff * diff;
        }
        dist[i] = {d, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());

    std::map<std::string, std::size_t> votes;
    for (std::size_t i = 0; i < model.k; ++i) ++votes[model.exemplar_labels[dist[i].second]];

    auto rank = [&](const std::string& label) {
        auto it = std::find(model.label_priority.begin(), model.label_priority.end(), label);
        return static_cast<std::size_t>(it - model.label_priority.begin());
    };
    const std::string* best = nullptr;
    std::size_t best_votes = 0;
    for (const auto& [label, count] : votes) {
        if (best == nullptr || count > best_votes || (count == best_votes && rank(label) < rank(*best))) {
            best = &label;
            best_votes = count;
        }
    }
    return *best;
}

}  // namespace measp
