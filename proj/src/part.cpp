#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "measp/classifiers.hpp"
#include "measp/error.hpp"

namespace measp {

bool DecisionRule::matches(const std::vector<double>& values) const {
    return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.holds(values); });
}

namespace {

constexpr double kGainEpsilon = 1e-12;

double entropy(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0;
    double h = 0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

struct Split {
    std::size_t feature;
    double threshold;
    double gain_ratio;
};

struct Leaf {
    std::vector<Condition> path;
    std::vector<std::size_t> rows;
    std::size_t label;
};

class PartialTreeBuilder {
public:
    PartialTreeBuilder(const std::vector<std::vector<double>>& x, const std::vector<std::size_t>& y,
                       std::size_t n_labels, const std::vector<std::string>& names, std::size_t min_leaf)
        : x_(x), y_(y), n_labels_(n_labels), names_(names), min_leaf_(min_leaf) {}

    // Expands the tree rooted at `rows`; returns the leaves in discovery order.
    std::vector<Leaf> build(const std::vector<std::size_t>& rows) {
        leaves_.clear();
        expand(rows, {});
        return std::move(leaves_);
    }

    std::vector<std::size_t> class_counts(const std::vector<std::size_t>& rows) const {
        std::vector<std::size_t> counts(n_labels_, 0);
        for (std::size_t r : rows) ++counts[y_[r]];
        return counts;
    }

    // Largest count; ties go to the earlier label in priority order.
    static std::size_t majority(const std::vector<std::size_t>& counts) {
        return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }

private:
    // True when the node ended up as a leaf.
    bool expand(const std::vector<std::size_t>& rows, const std::vector<Condition>& path) {
        const auto counts = class_counts(rows);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
        std::optional<Split> split;
        if (!pure && rows.size() >= min_leaf_) split = best_split(rows, counts);
        if (!split) {
            leaves_.push_back({path, rows, majority(counts)});
            return true;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) (x_[r][split->feature] <= split->threshold ? left : right).push_back(r);
        const Condition le{split->feature, names_[split->feature], true, split->threshold};
        const Condition gt{split->feature, names_[split->feature], false, split->threshold};

        struct Child {
            const std::vector<std::size_t>* rows;
            Condition cond;
            double entropy;
        };
        std::vector<Child> children = {
            {&left, le, entropy(class_counts(left), left.size())},
            {&right, gt, entropy(class_counts(right), right.size())},
        };
        std::stable_sort(children.begin(), children.end(),
                         [](const Child& a, const Child& b) { return a.entropy < b.entropy; });

        // Siblings are expanded only while every expanded subset became a leaf.
        for (const auto& child : children) {
            auto child_path = path;
            child_path.push_back(child.cond);
            if (!expand(*child.rows, child_path)) break;
        }
        return false;
    }

    std::optional<Split> best_split(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& counts) const {
        const double n = static_cast<double>(rows.size());
        const double parent_entropy = entropy(counts, rows.size());
        std::optional<Split> best;
        std::vector<std::size_t> order = rows;
        const std::size_t dim = x_[rows.front()].size();

        for (std::size_t f = 0; f < dim; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
            std::vector<std::size_t> left(n_labels_, 0), right = counts;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                ++left[y_[order[i]]];
                --right[y_[order[i]]];
                const double lo = x_[order[i]][f];
                const double hi = x_[order[i + 1]][f];
                if (!(lo < hi)) continue;
                const std::size_t nl = i + 1;
                const std::size_t nr = order.size() - nl;
                const double pl = static_cast<double>(nl) / n;
                const double pr = static_cast<double>(nr) / n;
                const double gain = parent_entropy - pl * entropy(left, nl) - pr * entropy(right, nr);
                if (gain <= kGainEpsilon) continue;
                const double split_info = -(pl * std::log2(pl) + pr * std::log2(pr));
                const double ratio = gain / split_info;
                if (!best || ratio > best->gain_ratio + kGainEpsilon) {
                    double threshold = lo + (hi - lo) / 2;
                    if (!(threshold < hi)) threshold = lo;
                    best = Split{f, threshold, ratio};
                }
            }
        }
        return best;
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<std::size_t>& y_;
    std::size_t n_labels_;
    const std::vector<std::string>& names_;
    std::size_t min_leaf_;
    std::vector<Leaf> leaves_;
};

// Keeps the tightest bound per feature and direction, in order of first use.
std::vector<Condition> simplify(const std::vector<Condition>& path) {
    std::vector<Condition> out;
    for (const auto& c : path) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Condition& o) {
            return o.feature == c.feature && o.less_equal == c.less_equal;
        });
        if (it == out.end()) {
            out.push_back(c);
        } else if (c.less_equal ? c.threshold < it->threshold : c.threshold > it->threshold) {
            it->threshold = c.threshold;
        }
    }
    return out;
}

}  // namespace

DecisionList train_part(const TrainingSet& data, std::size_t min_leaf) {
    data.validate();
    if (min_leaf == 0) throw ConfigError("min_leaf must be positive");
    const auto labels = data.label_order();
    std::map<std::string, std::size_t> label_index;
    for (std::size_t i = 0; i < labels.size(); ++i) label_index[labels[i]] = i;

    std::vector<std::vector<double>> x;
    std::vector<std::size_t> y;
    for (const auto& row : data.rows) {
        x.push_back(row.features.values);
        y.push_back(label_index.at(row.label));
    }

    DecisionList list;
    list.manifest_id = data.rows.front().features.manifest_id;
    list.feature_names = data.rows.front().features.names;

    PartialTreeBuilder builder(x, y, labels.size(), list.feature_names, min_leaf);
    std::vector<std::size_t> remaining(x.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    while (true) {
        const auto counts = builder.class_counts(remaining);
        if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1) {
            list.default_label = labels[PartialTreeBuilder::majority(counts)];
            break;
        }
        auto leaves = builder.build(remaining);
        const auto best = std::max_element(leaves.begin(), leaves.end(), [](const Leaf& a, const Leaf& b) {
            return a.rows.size() < b.rows.size();
        });
        if (best->path.empty()) {
            // Root could not be split: the remaining rows fall to the default.
            list.default_label = labels[best->label];
            break;
        }
        list.rules.push_back({simplify(best->path), labels[best->label], best->rows.size()});
        std::vector<std::size_t> rest;
        std::set_difference(remaining.begin(), remaining.end(), best->rows.begin(), best->rows.end(),
                            std::back_inserter(rest));
        remaining = std::move(rest);
    }
    return list;
}

std::string predict_part(const DecisionList& model, const FeatureVector& x) {
    if (x.manifest_id != model.manifest_id || x.size() != model.feature_names.size()) {
        throw ModelError("feature manifest mismatch: model expects " + model.manifest_id + ", got " + x.manifest_id);
    }
    for (const auto& rule : model.rules) {
        if (rule.matches(x.values)) return rule.label;
    }
    return model.default_label;
}

}  // namespace measp
