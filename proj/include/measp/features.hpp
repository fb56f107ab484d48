#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace measp {

inline constexpr std::string_view kGroundManifest = "ground-52";
inline constexpr std::string_view kNonGroundManifest = "nonground-11";

// Canonical ordered feature names of a known manifest; throws Error for unknown ids.
const std::vector<std::string>& manifest(std::string_view id);

struct FeatureVector {
    std::string manifest_id;
    std::vector<std::string> names;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    // Throws Error when `name` is not part of the vector.
    double at(std::string_view name) const;

    bool operator==(const FeatureVector&) const = default;
};

// Builds a vector for a known manifest; `values` must match its length.
FeatureVector make_features(std::string_view manifest_id, std::vector<double> values);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// `name value` lines.
void write_named(std::ostream& out, const FeatureVector& fv);

void write_csv_header(std::ostream& out, const std::vector<std::string>& names);
void write_csv_row(std::ostream& out, std::string_view instance_id, const FeatureVector& fv);

struct FeatureTable {
    std::string manifest_id;
    std::vector<std::string> names;
    std::vector<std::pair<std::string, FeatureVector>> rows;
};

// Reads `instance_id,<names...>` CSV; the manifest id is inferred from the header
// (a known manifest when the names match, "custom" otherwise).
FeatureTable read_feature_csv(std::istream& in);

}  // namespace measp
