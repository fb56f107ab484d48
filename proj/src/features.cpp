#include "measp/features.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "measp/error.hpp"

namespace measp {

namespace {

std::vector<std::string> build_ground_manifest() {
    std::vector<std::string> names = {
        "n_rules", "n_atoms", "n_horn", "n_unary", "n_binary",
        "n_ternary", "n_true_facts", "n_disj_facts", "n_constraints", "n_normal",
    };
    const std::vector<std::string> ratios = {
        "ratio_horn", "ratio_unary", "ratio_binary", "ratio_ternary",
        "ratio_true_facts", "ratio_disj_facts", "frac_constraints", "frac_normal",
    };
    names.insert(names.end(), ratios.begin(), ratios.end());
    names.push_back("rules_per_atom");
    names.push_back("atoms_per_rule");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        for (std::size_t j = i + 1; j < ratios.size(); ++j) names.push_back(ratios[i] + "_x_" + ratios[j]);
    }
    names.push_back("log_n_rules");
    names.push_back("log_n_atoms");
    names.push_back("facts_ratio");
    names.push_back("short_rule_ratio");
    return names;
}

}  // namespace

const std::vector<std::string>& manifest(std::string_view id) {
    static const std::vector<std::string> ground = build_ground_manifest();
    static const std::vector<std::string> nonground = {
        "n_disj_rules", "has_query", "n_functions", "n_predicates", "n_scc", "n_hcf_components",
        "is_stratified", "n_rules", "n_constraints", "max_predicate_arity", "frac_disj_rules",
    };
    if (id == kGroundManifest) return ground;
    if (id == kNonGroundManifest) return nonground;
    throw Error("unknown feature manifest '" + std::string(id) + "'");
}

double FeatureVector::at(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values.at(i);
    }
    throw Error("feature '" + std::string(name) + "' not in manifest " + manifest_id);
}

FeatureVector make_features(std::string_view manifest_id, std::vector<double> values) {
    const auto& names = manifest(manifest_id);
    if (values.size() != names.size()) {
        throw Error("manifest " + std::string(manifest_id) + " expects " + std::to_string(names.size()) +
                    " values, got " + std::to_string(values.size()));
    }
    return FeatureVector{std::string(manifest_id), names, std::move(values)};
}

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_named(std::ostream& out, const FeatureVector& fv) {
    for (std::size_t i = 0; i < fv.size(); ++i) out << fv.names[i] << ' ' << format_number(fv.values[i]) << '\n';
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& names) {
    out << "instance_id";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
}

void write_csv_row(std::ostream& out, std::string_view instance_id, const FeatureVector& fv) {
    out << instance_id;
    for (double v : fv.values) out << ',' << format_number(v);
    out << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

FeatureTable read_feature_csv(std::istream& in) {
    FeatureTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty()) break;
    }
    auto header = split_csv(line);
    if (header.empty() || header.front() != "instance_id") throw ParseError("expected feature CSV header 'instance_id,...'", line_no, 1);
    table.names.assign(header.begin() + 1, header.end());
    table.manifest_id = "custom";
    for (std::string_view known : {kGroundManifest, kNonGroundManifest}) {
        if (manifest(known) == table.names) table.manifest_id = std::string(known);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()), line_no);
        }
        FeatureVector fv{table.manifest_id, table.names, {}};
        for (std::size_t i = 1; i < cells.size(); ++i) {
            double v = 0;
            const auto& c = cells[i];
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || ptr != c.data() + c.size()) {
                throw ParseError("bad number '" + c + "' in column " + header[i], line_no);
            }
            fv.values.push_back(v);
        }
        table.rows.emplace_back(cells.front(), std::move(fv));
    }
    return table;
}

}  // namespace measp
