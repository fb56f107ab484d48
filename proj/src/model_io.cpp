#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "measp/classifiers.hpp"
#include "measp/error.hpp"

namespace measp {

std::string predict(const InductiveModel& model, const FeatureVector& x) {
    return std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KnnModel>) {
                return predict_knn(m, x);
            } else {
                return predict_part(m, x);
            }
        },
        model);
}

const std::string& manifest_of(const InductiveModel& model) {
    return std::visit([](const auto& m) -> const std::string& { return m.manifest_id; }, model);
}

namespace {

constexpr std::string_view kMagic = "measp-model";

bool is_known_manifest(const std::string& id) { return id == kGroundManifest || id == kNonGroundManifest; }

std::string condition_text(const Condition& c) {
    return c.name + (c.less_equal ? "<=" : ">") + format_number(c.threshold);
}

void save_knn(const KnnModel& m, std::ostream& out) {
    out << kMagic << " v" << kModelFormatVersion << " knn " << m.manifest_id << '\n';
    out << "k " << m.k << '\n';
    out << "labels";
    for (const auto& l : m.label_priority) out << ' ' << l;
    out << '\n';
    for (std::size_t f = 0; f < m.feature_names.size(); ++f) {
        out << "norm " << m.feature_names[f] << ' ' << format_number(m.min[f]) << ' ' << format_number(m.max[f]) << '\n';
    }
    for (std::size_t i = 0; i < m.exemplars.size(); ++i) {
        out << "row";
        for (double v : m.exemplars[i]) out << ' ' << format_number(v);
        out << ' ' << m.exemplar_labels[i] << '\n';
    }
}

void save_part(const DecisionList& d, std::ostream& out) {
    out << kMagic << " v" << kModelFormatVersion << " part " << d.manifest_id << '\n';
    if (!is_known_manifest(d.manifest_id)) {
        out << "features";
        for (const auto& n : d.feature_names) out << ' ' << n;
        out << '\n';
    }
    for (const auto& rule : d.rules) {
        out << "rule " << rule.label;
        for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
            out << (i ? " & " : " ") << condition_text(rule.conditions[i]);
        }
        out << " # " << rule.coverage << '\n';
    }
    out << "default " << d.default_label << '\n';
}

std::vector<std::string> words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

double number(const std::string& text, std::size_t line_no) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ModelError("model line " + std::to_string(line_no) + ": bad number '" + text + "'");
    }
    return v;
}

std::size_t count(const std::string& text, std::size_t line_no) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ModelError("model line " + std::to_string(line_no) + ": bad count '" + text + "'");
    }
    return v;
}

[[noreturn]] void corrupt(std::size_t line_no, const std::string& what) {
    throw ModelError("model line " + std::to_string(line_no) + ": " + what);
}

KnnModel load_knn(std::istream& in, const std::string& manifest_id) {
    KnnModel m;
    m.manifest_id = manifest_id;
    std::string line;
    std::size_t line_no = 1;
    bool have_k = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto w = words(line);
        if (w.empty()) continue;
        if (w[0] == "k" && w.size() == 2) {
            m.k = count(w[1], line_no);
            have_k = true;
        } else if (w[0] == "labels") {
            m.label_priority.assign(w.begin() + 1, w.end());
        } else if (w[0] == "norm" && w.size() == 4) {
            if (!m.exemplars.empty()) corrupt(line_no, "norm line after rows");
            m.feature_names.push_back(w[1]);
            m.min.push_back(number(w[2], line_no));
            m.max.push_back(number(w[3], line_no));
        } else if (w[0] == "row") {
            if (w.size() != m.feature_names.size() + 2) corrupt(line_no, "row has wrong number of values");
            std::vector<double> values;
            for (std::size_t i = 1; i + 1 < w.size(); ++i) values.push_back(number(w[i], line_no));
            m.exemplars.push_back(std::move(values));
            m.exemplar_labels.push_back(w.back());
        } else {
            corrupt(line_no, "unrecognized line '" + line + "'");
        }
    }
    if (!have_k) throw ModelError("kNN model lacks a k line");
    if (m.exemplars.empty()) throw ModelError("kNN model has no rows");
    if (m.k == 0 || m.k > m.exemplars.size()) throw ModelError("kNN model k out of range");
    if (is_known_manifest(manifest_id) && manifest(manifest_id) != m.feature_names) {
        throw ModelError("kNN model features do not match manifest " + manifest_id);
    }
    for (const auto& l : m.exemplar_labels) {
        if (std::find(m.label_priority.begin(), m.label_priority.end(), l) == m.label_priority.end()) {
            m.label_priority.push_back(l);
        }
    }
    return m;
}

Condition parse_condition(const std::string& text, const std::vector<std::string>& names, std::size_t line_no) {
    Condition c;
    std::size_t op = text.find("<=");
    std::size_t value_at = 0;
    if (op != std::string::npos) {
        c.less_equal = true;
        value_at = op + 2;
    } else {
        op = text.find('>');
        if (op == std::string::npos) corrupt(line_no, "condition without '<=' or '>': " + text);
        c.less_equal = false;
        value_at = op + 1;
    }
    c.name = text.substr(0, op);
    auto it = std::find(names.begin(), names.end(), c.name);
    if (it == names.end()) corrupt(line_no, "unknown feature '" + c.name + "'");
    c.feature = static_cast<std::size_t>(it - names.begin());
    c.threshold = number(text.substr(value_at), line_no);
    return c;
}

DecisionList load_part(std::istream& in, const std::string& manifest_id) {
    DecisionList d;
    d.manifest_id = manifest_id;
    if (is_known_manifest(manifest_id)) d.feature_names = manifest(manifest_id);
    std::string line;
    std::size_t line_no = 1;
    bool have_default = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto w = words(line);
        if (w.empty()) continue;
        if (have_default) corrupt(line_no, "content after default line");
        if (w[0] == "features") {
            d.feature_names.assign(w.begin() + 1, w.end());
        } else if (w[0] == "rule" && w.size() >= 2) {
            DecisionRule rule;
            rule.label = w[1];
            std::size_t i = 2;
            bool expect_condition = true;
            for (; i < w.size() && w[i] != "#"; ++i) {
                if (w[i] == "&") {
                    if (expect_condition) corrupt(line_no, "dangling '&'");
                    expect_condition = true;
                    continue;
                }
                if (!expect_condition) corrupt(line_no, "conditions must be joined with '&'");
                rule.conditions.push_back(parse_condition(w[i], d.feature_names, line_no));
                expect_condition = false;
            }
            if (expect_condition && !rule.conditions.empty()) corrupt(line_no, "dangling '&'");
            if (i < w.size()) {
                if (i + 2 != w.size()) corrupt(line_no, "malformed coverage annotation");
                rule.coverage = count(w[i + 1], line_no);
            }
            d.rules.push_back(std::move(rule));
        } else if (w[0] == "default" && w.size() == 2) {
            d.default_label = w[1];
            have_default = true;
        } else {
            corrupt(line_no, "unrecognized line '" + line + "'");
        }
    }
    if (!have_default) throw ModelError("decision list lacks a default line");
    return d;
}

}  // namespace

void save_model(const InductiveModel& model, std::ostream& out) {
    std::visit(
        [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KnnModel>) {
                save_knn(m, out);
            } else {
                save_part(m, out);
            }
        },
        model);
}

void save_model(const InductiveModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file " + path.string());
    save_model(model, out);
    if (!out) throw Error("failed writing model file " + path.string());
}

InductiveModel load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ModelError("empty model file");
    const auto w = words(line);
    if (w.size() != 4 || w[0] != kMagic) throw ModelError("not a model file (bad header '" + line + "')");
    if (w[1] != "v" + std::to_string(kModelFormatVersion)) {
        throw VersionError("unsupported model format version '" + w[1] + "' (expected v" +
                           std::to_string(kModelFormatVersion) + ")");
    }
    if (w[2] == "knn") return load_knn(in, w[3]);
    if (w[2] == "part") return load_part(in, w[3]);
    throw ModelError("unknown model kind '" + w[2] + "'");
}

InductiveModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path.string());
    return load_model(in);
}

}  // namespace measp
