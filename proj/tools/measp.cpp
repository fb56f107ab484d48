// measp: feature extraction, engine selection and benchmarking for ASP portfolios.

#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "measp/classifiers.hpp"
#include "measp/engines.hpp"
#include "measp/error.hpp"
#include "measp/features.hpp"
#include "measp/ground_features.hpp"
#include "measp/ground_program.hpp"
#include "measp/harness.hpp"
#include "measp/nonground_features.hpp"
#include "measp/nonground_program.hpp"
#include "measp/pipeline.hpp"

using namespace measp;
namespace fs = std::filesystem;

namespace {

struct Globals {
    double timeout = 600;
    std::uint64_t memory_mib = 2048;
    std::string engines;
    std::string model;
    std::size_t k = 1;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;

    Limits limits() const { return {timeout, memory_mib << 20}; }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Numeric programs start with a rule type code; textual ones with an atom or `:-`.
bool looks_numeric(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        } else if (text[i] == '%') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else {
            return std::isdigit(static_cast<unsigned char>(text[i])) != 0;
        }
    }
    return true;
}

GroundProgram read_ground(const fs::path& path, const std::string& format) {
    const std::string text = slurp(path);
    const bool numeric = format == "numeric" || (format == "auto" && looks_numeric(text));
    try {
        return numeric ? parse_numeric(text) : parse_text_ground(text);
    } catch (const ParseError& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

FeatureVector nonground_features_of(const fs::path& path) {
    try {
        return extract_nonground(parse_nonground(slurp(path)));
    } catch (const ParseError& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void print_features(const std::vector<std::pair<std::string, FeatureVector>>& rows, bool csv) {
    if (rows.size() == 1 && !csv) {
        write_named(std::cout, rows.front().second);
        return;
    }
    if (rows.empty()) return;
    write_csv_header(std::cout, rows.front().second.names);
    for (const auto& [id, fv] : rows) write_csv_row(std::cout, id, fv);
}

std::map<std::string, FeatureVector> read_features(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open feature table " + path.string());
    std::map<std::string, FeatureVector> out;
    for (auto& [id, fv] : read_feature_csv(in).rows) out[id] = std::move(fv);
    return out;
}

std::vector<EngineSpec> registry(const Globals& g) {
    if (g.engines.empty()) throw ConfigError("--engines <registry> is required");
    return registry_load(g.engines);
}

TrainingSet training_set(const fs::path& features, const fs::path& runtimes) {
    const Labeling labeling = label_training(read_runtime_csv(runtimes), read_features(features));
    for (const auto& id : labeling.unsolved) std::cerr << "excluded (solved by no engine): " << id << '\n';
    for (const auto& id : labeling.missing_features) std::cerr << "excluded (no features): " << id << '\n';
    return labeling.data;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-engine ASP toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--timeout", g.timeout, "CPU time limit per engine run (s)")->capture_default_str();
    app.add_option("--memory", g.memory_mib, "memory limit per engine run (MiB)")->capture_default_str();
    app.add_option("--engines", g.engines, "engine registry file");
    app.add_option("--model", g.model, "model file");
    app.add_option("--k", g.k, "neighbours for kNN")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "concurrent engine runs")->capture_default_str();

    // extract-ground
    auto* eg = app.add_subcommand("extract-ground", "ground-52 features of ground programs");
    eg->fallthrough();
    std::vector<std::string> eg_files;
    std::string eg_format = "auto";
    bool eg_csv = false;
    eg->add_option("files", eg_files, "ground programs")->required()->check(CLI::ExistingFile);
    eg->add_option("--format", eg_format, "numeric, text or auto")->check(CLI::IsMember({"auto", "numeric", "text"}));
    eg->add_flag("--csv", eg_csv, "CSV output even for a single file");

    // extract-nonground
    auto* en = app.add_subcommand("extract-nonground", "nonground-11 features of non-ground programs");
    en->fallthrough();
    std::vector<std::string> en_files;
    bool en_csv = false;
    en->add_option("files", en_files, "non-ground programs")->required()->check(CLI::ExistingFile);
    en->add_flag("--csv", en_csv, "CSV output even for a single file");

    // train
    auto* tr = app.add_subcommand("train", "learn a selector from features and a runtime table");
    tr->fallthrough();
    std::string tr_features, tr_runtimes, tr_algo = "knn";
    std::size_t tr_min_leaf = 2;
    tr->add_option("--features", tr_features, "feature CSV")->required()->check(CLI::ExistingFile);
    tr->add_option("--runtimes", tr_runtimes, "runtime table CSV")->required()->check(CLI::ExistingFile);
    tr->add_option("--algo", tr_algo, "knn or part")->check(CLI::IsMember({"knn", "part"}));
    tr->add_option("--min-leaf", tr_min_leaf, "PART minimum leaf size");

    // predict
    auto* pr = app.add_subcommand("predict", "predict the engine for programs or feature rows");
    pr->fallthrough();
    std::vector<std::string> pr_files;
    std::string pr_features, pr_format = "auto";
    pr->add_option("files", pr_files, "programs (ground for ground-52 models, non-ground otherwise)")
        ->check(CLI::ExistingFile);
    pr->add_option("--features", pr_features, "feature CSV instead of programs")->check(CLI::ExistingFile);
    pr->add_option("--format", pr_format, "ground format: numeric, text or auto")
        ->check(CLI::IsMember({"auto", "numeric", "text"}));

    // solve
    auto* so = app.add_subcommand("solve", "run the full grounder and solver pipeline");
    so->fallthrough();
    std::string so_program, so_grounder_model, so_bridge = "canonical", so_trace = "text", so_trace_file;
    so->add_option("program", so_program, "non-ground program")->required()->check(CLI::ExistingFile);
    so->add_option("--grounder-model", so_grounder_model, "decision list over nonground-11 features");
    so->add_option("--bridge", so_bridge, "canonical or reground")->check(CLI::IsMember({"canonical", "reground"}));
    so->add_option("--trace", so_trace, "trace format: text, csv or none")
        ->check(CLI::IsMember({"text", "csv", "none"}));
    so->add_option("--trace-file", so_trace_file, "write the trace here instead of stderr");

    // bench
    auto* be = app.add_subcommand("bench", "run every engine on every instance");
    be->fallthrough();
    std::vector<std::string> be_files;
    std::string be_out;
    bool be_resume = false;
    be->add_option("instances", be_files, "instance files (domain = parent directory)")
        ->required()
        ->check(CLI::ExistingFile);
    be->add_option("--out", be_out, "runtime table CSV (default stdout)");
    be->add_flag("--resume", be_resume, "keep records already in --out");

    // stats
    auto* st = app.add_subcommand("stats", "solved counts and mean times per engine");
    st->fallthrough();
    std::string st_table;
    bool st_sota = false;
    st->add_option("table", st_table, "runtime table CSV")->required()->check(CLI::ExistingFile);
    st->add_flag("--sota", st_sota, "add the virtual best engine");

    // cactus
    auto* ca = app.add_subcommand("cactus", "cactus-plot data per engine");
    ca->fallthrough();
    std::string ca_table;
    bool ca_sota = false;
    ca->add_option("table", ca_table, "runtime table CSV")->required()->check(CLI::ExistingFile);
    ca->add_flag("--sota", ca_sota, "add the virtual best engine");

    // cv
    auto* cv = app.add_subcommand("cv", "stratified cross-validation of a selector");
    cv->fallthrough();
    std::string cv_features, cv_runtimes, cv_algo = "knn";
    std::size_t cv_folds = 10, cv_min_leaf = 2;
    cv->add_option("--features", cv_features, "feature CSV")->required()->check(CLI::ExistingFile);
    cv->add_option("--runtimes", cv_runtimes, "runtime table CSV")->required()->check(CLI::ExistingFile);
    cv->add_option("--algo", cv_algo, "knn or part")->check(CLI::IsMember({"knn", "part"}));
    cv->add_option("--folds", cv_folds, "number of folds")->capture_default_str();
    cv->add_option("--min-leaf", cv_min_leaf, "PART minimum leaf size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eg->parsed()) {
            std::vector<std::pair<std::string, FeatureVector>> rows;
            for (const auto& f : eg_files) rows.emplace_back(fs::path(f).stem().string(), extract_ground(read_ground(f, eg_format)));
            print_features(rows, eg_csv);
        } else if (en->parsed()) {
            std::vector<std::pair<std::string, FeatureVector>> rows;
            for (const auto& f : en_files) rows.emplace_back(fs::path(f).stem().string(), nonground_features_of(f));
            print_features(rows, en_csv);
        } else if (tr->parsed()) {
            if (g.model.empty()) throw ConfigError("--model <file> names the output model");
            const TrainingSet data = training_set(tr_features, tr_runtimes);
            data.validate();
            const InductiveModel model = parse_algorithm(tr_algo) == Algorithm::Knn
                                             ? InductiveModel(train_knn(data, g.k))
                                             : InductiveModel(train_part(data, tr_min_leaf));
            save_model(model, fs::path(g.model));
            std::cerr << "trained " << tr_algo << " on " << data.rows.size() << " instances\n";
        } else if (pr->parsed()) {
            if (g.model.empty()) throw ConfigError("--model <file> is required");
            const InductiveModel model = load_model(fs::path(g.model));
            std::vector<std::pair<std::string, FeatureVector>> rows;
            if (!pr_features.empty()) {
                for (auto& [id, fv] : read_features(pr_features)) rows.emplace_back(id, fv);
            }
            const bool ground = manifest_of(model) == kGroundManifest;
            for (const auto& f : pr_files) {
                rows.emplace_back(fs::path(f).stem().string(),
                                  ground ? extract_ground(read_ground(f, pr_format)) : nonground_features_of(f));
            }
            if (rows.empty()) throw ConfigError("nothing to predict: give programs or --features");
            for (const auto& [id, fv] : rows) std::cout << id << ' ' << predict(model, fv) << '\n';
        } else if (so->parsed()) {
            PipelineConfig cfg;
            cfg.registry = registry(g);
            cfg.limits = g.limits();
            cfg.bridge_mode = parse_bridge_mode(so_bridge);
            if (!g.model.empty()) {
                auto m = load_model(fs::path(g.model));
                if (!std::holds_alternative<KnnModel>(m)) throw ConfigError("--model must be a kNN solver model");
                cfg.solver_model = std::get<KnnModel>(std::move(m));
            }
            if (!so_grounder_model.empty()) {
                auto m = load_model(fs::path(so_grounder_model));
                if (!std::holds_alternative<DecisionList>(m)) {
                    throw ConfigError("--grounder-model must be a decision-list model");
                }
                cfg.grounder_model = std::get<DecisionList>(std::move(m));
            }
            auto emit_trace = [&](const PipelineResult& r) {
                if (so_trace == "none") return;
                std::ofstream file;
                if (!so_trace_file.empty()) {
                    file.open(so_trace_file);
                    if (!file) throw Error("cannot write " + so_trace_file);
                }
                std::ostream& out = so_trace_file.empty() ? std::cerr : file;
                if (so_trace == "csv") {
                    write_trace_csv_header(out);
                    write_trace_csv(out, r);
                } else {
                    write_trace(out, r);
                }
            };
            try {
                const PipelineResult result = evaluate(so_program, cfg);
                std::cout << result.solver_output;
                emit_trace(result);
                return exit_code(result.answer.status);
            } catch (const PipelineError& e) {
                PipelineResult partial;
                partial.trace = e.trace();
                if (e.failed_run()) partial.answer = *e.failed_run();
                emit_trace(partial);
                std::cerr << "measp: " << e.what() << '\n';
                return e.failed_run() && e.failed_run()->status == RunStatus::Timeout ? 124 : 1;
            }
        } else if (be->parsed()) {
            std::vector<Instance> instances;
            for (const auto& f : be_files) {
                const fs::path p(f);
                instances.push_back({p.stem().string(), p.parent_path().filename().string(), p});
            }
            std::optional<RuntimeTable> previous;
            if (be_resume && !be_out.empty() && fs::exists(be_out)) previous = read_runtime_csv(fs::path(be_out));
            const RuntimeTable table =
                collect(instances, registry(g), g.limits(), g.jobs, previous ? &*previous : nullptr);
            if (be_out.empty()) {
                write_runtime_csv(std::cout, table);
            } else {
                std::ofstream out(be_out);
                if (!out) throw Error("cannot write " + be_out);
                write_runtime_csv(out, table);
            }
        } else if (st->parsed()) {
            const RuntimeTable table = read_runtime_csv(fs::path(st_table));
            auto summaries = stats(table);
            if (st_sota) summaries.push_back(stats(sota_runs(table)).front());
            write_stats(std::cout, summaries);
        } else if (ca->parsed()) {
            const RuntimeTable table = read_runtime_csv(fs::path(ca_table));
            auto runs = table_runs(table);
            if (ca_sota) {
                auto best = sota_runs(table);
                runs.insert(runs.end(), best.begin(), best.end());
            }
            write_cactus_csv(std::cout, cactus(runs));
        } else if (cv->parsed()) {
            const TrainingSet data = training_set(cv_features, cv_runtimes);
            CvParams params;
            params.algorithm = parse_algorithm(cv_algo);
            params.folds = cv_folds;
            params.seed = g.seed;
            params.k = g.k;
            params.min_leaf = cv_min_leaf;
            write_cv_report(std::cout, cross_validate(data, params));
        }
    } catch (const std::exception& e) {
        std::cerr << "measp: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
