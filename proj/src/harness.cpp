#include "measp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "measp/error.hpp"

namespace measp {

const RunRecord* RuntimeTable::find(const std::string& instance, const std::string& engine) const {
    auto it = records.find({instance, engine});
    return it == records.end() ? nullptr : &it->second;
}

bool RuntimeTable::complete() const {
    for (const auto& i : instances) {
        for (const auto& e : engines) {
            if (!find(i.id, e)) return false;
        }
    }
    return true;
}

RuntimeTable collect(const std::vector<Instance>& instances, const std::vector<EngineSpec>& registry,
                     const Limits& limits, std::size_t jobs, const RuntimeTable* resume) {
    if (resume && resume->limit != limits.cpu_seconds) {
        throw ConfigError("cannot resume a table collected with a " + format_number(resume->limit) + " s limit");
    }
    RuntimeTable table;
    table.instances = instances;
    table.limit = limits.cpu_seconds;
    for (const auto& e : registry) table.engines.push_back(e.name);

    std::vector<std::pair<const Instance*, const EngineSpec*>> todo;
    for (const auto& inst : instances) {
        for (const auto& e : registry) {
            const RunRecord* done = resume ? resume->find(inst.id, e.name) : nullptr;
            if (done) {
                table.records[{inst.id, e.name}] = *done;
            } else {
                todo.emplace_back(&inst, &e);
            }
        }
    }

    std::vector<RunRecord> results(todo.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
            const auto& [inst, engine] = todo[i];
            RunOptions options{inst->id, engine->role == EngineRole::Grounder ? EngineMode::Ground : EngineMode::Solve};
            try {
                results[i] = run_engine(*engine, inst->path, limits, options).record;
            } catch (const std::exception&) {
                results[i] = RunRecord{inst->id, engine->name, RunStatus::Error, 0, 0, std::nullopt};
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(todo.size(), 1));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < todo.size(); ++i) {
        table.records[{todo[i].first->id, todo[i].second->name}] = std::move(results[i]);
    }
    return table;
}

void write_runtime_csv(std::ostream& out, const RuntimeTable& table) {
    out << "# limit=" << format_number(table.limit) << '\n';
    out << "instance,domain,engine,status,cpu_seconds\n";
    for (const auto& inst : table.instances) {
        for (const auto& e : table.engines) {
            const RunRecord* r = table.find(inst.id, e);
            if (!r) continue;
            out << inst.id << ',' << inst.domain << ',' << e << ',' << to_string(r->status) << ','
                << format_number(r->cpu_seconds) << '\n';
        }
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_seconds(const std::string& text, std::size_t line_no) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v < 0) {
        throw ParseError("bad cpu seconds '" + text + "'", line_no);
    }
    return v;
}

}  // namespace

RuntimeTable read_runtime_csv(std::istream& in) {
    RuntimeTable table;
    std::set<std::string> seen_instances, seen_engines;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto at = line.find("limit=");
            if (at != std::string::npos) table.limit = parse_seconds(line.substr(at + 6), line_no);
            continue;
        }
        auto cells = split_csv(line);
        if (!header) {
            if (cells != std::vector<std::string>{"instance", "domain", "engine", "status", "cpu_seconds"}) {
                throw ParseError("expected header instance,domain,engine,status,cpu_seconds", line_no, 1);
            }
            header = true;
            continue;
        }
        if (cells.size() != 5) throw ParseError("expected 5 columns, got " + std::to_string(cells.size()), line_no);
        RunRecord r;
        r.instance_id = cells[0];
        r.engine_name = cells[2];
        try {
            r.status = parse_status(cells[3]);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
        r.cpu_seconds = parse_seconds(cells[4], line_no);
        r.wall_seconds = r.cpu_seconds;
        if (seen_instances.insert(r.instance_id).second) table.instances.push_back({r.instance_id, cells[1], {}});
        if (seen_engines.insert(r.engine_name).second) table.engines.push_back(r.engine_name);
        const auto key = std::make_pair(r.instance_id, r.engine_name);
        if (table.records.count(key)) {
            throw ParseError("duplicate record for " + r.instance_id + "/" + r.engine_name, line_no);
        }
        table.records[key] = std::move(r);
    }
    if (!header) throw ParseError("missing runtime table header", line_no);
    return table;
}

RuntimeTable read_runtime_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open runtime table " + path.string());
    return read_runtime_csv(in);
}

Labeling label_training(const RuntimeTable& table, const std::map<std::string, FeatureVector>& features) {
    Labeling out;
    out.data.labels = table.engines;
    for (const auto& inst : table.instances) {
        const std::string* best = nullptr;
        double best_time = 0;
        for (const auto& e : table.engines) {
            const RunRecord* r = table.find(inst.id, e);
            if (!r || !is_solved(r->status)) continue;
            if (!best || r->cpu_seconds < best_time) {
                best = &e;
                best_time = r->cpu_seconds;
            }
        }
        if (!best) {
            out.unsolved.push_back(inst.id);
            continue;
        }
        auto f = features.find(inst.id);
        if (f == features.end()) {
            out.missing_features.push_back(inst.id);
            continue;
        }
        out.data.rows.push_back({f->second, *best});
        out.instance_ids.push_back(inst.id);
    }
    return out;
}

Sota sota(const RuntimeTable& table) {
    Sota s;
    double total = 0;
    for (const auto& inst : table.instances) {
        SotaEntry entry{inst.id, std::nullopt, table.limit};
        for (const auto& e : table.engines) {
            const RunRecord* r = table.find(inst.id, e);
            if (!r || !is_solved(r->status)) continue;
            if (!entry.engine || r->cpu_seconds < entry.cpu_seconds) {
                entry.engine = e;
                entry.cpu_seconds = r->cpu_seconds;
            }
        }
        if (entry.engine) {
            ++s.n_solved;
            total += entry.cpu_seconds;
        }
        s.entries.push_back(std::move(entry));
    }
    if (s.n_solved > 0) s.mean_time = total / static_cast<double>(s.n_solved);
    return s;
}

std::vector<RunRecord> sota_runs(const RuntimeTable& table, const std::string& config) {
    std::vector<RunRecord> runs;
    for (const auto& entry : sota(table).entries) {
        RunRecord r;
        r.instance_id = entry.instance;
        r.engine_name = config;
        r.cpu_seconds = r.wall_seconds = entry.cpu_seconds;
        r.status = entry.engine ? table.find(entry.instance, *entry.engine)->status : RunStatus::Timeout;
        runs.push_back(std::move(r));
    }
    return runs;
}

std::vector<RunRecord> table_runs(const RuntimeTable& table) {
    std::vector<RunRecord> runs;
    for (const auto& e : table.engines) {
        for (const auto& inst : table.instances) {
            if (const RunRecord* r = table.find(inst.id, e)) runs.push_back(*r);
        }
    }
    return runs;
}

EngineSummary summarize(std::string name, std::size_t n_solved, double total_time) {
    EngineSummary s{std::move(name), n_solved, total_time, std::nullopt};
    if (n_solved > 0) s.mean_time = total_time / static_cast<double>(n_solved);
    return s;
}

std::vector<EngineSummary> stats(const std::vector<RunRecord>& runs) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<std::size_t, double>> acc;
    for (const auto& r : runs) {
        auto [it, fresh] = acc.try_emplace(r.engine_name, 0, 0.0);
        if (fresh) order.push_back(r.engine_name);
        if (is_solved(r.status)) {
            ++it->second.first;
            it->second.second += r.cpu_seconds;
        }
    }
    std::vector<EngineSummary> out;
    for (const auto& name : order) out.push_back(summarize(name, acc[name].first, acc[name].second));
    return out;
}

std::vector<EngineSummary> stats(const RuntimeTable& table) {
    auto out = stats(table_runs(table));
    // Engines without any record still get a row.
    for (const auto& e : table.engines) {
        if (std::none_of(out.begin(), out.end(), [&](const EngineSummary& s) { return s.name == e; })) {
            out.push_back(summarize(e, 0, 0));
        }
    }
    return out;
}

void write_stats(std::ostream& out, const std::vector<EngineSummary>& summaries) {
    out << "engine,n_solved,total_time,mean_time_solved\n";
    for (const auto& s : summaries) {
        out << s.name << ',' << s.n_solved << ',' << format_number(s.total_time) << ','
            << (s.mean_time ? format_number(*s.mean_time) : std::string()) << '\n';
    }
}

std::vector<CactusPoint> cactus(const std::vector<RunRecord>& runs) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> times;
    for (const auto& r : runs) {
        auto [it, fresh] = times.try_emplace(r.engine_name);
        if (fresh) order.push_back(r.engine_name);
        if (is_solved(r.status)) it->second.push_back(r.cpu_seconds);
    }
    std::vector<CactusPoint> points;
    for (const auto& config : order) {
        auto& t = times[config];
        std::sort(t.begin(), t.end());
        for (std::size_t k = 0; k < t.size(); ++k) points.push_back({config, k + 1, t[k]});
    }
    return points;
}

void write_cactus_csv(std::ostream& out, const std::vector<CactusPoint>& points) {
    out << "config,k,cpu_seconds\n";
    for (const auto& p : points) out << p.config << ',' << p.k << ',' << format_number(p.cpu_seconds) << '\n';
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "knn") return Algorithm::Knn;
    if (text == "part") return Algorithm::Part;
    throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected knn or part)");
}

std::vector<std::size_t> assign_folds(const TrainingSet& data, std::size_t folds, std::uint64_t seed) {
    const std::size_t n = data.rows.size();
    if (folds < 2 || folds > n) {
        throw ConfigError("fold count " + std::to_string(folds) + " out of range [2, " + std::to_string(n) + "]");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> fold_of(n);
    std::size_t dealt = 0;
    for (const auto& label : data.label_order()) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (data.rows[i].label == label) members.push_back(i);
        }
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i : members) fold_of[i] = dealt++ % folds;
    }
    return fold_of;
}

CvResult cross_validate(const TrainingSet& data, const CvParams& params) {
    data.validate();
    CvResult result;
    result.fold_of = assign_folds(data, params.folds, params.seed);
    result.folds.resize(params.folds);
    std::size_t correct = 0;
    for (std::size_t f = 0; f < params.folds; ++f) {
        TrainingSet train;
        train.labels = data.labels;
        std::vector<std::size_t> test;
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            if (result.fold_of[i] == f) {
                test.push_back(i);
            } else {
                train.rows.push_back(data.rows[i]);
            }
        }
        InductiveModel model = params.algorithm == Algorithm::Knn
                                   ? InductiveModel(train_knn(train, std::min(params.k, train.rows.size())))
                                   : InductiveModel(train_part(train, params.min_leaf));
        FoldReport& report = result.folds[f];
        report.size = test.size();
        for (std::size_t i : test) {
            const std::string predicted = predict(model, data.rows[i].features);
            ++result.confusion[{data.rows[i].label, predicted}];
            if (predicted == data.rows[i].label) ++report.correct;
        }
        report.accuracy = report.size ? static_cast<double>(report.correct) / static_cast<double>(report.size) : 0;
        correct += report.correct;
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(data.rows.size());
    return result;
}

void write_cv_report(std::ostream& out, const CvResult& result) {
    out << "accuracy " << format_number(result.accuracy) << '\n';
    for (std::size_t f = 0; f < result.folds.size(); ++f) {
        const auto& r = result.folds[f];
        out << "fold " << f + 1 << ' ' << r.correct << '/' << r.size << ' ' << format_number(r.accuracy) << '\n';
    }
    for (const auto& [key, n] : result.confusion) {
        out << "confusion " << key.first << ' ' << key.second << ' ' << n << '\n';
    }
}

}  // namespace measp
