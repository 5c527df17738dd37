#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <defcon/config.hpp>
#include <defcon/reports.hpp>
#include <defcon/synth.hpp>
#include <defcon/tasks.hpp>
#include <defcon/valuation.hpp>

namespace fs = std::filesystem;
using namespace defcon;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;       // usage / missing data / unwritable output
constexpr int kDivergent = 3;   // training loss went non-finite
constexpr int kSchema = 4;      // bundle feature-schema mismatch

int fail(const std::string& msg, int code) {
    std::cerr << "defcon: " << msg << "\n";
    return code;
}

std::vector<fs::path> dataset_match_dirs(const fs::path& data_dir) {
    const fs::path manifest_path = data_dir / "manifest.json";
    std::vector<fs::path> dirs;
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        const auto manifest = nlohmann::json::parse(in);
        for (const auto& m : manifest.at("matches"))
            dirs.push_back(data_dir / m.at("dir").get<std::string>());
    } else if (fs::exists(data_dir)) {
        for (const auto& e : fs::directory_iterator(data_dir))
            if (e.is_directory() && fs::exists(e.path() / "match.json"))
                dirs.push_back(e.path());
        std::sort(dirs.begin(), dirs.end());
    }
    return dirs;
}

std::vector<MatchData> load_matches(const fs::path& data_dir) {
    std::vector<MatchData> out;
    for (const auto& d : dataset_match_dirs(data_dir)) out.push_back(read_match(d));
    if (out.empty())
        throw std::runtime_error("no matches found under " + data_dir.string() +
                                 " (run `defcon simulate` first)");
    return out;
}

int cmd_simulate(const RunConfig& cfg) {
    if (cfg.matches <= 0) return fail("--matches must be positive", kUsage);
    std::error_code ec;
    fs::create_directories(cfg.data_dir, ec);
    if (ec) return fail("cannot create data dir " + cfg.data_dir + ": " + ec.message(), kUsage);

    GeneratorConfig gen_cfg = cfg.generator;
    gen_cfg.seed = cfg.seed;
    Generator gen(gen_cfg);
    auto manifest_matches = nlohmann::json::array();
    for (int i = 0; i < cfg.matches; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "match_%03d", i);
        const std::uint64_t match_seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i);
        auto [match, truth] = gen.generate_match(id, match_seed);
        write_match(fs::path(cfg.data_dir) / id, match, truth);
        manifest_matches.push_back({{"id", id}, {"dir", id}, {"seed", match_seed}});
        std::cout << "wrote " << (fs::path(cfg.data_dir) / id).string() << "\n";
    }
    nlohmann::json manifest;
    manifest["seed"] = cfg.seed;
    manifest["matches"] = manifest_matches;
    manifest["generator"] = {{"actions_per_match", gen_cfg.actions_per_match},
                             {"temperature", gen_cfg.temperature},
                             {"mc_samples", gen_cfg.mc_samples}};
    std::ofstream out(fs::path(cfg.data_dir) / "manifest.json");
    if (!out) return fail("cannot write manifest under " + cfg.data_dir, kUsage);
    out << manifest.dump(2) << "\n";
    return kOk;
}

int cmd_train(const RunConfig& cfg, const std::string& only_task) {
    std::vector<MatchData> matches;
    try {
        matches = load_matches(cfg.data_dir);
    } catch (const std::exception& e) {
        return fail(e.what(), kUsage);
    }
    const auto dataset = build_action_dataset(matches);
    std::optional<TaskKind> only;
    if (!only_task.empty()) {
        try {
            only = task_from_string(only_task);
        } catch (const std::exception&) {
            return fail("unknown task: " + only_task, kUsage);
        }
    }
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    try {
        const auto result = train_bundle(dataset, tc, only);
        fs::create_directories(cfg.model_dir);
        save_bundle(cfg.model_dir, result.bundle);
        std::ofstream metrics(fs::path(cfg.model_dir) / "metrics.json");
        if (!metrics) return fail("cannot write metrics under " + cfg.model_dir, kUsage);
        metrics << result.metrics.dump(2) << "\n";
        std::cout << result.metrics.dump(2) << "\n";
    } catch (const DivergentLossError& e) {
        return fail(e.what(), kDivergent);
    }
    return kOk;
}

int cmd_evaluate(const RunConfig& cfg) {
    std::vector<MatchData> matches;
    ModelBundle bundle;
    try {
        matches = load_matches(cfg.data_dir);
        bundle = load_bundle(cfg.model_dir);
    } catch (const SchemaMismatchError& e) {
        return fail(e.what(), kSchema);
    } catch (const std::exception& e) {
        return fail(e.what(), kUsage);
    }
    const auto dataset = build_action_dataset(matches);
    auto per_task = nlohmann::json::array();
    for (const TaskKind kind : graph_tasks()) {
        auto samples = build_task_samples(kind, dataset);
        auto j = evaluate_task(bundle.task(kind), dataset, samples);
        j["task"] = to_string(kind);
        per_task.push_back(std::move(j));
    }
    nlohmann::json out;
    out["tasks"] = per_task;
    out["matches"] = dataset.match_ids.size();
    out["actions"] = dataset.actions.size();
    std::cout << out.dump(2) << "\n";
    return kOk;
}

int cmd_value(const RunConfig& cfg, const std::string& out_dir, bool oracle, int jobs) {
    std::vector<fs::path> dirs = dataset_match_dirs(cfg.data_dir);
    if (dirs.empty())
        return fail("no matches found under " + cfg.data_dir + " (run `defcon simulate` first)",
                    kUsage);
    ModelBundle bundle;
    if (!oracle) {
        try {
            bundle = load_bundle(cfg.model_dir);
        } catch (const SchemaMismatchError& e) {
            return fail(e.what(), kSchema);
        } catch (const std::exception& e) {
            return fail(e.what(), kUsage);
        }
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) return fail("cannot create " + out_dir + ": " + ec.message(), kUsage);

    const int n = static_cast<int>(dirs.size());
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min(jobs, n);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::string first_error;

    auto worker = [&] {
        // Each worker gets its own bundle copy; valuation only reads it, but
        // copies keep the model stores trivially thread-safe.
        ModelBundle local = bundle;
        for (int i = next.fetch_add(1); i < n && !failed; i = next.fetch_add(1)) {
            try {
                const MatchData match = read_match(dirs[i]);
                MatchValuation v;
                if (oracle) {
                    const GroundTruth truth = read_match_truth(dirs[i]);
                    v = value_match(match, oracle_values_provider(truth));
                } else {
                    v = value_match(match, learned_values_provider(local, match.pitch));
                }
                const fs::path mdir = fs::path(out_dir) / match.match_id;
                fs::create_directories(mdir);
                write_allocations_csv((mdir / "allocations.csv").string(), match.match_id,
                                      v.allocations);
                write_valued_actions_csv((mdir / "valued_actions.csv").string(), v.actions);
                std::ofstream dump(mdir / "epv_dump.jsonl");
                for (const auto& j : v.epv_dump) dump << j.dump() << "\n";
            } catch (const std::exception& e) {
                std::scoped_lock lock(err_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failed) return fail(first_error, kUsage);
    return kOk;
}

int cmd_report(const RunConfig& cfg, const std::string& value_dir) {
    std::vector<MatchData> matches;
    try {
        matches = load_matches(cfg.data_dir);
    } catch (const std::exception& e) {
        return fail(e.what(), kUsage);
    }
    std::vector<MatchValuation> valuations;
    for (const auto& m : matches) {
        const fs::path mdir = fs::path(value_dir) / m.match_id;
        if (!fs::exists(mdir / "allocations.csv"))
            return fail("missing allocations for " + m.match_id + " under " + value_dir +
                            " (run `defcon value` first)",
                        kUsage);
        MatchValuation v;
        v.match_id = m.match_id;
        v.allocations = read_allocations_csv((mdir / "allocations.csv").string()).second;
        v.actions = read_valued_actions_csv((mdir / "valued_actions.csv").string());
        valuations.push_back(std::move(v));
    }
    ReportInputs in;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        in.valuations.push_back(&valuations[i]);
        in.matches.push_back(&matches[i]);
    }
    try {
        write_reports(cfg.report_dir, in, cfg.minutes_threshold, cfg.zones_x, cfg.zones_y,
                      cfg.market_values);
    } catch (const std::exception& e) {
        return fail(e.what(), kUsage);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DEFCON: graph-based defensive valuation for soccer tracking data"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> jobs_flag;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--seed", seed_flag, "master random seed (overrides config)");
    app.add_option("--jobs", jobs_flag, "worker threads (default: logical cores)");

    auto* sim = app.add_subcommand("simulate", "generate synthetic matches with ground truth");
    std::optional<int> sim_matches, sim_actions;
    std::optional<std::string> sim_data;
    sim->add_option("--matches", sim_matches, "number of matches");
    sim->add_option("--actions", sim_actions, "on-ball actions per match");
    sim->add_option("--data-dir", sim_data, "output dataset directory");

    auto* train = app.add_subcommand("train", "train the model bundle on a dataset");
    std::optional<std::string> train_data, train_model;
    std::string train_task_name;
    std::optional<int> train_epochs;
    std::optional<double> train_lr;
    train->add_option("--data-dir", train_data, "dataset directory");
    train->add_option("--model-dir", train_model, "bundle output directory");
    train->add_option("--task", train_task_name, "train a single task (a1,b1,b2,c1,c2,d1)");
    train->add_option("--max-epochs", train_epochs, "epoch cap");
    train->add_option("--learning-rate", train_lr, "optimizer step size");

    auto* eval = app.add_subcommand("evaluate", "evaluate a trained bundle on a dataset");
    std::optional<std::string> eval_data, eval_model;
    eval->add_option("--data-dir", eval_data, "dataset directory");
    eval->add_option("--model-dir", eval_model, "bundle directory");

    auto* value = app.add_subcommand("value", "value matches and allocate defensive credit");
    std::optional<std::string> value_data, value_model;
    std::string value_out = "valued";
    bool oracle = false;
    value->add_option("--data-dir", value_data, "dataset directory");
    value->add_option("--model-dir", value_model, "bundle directory");
    value->add_option("--out", value_out, "valuation output directory");
    value->add_flag("--oracle", oracle, "use generator ground truth instead of the bundle");

    auto* report = app.add_subcommand("report", "aggregate valuations into report artifacts");
    std::optional<std::string> report_data, report_out, report_market;
    std::string report_value_dir = "valued";
    std::optional<double> report_minutes;
    std::optional<int> report_zx, report_zy;
    report->add_option("--data-dir", report_data, "dataset directory");
    report->add_option("--value-dir", report_value_dir, "valuation directory");
    report->add_option("--report-dir", report_out, "report output directory");
    report->add_option("--market-values", report_market,
                       "market-value CSV for correlation tables");
    report->add_option("--minutes-threshold", report_minutes, "minimum minutes for summaries");
    report->add_option("--zones-x", report_zx, "heatmap columns");
    report->add_option("--zones-y", report_zy, "heatmap rows");

    for (auto* sub : {sim, train, eval, value, report}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_run_config(config_path);
    } catch (const std::exception& e) {
        return fail(e.what(), kUsage);
    }
    // Flags win over the config file.
    if (seed_flag) cfg.seed = *seed_flag;
    if (jobs_flag) cfg.jobs = *jobs_flag;
    if (sim_matches) cfg.matches = *sim_matches;
    if (sim_actions) cfg.generator.actions_per_match = *sim_actions;
    if (sim_data) cfg.data_dir = *sim_data;
    if (train_data) cfg.data_dir = *train_data;
    if (train_model) cfg.model_dir = *train_model;
    if (train_epochs) cfg.train.max_epochs = *train_epochs;
    if (train_lr) cfg.train.learning_rate = *train_lr;
    if (eval_data) cfg.data_dir = *eval_data;
    if (eval_model) cfg.model_dir = *eval_model;
    if (value_data) cfg.data_dir = *value_data;
    if (value_model) cfg.model_dir = *value_model;
    if (report_data) cfg.data_dir = *report_data;
    if (report_out) cfg.report_dir = *report_out;
    if (report_market) cfg.market_values = *report_market;
    if (report_minutes) cfg.minutes_threshold = *report_minutes;
    if (report_zx) cfg.zones_x = *report_zx;
    if (report_zy) cfg.zones_y = *report_zy;

    try {
        if (sim->parsed()) return cmd_simulate(cfg);
        if (train->parsed()) return cmd_train(cfg, train_task_name);
        if (eval->parsed()) return cmd_evaluate(cfg);
        if (value->parsed()) return cmd_value(cfg, value_out, oracle, cfg.jobs);
        if (report->parsed()) return cmd_report(cfg, report_value_dir);
    } catch (const SchemaMismatchError& e) {
        return fail(e.what(), kSchema);
    } catch (const DivergentLossError& e) {
        return fail(e.what(), kDivergent);
    } catch (const std::exception& e) {
        return fail(e.what(), kUsage);
    }
    return fail("no subcommand", kUsage);
}
