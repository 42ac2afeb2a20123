#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wavecls/eval.hpp"
#include "wavecls/model_io.hpp"
#include "wavecls/wavesvm.hpp"
#include "wavecls/wavetsvm.hpp"

using nlohmann::json;
using namespace wavecls;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("WAVECLS_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env + std::string(env).size()) return v;
        throw usage_error("WAVECLS_SEED must be a non-negative integer");
    }
    return 0;
}

json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw usage_error(std::string("cannot open ") + what + " '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw usage_error("malformed " + std::string(what) + " '" + path + "': " + e.what());
    }
    return j;
}

// Turn "--config file.json" into flags inserted right after the subcommand
// token, so explicitly passed flags (parsed later, take-last) win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string config_path;
    for (std::size_t i = 1; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw usage_error("--config needs a file argument");
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + i);
        } else {
            ++i;
        }
    }
    if (config_path.empty()) return args;

    const json cfg = load_json_file(config_path, "config file");
    if (!cfg.is_object()) throw usage_error("config file must be a JSON object");
    std::vector<std::string> derived;
    for (const auto& [key, value] : cfg.items()) {
        std::string text;
        if (value.is_string())
            text = value.get<std::string>();
        else
            text = value.dump();
        derived.push_back("--" + key + "=" + text);
    }
    // insert after the first non-flag token (the subcommand name)
    std::size_t pos = args.size();
    for (std::size_t i = 1; i < args.size(); ++i)
        if (!args[i].empty() && args[i][0] != '-') {
            pos = i + 1;
            break;
        }
    args.insert(args.begin() + pos, derived.begin(), derived.end());
    return args;
}

struct DataOpts {
    std::string path;
    std::string label = "label";
    std::string positive = "1";
};

void add_data_opts(CLI::App* cmd, DataOpts& d) {
    cmd->add_option("--data", d.path, "dataset CSV")->required();
    cmd->add_option("--label", d.label, "label column name or 0-based index");
    cmd->add_option("--positive", d.positive, "label value mapped to +1");
}

struct HyperOpts {
    double c = 1.0;
    double c2 = 1.0;
    double a = 1.0;
    double lambda = 1.0;
    double sigma = 1.0;
    double alpha = 1e-2;
    int batch = 32;
    int iters = 1000;
    double eta = 1e-5;
};

void add_hyper_opts(CLI::App* cmd, HyperOpts& h) {
    cmd->add_option("--C", h.c, "loss trade-off (twin: C1=C3)");
    cmd->add_option("--C2", h.c2, "twin second penalty (C2=C4)");
    cmd->add_option("--a", h.a, "wave loss shape");
    cmd->add_option("--lambda", h.lambda, "wave loss bounding parameter");
    cmd->add_option("--sigma", h.sigma, "Gaussian kernel width");
    cmd->add_option("--alpha", h.alpha, "Adam learning rate");
    cmd->add_option("--batch", h.batch, "Adam mini-batch size");
    cmd->add_option("--iters", h.iters, "iteration cap");
    cmd->add_option("--eta", h.eta, "convergence tolerance on the parameter step");
}

json tuple_to_json(const ParamTuple& p, ModelFamily family) {
    json j{{"C", p.c}, {"lambda", p.lambda}, {"a", p.a}};
    if (family_is_twin(family)) j["C2"] = p.c2;
    if (family_is_kernel(family)) j["sigma"] = p.sigma;
    return j;
}

json report_to_json(const GridSearchResult& r, FoldScore score) {
    json j;
    j["model"] = family_name(r.family);
    j["folds"] = r.folds;
    j["seed"] = r.seed;
    j["score_mode"] = score == FoldScore::BestOfK ? "best-of-k" : "mean-of-k";
    j["best"] = tuple_to_json(r.best, r.family);
    j["best_accuracy"] = r.best_score;
    json cells = json::array();
    for (const auto& c : r.cells) {
        json cell = tuple_to_json(c.params, r.family);
        cell["fold_accuracy"] = c.fold_accuracy;
        cell["score"] = c.score;
        cell["failed"] = c.failed;
        if (c.failed) cell["error"] = c.error;
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    return j;
}

void write_report_csv(const std::string& path, const GridSearchResult& r) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "C,C2,lambda,a,sigma";
    for (int f = 0; f < r.folds; ++f) out << ",fold" << f + 1;
    out << ",score,failed\n";
    for (const auto& c : r.cells) {
        out << c.params.c << ',' << c.params.c2 << ',' << c.params.lambda << ','
            << c.params.a << ',' << c.params.sigma;
        for (int f = 0; f < r.folds; ++f)
            out << ',' << (f < static_cast<int>(c.fold_accuracy.size())
                               ? std::to_string(c.fold_accuracy[f])
                               : std::string());
        out << ',' << c.score << ',' << (c.failed ? 1 : 0) << '\n';
    }
}

GridSpec grid_from_file(const std::string& path, ModelFamily family) {
    GridSpec g = GridSpec::defaults(family);
    const json j = load_json_file(path, "grid file");
    if (!j.is_object()) throw usage_error("grid file must be a JSON object");
    const auto read = [&](const char* key, std::vector<double>& target) {
        if (!j.contains(key)) return;
        if (!j[key].is_array()) throw usage_error(std::string("grid file: '") + key +
                                                  "' must be an array of numbers");
        std::vector<double> vals;
        for (const auto& v : j[key]) {
            if (!v.is_number()) throw usage_error(std::string("grid file: '") + key +
                                                  "' must be an array of numbers");
            vals.push_back(v.get<double>());
        }
        target = std::move(vals);
    };
    read("C", g.c_values);
    read("C2", g.c2_values);
    read("lambda", g.lambda_values);
    read("a", g.a_values);
    read("sigma", g.sigma_values);
    for (const auto& [key, value] : j.items()) {
        static const std::vector<std::string> known{"C", "C2", "lambda", "a", "sigma"};
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw usage_error("grid file: unknown key '" + key + "'");
        (void)value;
    }
    g.validate(family);
    return g;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << text;
}

int cmd_train(const std::string& model_name, const DataOpts& data_opts, const HyperOpts& h,
              std::uint64_t seed, const std::string& out_path, const std::string& test_path) {
    const ModelFamily family = parse_model_family(model_name);
    const Dataset raw = load_csv(data_opts.path, data_opts.label, data_opts.positive);
    const MinMaxScaler scaler = MinMaxScaler::fit(raw);
    const Dataset train = scaler.apply(raw);

    SavedModel saved;
    saved.family = family;
    saved.scaler = scaler;

    const double t0 = now_seconds();
    if (family_is_twin(family)) {
        TwinConfig cfg;
        cfg.c1 = cfg.c3 = h.c;
        cfg.c2 = cfg.c4 = h.c2;
        cfg.loss = WaveParams(h.a, h.lambda);
        cfg.eta = h.eta;
        cfg.max_iter = h.iters;
        if (family_is_kernel(family)) cfg.kernel = KernelSpec::gaussian(h.sigma);
        saved.twin = train_twin(train, cfg);
    } else {
        AdamConfig cfg;
        cfg.c = h.c;
        cfg.loss = WaveParams(h.a, h.lambda);
        cfg.alpha = h.alpha;
        cfg.eta = h.eta;
        cfg.batch_size = h.batch;
        cfg.max_iter = h.iters;
        cfg.seed = seed;
        if (family_is_kernel(family))
            saved.kernel = train_kernel(train, cfg, KernelSpec::gaussian(h.sigma));
        else
            saved.linear = train_linear(train, cfg);
    }
    const double elapsed = now_seconds() - t0;

    save_model(out_path, saved);
    std::cout << "model: " << family_name(family) << "\n";
    std::cout << "train accuracy: " << accuracy(saved.predict(raw.X), raw.y) << "%\n";
    std::cout << "training time: " << elapsed << " s\n";
    std::cout << "model file: " << out_path << "\n";
    if (!test_path.empty()) {
        const Dataset test = load_csv(test_path, data_opts.label, data_opts.positive);
        std::cout << "test accuracy: " << accuracy(saved.predict(test.X), test.y) << "%\n";
    }
    return 0;
}

int cmd_benchmark(const std::string& model_name, const DataOpts& data_opts,
                  const std::string& grid_file, int folds, std::uint64_t seed, int jobs,
                  bool mean_folds, const std::string& out_json, const std::string& out_csv) {
    const ModelFamily family = parse_model_family(model_name);
    const GridSpec grid =
        grid_file.empty() ? GridSpec::defaults(family) : grid_from_file(grid_file, family);
    const Dataset data = load_csv(data_opts.path, data_opts.label, data_opts.positive);
    const FoldScore score = mean_folds ? FoldScore::MeanOfK : FoldScore::BestOfK;

    const double t0 = now_seconds();
    const GridSearchResult result = grid_search_cv(data, family, grid, folds, seed, score, jobs);
    const double elapsed = now_seconds() - t0;

    if (!out_json.empty())
        write_text_file(out_json, report_to_json(result, score).dump(2) + "\n");
    if (!out_csv.empty()) write_report_csv(out_csv, result);

    std::cout << "model: " << family_name(family) << "\n";
    std::cout << "cells: " << result.cells.size() << "\n";
    std::cout << "best: " << tuple_to_json(result.best, family).dump() << "\n";
    std::cout << "best accuracy: " << result.best_score << "%\n";
    std::cout << "sweep time: " << elapsed << " s\n";
    return 0;
}

int cmd_noise_sweep(const std::string& model_name, const DataOpts& data_opts,
                    const std::string& grid_file, int folds, std::uint64_t seed, int jobs,
                    bool mean_folds, std::vector<double> levels, const std::string& mode_name,
                    const std::string& out_csv, const std::string& out_json) {
    const ModelFamily family = parse_model_family(model_name);
    const GridSpec grid =
        grid_file.empty() ? GridSpec::defaults(family) : grid_from_file(grid_file, family);
    const Dataset data = load_csv(data_opts.path, data_opts.label, data_opts.positive);
    const FoldScore score = mean_folds ? FoldScore::MeanOfK : FoldScore::BestOfK;

    NoiseMode mode;
    if (mode_name == "cells")
        mode = NoiseMode::CellFraction;
    else if (mode_name == "amplitude")
        mode = NoiseMode::AmplitudeRatio;
    else
        throw usage_error("--noise-mode must be 'cells' or 'amplitude'");

    std::ostringstream csv;
    csv.precision(std::numeric_limits<double>::max_digits10);
    csv << "level,C,C2,lambda,a,sigma,best_accuracy\n";
    json levels_json = json::array();
    const double t0 = now_seconds();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double level = levels[i];
        if (level < 0.0) throw usage_error("noise level must be non-negative");
        const Dataset noisy =
            level == 0.0
                ? data
                : inject_gaussian_noise(data, NoiseConfig(level, mix_seed(seed, i), mode));
        const GridSearchResult r = grid_search_cv(noisy, family, grid, folds, seed, score, jobs);
        csv << level << ',' << r.best.c << ',' << r.best.c2 << ',' << r.best.lambda << ','
            << r.best.a << ',' << r.best.sigma << ',' << r.best_score << '\n';
        json entry = report_to_json(r, score);
        entry["level"] = level;
        levels_json.push_back(std::move(entry));
        std::cout << "level " << level << ": best accuracy " << r.best_score << "%\n";
    }
    const double elapsed = now_seconds() - t0;

    write_text_file(out_csv, csv.str());
    if (!out_json.empty()) {
        json j{{"model", family_name(family)},
               {"seed", seed},
               {"noise_mode", mode_name},
               {"levels", std::move(levels_json)}};
        write_text_file(out_json, j.dump(2) + "\n");
    }
    std::cout << "sweep time: " << elapsed << " s\n";
    return 0;
}

int cmd_stats(const std::string& table_path, double q_alpha, bool have_q,
              const std::string& out_json) {
    const RankTable table = load_rank_table(table_path);
    const Vector ranks = mean_ranks(table);
    // Friedman over ranks rounded to the two decimals at which they are
    // reported, so the printed ranks and the statistic stay consistent.
    Vector rounded(ranks.size());
    for (Eigen::Index j = 0; j < ranks.size(); ++j)
        rounded(j) = std::round(ranks(j) * 100.0) / 100.0;
    const FriedmanResult fr =
        friedman_test(rounded, static_cast<int>(table.datasets.size()),
                      static_cast<int>(table.models.size()));

    json j;
    j["datasets"] = table.datasets.size();
    j["models"] = table.models;
    json ranks_json = json::object();
    for (std::size_t m = 0; m < table.models.size(); ++m)
        ranks_json[table.models[m]] = rounded(static_cast<Eigen::Index>(m));
    j["mean_ranks"] = std::move(ranks_json);
    j["friedman_chi2"] = fr.chi2;
    j["iman_davenport_f"] = fr.f_stat;
    if (have_q)
        j["nemenyi_cd"] = nemenyi_cd(q_alpha, static_cast<int>(table.datasets.size()),
                                     static_cast<int>(table.models.size()));

    json wtl = json::array();
    for (std::size_t a = 0; a < table.models.size(); ++a)
        for (std::size_t b = a + 1; b < table.models.size(); ++b) {
            const WinTieLoss r = win_tie_loss(table, table.models[a], table.models[b]);
            wtl.push_back({{"model_a", table.models[a]},
                           {"model_b", table.models[b]},
                           {"wins", r.wins},
                           {"ties", r.ties},
                           {"losses", r.losses},
                           {"compared", r.compared},
                           {"threshold", r.threshold},
                           {"significant", r.significant}});
        }
    j["win_tie_loss"] = std::move(wtl);

    std::cout << "datasets: " << table.datasets.size() << ", models: "
              << table.models.size() << "\n";
    std::cout << "mean ranks:";
    for (std::size_t m = 0; m < table.models.size(); ++m)
        std::cout << ' ' << table.models[m] << '=' << rounded(static_cast<Eigen::Index>(m));
    std::cout << "\n";
    std::cout << "friedman chi2: " << fr.chi2 << "\n";
    std::cout << "iman-davenport F: " << fr.f_stat << "\n";
    if (have_q)
        std::cout << "nemenyi CD (q=" << q_alpha << "): "
                  << j["nemenyi_cd"].get<double>() << "\n";
    else
        std::cout << "nemenyi CD: omitted (pass --q-alpha to compute)\n";
    for (const auto& e : j["win_tie_loss"])
        std::cout << e["model_a"].get<std::string>() << " vs "
                  << e["model_b"].get<std::string>() << ": " << e["wins"] << "/"
                  << e["ties"] << "/" << e["losses"]
                  << (e["significant"].get<bool>() ? " (significant)" : "") << "\n";

    if (!out_json.empty()) write_text_file(out_json, j.dump(2) + "\n");
    return 0;
}

int cmd_loss_curve(const std::string& loss_name, double a, double lambda, double tau,
                   double theta, double lo, double hi, int samples,
                   const std::string& out_path) {
    LossSpec spec;
    if (loss_name == "hinge")
        spec = LossSpec::hinge();
    else if (loss_name == "pinball")
        spec = LossSpec::pinball(tau);
    else if (loss_name == "ramp")
        spec = LossSpec::ramp(theta);
    else if (loss_name == "squared-hinge")
        spec = LossSpec::squared_hinge();
    else if (loss_name == "smooth-pinball")
        spec = LossSpec::smooth_pinball(tau);
    else if (loss_name == "linex")
        spec = LossSpec::linex(a);
    else if (loss_name == "roboss")
        spec = LossSpec::roboss(a, lambda);
    else if (loss_name == "wave")
        spec = LossSpec::wave(a, lambda);
    else if (loss_name == "zero-one")
        spec = LossSpec::zero_one_lambda(lambda);
    else
        throw usage_error("unknown loss '" + loss_name + "'");

    if (out_path == "-") {
        write_loss_curve(std::cout, spec, lo, hi, samples);
    } else {
        std::ofstream out(out_path);
        if (!out) throw data_error("cannot write '" + out_path + "'");
        write_loss_curve(out, spec, lo, hi, samples);
        std::cout << "wrote " << samples << " samples to " << out_path << "\n";
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{
        "wave-loss classification toolkit\n"
        "exit codes: 2 usage error, 3 data error, 4 numeric failure"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    const std::uint64_t env_seed = default_seed();

    // train
    auto* train = app.add_subcommand("train", "train one model and save it as JSON");
    std::string tr_model, tr_out = "model.json", tr_test, tr_config;
    DataOpts tr_data;
    HyperOpts tr_hyper;
    std::uint64_t tr_seed = env_seed;
    train->add_option("--model", tr_model,
                      "wave-svm-linear|wave-svm-kernel|wave-tsvm-linear|wave-tsvm-kernel")
        ->required();
    add_data_opts(train, tr_data);
    add_hyper_opts(train, tr_hyper);
    train->add_option("--seed", tr_seed, "master RNG seed (or WAVECLS_SEED)");
    train->add_option("--out", tr_out, "model output path");
    train->add_option("--test", tr_test, "optional held-out CSV to score");
    train->add_option("--config", tr_config, "JSON config file; explicit flags win");

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "cross-validated grid search");
    std::string be_model, be_grid, be_json = "benchmark.json", be_csv, be_config;
    DataOpts be_data;
    int be_folds = 4, be_jobs = 1;
    bool be_mean = false;
    std::uint64_t be_seed = env_seed;
    bench->add_option("--model", be_model, "model family")->required();
    add_data_opts(bench, be_data);
    bench->add_option("--grid-file", be_grid, "JSON grid override {C,C2,lambda,a,sigma}");
    bench->add_option("--folds", be_folds, "cross-validation folds");
    bench->add_option("--seed", be_seed, "master RNG seed (or WAVECLS_SEED)");
    bench->add_option("--jobs", be_jobs, "concurrent grid cells");
    bench->add_flag("--mean-folds", be_mean,
                    "score a tuple by its mean fold accuracy instead of the best fold");
    bench->add_option("--out-json", be_json, "JSON report path");
    bench->add_option("--out-csv", be_csv, "flat CSV report path");
    bench->add_option("--config", be_config, "JSON config file; explicit flags win");

    // noise-sweep
    auto* noise = app.add_subcommand("noise-sweep",
                                     "repeat the benchmark under feature noise");
    std::string no_model, no_grid, no_csv = "noise_sweep.csv", no_json, no_config;
    std::string no_mode = "cells";
    DataOpts no_data;
    int no_folds = 4, no_jobs = 1;
    bool no_mean = false;
    std::uint64_t no_seed = env_seed;
    std::vector<double> no_levels{0.0, 0.05, 0.10, 0.20, 0.30};
    noise->add_option("--model", no_model, "model family")->required();
    add_data_opts(noise, no_data);
    noise->add_option("--grid-file", no_grid, "JSON grid override");
    noise->add_option("--folds", no_folds, "cross-validation folds");
    noise->add_option("--seed", no_seed, "master RNG seed (or WAVECLS_SEED)");
    noise->add_option("--jobs", no_jobs, "concurrent grid cells");
    noise->add_flag("--mean-folds", no_mean, "mean fold scoring");
    noise->add_option("--levels", no_levels, "noise levels to sweep")
        ->expected(-1);
    noise->add_option("--noise-mode", no_mode,
                      "cells (corrupt a fraction of cells) or amplitude (scale all)");
    noise->add_option("--out-csv", no_csv, "level/accuracy CSV path");
    noise->add_option("--out-json", no_json, "optional full JSON report path");
    noise->add_option("--config", no_config, "JSON config file; explicit flags win");

    // stats
    auto* stats = app.add_subcommand("stats", "rank statistics over an accuracy table");
    std::string st_table, st_json, st_config;
    double st_q = 0.0;
    stats->add_option("--table", st_table, "accuracy CSV (datasets x models)")->required();
    auto* q_opt = stats->add_option("--q-alpha", st_q, "Nemenyi critical value q_alpha");
    stats->add_option("--out-json", st_json, "JSON report path");
    stats->add_option("--config", st_config, "JSON config file; explicit flags win");

    // loss-curve
    auto* curve = app.add_subcommand("loss-curve", "sample a loss function to CSV");
    std::string lc_loss = "wave", lc_out = "loss_curve.csv", lc_config;
    double lc_a = 1.0, lc_lambda = 1.0, lc_tau = 0.5, lc_theta = 1.0;
    double lc_lo = -5.0, lc_hi = 5.0;
    int lc_samples = 1001;
    curve->add_option("--loss", lc_loss,
                      "hinge|pinball|ramp|squared-hinge|smooth-pinball|linex|roboss|wave|zero-one");
    curve->add_option("--a", lc_a, "shape parameter (wave, linex, roboss)");
    curve->add_option("--lambda", lc_lambda, "bounding parameter");
    curve->add_option("--tau", lc_tau, "pinball parameter");
    curve->add_option("--theta", lc_theta, "ramp clipping point");
    curve->add_option("--u-min", lc_lo, "lower end of the sampled margin range");
    curve->add_option("--u-max", lc_hi, "upper end of the sampled margin range");
    curve->add_option("--samples", lc_samples, "number of samples");
    curve->add_option("--out", lc_out, "output CSV path ('-' for stdout)");
    curve->add_option("--config", lc_config, "JSON config file; explicit flags win");

    const std::vector<std::string> args = expand_config(argc, argv);
    std::vector<const char*> cargs;
    for (const auto& s : args) cargs.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (train->parsed())
        return cmd_train(tr_model, tr_data, tr_hyper, tr_seed, tr_out, tr_test);
    if (bench->parsed())
        return cmd_benchmark(be_model, be_data, be_grid, be_folds, be_seed, be_jobs, be_mean,
                             be_json, be_csv);
    if (noise->parsed())
        return cmd_noise_sweep(no_model, no_data, no_grid, no_folds, no_seed, no_jobs, no_mean,
                               no_levels, no_mode, no_csv, no_json);
    if (stats->parsed()) return cmd_stats(st_table, st_q, q_opt->count() > 0, st_json);
    if (curve->parsed())
        return cmd_loss_curve(lc_loss, lc_a, lc_lambda, lc_tau, lc_theta, lc_lo, lc_hi,
                              lc_samples, lc_out);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
