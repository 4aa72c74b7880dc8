#include "rfp/cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>

#include "rfp/data/cache.hpp"
#include "rfp/errors.hpp"
#include "rfp/report/reports.hpp"
#include "rfp/seed.hpp"
#include "rfp/sim/capture.hpp"
#include "rfp/sim/profiles.hpp"
#include "rfp/train/curriculum.hpp"
#include "rfp/train/finetune.hpp"

namespace rfp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    train::RunConfig cfg;
    std::uint64_t seed = 0;
    fs::path out;
    bool quiet = false;
    std::ostream* out_s = nullptr;
    std::ostream* err_s = nullptr;

    std::ostream& log() const { return *out_s; }
    fs::path captures(const std::string& opt) const { return opt.empty() ? out / "captures" : fs::path(opt); }
    fs::path models(const std::string& opt) const {
        return opt.empty() ? out / "models" / std::string(models::to_string(cfg.architecture)) : fs::path(opt);
    }
};

void require_exists(const fs::path& p) {
    if (!fs::exists(p)) throw IoError(p.string() + " does not exist");
}

fs::path make_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
    return p;
}

std::string task_slug(const data::Task& t) {
    switch (t.kind) {
        case data::TaskKind::device_at_distance: return "device_" + data::format_distance(t.distance_ft) + "ft";
        case data::TaskKind::distance: return "distance";
        case data::TaskKind::device: return "device_all";
    }
    return "task";
}

// Snapshot of one command: what it read, what it wrote, with which settings.
void record_run(const Context& ctx, const std::string& name, const std::vector<fs::path>& inputs,
                const std::vector<fs::path>& outputs) {
    json j = {{"format", "rfp-run"},
              {"version", 1},
              {"command", name},
              {"seed", ctx.seed},
              {"output_dir", ctx.out.string()},
              {"config", train::to_config_text(ctx.cfg)}};
    j["inputs"] = json::array();
    for (const auto& p : inputs) j["inputs"].push_back(p.string());
    j["outputs"] = json::array();
    for (const auto& p : outputs) j["outputs"].push_back(p.string());
    auto dir = make_dir(ctx.out / "runs");
    std::string file = name;
    std::replace(file.begin(), file.end(), ' ', '_');
    report::write_text(dir / (file + ".json"), j.dump(2) + "\n");
}

data::DatasetSplits load_splits(const Context& ctx, const fs::path& captures, const std::string& dataset_dir,
                                const data::Task& task) {
    if (!dataset_dir.empty()) {
        fs::path d(dataset_dir);
        data::DatasetSplits s{data::read_cache(d / "train.rfpd"), data::read_cache(d / "val.rfpd"),
                              data::read_cache(d / "test.rfpd")};
        if (!(s.train.task == task)) {
            throw ConfigError(d.string() + " holds a " + s.train.task.describe() + " dataset, expected " +
                              task.describe());
        }
        return s;
    }
    require_exists(captures / "manifest.json");
    return data::build_dataset(sim::read_manifest(captures), task, ctx.cfg.split, ctx.cfg.window_length,
                               ctx.cfg.normalize);
}

std::vector<double> distances_of(const std::vector<std::string>& labels) {
    std::vector<double> out;
    for (const auto& l : labels) out.push_back(std::stod(l));
    return out;
}

train::EpochCallback progress(const Context& ctx, std::string tag) {
    if (ctx.quiet) return {};
    return [&ctx, tag](const train::EpochRecord& r) {
        char line[200];
        std::snprintf(line, sizeof line, "[%s] epoch %zu lr %.3g train_loss %.4f val_loss %.4f val_acc %.4f\n",
                      tag.c_str(), r.epoch, r.lr, r.train_loss, r.val_loss, r.val_acc);
        *ctx.err_s << line;
    };
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

std::uint64_t task_key(const data::Task& t) {
    return static_cast<std::uint64_t>(t.kind) * 1000003ULL + static_cast<std::uint64_t>(std::llround(t.distance_ft * 1000));
}

// ------------------------------------------------------------------ commands

void cmd_generate(const Context& ctx, int runs, const std::string& captures_opt) {
    auto spec = sim::capture_spec(sim::preset(ctx.cfg.preset), ctx.seed);
    spec.runs = runs;
    auto dir = ctx.captures(captures_opt);
    auto m = sim::capture_dataset(spec, dir);
    ctx.log() << "generated " << m.recordings.size() << " recordings (" << ctx.cfg.preset << " preset, "
              << m.device_ids().size() << " devices, " << m.distances().size() << " distances) in " << dir.string()
              << "\n";
    record_run(ctx, "generate", {}, {dir / "manifest.json"});
}

std::optional<data::Task> parse_task(const std::string& name, std::optional<double> distance) {
    if (name == "device") {
        if (distance) return data::Task::device_at_distance(*distance);
        return data::Task::device();
    }
    if (name == "distance") return data::Task::distance();
    throw ConfigError("task must be device or distance, got '" + name + "'");
}

void cmd_dataset(const Context& ctx, const std::string& captures_opt, const data::Task& task) {
    auto captures = ctx.captures(captures_opt);
    auto s = load_splits(ctx, captures, "", task);
    auto dir = make_dir(ctx.out / "datasets" / task_slug(task));
    data::write_cache(s.train, dir / "train.rfpd");
    data::write_cache(s.val, dir / "val.rfpd");
    data::write_cache(s.test, dir / "test.rfpd");
    ctx.log() << task.describe() << ": " << s.train.size() << " train, " << s.val.size() << " val, " << s.test.size()
              << " test windows of length " << s.train.window_length << " in " << dir.string() << "\n";
    record_run(ctx, "dataset " + task_slug(task), {captures / "manifest.json"},
               {dir / "train.rfpd", dir / "val.rfpd", dir / "test.rfpd"});
}

fs::path model_file(const fs::path& dir, const data::Task& t) {
    return dir / (t.kind == data::TaskKind::distance ? std::string("distance.ckpt") : task_slug(t) + ".ckpt");
}

void save_model(models::Net net, const data::Task& task, const data::LabeledDataset& train, const fs::path& path) {
    if (task.kind == data::TaskKind::distance) {
        models::save_classifier(models::DistanceClassifier{std::move(net), distances_of(train.label_names)}, path);
    } else {
        models::save_classifier(models::DeviceClassifier{std::move(net), task.distance_ft, train.label_names}, path);
    }
}

void cmd_train(const Context& ctx, const data::Task& task, bool curriculum, const std::string& captures_opt,
               const std::string& dataset_dir, const std::string& models_opt) {
    if (task.kind == data::TaskKind::device) throw ConfigError("train device needs --distance");
    auto captures = ctx.captures(captures_opt);
    auto s = load_splits(ctx, captures, dataset_dir, task);
    auto net = models::build_network(ctx.cfg.architecture, s.train.n_classes(), s.train.window_length,
                                     derive_seed(ctx.seed, {task_key(task), 1}));
    auto cfg = ctx.cfg.train;
    cfg.seed = derive_seed(ctx.seed, {task_key(task), 2});

    auto dir = make_dir(ctx.models(models_opt));
    auto ckpt = model_file(dir, task);
    auto stem = ckpt.stem().string();
    std::vector<fs::path> outputs = {ckpt};
    double best = 0.0;
    if (curriculum) {
        auto r = train::curriculum_fit(net, s.train, s.val, ctx.cfg.curriculum, cfg, progress(ctx, task.describe()));
        train::write_report_csv(r.stage1, dir / (stem + "_stage1.csv"));
        train::write_report_csv(r.stage2, dir / (stem + "_stage2.csv"));
        outputs.push_back(dir / (stem + "_stage1.csv"));
        outputs.push_back(dir / (stem + "_stage2.csv"));
        best = r.stage2.best_val_acc;
    } else {
        auto r = train::fit(net, s.train, s.val, cfg, progress(ctx, task.describe()));
        train::write_report_csv(r, dir / (stem + ".csv"));
        outputs.push_back(dir / (stem + ".csv"));
        best = r.best_val_acc;
    }
    double test = report::evaluate(net, s.test).accuracy;
    save_model(std::move(net), task, s.train, ckpt);
    ctx.log() << task.describe() << " (" << models::to_string(ctx.cfg.architecture) << "): val " << pct(best)
              << ", test " << pct(test) << ", saved " << ckpt.string() << "\n";
    record_run(ctx, std::string(curriculum ? "train curriculum " : "train ") + task_slug(task),
               {dataset_dir.empty() ? captures / "manifest.json" : fs::path(dataset_dir)}, outputs);
}

std::vector<models::DeviceClassifier> load_device_models(const fs::path& dir) {
    require_exists(dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        auto name = e.path().filename().string();
        if (name.rfind("device_", 0) == 0 && e.path().extension() == ".ckpt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no device_<d>ft.ckpt models in " + dir.string());
    std::vector<models::DeviceClassifier> out;
    for (const auto& f : files) out.push_back(models::load_device_classifier(f));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.distance_ft < b.distance_ft; });
    return out;
}

void cmd_assemble(const Context& ctx, const std::string& models_opt, const std::string& to_opt) {
    auto dir = ctx.models(models_opt);
    require_exists(dir / "distance.ckpt");
    auto e = models::assemble_ensemble(models::load_distance_classifier(dir / "distance.ckpt"), load_device_models(dir));
    auto to = to_opt.empty() ? ctx.out / "ensemble" : fs::path(to_opt);
    models::save_ensemble(e, to);
    ctx.log() << "assembled " << e.n_distances() << " device models x " << e.n_devices() << " devices into "
              << to.string() << "\n";
    record_run(ctx, "ensemble assemble", {dir}, {to / "ensemble.json"});
}

void cmd_finetune(const Context& ctx, const std::string& ens_opt, const std::string& captures_opt,
                  const std::string& to_opt) {
    auto from = ens_opt.empty() ? ctx.out / "ensemble" : fs::path(ens_opt);
    auto e = models::load_ensemble(from);
    auto captures = ctx.captures(captures_opt);
    auto s = load_splits(ctx, captures, "", data::Task::device());
    double before = report::evaluate(e, s.test).accuracy;
    auto cfg = ctx.cfg.train;
    cfg.seed = derive_seed(ctx.seed, {0xf1e});
    auto r = train::finetune_ensemble(e, s.train, s.val, cfg, {ctx.cfg.finetune_joint}, progress(ctx, "finetune"));
    double after = report::evaluate(e, s.test).accuracy;
    auto to = to_opt.empty() ? ctx.out / "ensemble_finetuned" : fs::path(to_opt);
    models::save_ensemble(e, to);
    train::write_report_csv(r, to / "finetune.csv");
    for (const auto& w : r.warnings) *ctx.err_s << "warning: " << w << "\n";
    ctx.log() << "fine-tuned ensemble: test " << pct(before) << " -> " << pct(after) << ", saved " << to.string()
              << "\n";
    record_run(ctx, "ensemble finetune", {from / "ensemble.json", captures / "manifest.json"},
               {to / "ensemble.json", to / "finetune.csv"});
}

data::Split parse_split(const std::string& s) {
    if (s == "train") return data::Split::train;
    if (s == "val") return data::Split::val;
    if (s == "test") return data::Split::test;
    throw ConfigError("split must be train, val or test");
}

const data::LabeledDataset& pick(const data::DatasetSplits& s, data::Split which) {
    return which == data::Split::train ? s.train : which == data::Split::val ? s.val : s.test;
}

void cmd_eval(const Context& ctx, const std::string& ens_opt, const std::string& model_opt,
              const std::string& captures_opt, const std::string& split_name) {
    auto captures = ctx.captures(captures_opt);
    auto which = parse_split(split_name);
    auto dir = make_dir(ctx.out / "eval");
    report::EvalResult r;
    std::string stem;
    fs::path input;
    if (!model_opt.empty()) {
        input = model_opt;
        require_exists(input);
        models::Net net({1, 1}, {nn::LayerSpec::flatten()}, 0);
        data::Task task;
        try {
            auto m = models::load_device_classifier(input);
            task = data::Task::device_at_distance(m.distance_ft);
            net = std::move(m.net);
        } catch (const ConfigError&) {
            net = models::load_distance_classifier(input).net;
            task = data::Task::distance();
        }
        auto cfg_ctx = ctx;
        cfg_ctx.cfg.window_length = net.input_shape().at(1);
        auto s = load_splits(cfg_ctx, captures, "", task);
        r = report::evaluate(net, pick(s, which));
        stem = input.stem().string();
    } else {
        input = ens_opt.empty() ? ctx.out / "ensemble" : fs::path(ens_opt);
        auto e = models::load_ensemble(input);
        auto cfg_ctx = ctx;
        cfg_ctx.cfg.window_length = e.distance_model.net.input_shape().at(1);
        auto s = load_splits(cfg_ctx, captures, "", data::Task::device());
        r = report::evaluate(e, pick(s, which));
        stem = input.filename().string();
        if (stem.empty() || stem == "ensemble.json") stem = "ensemble";
    }
    stem += "_" + split_name;
    report::write_evaluation(r, dir, stem);
    ctx.log() << r.task << " on " << split_name << ": accuracy " << pct(r.accuracy) << " over " << r.total
              << " windows; wrote " << (dir / (stem + "_metrics.csv")).string() << "\n";
    record_run(ctx, "eval " + stem, {input, captures / "manifest.json"},
               {dir / (stem + "_metrics.csv"), dir / (stem + "_confusion.csv")});
}

void cmd_heatmap(const Context& ctx, const std::string& ens_opt, const std::string& captures_opt) {
    auto from = ens_opt.empty() ? ctx.out / "ensemble" : fs::path(ens_opt);
    auto e = models::load_ensemble(from);
    auto captures = ctx.captures(captures_opt);
    auto cfg_ctx = ctx;
    cfg_ctx.cfg.window_length = e.distance_model.net.input_shape().at(1);
    auto s = load_splits(cfg_ctx, captures, "", data::Task::device());
    auto g = report::ensemble_heatmap(e, s.test);
    auto dir = make_dir(ctx.out / "reports");
    report::write_heatmap(g, dir);
    ctx.log() << "heatmap over " << g.distances.size() << " distances x " << g.devices.size() << " devices; wrote "
              << (dir / "heatmap.csv").string() << "\n";
    record_run(ctx, "report heatmap", {from, captures / "manifest.json"}, {dir / "heatmap.csv", dir / "heatmap.svg"});
}

void cmd_compare(const Context& ctx, const std::vector<std::string>& families, const std::string& captures_opt) {
    auto captures = ctx.captures(captures_opt);
    require_exists(captures / "manifest.json");
    auto manifest = sim::read_manifest(captures);
    report::SeriesTable table;
    std::vector<fs::path> inputs = {captures / "manifest.json"};
    for (const auto& f : families) {
        auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--family expects NAME=DIR, got '" + f + "'");
        std::string name = f.substr(0, eq);
        fs::path dir = f.substr(eq + 1);
        inputs.push_back(dir);
        auto models = load_device_models(dir);
        std::vector<data::LabeledDataset> tests;
        for (const auto& m : models) {
            tests.push_back(data::build_dataset(manifest, data::Task::device_at_distance(m.distance_ft),
                                                ctx.cfg.split, m.net.input_shape().at(1), ctx.cfg.normalize)
                                .test);
        }
        std::vector<const models::DeviceClassifier*> fam;
        std::vector<const data::LabeledDataset*> ts;
        for (std::size_t k = 0; k < models.size(); ++k) {
            fam.push_back(&models[k]);
            ts.push_back(&tests[k]);
        }
        auto t = report::compare_architectures({name}, {fam}, ts);
        if (table.series_names.empty()) {
            table = t;
        } else if (t.keys != table.keys) {
            throw ConfigError("family " + name + " covers different distances from " + table.series_names[0]);
        } else {
            table.series_names.push_back(name);
            table.values.push_back(t.values[0]);
        }
    }
    auto dir = make_dir(ctx.out / "reports");
    report::write_comparison(table, dir);
    ctx.log() << report::to_csv(table);
    record_run(ctx, "report compare", inputs, {dir / "compare.csv", dir / "compare.svg"});
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"RF fingerprinting toolkit: simulate captures, train device and distance classifiers, assemble "
                 "and fine-tune the masked ensemble, and report."};
    app.name("rfp");
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string config_path, out_dir;
    bool quiet = false;
    app.add_option("--seed", seed, "Master seed (overrides the config file)");
    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (default $RFP_OUT_DIR or ./rfp_out)");
    app.add_flag("-q,--quiet", quiet, "Suppress per-epoch progress");

    // Options shared by several subcommands.
    std::string preset, captures, dataset_dir, models_dir, to_dir, ensemble_dir, model_ckpt, task_name = "device",
                                                                                           split_name = "test",
                                                                                           arch;
    std::optional<double> distance;
    std::optional<std::size_t> window, epochs;
    int runs = 2;
    std::vector<std::string> families;

    auto add_data = [&](CLI::App* c) {
        c->add_option("--captures", captures, "Capture directory (default <out>/captures)");
    };
    auto add_training = [&](CLI::App* c) {
        add_data(c);
        c->add_option("--dataset", dataset_dir, "Cached dataset directory written by `rfp dataset`");
        c->add_option("--models", models_dir, "Model directory (default <out>/models/<arch>)");
        c->add_option("--arch", arch, "resnet or baseline");
        c->add_option("--window", window, "Window length W");
        c->add_option("--epochs", epochs, "Maximum epochs");
    };

    auto* gen = app.add_subcommand("generate", "Simulate a capture campaign");
    gen->add_option("--preset", preset, "Simulator preset: " + [] {
        std::string s;
        for (const auto& n : sim::preset_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }());
    gen->add_option("--runs", runs, "Capture runs per (device, distance)")->check(CLI::PositiveNumber);
    add_data(gen);

    auto* ds = app.add_subcommand("dataset", "Window, label, split and cache a task's data");
    ds->add_option("--task", task_name, "device or distance");
    ds->add_option("--distance", distance, "Restrict the device task to one distance (ft)");
    ds->add_option("--window", window, "Window length W");
    add_data(ds);

    auto* tr = app.add_subcommand("train", "Train a classifier");
    tr->require_subcommand(1);
    auto* tr_dev = tr->add_subcommand("device", "Device classifier at one distance");
    tr_dev->add_option("--distance", distance, "Distance (ft)")->required();
    add_training(tr_dev);
    auto* tr_dist = tr->add_subcommand("distance", "Distance classifier");
    add_training(tr_dist);
    auto* tr_cur = tr->add_subcommand("curriculum", "Two-stage curriculum training");
    tr_cur->add_option("--task", task_name, "device or distance");
    tr_cur->add_option("--distance", distance, "Distance (ft) for the device task");
    add_training(tr_cur);

    auto* ens = app.add_subcommand("ensemble", "Build or fine-tune the masked ensemble");
    ens->require_subcommand(1);
    auto* asm_ = ens->add_subcommand("assemble", "Combine distance.ckpt and device_<d>ft.ckpt models");
    asm_->add_option("--models", models_dir, "Model directory (default <out>/models/<arch>)");
    asm_->add_option("--arch", arch, "resnet or baseline");
    asm_->add_option("--to", to_dir, "Ensemble directory (default <out>/ensemble)");
    auto* ft = ens->add_subcommand("finetune", "Route-and-update fine-tuning over all distances and runs");
    ft->add_option("--ensemble", ensemble_dir, "Ensemble directory (default <out>/ensemble)");
    ft->add_option("--to", to_dir, "Output directory (default <out>/ensemble_finetuned)");
    ft->add_option("--epochs", epochs, "Maximum epochs");
    add_data(ft);

    auto* ev = app.add_subcommand("eval", "Accuracy, precision, recall and confusion matrix");
    auto* ev_ens = ev->add_option("--ensemble", ensemble_dir, "Ensemble directory (default <out>/ensemble)");
    ev->add_option("--model", model_ckpt, "Single classifier checkpoint")->excludes(ev_ens);
    ev->add_option("--split", split_name, "train, val or test");
    add_data(ev);

    auto* rep = app.add_subcommand("report", "Heat map and architecture comparison");
    rep->require_subcommand(1);
    auto* hm = rep->add_subcommand("heatmap", "Per (distance, device) precision grid");
    hm->add_option("--ensemble", ensemble_dir, "Ensemble directory (default <out>/ensemble)");
    add_data(hm);
    auto* cmp = rep->add_subcommand("compare", "Per-distance accuracy of model families");
    cmp->add_option("--family", families, "NAME=DIR holding device_<d>ft.ckpt (repeatable)");
    add_data(cmp);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        // A missing subcommand is reported before leftover arguments; name
        // the unknown flag when there is one.
        std::vector<std::string> unknown;
        for (const auto* a : {&app, tr, ens, rep}) {
            for (const auto& r : a->remaining()) {
                if (r.rfind('-', 0) == 0) unknown.push_back(r);
            }
        }
        if (!unknown.empty() && dynamic_cast<const CLI::RequiredError*>(&e)) {
            err << "rfp: unknown option " << unknown.front() << " (see rfp --help)\n";
        } else {
            err << "rfp: " << e.what() << " (see rfp --help)\n";
        }
        return 2;
    }

    try {
        Context ctx;
        ctx.out_s = &out;
        ctx.err_s = &err;
        ctx.quiet = quiet;
        if (!config_path.empty()) ctx.cfg = train::load_config(config_path);
        if (seed) {
            ctx.cfg.train.seed = *seed;
            ctx.cfg.split.seed = *seed;
        }
        ctx.seed = ctx.cfg.train.seed;
        if (!preset.empty()) ctx.cfg.preset = preset;
        if (!arch.empty()) ctx.cfg.architecture = models::parse_architecture(arch);
        if (window) ctx.cfg.window_length = *window;
        if (epochs) ctx.cfg.train.max_epochs = *epochs;
        ctx.cfg.validate();
        if (!out_dir.empty()) {
            ctx.out = out_dir;
        } else if (const char* env = std::getenv("RFP_OUT_DIR"); env && *env) {
            ctx.out = env;
        } else {
            ctx.out = "rfp_out";
        }

        if (gen->parsed()) {
            cmd_generate(ctx, runs, captures);
        } else if (ds->parsed()) {
            cmd_dataset(ctx, captures, *parse_task(task_name, distance));
        } else if (tr_dev->parsed()) {
            cmd_train(ctx, data::Task::device_at_distance(*distance), false, captures, dataset_dir, models_dir);
        } else if (tr_dist->parsed()) {
            cmd_train(ctx, data::Task::distance(), false, captures, dataset_dir, models_dir);
        } else if (tr_cur->parsed()) {
            cmd_train(ctx, *parse_task(task_name, distance), true, captures, dataset_dir, models_dir);
        } else if (asm_->parsed()) {
            cmd_assemble(ctx, models_dir, to_dir);
        } else if (ft->parsed()) {
            cmd_finetune(ctx, ensemble_dir, captures, to_dir);
        } else if (ev->parsed()) {
            cmd_eval(ctx, ensemble_dir, model_ckpt, captures, split_name);
        } else if (hm->parsed()) {
            cmd_heatmap(ctx, ensemble_dir, captures);
        } else if (cmp->parsed()) {
            if (families.empty()) {
                families = {"baseline=" + (ctx.out / "models" / "baseline").string(),
                            "resnet=" + (ctx.out / "models" / "resnet").string()};
            }
            cmd_compare(ctx, families, captures);
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "rfp: error: " << msg << "\n";
        return 1;
    }
    return 0;
}

}  // namespace rfp::cli
