#include "rfp/train/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rfp/errors.hpp"
#include "rfp/sim/profiles.hpp"

namespace rfp::train {

void StoppingPolicy::validate() const {
    if (early_stop_patience < 1) throw ConfigError("early_stop_patience must be at least 1");
    if (lr_decay_patience < 1) throw ConfigError("lr_decay_patience must be at least 1");
    if (!(lr_decay_factor > 0.0 && lr_decay_factor < 1.0)) throw ConfigError("lr_decay_factor must lie in (0, 1)");
    if (!(min_lr >= 0.0)) throw ConfigError("min_lr must be non-negative");
}

void TrainConfig::validate() const {
    policy.validate();
    if (!(sgd.learning_rate > 0.0) || !std::isfinite(sgd.learning_rate)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (!(sgd.momentum >= 0.0 && sgd.momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
}

void CurriculumSpec::validate() const {
    if (stage1_windows == 0 || stage1_windows >= stage2_windows) {
        throw ConfigError("curriculum needs 0 < stage1_windows < stage2_windows");
    }
    if (stage1_max_epochs == 0 || stage2_max_epochs == 0) throw ConfigError("stage epoch limits must be positive");
}

void RunConfig::validate() const {
    train.validate();
    curriculum.validate();
    split.validate();
    sim::preset(preset);
    if (window_length == 0) throw ConfigError("window_length must be positive");
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_config_text(a) == to_config_text(b); }

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + v + "' is not a valid number");
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("'" + v + "' is not true or false");
}

data::SplitMode parse_split_mode(const std::string& v) {
    if (v == "pooled_runs") return data::SplitMode::pooled_runs;
    if (v == "run_holdout") return data::SplitMode::run_holdout;
    throw ConfigError("split_mode must be pooled_runs or run_holdout, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"learning_rate", [](RunConfig& c, const std::string& v) { c.train.sgd.learning_rate = parse_number<double>(v); }},
        {"momentum", [](RunConfig& c, const std::string& v) { c.train.sgd.momentum = parse_number<double>(v); }},
        {"batch_size", [](RunConfig& c, const std::string& v) { c.train.batch_size = parse_number<std::size_t>(v); }},
        {"max_epochs", [](RunConfig& c, const std::string& v) { c.train.max_epochs = parse_number<std::size_t>(v); }},
        {"early_stop_patience",
         [](RunConfig& c, const std::string& v) { c.train.policy.early_stop_patience = parse_number<std::size_t>(v); }},
        {"lr_decay_factor",
         [](RunConfig& c, const std::string& v) { c.train.policy.lr_decay_factor = parse_number<double>(v); }},
        {"lr_decay_patience",
         [](RunConfig& c, const std::string& v) { c.train.policy.lr_decay_patience = parse_number<std::size_t>(v); }},
        {"min_lr", [](RunConfig& c, const std::string& v) { c.train.policy.min_lr = parse_number<double>(v); }},
        {"seed",
         [](RunConfig& c, const std::string& v) {
             c.train.seed = parse_number<std::uint64_t>(v);
             c.split.seed = c.train.seed;
         }},
        {"stage1_windows",
         [](RunConfig& c, const std::string& v) { c.curriculum.stage1_windows = parse_number<std::size_t>(v); }},
        {"stage2_windows",
         [](RunConfig& c, const std::string& v) { c.curriculum.stage2_windows = parse_number<std::size_t>(v); }},
        {"stage1_max_epochs",
         [](RunConfig& c, const std::string& v) { c.curriculum.stage1_max_epochs = parse_number<std::size_t>(v); }},
        {"stage2_max_epochs",
         [](RunConfig& c, const std::string& v) { c.curriculum.stage2_max_epochs = parse_number<std::size_t>(v); }},
        {"preset", [](RunConfig& c, const std::string& v) { c.preset = v; }},
        {"window_length", [](RunConfig& c, const std::string& v) { c.window_length = parse_number<std::size_t>(v); }},
        {"architecture", [](RunConfig& c, const std::string& v) { c.architecture = models::parse_architecture(v); }},
        {"split_mode", [](RunConfig& c, const std::string& v) { c.split.mode = parse_split_mode(v); }},
        {"train_fraction", [](RunConfig& c, const std::string& v) { c.split.train = parse_number<double>(v); }},
        {"val_fraction", [](RunConfig& c, const std::string& v) { c.split.val = parse_number<double>(v); }},
        {"test_fraction", [](RunConfig& c, const std::string& v) { c.split.test = parse_number<double>(v); }},
        {"split_seed", [](RunConfig& c, const std::string& v) { c.split.seed = parse_number<std::uint64_t>(v); }},
        {"holdout_run", [](RunConfig& c, const std::string& v) { c.split.holdout_run = parse_number<int>(v); }},
        {"normalize", [](RunConfig& c, const std::string& v) { c.normalize = parse_bool(v); }},
        {"finetune_joint", [](RunConfig& c, const std::string& v) { c.finetune_joint = parse_bool(v); }},
    };
    return m;
}

}  // namespace

RunConfig parse_config(std::string_view text, RunConfig c) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto body = trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(std::string_view(body).substr(0, eq));
        auto value = trim(std::string_view(body).substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        try {
            it->second(c, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_config_text(const RunConfig& c) {
    std::ostringstream o;
    o.precision(17);
    o << "preset = " << c.preset << '\n'
      << "window_length = " << c.window_length << '\n'
      << "architecture = " << models::to_string(c.architecture) << '\n'
      << "normalize = " << (c.normalize ? "true" : "false") << '\n'
      << "seed = " << c.train.seed << '\n'
      << "split_mode = " << (c.split.mode == data::SplitMode::pooled_runs ? "pooled_runs" : "run_holdout") << '\n'
      << "train_fraction = " << c.split.train << '\n'
      << "val_fraction = " << c.split.val << '\n'
      << "test_fraction = " << c.split.test << '\n'
      << "split_seed = " << c.split.seed << '\n'
      << "holdout_run = " << c.split.holdout_run << '\n'
      << "learning_rate = " << c.train.sgd.learning_rate << '\n'
      << "momentum = " << c.train.sgd.momentum << '\n'
      << "batch_size = " << c.train.batch_size << '\n'
      << "max_epochs = " << c.train.max_epochs << '\n'
      << "early_stop_patience = " << c.train.policy.early_stop_patience << '\n'
      << "lr_decay_factor = " << c.train.policy.lr_decay_factor << '\n'
      << "lr_decay_patience = " << c.train.policy.lr_decay_patience << '\n'
      << "min_lr = " << c.train.policy.min_lr << '\n'
      << "stage1_windows = " << c.curriculum.stage1_windows << '\n'
      << "stage2_windows = " << c.curriculum.stage2_windows << '\n'
      << "stage1_max_epochs = " << c.curriculum.stage1_max_epochs << '\n'
      << "stage2_max_epochs = " << c.curriculum.stage2_max_epochs << '\n'
      << "finetune_joint = " << (c.finetune_joint ? "true" : "false") << '\n';
    return o.str();
}

}  // namespace rfp::train
