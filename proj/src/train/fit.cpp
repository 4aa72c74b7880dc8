#include "rfp/train/fit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "rfp/errors.hpp"
#include "rfp/nn/loss.hpp"
#include "rfp/seed.hpp"

namespace rfp::train {

std::string_view to_string(StopReason r) { return r == StopReason::early_stop ? "early_stop" : "max_epochs"; }

Evaluation evaluate_loss(const Net& net, const data::LabeledDataset& ds, std::size_t batch_size) {
    if (ds.empty()) throw ConfigError("cannot evaluate on an empty set");
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t first = 0; first < ds.size(); first += batch_size) {
        std::size_t n = std::min(batch_size, ds.size() - first);
        auto logits = net.predict(ds.batch(first, n));
        std::span<const int> labels(ds.labels.data() + first, n);
        loss += nn::cross_entropy_loss(logits, labels).loss * double(n);
        std::size_t k = logits.dim(1);
        for (std::size_t b = 0; b < n; ++b) {
            if (nn::argmax(std::span<const float>(logits.raw() + b * k, k)) == std::size_t(labels[b])) ++correct;
        }
    }
    return {loss / double(ds.size()), double(correct) / double(ds.size())};
}

double train_batch(Net& net, nn::Sgd<float>& opt, const nn::Tensor<float>& x, std::span<const int> labels) {
    net.set_mode(nn::Mode::train);
    net.zero_grad();
    auto logits = net.forward(x);
    auto r = nn::cross_entropy_loss(logits, labels);
    if (!std::isfinite(r.loss)) throw TrainingError("non-finite training loss");
    net.backward(r.grad);
    opt.step(net);
    return r.loss;
}

TrainReport fit(Net& net, const data::LabeledDataset& train, const data::LabeledDataset& val, const TrainConfig& cfg,
                const EpochCallback& on_epoch) {
    cfg.validate();
    if (train.empty()) throw ConfigError("empty training set");
    if (val.empty()) throw ConfigError("empty validation set");
    if (net.output_size() != train.n_classes() || val.n_classes() != train.n_classes()) {
        throw ConfigError("network has " + std::to_string(net.output_size()) + " outputs but the data has " +
                          std::to_string(train.n_classes()) + " classes");
    }

    auto start = std::chrono::steady_clock::now();
    TrainReport report;
    report.initial_val_acc = evaluate_loss(net, val).accuracy;

    nn::Sgd<float> opt(cfg.sgd);
    double lr = cfg.sgd.learning_rate;
    double best = -1.0;
    auto best_state = net.state();
    std::size_t since_best = 0, since_decay = 0;

    std::vector<std::size_t> order(train.size());
    std::vector<int> labels;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(derive_seed(cfg.seed, {0xf17, epoch}));
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
            std::size_t n = std::min(cfg.batch_size, order.size() - first);
            // A lone trailing window would give batch norm a zero-variance batch.
            if (n == 1 && seen > 0) break;
            std::span<const std::size_t> idx(order.data() + first, n);
            labels.resize(n);
            for (std::size_t b = 0; b < n; ++b) labels[b] = train.labels[idx[b]];
            loss_sum += train_batch(net, opt, train.batch(idx), labels) * double(n);
            seen += n;
        }

        auto v = evaluate_loss(net, val);
        EpochRecord rec{epoch, lr, loss_sum / double(seen), v.loss, v.accuracy};
        report.epochs.push_back(rec);
        if (on_epoch) on_epoch(rec);

        if (v.accuracy > best) {
            best = v.accuracy;
            best_state = net.state();
            report.best_epoch = epoch;
            since_best = since_decay = 0;
        } else {
            ++since_best;
            if (++since_decay >= cfg.policy.lr_decay_patience) {
                lr = std::max(lr * cfg.policy.lr_decay_factor, cfg.policy.min_lr);
                opt.set_learning_rate(lr);
                since_decay = 0;
            }
            if (since_best >= cfg.policy.early_stop_patience) {
                report.stop_reason = StopReason::early_stop;
                break;
            }
        }
    }

    net.load_state(best_state);
    net.set_mode(nn::Mode::eval);
    report.best_val_acc = best;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string report_csv(const TrainReport& r) {
    std::string out = "epoch,lr,train_loss,val_loss,val_acc\n";
    char line[160];
    for (const auto& e : r.epochs) {
        std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.lr, e.train_loss, e.val_loss,
                      e.val_acc);
        out += line;
    }
    std::snprintf(line, sizeof line, "# stop=%s best_epoch=%zu best_val_acc=%.9g initial_val_acc=%.9g\n",
                  std::string(to_string(r.stop_reason)).c_str(), r.best_epoch, r.best_val_acc, r.initial_val_acc);
    out += line;
    for (const auto& w : r.warnings) out += "# warning: " + w + "\n";
    return out;
}

void write_report_csv(const TrainReport& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << report_csv(r);
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace rfp::train
