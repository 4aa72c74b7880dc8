#include "rfp/train/finetune.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "rfp/errors.hpp"
#include "rfp/nn/loss.hpp"
#include "rfp/seed.hpp"

namespace rfp::train {

using models::EnsembleModel;
using nn::Tensor;

namespace {

void check_data(const EnsembleModel& e, const data::LabeledDataset& ds, const char* what) {
    if (ds.empty()) throw ConfigError(std::string("empty ") + what + " set");
    if (ds.task.kind != data::TaskKind::device) {
        throw ConfigError(std::string(what) + " set must be a device task over all distances");
    }
    if (ds.label_names != e.device_models.front().device_names) {
        throw ConfigError(std::string(what) + " set labels do not match the ensemble's devices");
    }
}

std::size_t distance_slot(const EnsembleModel& e, double d) {
    const auto& ds = e.distance_model.distances_ft;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        if (std::abs(ds[k] - d) <= 1e-9 * std::max(1.0, d)) return k;
    }
    throw ConfigError("window at " + data::format_distance(d) + "ft is outside the ensemble's distances");
}

std::vector<std::vector<float>> snapshot(const EnsembleModel& e) {
    auto s = e.distance_model.net.state();
    for (const auto& m : e.device_models) {
        for (auto& t : m.net.state()) s.push_back(std::move(t));
    }
    return s;
}

void restore(EnsembleModel& e, const std::vector<std::vector<float>>& s) {
    std::size_t at = 0;
    auto take = [&](models::Net& net) {
        std::size_t n = net.parameters().size() + net.buffers().size();
        net.load_state({s.begin() + std::ptrdiff_t(at), s.begin() + std::ptrdiff_t(at + n)});
        at += n;
    };
    take(e.distance_model.net);
    for (auto& m : e.device_models) take(m.net);
}

}  // namespace

Evaluation evaluate_ensemble(const EnsembleModel& e, const data::LabeledDataset& ds, std::size_t batch_size) {
    check_data(e, ds, "evaluation");
    double loss = 0.0;
    std::size_t correct = 0;
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    for (std::size_t first = 0; first < ds.size(); first += batch_size) {
        std::size_t n = std::min(batch_size, ds.size() - first);
        auto x = ds.batch(first, n);
        auto route = models::predict_classes(e.distance_model.net, x);
        for (std::size_t k = 0; k < e.n_distances(); ++k) {
            rows.clear();
            labels.clear();
            for (std::size_t b = 0; b < n; ++b) {
                if (route[b] != k) continue;
                rows.push_back(b);
                labels.push_back(ds.labels[first + b]);
            }
            if (rows.empty()) continue;
            auto logits = e.device_models[k].net.predict(models::gather_rows(x, rows));
            loss += nn::cross_entropy_loss(logits, labels).loss * double(rows.size());
            std::size_t m = logits.dim(1);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (nn::argmax(std::span<const float>(logits.raw() + i * m, m)) == std::size_t(labels[i])) ++correct;
            }
        }
    }
    return {loss / double(ds.size()), double(correct) / double(ds.size())};
}

TrainReport finetune_ensemble(EnsembleModel& e, const data::LabeledDataset& train, const data::LabeledDataset& val,
                              const TrainConfig& cfg, FinetuneOptions opts, const EpochCallback& on_epoch) {
    cfg.validate();
    e.validate();
    check_data(e, train, "training");
    check_data(e, val, "validation");

    std::vector<int> true_slot(train.size());
    std::set<std::pair<int, std::size_t>> covered;
    for (std::size_t i = 0; i < train.size(); ++i) {
        true_slot[i] = int(distance_slot(e, train.sources[i].distance_ft));
        covered.emplace(train.labels[i], std::size_t(true_slot[i]));
    }
    if (covered.size() != e.n_devices() * e.n_distances()) {
        throw ConfigError("fine-tuning data does not cover every (device, distance) pair");
    }

    auto start = std::chrono::steady_clock::now();
    TrainReport report;
    report.initial_val_acc = evaluate_ensemble(e, val).accuracy;

    std::vector<nn::Sgd<float>> opts_dev(e.n_distances(), nn::Sgd<float>(cfg.sgd));
    nn::Sgd<float> opt_dist(cfg.sgd);
    double lr = cfg.sgd.learning_rate;
    double best = -1.0;
    auto best_state = snapshot(e);
    std::size_t since_best = 0, since_decay = 0;

    std::vector<std::size_t> order(train.size());
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(derive_seed(cfg.seed, {0xf1e, epoch}));
        std::shuffle(order.begin(), order.end(), rng);

        std::vector<std::size_t> routed(e.n_distances(), 0);
        double loss_sum = 0.0;
        for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
            std::size_t n = std::min(cfg.batch_size, order.size() - first);
            std::span<const std::size_t> idx(order.data() + first, n);
            auto x = train.batch(idx);
            auto route = models::predict_classes(e.distance_model.net, x);
            if (opts.joint) {
                labels.resize(n);
                for (std::size_t b = 0; b < n; ++b) labels[b] = true_slot[idx[b]];
                train_batch(e.distance_model.net, opt_dist, x, labels);
            }
            for (std::size_t k = 0; k < e.n_distances(); ++k) {
                rows.clear();
                labels.clear();
                for (std::size_t b = 0; b < n; ++b) {
                    if (route[b] != k) continue;
                    rows.push_back(b);
                    labels.push_back(train.labels[idx[b]]);
                }
                if (rows.empty()) continue;
                routed[k] += rows.size();
                loss_sum += train_batch(e.device_models[k].net, opts_dev[k], models::gather_rows(x, rows), labels) *
                            double(rows.size());
            }
        }
        for (auto& m : e.device_models) m.net.set_mode(nn::Mode::eval);
        e.distance_model.net.set_mode(nn::Mode::eval);
        for (std::size_t k = 0; k < routed.size(); ++k) {
            if (routed[k] == 0) {
                report.warnings.push_back("epoch " + std::to_string(epoch) + ": device model " +
                                          data::format_distance(e.distance_model.distances_ft[k]) + "ft" +
                                          " received no routed windows");
            }
        }

        auto v = evaluate_ensemble(e, val);
        EpochRecord rec{epoch, lr, loss_sum / double(train.size()), v.loss, v.accuracy};
        report.epochs.push_back(rec);
        if (on_epoch) on_epoch(rec);

        if (v.accuracy > best) {
            best = v.accuracy;
            best_state = snapshot(e);
            report.best_epoch = epoch;
            since_best = since_decay = 0;
        } else {
            ++since_best;
            if (++since_decay >= cfg.policy.lr_decay_patience) {
                lr = std::max(lr * cfg.policy.lr_decay_factor, cfg.policy.min_lr);
                for (auto& o : opts_dev) o.set_learning_rate(lr);
                opt_dist.set_learning_rate(lr);
                since_decay = 0;
            }
            if (since_best >= cfg.policy.early_stop_patience) {
                report.stop_reason = StopReason::early_stop;
                break;
            }
        }
    }

    restore(e, best_state);
    report.best_val_acc = best;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace rfp::train
