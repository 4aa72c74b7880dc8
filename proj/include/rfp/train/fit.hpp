#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rfp/data/dataset.hpp"
#include "rfp/models/architectures.hpp"
#include "rfp/nn/sgd.hpp"
#include "rfp/train/config.hpp"

namespace rfp::train {

using models::Net;

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double lr = 0.0;        // rate used during the epoch
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

enum class StopReason { max_epochs, early_stop };
std::string_view to_string(StopReason r);

struct TrainReport {
    std::vector<EpochRecord> epochs;
    StopReason stop_reason = StopReason::max_epochs;
    std::size_t best_epoch = 0;
    double best_val_acc = 0.0;
    double initial_val_acc = 0.0;  // before the first update
    double wall_seconds = 0.0;
    std::filesystem::path checkpoint;
    std::vector<std::string> warnings;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Eval-mode mean cross-entropy and accuracy over the whole set.
Evaluation evaluate_loss(const Net& net, const data::LabeledDataset& ds, std::size_t batch_size = 256);

/// One optimizer step on a batch in train mode; returns the batch loss.
/// Throws TrainingError on a non-finite loss.
double train_batch(Net& net, nn::Sgd<float>& opt, const nn::Tensor<float>& x, std::span<const int> labels);

/// Mini-batch momentum SGD over shuffled epochs. After each epoch the
/// validation accuracy drives learning-rate decay and early stopping; the
/// weights of the best epoch are restored before returning.
TrainReport fit(Net& net, const data::LabeledDataset& train, const data::LabeledDataset& val, const TrainConfig& cfg,
                const EpochCallback& on_epoch = {});

/// CSV columns epoch,lr,train_loss,val_loss,val_acc followed by a '#' summary
/// line. Wall time is left out so reruns compare byte-identical.
std::string report_csv(const TrainReport& r);
void write_report_csv(const TrainReport& r, const std::filesystem::path& path);

}  // namespace rfp::train
