#pragma once

#include "rfp/models/ensemble.hpp"
#include "rfp/train/fit.hpp"

namespace rfp::train {

struct FinetuneOptions {
    /// Also train the distance classifier on the true distances. Off by
    /// default: the router stays frozen and only device models adapt.
    bool joint = false;
};

/// Each training window is routed by the distance classifier and the selected
/// device model takes a cross-entropy step on the device label; device models
/// receiving no window in a batch are left untouched. Validation accuracy is
/// the ensemble's device accuracy and drives the same stopping policy as
/// fit(); the best epoch's weights are restored.
///
/// `train` and `val` must be device-task sets (labels are devices across all
/// distances) whose label names match the ensemble's.
TrainReport finetune_ensemble(models::EnsembleModel& e, const data::LabeledDataset& train,
                              const data::LabeledDataset& val, const TrainConfig& cfg, FinetuneOptions opts = {},
                              const EpochCallback& on_epoch = {});

/// Eval-mode ensemble loss (cross-entropy of the routed device model) and
/// device accuracy.
Evaluation evaluate_ensemble(const models::EnsembleModel& e, const data::LabeledDataset& ds,
                             std::size_t batch_size = 256);

}  // namespace rfp::train
