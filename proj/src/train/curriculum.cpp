#include "rfp/train/curriculum.hpp"

#include <algorithm>
#include <random>
#include <tuple>

#include "rfp/errors.hpp"
#include "rfp/seed.hpp"

namespace rfp::train {

std::vector<std::size_t> stratified_order(const data::LabeledDataset& ds, std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> members(ds.n_classes());
    for (std::size_t i = 0; i < ds.size(); ++i) members.at(std::size_t(ds.labels[i])).push_back(i);

    // Rank r of class c (size n_c) is placed at (r + 0.5) / n_c; sorting by
    // that key interleaves the classes at their natural rates.
    std::vector<std::tuple<double, std::size_t, std::size_t>> keyed;
    keyed.reserve(ds.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto& m = members[c];
        std::mt19937_64 rng(derive_seed(seed, {0xc0de, c}));
        std::shuffle(m.begin(), m.end(), rng);
        for (std::size_t r = 0; r < m.size(); ++r) keyed.emplace_back((double(r) + 0.5) / double(m.size()), c, m[r]);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> order;
    order.reserve(keyed.size());
    for (const auto& k : keyed) order.push_back(std::get<2>(k));
    return order;
}

CurriculumResult curriculum_fit(Net& net, const data::LabeledDataset& train, const data::LabeledDataset& val,
                                const CurriculumSpec& spec, const TrainConfig& cfg, const EpochCallback& on_epoch) {
    spec.validate();
    if (train.size() < spec.stage2_windows) {
        throw ConfigError("curriculum stage 2 needs " + std::to_string(spec.stage2_windows) +
                          " training windows but only " + std::to_string(train.size()) + " are available");
    }
    auto order = stratified_order(train, derive_seed(cfg.seed, {0xc1}));

    CurriculumResult out;
    out.stage1_indices.assign(order.begin(), order.begin() + std::ptrdiff_t(spec.stage1_windows));
    out.stage2_indices.assign(order.begin(), order.begin() + std::ptrdiff_t(spec.stage2_windows));

    TrainConfig c1 = cfg;
    c1.max_epochs = spec.stage1_max_epochs;
    c1.seed = derive_seed(cfg.seed, {1});
    out.stage1 = fit(net, train.subset(out.stage1_indices), val, c1, on_epoch);

    TrainConfig c2 = cfg;
    c2.max_epochs = spec.stage2_max_epochs;
    c2.seed = derive_seed(cfg.seed, {2});
    out.stage2 = fit(net, train.subset(out.stage2_indices), val, c2, on_epoch);
    return out;
}

}  // namespace rfp::train
