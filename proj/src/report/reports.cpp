#include "rfp/report/reports.hpp"

#include "rfp/errors.hpp"
#include "rfp/report/svg.hpp"

namespace rfp::report {

SeriesTable compare_architectures(const std::vector<std::string>& names,
                                  const std::vector<std::vector<const models::DeviceClassifier*>>& models,
                                  const std::vector<const data::LabeledDataset*>& tests) {
    if (names.size() != models.size()) throw UsageError("one name per model family is required");
    SeriesTable t;
    t.key_name = "distance_ft";
    t.series_names = names;
    for (const auto* ds : tests) {
        if (ds->task.kind != data::TaskKind::device_at_distance) {
            throw ConfigError("architecture comparison needs per-distance device test sets");
        }
        t.keys.push_back(ds->task.distance_ft);
    }
    for (const auto& family : models) {
        if (family.size() != tests.size()) throw UsageError("each family needs one classifier per test set");
        std::vector<double> acc;
        for (std::size_t k = 0; k < tests.size(); ++k) {
            if (family[k]->distance_ft != tests[k]->task.distance_ft) {
                throw ConfigError("classifier for " + data::format_distance(family[k]->distance_ft) + "ft" +
                                  " paired with a " + tests[k]->task.describe() + " test set");
            }
            acc.push_back(evaluate(family[k]->net, *tests[k]).accuracy);
        }
        t.values.push_back(std::move(acc));
    }
    return t;
}

void write_heatmap(const PrecisionGrid& g, const std::filesystem::path& dir, const std::string& stem) {
    write_text(dir / (stem + ".csv"), grid_csv(g));
    write_text(dir / (stem + ".svg"), heatmap_svg(g, "Device precision by distance"));
}

void write_comparison(const SeriesTable& t, const std::filesystem::path& dir, const std::string& stem) {
    write_text(dir / (stem + ".csv"), to_csv(t));
    write_text(dir / (stem + ".svg"), series_svg(t, "Device accuracy per distance", "accuracy"));
}

void write_evaluation(const EvalResult& r, const std::filesystem::path& dir, const std::string& stem) {
    write_text(dir / (stem + "_metrics.csv"), metrics_csv(r));
    write_text(dir / (stem + "_confusion.csv"), confusion_csv(r));
}

}  // namespace rfp::report
