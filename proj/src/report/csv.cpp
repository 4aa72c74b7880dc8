#include "rfp/report/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rfp/errors.hpp"

namespace rfp::report {

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string field(const std::string& s) {
    if (s.find_first_of(",\n\"") != std::string::npos) throw DataError("CSV field '" + s + "' needs quoting");
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_num(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw DataError("'" + s + "' is not a number");
    return v;
}

}  // namespace

std::string to_csv(const SeriesTable& t) {
    std::string out = field(t.key_name);
    for (const auto& n : t.series_names) out += "," + field(n);
    out += "\n";
    for (std::size_t k = 0; k < t.keys.size(); ++k) {
        out += num(t.keys[k]);
        for (const auto& s : t.values) out += "," + num(s.at(k));
        out += "\n";
    }
    return out;
}

SeriesTable parse_series_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV");
    auto head = split(line);
    SeriesTable t;
    t.key_name = head.at(0);
    t.series_names.assign(head.begin() + 1, head.end());
    t.values.resize(t.series_names.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line);
        if (cells.size() != head.size()) {
            throw DataError("CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " fields, expected " + std::to_string(head.size()));
        }
        t.keys.push_back(parse_num(cells[0]));
        for (std::size_t s = 0; s < t.values.size(); ++s) t.values[s].push_back(parse_num(cells[s + 1]));
    }
    return t;
}

std::string metrics_csv(const EvalResult& r) {
    std::string out = "class,precision,recall,support,empty_column\n";
    for (std::size_t c = 0; c < r.labels.size(); ++c) {
        out += field(r.labels[c]) + "," + num(r.precision[c]) + "," + num(r.recall[c]) + "," +
               std::to_string(r.support(c)) + "," + (r.empty_column[c] ? "1" : "0") + "\n";
    }
    out += "# task=" + r.task + " accuracy=" + num(r.accuracy) + " total=" + std::to_string(r.total) + "\n";
    return out;
}

std::string confusion_csv(const EvalResult& r) {
    std::string out = "true\\predicted";
    for (const auto& l : r.labels) out += "," + field(l);
    out += "\n";
    for (std::size_t t = 0; t < r.labels.size(); ++t) {
        out += r.labels[t];
        for (auto v : r.confusion[t]) out += "," + std::to_string(v);
        out += "\n";
    }
    return out;
}

std::string grid_csv(const PrecisionGrid& g) {
    std::string out = "distance_ft";
    for (const auto& d : g.devices) out += "," + field(d);
    out += ",row_avg\n";
    std::string flagged;
    for (std::size_t d = 0; d < g.distances.size(); ++d) {
        out += num(g.distances[d]);
        for (std::size_t m = 0; m < g.devices.size(); ++m) {
            out += "," + num(g.precision[d][m]);
            if (g.empty[d][m]) flagged += "# empty: " + num(g.distances[d]) + "ft " + g.devices[m] + "\n";
        }
        out += "," + num(g.row_average[d]) + "\n";
    }
    out += "col_avg";
    for (double v : g.column_average) out += "," + num(v);
    out += ",\n";
    return out + flagged;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace rfp::report
