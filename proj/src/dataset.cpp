#include "qkf/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "qkf/rng.hpp"

namespace qkf {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) fields.push_back(field);
    return fields;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\"");
    std::size_t b = s.find_last_not_of(" \t\r\"");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
    const std::string s = strip(field);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty())
        throw ingestion_error("non-numeric field at row " + std::to_string(row) +
                              ", column " + std::to_string(col + 1) + ": '" + s + "'");
    return v;
}

}  // namespace

RawTable load_wine_quality(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ingestion_error("cannot open wine quality file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw ingestion_error("empty wine quality file");
    const auto cols = split_line(header, ';');
    if (cols.size() != 12 || strip(cols.back()) != "quality")
        throw ingestion_error("wine quality schema mismatch: expected 11 features + quality, "
                              "last column is '" + strip(cols.empty() ? "" : cols.back()) + "'");

    std::vector<std::array<double, 12>> rows;
    std::string line;
    std::size_t row_index = 1;
    while (std::getline(in, line)) {
        ++row_index;
        if (strip(line).empty()) continue;
        const auto fields = split_line(line, ';');
        if (fields.size() != 12)
            throw ingestion_error("wine quality row " + std::to_string(row_index) +
                                  " has " + std::to_string(fields.size()) + " fields");
        std::array<double, 12> values{};
        for (std::size_t c = 0; c < 12; ++c) values[c] = parse_number(fields[c], row_index, c);
        rows.push_back(values);
    }
    if (rows.empty()) throw ingestion_error("wine quality file has no data rows");

    RawTable out;
    out.name = "wine-quality";
    out.task = Task::Regression;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), 11);
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < 11; ++c) out.features(static_cast<Eigen::Index>(r), c) = rows[r][c];
        out.labels[static_cast<Eigen::Index>(r)] = rows[r][11];
    }
    return out;
}

RawTable load_magic04(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ingestion_error("cannot open magic04 file: " + path);

    std::vector<std::array<double, 10>> rows;
    std::vector<double> labels;
    std::string line;
    std::size_t row_index = 0;
    while (std::getline(in, line)) {
        ++row_index;
        if (strip(line).empty()) continue;
        const auto fields = split_line(line, ',');
        if (fields.size() != 11)
            throw ingestion_error("magic04 row " + std::to_string(row_index) + " has " +
                                  std::to_string(fields.size()) + " fields");
        std::array<double, 10> values{};
        for (std::size_t c = 0; c < 10; ++c) values[c] = parse_number(fields[c], row_index, c);
        const std::string cls = strip(fields[10]);
        if (cls == "g") labels.push_back(1.0);
        else if (cls == "h") labels.push_back(-1.0);
        else throw ingestion_error("magic04 row " + std::to_string(row_index) +
                                   ": unknown class letter '" + cls + "'");
        rows.push_back(values);
    }
    if (rows.empty()) throw ingestion_error("magic04 file has no data rows");

    RawTable out;
    out.name = "magic04";
    out.task = Task::Classification;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), 10);
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < 10; ++c) out.features(static_cast<Eigen::Index>(r), c) = rows[r][c];
        out.labels[static_cast<Eigen::Index>(r)] = labels[r];
    }
    return out;
}

Vector ScalingRecord::apply(const Vector& raw) const {
    Vector out(raw.size());
    for (Eigen::Index c = 0; c < raw.size(); ++c) {
        const double span = feature_max[c] - feature_min[c];
        if (span == 0.0) {
            out[c] = kPi / 2.0;
        } else {
            out[c] = std::clamp((raw[c] - feature_min[c]) / span * kPi, 0.0, kPi);
        }
    }
    return out;
}

DatasetSplit scale_and_split(const RawTable& raw, Eigen::Index m_train,
                             Eigen::Index m_test, std::uint64_t seed) {
    const Eigen::Index rows = raw.features.rows();
    if (m_train < 1 || m_test < 0 || m_train + m_test > rows)
        throw invalid_input("scale_and_split: split sizes exceed row count");

    std::vector<Eigen::Index> order(rows);
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    auto rng = derive_stream(seed, {0x5e17u});  // split stage tag
    std::shuffle(order.begin(), order.end(), rng);

    DatasetSplit out;
    out.name = raw.name;
    out.task = raw.task;
    out.seed = seed;

    const Eigen::Index d = raw.features.cols();
    out.scaling.feature_min = Vector::Constant(d, 0.0);
    out.scaling.feature_max = Vector::Constant(d, 0.0);
    for (Eigen::Index c = 0; c < d; ++c) {
        double lo = raw.features(order[0], c);
        double hi = lo;
        for (Eigen::Index r = 1; r < m_train; ++r) {
            lo = std::min(lo, raw.features(order[r], c));
            hi = std::max(hi, raw.features(order[r], c));
        }
        out.scaling.feature_min[c] = lo;
        out.scaling.feature_max[c] = hi;
        if (lo == hi) out.scaling.constant_features.push_back(static_cast<int>(c));
    }

    out.train_x.resize(m_train, d);
    out.train_y.resize(m_train);
    for (Eigen::Index r = 0; r < m_train; ++r) {
        out.train_x.row(r) = out.scaling.apply(raw.features.row(order[r])).transpose();
        out.train_y[r] = raw.labels[order[r]];
    }
    out.test_x.resize(m_test, d);
    out.test_y.resize(m_test);
    for (Eigen::Index r = 0; r < m_test; ++r) {
        out.test_x.row(r) = out.scaling.apply(raw.features.row(order[m_train + r])).transpose();
        out.test_y[r] = raw.labels[order[m_train + r]];
    }
    return out;
}

}  // namespace qkf
