#include "fedheart/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string_view>

#include "fedheart/rng.hpp"

namespace fedheart {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value, std::chars_format::general);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": not a number: '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

double LabeledMatrix::prevalence() const {
    if (y.empty()) return 0.0;
    double pos = 0.0;
    for (int v : y) pos += v;
    return pos / static_cast<double>(y.size());
}

RawDataset load_cleveland(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file: " + path);

    RawDataset out;
    out.source_path = path;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;

        auto fields = split_fields(line);
        if (fields.size() != kFeatureCount + 1) {
            throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(kFeatureCount + 1) + " fields, got " +
                                     std::to_string(fields.size()));
        }

        bool missing = std::any_of(fields.begin(), fields.end(),
                                   [](std::string_view f) { return f == "?"; });
        if (missing) {
            ++out.dropped_count;
            continue;
        }

        PatientRecord rec;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            rec.features[j] = parse_number(fields[j], line_no);
        }
        double target = parse_number(fields[kFeatureCount], line_no);
        rec.label = target >= 1.0 ? 1 : 0;
        out.records.push_back(rec);
    }

    if (out.records.empty() && out.dropped_count == 0) {
        throw std::runtime_error("empty dataset: " + path);
    }
    return out;
}

LabeledMatrix to_labeled_matrix(const std::vector<PatientRecord>& records) {
    LabeledMatrix out;
    out.X = Matrix(0, kFeatureCount);
    out.y.reserve(records.size());
    for (const auto& rec : records) {
        out.X.push_row(std::span<const double>(rec.features.data(), rec.features.size()));
        out.y.push_back(rec.label);
    }
    return out;
}

StandardizationParams fit_standardizer(const Matrix& train_features,
                                       const std::vector<bool>& continuous_mask) {
    if (train_features.rows == 0) throw std::invalid_argument("fit_standardizer: empty training set");
    if (continuous_mask.size() != train_features.cols) {
        throw std::invalid_argument("fit_standardizer: mask dimension mismatch");
    }

    StandardizationParams params;
    params.means.assign(train_features.cols, 0.0);
    params.std_devs.assign(train_features.cols, 1.0);

    const double n = static_cast<double>(train_features.rows);
    for (std::size_t j = 0; j < train_features.cols; ++j) {
        if (!continuous_mask[j]) continue;  // pass-through: mean 0, std 1

        double sum = 0.0;
        for (std::size_t i = 0; i < train_features.rows; ++i) sum += train_features.at(i, j);
        double mean = sum / n;

        double ss = 0.0;
        for (std::size_t i = 0; i < train_features.rows; ++i) {
            double d = train_features.at(i, j) - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / n);  // population std

        params.means[j] = mean;
        if (sd > 0.0) {
            params.std_devs[j] = sd;
        } else {
            params.std_devs[j] = 1.0;  // degenerate subsample; keep training usable
            params.zero_variance_features.push_back(j);
        }
    }
    return params;
}

Matrix apply_standardizer(const Matrix& features, const StandardizationParams& params) {
    if (features.cols != params.dim()) {
        throw std::invalid_argument("apply_standardizer: dimension mismatch");
    }
    Matrix out = features;
    for (std::size_t i = 0; i < out.rows; ++i) {
        for (std::size_t j = 0; j < out.cols; ++j) {
            out.at(i, j) = (out.at(i, j) - params.means[j]) / params.std_devs[j];
        }
    }
    return out;
}

SplitDataset stratified_split(const LabeledMatrix& samples, double test_fraction,
                              std::uint64_t rng_seed) {
    std::vector<std::size_t> class0, class1;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        (samples.y[i] == 1 ? class1 : class0).push_back(i);
    }
    if (class0.size() < 2 || class1.size() < 2) {
        throw std::runtime_error("stratified_split: each class needs at least 2 samples (got " +
                                 std::to_string(class0.size()) + "/" + std::to_string(class1.size()) + ")");
    }

    std::mt19937_64 rng(rng_seed);
    std::vector<std::size_t> test_idx, train_idx;
    for (auto* cls : {&class0, &class1}) {
        deterministic_shuffle(*cls, rng);
        // round half-up of class_size * fraction
        auto n_test = static_cast<std::size_t>(
            std::floor(static_cast<double>(cls->size()) * test_fraction + 0.5));
        test_idx.insert(test_idx.end(), cls->begin(), cls->begin() + n_test);
        train_idx.insert(train_idx.end(), cls->begin() + n_test, cls->end());
    }
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    SplitDataset out;
    out.train.X = samples.X.select_rows(train_idx);
    out.test.X = samples.X.select_rows(test_idx);
    for (std::size_t i : train_idx) out.train.y.push_back(samples.y[i]);
    for (std::size_t i : test_idx) out.test.y.push_back(samples.y[i]);
    return out;
}

}  // namespace fedheart
