#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fedheart/matrix.hpp"

namespace fedheart {

// Column layout of the processed Cleveland file: 13 features + target.
inline constexpr std::size_t kFeatureCount = 13;

inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
    "thalach", "exang", "oldpeak", "slope", "ca", "thal"};

// Continuous features get standardized; categorical codes pass through.
inline constexpr std::array<bool, kFeatureCount> kContinuousMask = {
    true,   // age
    false,  // sex
    false,  // cp
    true,   // trestbps
    true,   // chol
    false,  // fbs
    false,  // restecg
    true,   // thalach
    false,  // exang
    true,   // oldpeak
    false,  // slope
    false,  // ca
    false,  // thal
};

struct PatientRecord {
    std::array<double, kFeatureCount> features{};
    int label = 0;  // 1 iff raw target >= 1

    double age() const { return features[0]; }
};

struct RawDataset {
    std::vector<PatientRecord> records;  // file row order
    std::string source_path;
    std::size_t dropped_count = 0;  // rows removed for missing values

    std::size_t raw_rows() const { return records.size() + dropped_count; }
};

struct StandardizationParams {
    std::vector<double> means;
    std::vector<double> std_devs;
    std::vector<std::size_t> zero_variance_features;  // masked columns that fell back to std 1

    std::size_t dim() const { return means.size(); }
};

struct LabeledMatrix {
    Matrix X;
    std::vector<int> y;

    std::size_t size() const { return y.size(); }
    double prevalence() const;
};

struct SplitDataset {
    LabeledMatrix train;
    LabeledMatrix test;

    double train_prevalence() const { return train.prevalence(); }
    double test_prevalence() const { return test.prevalence(); }
};

// Loads a CSV in the published processed.cleveland.data layout: 14 comma
// separated fields per row, "?" marking missing values, target coded 0-4.
// Rows containing "?" anywhere are dropped and counted.
RawDataset load_cleveland(const std::string& path);

// Feature matrix + label vector from records, in record order.
LabeledMatrix to_labeled_matrix(const std::vector<PatientRecord>& records);

// Means and population std devs over the training rows of masked columns.
// Unmasked columns record mean 0 / std 1 (identity transform). A masked
// column with zero variance falls back to std 1 and is reported in
// zero_variance_features.
StandardizationParams fit_standardizer(const Matrix& train_features,
                                       const std::vector<bool>& continuous_mask);

Matrix apply_standardizer(const Matrix& features, const StandardizationParams& params);

// Per-class seeded shuffle; round-half-up(class_size * test_fraction) rows of
// each class go to test. Classes with fewer than 2 samples are rejected.
SplitDataset stratified_split(const LabeledMatrix& samples, double test_fraction,
                              std::uint64_t rng_seed);

}  // namespace fedheart
