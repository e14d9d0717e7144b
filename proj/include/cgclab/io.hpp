#ifndef CGCLAB_IO_HPP
#define CGCLAB_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cgclab/datagen.hpp"
#include "cgclab/trainer.hpp"

namespace cgclab {

// 17 significant digits: doubles survive the text round trip bit-exactly.
std::string format_double(double value);

// FNV-1a over the canonical text serialization of observations + ground truth.
std::string dataset_fingerprint(const Matrix& observations, const GroundTruth& gt);

// Dataset files: <dir>/dataset.json header {n, d, num_identities, seed, spec,
// fingerprint} and <dir>/dataset.csv body `sample_id,identity,camera,f_0..`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Strict JSON loaders: unknown keys are rejected with ConfigError.
DatasetSpec load_dataset_spec(const std::filesystem::path& file);
TrainConfig load_train_config(const std::filesystem::path& file);
void save_train_config(const TrainConfig& config, const std::filesystem::path& file);

// Per-run report files.
void write_trace_csv(const TrainResult& result, const std::filesystem::path& file);
void write_metrics_csv(const TrainResult& result, const std::filesystem::path& file);
void write_silhouette_csv(const TrainResult& result, const std::filesystem::path& file);
void write_bank_csv(const TrainResult& result, const std::filesystem::path& file);
void write_histogram_csv(const TrainResult& result, const std::filesystem::path& file);
void write_pca_csv(const Matrix& features, const GroundTruth& gt,
                   const std::filesystem::path& file);
void write_features_csv(const Matrix& features, const std::filesystem::path& file);
void write_summary_json(const TrainResult& result, const TrainConfig& config,
                        const std::string& fingerprint, const std::string& ablation,
                        const std::filesystem::path& file);

struct RunManifest {
    std::string run_id;
    std::string ablation;
    std::string fingerprint;
    std::string version;
    TrainConfig config;
    std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& file);
RunManifest load_manifest(const std::filesystem::path& file);

inline constexpr const char* kSoftwareVersion = "0.1.0";

}  // namespace cgclab

#endif  // CGCLAB_IO_HPP
