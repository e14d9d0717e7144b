#include "cgclab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cgclab/errors.hpp"

namespace cgclab {

using nlohmann::json;

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

double parse_double(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str())
        throw ConfigError("expected a number, got '" + text + "'");
    return v;
}

std::uint64_t fnv1a_append(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        fields.push_back(field);
    return fields;
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out)
        throw ConfigError("cannot open for writing: " + file.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open for reading: " + file.string());
    return in;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& what) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(what + ": unknown key '" + key + "'");
    }
}

json parse_json_file(const std::filesystem::path& file) {
    auto in = open_in(file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + file.string() + ": " + e.what());
    }
    return j;
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& what) {
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(what + ": bad value for '" + key + "'");
    }
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "linear") return ScheduleKind::Linear;
    if (s == "dynamic") return ScheduleKind::Dynamic;
    if (s == "constant") return ScheduleKind::Constant;
    throw ConfigError("unknown schedule kind '" + s + "'");
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Linear: return "linear";
        case ScheduleKind::Dynamic: return "dynamic";
        case ScheduleKind::Constant: return "constant";
    }
    return "linear";
}

json spec_to_json(const DatasetSpec& spec) {
    return json{
        {"num_identities", spec.num_identities},
        {"samples_per_identity", spec.samples_per_identity},
        {"dim", spec.dim},
        {"noise_sigma", spec.noise_sigma},
        {"boundary_fraction", spec.boundary_fraction},
        {"boundary_sigma", spec.boundary_sigma},
        {"num_cameras", spec.num_cameras},
        {"camera_bias_sigma", spec.camera_bias_sigma},
        {"seed", spec.seed},
    };
}

DatasetSpec spec_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"num_identities", "samples_per_identity", "dim", "noise_sigma",
                         "boundary_fraction", "boundary_sigma", "num_cameras",
                         "camera_bias_sigma", "seed"},
                        "dataset spec");
    DatasetSpec spec;
    read_field(j, "num_identities", spec.num_identities, "dataset spec");
    read_field(j, "samples_per_identity", spec.samples_per_identity, "dataset spec");
    read_field(j, "dim", spec.dim, "dataset spec");
    read_field(j, "noise_sigma", spec.noise_sigma, "dataset spec");
    read_field(j, "boundary_fraction", spec.boundary_fraction, "dataset spec");
    read_field(j, "boundary_sigma", spec.boundary_sigma, "dataset spec");
    read_field(j, "num_cameras", spec.num_cameras, "dataset spec");
    read_field(j, "camera_bias_sigma", spec.camera_bias_sigma, "dataset spec");
    read_field(j, "seed", spec.seed, "dataset spec");
    validate(spec);
    return spec;
}

json config_to_json(const TrainConfig& c) {
    return json{
        {"epochs", c.epochs},
        {"iters_per_epoch", c.iters_per_epoch},
        {"batch_identities", c.batch_identities},
        {"batch_instances", c.batch_instances},
        {"learning_rate", c.learning_rate},
        {"lr_decay_epochs", c.lr_decay_epochs},
        {"temperature", c.temperature},
        {"momentum", c.momentum},
        {"beta", c.beta},
        {"schedule",
         {{"kind", to_string(c.schedule.kind)},
          {"delta0", c.schedule.delta0},
          {"epsilon", c.schedule.epsilon},
          {"constant_value", c.schedule.constant_value},
          {"total_epochs", c.schedule.total_epochs}}},
        {"dbscan", {{"eps", c.dbscan.eps}, {"min_pts", c.dbscan.min_pts}}},
        {"use_cgc", c.use_cgc},
        {"use_cgl", c.use_cgl},
        {"seed", c.seed},
        {"query_fraction", c.query_fraction},
        {"silhouette_denominator",
         c.silhouette_denominator == SilhouetteDenominator::Standard ? "standard" : "cluster_size"},
        {"ics_boundary_fraction", c.ics.boundary_fraction},
        {"ics_min_cluster_size", c.ics.min_cluster_size},
        {"ics_all_members", c.ics.average_over_all_members},
        {"exclude_same_camera", c.exclude_same_camera},
    };
}

TrainConfig config_from_json(const json& j) {
    reject_unknown_keys(
        j, {"epochs", "iters_per_epoch", "batch_identities", "batch_instances", "learning_rate",
            "lr_decay_epochs", "temperature", "momentum", "beta", "schedule", "dbscan", "use_cgc",
            "use_cgl", "seed", "query_fraction", "silhouette_denominator", "ics_boundary_fraction",
            "ics_min_cluster_size", "ics_all_members", "exclude_same_camera"},
        "train config");
    TrainConfig c;
    read_field(j, "epochs", c.epochs, "train config");
    read_field(j, "iters_per_epoch", c.iters_per_epoch, "train config");
    read_field(j, "batch_identities", c.batch_identities, "train config");
    read_field(j, "batch_instances", c.batch_instances, "train config");
    read_field(j, "learning_rate", c.learning_rate, "train config");
    read_field(j, "lr_decay_epochs", c.lr_decay_epochs, "train config");
    read_field(j, "temperature", c.temperature, "train config");
    read_field(j, "momentum", c.momentum, "train config");
    read_field(j, "beta", c.beta, "train config");
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        reject_unknown_keys(s, {"kind", "delta0", "epsilon", "constant_value", "total_epochs"},
                            "schedule");
        std::string kind = to_string(c.schedule.kind);
        read_field(s, "kind", kind, "schedule");
        c.schedule.kind = schedule_kind_from_string(kind);
        read_field(s, "delta0", c.schedule.delta0, "schedule");
        read_field(s, "epsilon", c.schedule.epsilon, "schedule");
        read_field(s, "constant_value", c.schedule.constant_value, "schedule");
        read_field(s, "total_epochs", c.schedule.total_epochs, "schedule");
    }
    if (j.contains("dbscan")) {
        const auto& d = j.at("dbscan");
        reject_unknown_keys(d, {"eps", "min_pts"}, "dbscan");
        read_field(d, "eps", c.dbscan.eps, "dbscan");
        read_field(d, "min_pts", c.dbscan.min_pts, "dbscan");
    }
    read_field(j, "use_cgc", c.use_cgc, "train config");
    read_field(j, "use_cgl", c.use_cgl, "train config");
    read_field(j, "seed", c.seed, "train config");
    read_field(j, "query_fraction", c.query_fraction, "train config");
    if (j.contains("silhouette_denominator")) {
        const auto s = j.at("silhouette_denominator").get<std::string>();
        if (s == "standard")
            c.silhouette_denominator = SilhouetteDenominator::Standard;
        else if (s == "cluster_size")
            c.silhouette_denominator = SilhouetteDenominator::ClusterSize;
        else
            throw ConfigError("train config: silhouette_denominator must be 'standard' or 'cluster_size'");
    }
    read_field(j, "ics_boundary_fraction", c.ics.boundary_fraction, "train config");
    read_field(j, "ics_min_cluster_size", c.ics.min_cluster_size, "train config");
    read_field(j, "ics_all_members", c.ics.average_over_all_members, "train config");
    read_field(j, "exclude_same_camera", c.exclude_same_camera, "train config");
    return c;
}

}  // namespace

std::string dataset_fingerprint(const Matrix& observations, const GroundTruth& gt) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a_append(h, std::to_string(observations.rows()) + "x" +
                            std::to_string(observations.cols()));
    for (std::size_t i = 0; i < observations.rows(); ++i) {
        h = fnv1a_append(h, std::to_string(gt.identities[i]));
        h = fnv1a_append(h, std::to_string(gt.camera_ids[i]));
        for (std::size_t c = 0; c < observations.cols(); ++c)
            h = fnv1a_append(h, format_double(observations(i, c)));
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::size_t n = dataset.observations.rows();
    const std::size_t d = dataset.observations.cols();

    json header{
        {"n", n},
        {"d", d},
        {"num_identities", dataset.spec.num_identities},
        {"seed", dataset.spec.seed},
        {"spec", spec_to_json(dataset.spec)},
        {"fingerprint", dataset_fingerprint(dataset.observations, dataset.ground_truth)},
    };
    auto jout = open_out(dir / "dataset.json");
    jout << header.dump(2) << "\n";

    auto out = open_out(dir / "dataset.csv");
    out << "sample_id,identity,camera";
    for (std::size_t c = 0; c < d; ++c)
        out << ",f_" << c;
    out << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << i << "," << dataset.ground_truth.identities[i] << ","
            << dataset.ground_truth.camera_ids[i];
        for (std::size_t c = 0; c < d; ++c)
            out << "," << format_double(dataset.observations(i, c));
        out << "\n";
    }
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const auto header_path =
        std::filesystem::is_directory(dir) ? dir / "dataset.json" : dir;
    const auto csv_path = header_path.parent_path() / "dataset.csv";
    const json header = parse_json_file(header_path);

    Dataset dataset;
    dataset.spec = spec_from_json(header.at("spec"));
    const auto n = header.at("n").get<std::size_t>();
    const auto d = header.at("d").get<std::size_t>();

    dataset.observations = Matrix(n, d);
    dataset.ground_truth.identities.resize(n);
    dataset.ground_truth.camera_ids.resize(n);

    auto in = open_in(csv_path);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("dataset csv is empty: " + csv_path.string());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (row >= n)
            throw ConfigError("dataset csv has more rows than the header claims");
        const auto fields = split_csv_line(line);
        if (fields.size() != d + 3)
            throw ConfigError("dataset csv row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(d + 3));
        dataset.ground_truth.identities[row] = static_cast<int>(parse_double(fields[1]));
        dataset.ground_truth.camera_ids[row] = static_cast<int>(parse_double(fields[2]));
        for (std::size_t c = 0; c < d; ++c)
            dataset.observations(row, c) = parse_double(fields[3 + c]);
        ++row;
    }
    if (row != n)
        throw ConfigError("dataset csv has fewer rows than the header claims");
    if (header.contains("fingerprint")) {
        const auto expected = header.at("fingerprint").get<std::string>();
        const auto actual = dataset_fingerprint(dataset.observations, dataset.ground_truth);
        if (expected != actual)
            throw ConfigError("dataset fingerprint mismatch: header " + expected + ", data " +
                              actual);
    }
    return dataset;
}

DatasetSpec load_dataset_spec(const std::filesystem::path& file) {
    return spec_from_json(parse_json_file(file));
}

TrainConfig load_train_config(const std::filesystem::path& file) {
    return config_from_json(parse_json_file(file));
}

void save_train_config(const TrainConfig& config, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << config_to_json(config).dump(2) << "\n";
}

void write_trace_csv(const TrainResult& result, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << "epoch,C,outliers,mean_silhouette,delta,mean_loss,mAP,top1\n";
    for (std::size_t e = 0; e < result.traces.size(); ++e) {
        const auto& t = result.traces[e];
        const auto& m = result.metrics[e];
        double mean_loss = std::numeric_limits<double>::quiet_NaN();
        if (!t.loss_curve.empty()) {
            double sum = 0.0;
            for (double l : t.loss_curve)
                sum += l;
            mean_loss = sum / static_cast<double>(t.loss_curve.size());
        }
        out << t.epoch << "," << t.num_clusters << "," << t.num_outliers << ","
            << format_double(t.mean_silhouette) << "," << format_double(t.delta_used) << ","
            << format_double(mean_loss) << "," << format_double(m.map) << ","
            << format_double(m.cmc.at(1)) << "\n";
    }
}

void write_metrics_csv(const TrainResult& result, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << "epoch,mAP,top1,top5,top10,ics_vanilla,ics_cgc\n";
    for (const auto& m : result.metrics) {
        out << m.epoch << "," << format_double(m.map) << "," << format_double(m.cmc.at(1)) << ","
            << format_double(m.cmc.at(5)) << "," << format_double(m.cmc.at(10)) << ","
            << (m.ics_vanilla ? format_double(*m.ics_vanilla) : "nan") << ","
            << (m.ics_cgc ? format_double(*m.ics_cgc) : "nan") << "\n";
    }
}

void write_silhouette_csv(const TrainResult& result, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << "epoch,sample_id,cluster_id,silhouette\n";
    for (std::size_t e = 0; e < result.artifacts.size(); ++e) {
        const auto& a = result.artifacts[e];
        for (std::size_t i = 0; i < a.confidence.scores.size(); ++i) {
            if (!a.confidence.valid_mask[i])
                continue;
            out << result.traces[e].epoch << "," << i << "," << a.assignment.labels[i] << ","
                << format_double(a.confidence.scores[i]) << "\n";
        }
    }
}

void write_bank_csv(const TrainResult& result, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << "epoch,cluster_id,member_count,filtered_count";
    const std::size_t d = result.store.dim();
    for (std::size_t c = 0; c < d; ++c)
        out << ",c_" << c;
    out << "\n";
    for (std::size_t e = 0; e < result.artifacts.size(); ++e) {
        const auto& bank = result.artifacts[e].bank;
        for (std::size_t cid = 0; cid < bank.size(); ++cid) {
            out << result.traces[e].epoch << "," << cid << "," << bank.member_count[cid] << ","
                << bank.filtered_count[cid];
            for (std::size_t c = 0; c < d; ++c)
                out << "," << format_double(bank.centroids(cid, c));
            out << "\n";
        }
    }
}

void write_histogram_csv(const TrainResult& result, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << "epoch,bin_index,bin_lo,bin_hi,count\n";
    for (const auto& m : result.metrics) {
        for (int b = 0; b < kSilhouetteBins; ++b) {
            const double lo = -1.0 + 2.0 * b / kSilhouetteBins;
            const double hi = -1.0 + 2.0 * (b + 1) / kSilhouetteBins;
            out << m.epoch << "," << b << "," << format_double(lo) << "," << format_double(hi)
                << "," << m.silhouette_histogram[static_cast<std::size_t>(b)] << "\n";
        }
    }
}

void write_pca_csv(const Matrix& features, const GroundTruth& gt,
                   const std::filesystem::path& file) {
    const Matrix coords = pca_2d(features);
    auto out = open_out(file);
    out << "sample_id,identity,x,y\n";
    for (std::size_t i = 0; i < coords.rows(); ++i)
        out << i << "," << gt.identities[i] << "," << format_double(coords(i, 0)) << ","
            << format_double(coords(i, 1)) << "\n";
}

void write_features_csv(const Matrix& features, const std::filesystem::path& file) {
    auto out = open_out(file);
    out << "sample_id";
    for (std::size_t c = 0; c < features.cols(); ++c)
        out << ",f_" << c;
    out << "\n";
    for (std::size_t i = 0; i < features.rows(); ++i) {
        out << i;
        for (std::size_t c = 0; c < features.cols(); ++c)
            out << "," << format_double(features(i, c));
        out << "\n";
    }
}

void write_summary_json(const TrainResult& result, const TrainConfig& config,
                        const std::string& fingerprint, const std::string& ablation,
                        const std::filesystem::path& file) {
    json j{
        {"version", kSoftwareVersion},
        {"ablation", ablation},
        {"fingerprint", fingerprint},
        {"epochs_run", result.traces.size()},
        {"degenerate_epochs", result.degenerate_epochs()},
        {"config", config_to_json(config)},
    };
    if (!result.metrics.empty()) {
        const auto& m = result.metrics.back();
        j["final"] = {
            {"epoch", m.epoch},
            {"mAP", m.map},
            {"top1", m.cmc.at(1)},
            {"top5", m.cmc.at(5)},
            {"top10", m.cmc.at(10)},
        };
        if (m.ics_vanilla)
            j["final"]["ics_vanilla"] = *m.ics_vanilla;
        if (m.ics_cgc)
            j["final"]["ics_cgc"] = *m.ics_cgc;
    }
    auto out = open_out(file);
    out << j.dump(2) << "\n";
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& file) {
    json j{
        {"run_id", manifest.run_id},
        {"ablation", manifest.ablation},
        {"fingerprint", manifest.fingerprint},
        {"version", manifest.version},
        {"config", config_to_json(manifest.config)},
        {"outputs", manifest.outputs},
    };
    auto out = open_out(file);
    out << j.dump(2) << "\n";
}

RunManifest load_manifest(const std::filesystem::path& file) {
    const json j = parse_json_file(file);
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.ablation = j.at("ablation").get<std::string>();
    m.fingerprint = j.at("fingerprint").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.config = config_from_json(j.at("config"));
    if (j.contains("outputs"))
        m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
}

}  // namespace cgclab
