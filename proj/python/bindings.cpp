// pybind11 bindings for the cgclab core. Matrices cross the boundary as
// C-contiguous float64 numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cgclab/centroids.hpp"
#include "cgclab/clustering.hpp"
#include "cgclab/confidence.hpp"
#include "cgclab/core.hpp"
#include "cgclab/datagen.hpp"
#include "cgclab/errors.hpp"
#include "cgclab/eval.hpp"
#include "cgclab/io.hpp"
#include "cgclab/labeling.hpp"
#include "cgclab/objective.hpp"
#include "cgclab/trainer.hpp"

namespace py = pybind11;
using namespace cgclab;

namespace {

using NpArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix matrix_from_numpy(const NpArray& a) {
    if (a.ndim() != 2)
        throw py::value_error("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data());
    return m;
}

py::array_t<double> numpy_from_matrix(const Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.rows() * m.cols(), a.mutable_data());
    return a;
}

std::vector<double> vector_from_numpy(const NpArray& a) {
    if (a.ndim() != 1)
        throw py::value_error("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

std::vector<std::size_t> indices_from_list(const std::vector<std::size_t>& v) { return v; }

py::dict trace_to_dict(const EpochTrace& t) {
    py::dict d;
    d["epoch"] = t.epoch;
    d["num_clusters"] = t.num_clusters;
    d["num_outliers"] = t.num_outliers;
    d["mean_silhouette"] = t.mean_silhouette;
    d["loss_curve"] = t.loss_curve;
    d["delta_used"] = t.delta_used;
    d["degenerate"] = t.degenerate;
    return d;
}

py::dict metrics_to_dict(const MetricsRecord& m) {
    py::dict d;
    d["epoch"] = m.epoch;
    d["mAP"] = m.map;
    py::dict cmc;
    for (const auto& [k, v] : m.cmc)
        cmc[py::int_(k)] = v;
    d["cmc"] = cmc;
    d["ics_vanilla"] = m.ics_vanilla ? py::object(py::float_(*m.ics_vanilla)) : py::none();
    d["ics_cgc"] = m.ics_cgc ? py::object(py::float_(*m.ics_cgc)) : py::none();
    d["silhouette_histogram"] =
        std::vector<std::uint64_t>(m.silhouette_histogram.begin(), m.silhouette_histogram.end());
    return d;
}

}  // namespace

PYBIND11_MODULE(_cgclab, m) {
    m.doc() = "Confidence-guided pseudo-label refinement for clustering-based "
              "unsupervised representation learning";
    m.attr("__version__") = kSoftwareVersion;

    py::register_exception<ZeroVector>(m, "ZeroVectorError");
    py::register_exception<ConfigError>(m, "ConfigurationError");
    py::register_exception<SplitError>(m, "SplitError");
    py::register_exception<EmptyInput>(m, "EmptyInputError");
    py::register_exception<LabelError>(m, "LabelRowError");
    py::register_exception<EvalError>(m, "EvaluationError");

    // core
    m.def("cosine_similarity", [](const NpArray& u, const NpArray& v) {
        return cosine_similarity(vector_from_numpy(u), vector_from_numpy(v));
    });
    m.def("cosine_distance", [](const NpArray& u, const NpArray& v) {
        return cosine_distance(vector_from_numpy(u), vector_from_numpy(v));
    });
    m.def("l2_normalize_rows",
          [](const NpArray& a) { return numpy_from_matrix(l2_normalize_rows(matrix_from_numpy(a))); });

    // datagen
    py::class_<DatasetSpec>(m, "DatasetSpec")
        .def(py::init<>())
        .def_readwrite("num_identities", &DatasetSpec::num_identities)
        .def_readwrite("samples_per_identity", &DatasetSpec::samples_per_identity)
        .def_readwrite("dim", &DatasetSpec::dim)
        .def_readwrite("noise_sigma", &DatasetSpec::noise_sigma)
        .def_readwrite("boundary_fraction", &DatasetSpec::boundary_fraction)
        .def_readwrite("boundary_sigma", &DatasetSpec::boundary_sigma)
        .def_readwrite("num_cameras", &DatasetSpec::num_cameras)
        .def_readwrite("camera_bias_sigma", &DatasetSpec::camera_bias_sigma)
        .def_readwrite("seed", &DatasetSpec::seed);

    m.def("generate", [](const DatasetSpec& spec) {
        const Dataset ds = generate(spec);
        py::dict d;
        d["observations"] = numpy_from_matrix(ds.observations);
        d["identities"] = ds.ground_truth.identities;
        d["camera_ids"] = ds.ground_truth.camera_ids;
        d["boundary_mask"] = std::vector<int>(ds.boundary_mask.begin(), ds.boundary_mask.end());
        return d;
    });
    m.def(
        "split_query_gallery",
        [](const std::vector<int>& identities, const std::vector<int>& cameras,
           double query_fraction, std::uint64_t seed) {
            const auto split =
                split_query_gallery(GroundTruth{identities, cameras}, query_fraction, seed);
            return py::make_tuple(split.query, split.gallery);
        },
        py::arg("identities"), py::arg("camera_ids"), py::arg("query_fraction"), py::arg("seed"));

    // clustering
    py::class_<DbscanParams>(m, "DbscanParams")
        .def(py::init<>())
        .def_readwrite("eps", &DbscanParams::eps)
        .def_readwrite("min_pts", &DbscanParams::min_pts);

    py::class_<ClusterAssignment>(m, "ClusterAssignment")
        .def(py::init<>())
        .def_readwrite("labels", &ClusterAssignment::labels)
        .def_readwrite("num_clusters", &ClusterAssignment::num_clusters)
        .def("num_outliers", &ClusterAssignment::num_outliers);

    m.def("dbscan", [](const NpArray& features, const DbscanParams& params) {
        return dbscan(matrix_from_numpy(features), params);
    });
    m.def("cluster_members", [](const ClusterAssignment& a) {
        py::list out;
        for (const auto& members : cluster_members(a))
            out.append(indices_from_list(members));
        return out;
    });
    m.def("demote_singletons", &demote_singletons);

    // confidence
    py::enum_<SilhouetteDenominator>(m, "SilhouetteDenominator")
        .value("STANDARD", SilhouetteDenominator::Standard)
        .value("CLUSTER_SIZE", SilhouetteDenominator::ClusterSize);

    m.def(
        "silhouette_scores",
        [](const ClusterAssignment& a, const NpArray& features, SilhouetteDenominator den) {
            const auto report = silhouette_scores(a, matrix_from_numpy(features), den);
            return py::make_tuple(report.scores,
                                  std::vector<int>(report.valid_mask.begin(),
                                                   report.valid_mask.end()));
        },
        py::arg("assignment"), py::arg("features"),
        py::arg("denominator") = SilhouetteDenominator::Standard);

    // centroids
    py::class_<CentroidBank>(m, "CentroidBank")
        .def(py::init<>())
        .def_property(
            "centroids", [](const CentroidBank& b) { return numpy_from_matrix(b.centroids); },
            [](CentroidBank& b, const NpArray& a) { b.centroids = matrix_from_numpy(a); })
        .def_readwrite("momentum", &CentroidBank::momentum)
        .def_readwrite("member_count", &CentroidBank::member_count)
        .def_readwrite("filtered_count", &CentroidBank::filtered_count)
        .def("size", &CentroidBank::size);

    m.def(
        "vanilla_centroids",
        [](const ClusterAssignment& a, const NpArray& features, double momentum) {
            return vanilla_centroids(a, matrix_from_numpy(features), momentum);
        },
        py::arg("assignment"), py::arg("features"), py::arg("momentum") = 0.2);
    m.def(
        "confidence_guided_centroids",
        [](const ClusterAssignment& a, const NpArray& features, const std::vector<double>& scores,
           double delta, double momentum) {
            ConfidenceReport conf;
            conf.scores = scores;
            conf.valid_mask.assign(scores.size(), true);
            return confidence_guided_centroids(a, matrix_from_numpy(features), conf, delta,
                                               momentum);
        },
        py::arg("assignment"), py::arg("features"), py::arg("scores"), py::arg("delta"),
        py::arg("momentum") = 0.2);
    m.def("momentum_update", [](CentroidBank& bank, int cluster_id, const NpArray& f) {
        momentum_update(bank, cluster_id, vector_from_numpy(f));
    });

    py::enum_<ScheduleKind>(m, "ScheduleKind")
        .value("LINEAR", ScheduleKind::Linear)
        .value("DYNAMIC", ScheduleKind::Dynamic)
        .value("CONSTANT", ScheduleKind::Constant);

    py::class_<ThresholdSchedule>(m, "ThresholdSchedule")
        .def(py::init<>())
        .def_readwrite("kind", &ThresholdSchedule::kind)
        .def_readwrite("delta0", &ThresholdSchedule::delta0)
        .def_readwrite("epsilon", &ThresholdSchedule::epsilon)
        .def_readwrite("constant_value", &ThresholdSchedule::constant_value)
        .def_readwrite("total_epochs", &ThresholdSchedule::total_epochs);

    m.def("threshold_at", &threshold_at);

    // labeling
    m.def("distance_matrix", [](const NpArray& features, const CentroidBank& bank) {
        return numpy_from_matrix(distance_matrix(matrix_from_numpy(features), bank));
    });
    m.def("confidence_matrix", [](const NpArray& distances) {
        return numpy_from_matrix(confidence_matrix(matrix_from_numpy(distances)));
    });
    m.def("confidence_guided_labels",
          [](const ClusterAssignment& a, const NpArray& p, double beta) {
              const auto soft = confidence_guided_labels(a, matrix_from_numpy(p), beta);
              return py::make_tuple(numpy_from_matrix(soft.labels),
                                    std::vector<int>(soft.valid_mask.begin(),
                                                     soft.valid_mask.end()));
          });

    // objective
    m.def("cluster_nce_loss", [](const NpArray& f, const CentroidBank& bank, int target,
                                 double tau) {
        return cluster_nce_loss(vector_from_numpy(f), bank, target, tau);
    });
    m.def("soft_ce_loss",
          [](const NpArray& f, const CentroidBank& bank, const NpArray& y, double tau) {
              return soft_ce_loss(vector_from_numpy(f), bank, vector_from_numpy(y), tau);
          });
    m.def("batch_loss_and_grad", [](const NpArray& params, const CentroidBank& bank,
                                    const NpArray& labels, double tau) {
        const auto r =
            batch_loss_and_grad(matrix_from_numpy(params), bank, matrix_from_numpy(labels), tau);
        return py::make_tuple(r.loss, numpy_from_matrix(r.grads));
    });

    // eval
    m.def(
        "mean_average_precision",
        [](const NpArray& features, const std::vector<std::size_t>& query,
           const std::vector<std::size_t>& gallery, const std::vector<int>& identities,
           const std::vector<int>& cameras, bool exclude_same_camera) {
            return mean_average_precision(matrix_from_numpy(features), query, gallery,
                                          GroundTruth{identities, cameras}, exclude_same_camera);
        },
        py::arg("features"), py::arg("query"), py::arg("gallery"), py::arg("identities"),
        py::arg("camera_ids"), py::arg("exclude_same_camera") = false);
    m.def(
        "cmc_topk",
        [](const NpArray& features, const std::vector<std::size_t>& query,
           const std::vector<std::size_t>& gallery, const std::vector<int>& identities,
           const std::vector<int>& cameras, const std::vector<int>& ks,
           bool exclude_same_camera) {
            return cmc_topk(matrix_from_numpy(features), query, gallery,
                            GroundTruth{identities, cameras}, ks, exclude_same_camera);
        },
        py::arg("features"), py::arg("query"), py::arg("gallery"), py::arg("identities"),
        py::arg("camera_ids"), py::arg("ks") = std::vector<int>{1, 5, 10},
        py::arg("exclude_same_camera") = false);
    m.def("pca_2d",
          [](const NpArray& features) { return numpy_from_matrix(pca_2d(matrix_from_numpy(features))); });

    // trainer
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("iters_per_epoch", &TrainConfig::iters_per_epoch)
        .def_readwrite("batch_identities", &TrainConfig::batch_identities)
        .def_readwrite("batch_instances", &TrainConfig::batch_instances)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("lr_decay_epochs", &TrainConfig::lr_decay_epochs)
        .def_readwrite("temperature", &TrainConfig::temperature)
        .def_readwrite("momentum", &TrainConfig::momentum)
        .def_readwrite("beta", &TrainConfig::beta)
        .def_readwrite("schedule", &TrainConfig::schedule)
        .def_readwrite("dbscan", &TrainConfig::dbscan)
        .def_readwrite("use_cgc", &TrainConfig::use_cgc)
        .def_readwrite("use_cgl", &TrainConfig::use_cgl)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("query_fraction", &TrainConfig::query_fraction);

    m.def(
        "train",
        [](const NpArray& observations, const std::vector<int>& identities,
           const std::vector<int>& cameras, const TrainConfig& config) {
            const auto result =
                train(matrix_from_numpy(observations), GroundTruth{identities, cameras}, config);
            py::dict d;
            d["features"] = numpy_from_matrix(result.store.features);
            py::list traces;
            for (const auto& t : result.traces)
                traces.append(trace_to_dict(t));
            d["traces"] = traces;
            py::list metrics;
            for (const auto& rec : result.metrics)
                metrics.append(metrics_to_dict(rec));
            d["metrics"] = metrics;
            d["query"] = result.split.query;
            d["gallery"] = result.split.gallery;
            return d;
        },
        py::arg("observations"), py::arg("identities"), py::arg("camera_ids"), py::arg("config"));
}
