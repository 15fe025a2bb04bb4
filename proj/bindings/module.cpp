#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "strokebench/cluster.hpp"
#include "strokebench/config.hpp"
#include "strokebench/ekf.hpp"
#include "strokebench/errors.hpp"
#include "strokebench/geometry.hpp"
#include "strokebench/kinematics.hpp"
#include "strokebench/performance.hpp"
#include "strokebench/pipeline.hpp"
#include "strokebench/quaternion.hpp"
#include "strokebench/tsne.hpp"

namespace py = pybind11;
using namespace strokebench;

namespace {

Eigen::Vector4d quat_to_vec(const Quaternion& q) { return {q.x, q.y, q.z, q.w}; }
Quaternion vec_to_quat(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

// Filter an (n,3) accel / (n,3) gyro pair; returns (quats (n,4) xyzw, biases (n,3)).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> estimate_orientation_arrays(
    const Eigen::MatrixXd& accel, const Eigen::MatrixXd& gyro, double sample_rate_hz,
    const EkfConfig& cfg) {
    if (accel.rows() != gyro.rows() || accel.cols() != 3 || gyro.cols() != 3)
        throw ValidationError("accel and gyro must both be (n, 3)");
    SensorStream stream;
    stream.sample_rate_hz = sample_rate_hz;
    stream.samples.resize(static_cast<std::size_t>(accel.rows()));
    for (Eigen::Index i = 0; i < accel.rows(); ++i) {
        stream.samples[static_cast<std::size_t>(i)].index = i;
        stream.samples[static_cast<std::size_t>(i)].accel = accel.row(i).transpose();
        stream.samples[static_cast<std::size_t>(i)].gyro = gyro.row(i).transpose();
    }
    const OrientationTrack track = estimate_orientation(stream, cfg);
    Eigen::MatrixXd quats(accel.rows(), 4);
    Eigen::MatrixXd biases(accel.rows(), 3);
    for (Eigen::Index i = 0; i < accel.rows(); ++i) {
        quats.row(i) = quat_to_vec(track.quats[static_cast<std::size_t>(i)]).transpose();
        biases.row(i) = track.biases[static_cast<std::size_t>(i)].transpose();
    }
    return {quats, biases};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core operations of the strokebench performance-benchmarking pipeline";

    py::register_exception<Error>(m, "StrokebenchError", PyExc_RuntimeError);

    // Quaternions travel as xyzw numpy vectors.
    m.def(
        "quat_multiply",
        [](const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
            return quat_to_vec(vec_to_quat(a) * vec_to_quat(b));
        },
        py::arg("a"), py::arg("b"), "Hamilton product of two xyzw quaternions");
    m.def(
        "error_quat",
        [](const Eigen::Vector3d& delta_theta) { return quat_to_vec(error_quat(delta_theta)); },
        py::arg("delta_theta"));
    m.def(
        "quat_to_euler",
        [](const Eigen::Vector4d& q) {
            const EulerAngles e = quat_to_euler(vec_to_quat(q).normalized());
            return py::make_tuple(e.yaw, e.pitch, e.roll);
        },
        py::arg("q"), "Intrinsic Z-Y-X (yaw, pitch, roll) in degrees");
    m.def(
        "relative_orientation",
        [](const Eigen::Vector4d& q_proximal, const Eigen::Vector4d& q_distal) {
            return quat_to_vec(relative_orientation(vec_to_quat(q_proximal).normalized(),
                                                    vec_to_quat(q_distal).normalized()));
        },
        py::arg("q_proximal"), py::arg("q_distal"));

    py::class_<EkfConfig>(m, "EkfConfig")
        .def(py::init<>())
        .def_readwrite("gyro_noise_density", &EkfConfig::gyro_noise_density)
        .def_readwrite("bias_random_walk", &EkfConfig::bias_random_walk)
        .def_readwrite("accel_noise_std", &EkfConfig::accel_noise_std)
        .def_readwrite("gravity_magnitude", &EkfConfig::gravity_magnitude)
        .def_readwrite("accel_gate", &EkfConfig::accel_gate)
        .def_readwrite("initial_attitude_std", &EkfConfig::initial_attitude_std)
        .def_readwrite("initial_bias_std", &EkfConfig::initial_bias_std);
    m.def("estimate_orientation", &estimate_orientation_arrays, py::arg("accel"), py::arg("gyro"),
          py::arg("sample_rate_hz") = 64.0, py::arg("config") = EkfConfig{},
          "Run the attitude filter over (n,3) accel/gyro arrays");

    py::class_<TableDims>(m, "TableDims")
        .def(py::init<>())
        .def_readwrite("length_cm", &TableDims::length_cm)
        .def_readwrite("width_cm", &TableDims::width_cm)
        .def_readwrite("net_height_cm", &TableDims::net_height_cm)
        .def_readwrite("ball_diameter_cm", &TableDims::ball_diameter_cm);
    m.def(
        "intersect_lines",
        [](std::pair<double, double> a1, std::pair<double, double> a2,
           std::pair<double, double> b1, std::pair<double, double> b2) {
            const PixelPoint p = intersect_lines({{a1.first, a1.second}, {a2.first, a2.second}},
                                                 {{b1.first, b1.second}, {b2.first, b2.second}});
            return py::make_tuple(p.u, p.v);
        },
        py::arg("a1"), py::arg("a2"), py::arg("b1"), py::arg("b2"));
    m.def(
        "bounce_x",
        [](double d1, double d2, const TableDims& dims) { return bounce_x(d1, d2, dims); },
        py::arg("d1"), py::arg("d2"), py::arg("dims") = TableDims{});
    m.def(
        "bounce_y",
        [](double de, double be, double dv, double bv, const TableDims& dims) {
            return bounce_y(de, be, dv, bv, dims);
        },
        py::arg("de"), py::arg("be"), py::arg("dv"), py::arg("bv"), py::arg("dims") = TableDims{});
    m.def(
        "net_clearance",
        [](double h_ball_cm, const TableDims& dims) { return net_clearance(h_ball_cm, dims); },
        py::arg("h_ball_cm"), py::arg("dims") = TableDims{});
    m.def("ball_speed", &ball_speed, py::arg("d_ball_m"), py::arg("n_frames"),
          py::arg("fps") = 60.0);
    m.def("height_ratio", &height_ratio, py::arg("h0_cm"), py::arg("h1_cm"));

    m.def(
        "rbf_score",
        [](double alpha, double mu, double cost) {
            RbfSpec spec{0, alpha, mu};
            spec.validate();
            return rbf_score(spec, cost);
        },
        py::arg("alpha"), py::arg("mu"), py::arg("cost"));

    m.def(
        "affinity",
        [](const Eigen::MatrixXd& points, double sigma) { return affinity(points, sigma).values; },
        py::arg("points"), py::arg("sigma"));
    m.def(
        "normalized_laplacian",
        [](const Eigen::MatrixXd& points, double sigma) {
            return normalized_laplacian(affinity(points, sigma));
        },
        py::arg("points"), py::arg("sigma"));
    m.def("symmetric_eigenvalues", &symmetric_eigenvalues, py::arg("matrix"));
    m.def("eigengaps", &eigengaps, py::arg("ascending_eigenvalues"));
    m.def(
        "sigma_sweep",
        [](const Eigen::MatrixXd& points, double log10_min, double log10_max, int count,
           int k_max) {
            auto [profile, result] = sigma_sweep(points, {log10_min, log10_max, count}, k_max);
            py::dict out;
            out["selected_k"] = result.selected_k;
            out["fallback"] = result.fallback;
            out["dominance"] = result.dominance;
            out["sigma_grid"] = profile.sigma_grid;
            return out;
        },
        py::arg("points"), py::arg("log10_min") = -3.0, py::arg("log10_max") = 1.0,
        py::arg("count") = 100, py::arg("k_max") = 10);
    m.def(
        "kmeans",
        [](const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts) {
            const ClusterModel model = kmeans(points, k, seed, restarts);
            py::dict out;
            out["assignments"] = model.assignments;
            out["centroids"] = model.centroids;
            out["inertia"] = model.inertia;
            return out;
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 1, py::arg("restarts") = 50);
    m.def("distance_to_ideal", &distance_to_ideal, py::arg("centroid"));
    m.def(
        "select_benchmark",
        [](const Eigen::MatrixXd& centroids) {
            ClusterModel model;
            model.k = static_cast<int>(centroids.rows());
            model.centroids = centroids;
            const BenchmarkSelection sel = select_benchmark(model);
            return py::make_tuple(sel.benchmark_index, sel.distances);
        },
        py::arg("centroids"), "Distances to the ideal point and the argmin index");

    m.def(
        "tsne_embed",
        [](const Eigen::MatrixXd& points, double perplexity, int iterations, double learning_rate,
           std::uint64_t seed) {
            TsneConfig cfg;
            cfg.perplexity = perplexity;
            cfg.iterations = iterations;
            cfg.learning_rate = learning_rate;
            cfg.seed = seed;
            const Embedding2D embedding = tsne_embed(points, cfg);
            return py::make_tuple(embedding.coords, embedding.final_kl);
        },
        py::arg("points"), py::arg("perplexity") = 30.0, py::arg("iterations") = 1000,
        py::arg("learning_rate") = 200.0, py::arg("seed") = 0);

    m.def(
        "run_pipeline",
        [](const std::filesystem::path& config_path,
           const std::optional<std::filesystem::path>& out_dir,
           std::optional<std::uint64_t> seed) {
            PipelineConfig cfg = load_pipeline_config(config_path);
            if (out_dir) cfg.output_dir = *out_dir;
            if (seed) {
                cfg.seed = *seed;
                cfg.tsne.seed = *seed;
            }
            const BenchmarkReport report = run_pipeline(cfg);
            py::dict out;
            out["selected_k"] = report.sweep.selected_k;
            out["benchmark_index"] = report.benchmark.benchmark_index;
            out["distances"] = report.benchmark.distances;
            out["assignments"] = report.clusters.assignments;
            out["centroids"] = report.clusters.centroids;
            out["output_dir"] = cfg.output_dir;
            return out;
        },
        py::arg("config_path"), py::arg("out_dir") = std::nullopt, py::arg("seed") = std::nullopt,
        "Run the full pipeline and return a result summary");
}
