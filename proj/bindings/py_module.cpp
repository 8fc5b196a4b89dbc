#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uhfl/config.hpp"
#include "uhfl/perf.hpp"

namespace py = pybind11;
using namespace uhfl;

PYBIND11_MODULE(_uhfl, m) {
  m.doc() = "UAV-assisted hierarchical federated learning: channel analytics, "
            "Monte Carlo validation, training loop and performance bounds";

  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure",
                                             PyExc_ArithmeticError);

  py::enum_<LosState>(m, "LosState")
      .value("LOS", LosState::Los)
      .value("NLOS", LosState::Nlos);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init<>())
      .def_readwrite("alpha_los", &ChannelParams::alpha_los)
      .def_readwrite("alpha_nlos", &ChannelParams::alpha_nlos)
      .def_readwrite("m_los", &ChannelParams::m_los)
      .def_readwrite("m_nlos", &ChannelParams::m_nlos)
      .def_readwrite("a", &ChannelParams::a)
      .def_readwrite("b", &ChannelParams::b)
      .def_readwrite("p_device", &ChannelParams::p_device)
      .def_readwrite("p_uav", &ChannelParams::p_uav)
      .def_readwrite("noise", &ChannelParams::noise)
      .def_readwrite("theta", &ChannelParams::theta)
      .def_readwrite("m_direct", &ChannelParams::m_direct)
      .def_readwrite("alpha_direct", &ChannelParams::alpha_direct);

  py::class_<ResourceConfig>(m, "ResourceConfig")
      .def(py::init<>())
      .def_readwrite("rb_bs", &ResourceConfig::rb_bs)
      .def_readwrite("rb_uav", &ResourceConfig::rb_uav)
      .def_readwrite("rb_direct", &ResourceConfig::rb_direct)
      .def_readwrite("bandwidth_device", &ResourceConfig::bandwidth_device)
      .def_readwrite("bandwidth_uav", &ResourceConfig::bandwidth_uav);

  py::class_<NetworkScale>(m, "NetworkScale")
      .def(py::init<>())
      .def_readwrite("n_devices", &NetworkScale::n_devices)
      .def_readwrite("n_uavs", &NetworkScale::n_uavs);

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("norm", &Vec2::norm);

  py::class_<Topology>(m, "Topology")
      .def_readonly("radius", &Topology::radius)
      .def_readonly("height", &Topology::height)
      .def_readonly("devices", &Topology::devices)
      .def_readonly("uavs", &Topology::uavs)
      .def("n_devices", &Topology::n_devices)
      .def("n_uavs", &Topology::n_uavs)
      .def("link_distance", &Topology::link_distance)
      .def("backhaul_distance", &Topology::backhaul_distance)
      .def("direct_distance", &Topology::direct_distance);

  py::class_<ClusterAssignment>(m, "ClusterAssignment")
      .def_readonly("serving_uav", &ClusterAssignment::serving_uav)
      .def_readonly("serving_distance_l", &ClusterAssignment::serving_distance_l)
      .def_readonly("backhaul_distance_g", &ClusterAssignment::backhaul_distance_g)
      .def("clusters", &ClusterAssignment::clusters);

  m.def("sample_topology", &sample_topology, py::arg("n_devices"), py::arg("n_uavs"),
        py::arg("radius"), py::arg("height"), py::arg("seed"));
  m.def(
      "associate",
      [](const Topology& t, const ChannelParams& ch, std::uint64_t seed) {
        return associate(t, ch, seed);
      },
      py::arg("topology"), py::arg("channel"), py::arg("seed"));
  m.def("los_probability", &los_probability, py::arg("r"), py::arg("h"), py::arg("a"),
        py::arg("b"));
  m.def("exclusion_region", &exclusion_region, py::arg("l"), py::arg("alpha_from"),
        py::arg("alpha_to"));

  py::class_<SuccessProbabilities>(m, "SuccessProbabilities")
      .def_readonly("edge", &SuccessProbabilities::edge)
      .def_readonly("backhaul", &SuccessProbabilities::backhaul)
      .def_readonly("direct", &SuccessProbabilities::direct);

  m.def(
      "edge_success",
      [](double l_k, double x0, double y0, const ChannelParams& ch,
         const ResourceConfig& res, const NetworkScale& net, double R, double h) {
        return edge_success(l_k, x0, y0, ch, res, net, R, h);
      },
      py::arg("l_k"), py::arg("x0"), py::arg("y0"), py::arg("channel"),
      py::arg("resources"), py::arg("network"), py::arg("radius"), py::arg("height"));
  m.def(
      "backhaul_success",
      [](double g_u, const ChannelParams& ch, const ResourceConfig& res,
         const NetworkScale& net, double R, double h) {
        return backhaul_success(g_u, ch, res, net, R, h);
      },
      py::arg("g_u"), py::arg("channel"), py::arg("resources"), py::arg("network"),
      py::arg("radius"), py::arg("height"));
  m.def(
      "direct_success",
      [](double q_k, const ChannelParams& ch, const ResourceConfig& res,
         const NetworkScale& net, double R) {
        return direct_success(q_k, ch, res, net, R);
      },
      py::arg("q_k"), py::arg("channel"), py::arg("resources"), py::arg("network"),
      py::arg("radius"));
  m.def(
      "compute_success_probabilities",
      [](const Topology& t, const ClusterAssignment& a, const ChannelParams& ch,
         const ResourceConfig& res) {
        return compute_success_probabilities(t, a, ch, res);
      },
      py::arg("topology"), py::arg("assignment"), py::arg("channel"),
      py::arg("resources"));

  py::enum_<LinkType>(m, "LinkType")
      .value("EDGE", LinkType::Edge)
      .value("BACK", LinkType::Back)
      .value("DIRECT", LinkType::Direct);

  py::class_<EmpiricalEstimate>(m, "EmpiricalEstimate")
      .def_readonly("p", &EmpiricalEstimate::p)
      .def_readonly("ci_lo", &EmpiricalEstimate::ci_lo)
      .def_readonly("ci_hi", &EmpiricalEstimate::ci_hi)
      .def_readonly("n_trials", &EmpiricalEstimate::n_trials);

  m.def("empirical_success", &empirical_success, py::arg("topology"),
        py::arg("assignment"), py::arg("link"), py::arg("target"), py::arg("channel"),
        py::arg("resources"), py::arg("n_trials"), py::arg("seed"));

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("x", &Dataset::x)
      .def_readonly("y", &Dataset::y)
      .def_readonly("n_classes", &Dataset::n_classes)
      .def("n", &Dataset::n);

  py::class_<DataPartition>(m, "DataPartition")
      .def_readonly("shards", &DataPartition::shards)
      .def_readonly("n_k", &DataPartition::n_k)
      .def_readonly("p_k", &DataPartition::p_k)
      .def_readonly("n_total", &DataPartition::n_total);

  m.def("make_blobs", &make_blobs, py::arg("n_samples"), py::arg("dim"),
        py::arg("n_classes"), py::arg("noise_sigma"), py::arg("seed"));
  m.def(
      "partition_noniid",
      [](const Dataset& data, int n_devices, int labels_per_device, std::uint64_t seed) {
        Rng rng(seed);
        return partition_noniid(data, n_devices, labels_per_device, rng);
      },
      py::arg("data"), py::arg("n_devices"), py::arg("labels_per_device"),
      py::arg("seed"));

  py::enum_<Variant>(m, "Variant")
      .value("UNBIASED_HFL", Variant::UnbiasedHfl)
      .value("CONVENTIONAL_HFL", Variant::ConventionalHfl)
      .value("FEDAVG", Variant::FedAvg)
      .value("UNBIASED_FEDAVG", Variant::UnbiasedFedAvg);

  py::enum_<ChannelMode>(m, "ChannelMode")
      .value("MONTE_CARLO", ChannelMode::MonteCarlo)
      .value("BERNOULLI", ChannelMode::Bernoulli);

  py::class_<MlpShape>(m, "MlpShape")
      .def(py::init<>())
      .def_readwrite("input", &MlpShape::input)
      .def_readwrite("hidden", &MlpShape::hidden)
      .def_readwrite("classes", &MlpShape::classes)
      .def("n_params", &MlpShape::n_params);

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainingConfig::learning_rate)
      .def_readwrite("local_period", &TrainingConfig::local_period)
      .def_readwrite("global_period", &TrainingConfig::global_period)
      .def_readwrite("total_iterations", &TrainingConfig::total_iterations)
      .def_readwrite("batch_size", &TrainingConfig::batch_size)
      .def_readwrite("variant", &TrainingConfig::variant)
      .def_readwrite("channel_mode", &TrainingConfig::channel_mode)
      .def_readwrite("seed", &TrainingConfig::seed)
      .def_readwrite("shape", &TrainingConfig::shape)
      .def_readwrite("cpu_cycles_per_sample", &TrainingConfig::cpu_cycles_per_sample)
      .def_readwrite("cpu_frequency_hz", &TrainingConfig::cpu_frequency_hz)
      .def_readwrite("model_size_bits", &TrainingConfig::model_size_bits);

  py::class_<TrainingTrace>(m, "TrainingTrace")
      .def_readonly("accuracy", &TrainingTrace::accuracy)
      .def_readonly("loss", &TrainingTrace::loss)
      .def_readonly("local_success_count", &TrainingTrace::local_success_count)
      .def_readonly("global_success_count", &TrainingTrace::global_success_count)
      .def_readonly("cumulative_latency_s", &TrainingTrace::cumulative_latency_s);

  m.def("train", &train, py::arg("topology"), py::arg("assignment"), py::arg("probs"),
        py::arg("data"), py::arg("partition"), py::arg("config"), py::arg("channel"),
        py::arg("resources"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<BTerms>(m, "BTerms")
      .def(py::init<>())
      .def_readwrite("b1", &BTerms::b1)
      .def_readwrite("b2", &BTerms::b2)
      .def_readwrite("b3", &BTerms::b3);

  m.def("compute_b_terms", &compute_b_terms, py::arg("p_edge"), py::arg("p_back"),
        py::arg("p_k"), py::arg("p_u"), py::arg("clusters"));

  py::class_<BoundInputs>(m, "BoundInputs")
      .def(py::init<>())
      .def_readwrite("lipschitz", &BoundInputs::lipschitz)
      .def_readwrite("upward_div_sq", &BoundInputs::upward_div_sq)
      .def_readwrite("downward_div_sq", &BoundInputs::downward_div_sq)
      .def_readwrite("global_div_sq", &BoundInputs::global_div_sq)
      .def_readwrite("grad_bound_uav_sq", &BoundInputs::grad_bound_uav_sq)
      .def_readwrite("grad_bound_device_sq", &BoundInputs::grad_bound_device_sq)
      .def_readwrite("learning_rate", &BoundInputs::learning_rate)
      .def_readwrite("local_period", &BoundInputs::local_period)
      .def_readwrite("global_period", &BoundInputs::global_period)
      .def_readwrite("horizon", &BoundInputs::horizon)
      .def_readwrite("initial_gap", &BoundInputs::initial_gap)
      .def_readwrite("cluster_weights", &BoundInputs::cluster_weights)
      .def_readwrite("b", &BoundInputs::b)
      .def_readwrite("total_samples", &BoundInputs::total_samples)
      .def_readwrite("n_uavs", &BoundInputs::n_uavs)
      .def_readwrite("appendix_constants", &BoundInputs::appendix_constants);

  m.def("convergence_bound", &convergence_bound);
  m.def("convergence_bound_uniform", &convergence_bound_uniform);
  m.def("improvement_condition", &improvement_condition, py::arg("b2"), py::arg("b3"),
        py::arg("eps_tilde_sq"), py::arg("a2_sq"), py::arg("n_uavs"), py::arg("n_bar"),
        py::arg("m"));
  m.def("uniform_bound_delta", &uniform_bound_delta, py::arg("inputs"), py::arg("l"),
        py::arg("q"));
  m.def("latency_compute", &latency_compute, py::arg("cycles_per_sample"),
        py::arg("n_samples"), py::arg("cpu_hz"));
  m.def("latency_link", &latency_link, py::arg("bits"), py::arg("bandwidth_hz"),
        py::arg("sinr"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig").def(py::init<>());
  m.def("parse_config", &parse_config);
  m.def("serialize_config", &serialize_config);
  m.def("config_hash", &config_hash);
  m.def("db_to_linear", &db_to_linear);
  m.def("linear_to_db", &linear_to_db);
}
