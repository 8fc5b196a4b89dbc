#pragma once

#include "uhfl/analytics.hpp"
#include "uhfl/dataset.hpp"
#include "uhfl/mlp.hpp"
#include "uhfl/montecarlo.hpp"

namespace uhfl {

enum class Variant { UnbiasedHfl, ConventionalHfl, FedAvg, UnbiasedFedAvg };
enum class ChannelMode { MonteCarlo, Bernoulli };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct TrainingConfig {
  double learning_rate = 0.01;
  int local_period = 2;        // E
  int global_period = 2;       // G, integer multiple of E
  int total_iterations = 200;  // T
  int batch_size = 64;
  Variant variant = Variant::UnbiasedHfl;
  ChannelMode channel_mode = ChannelMode::MonteCarlo;
  std::uint64_t seed = 1;
  MlpShape shape{};

  // latency bookkeeping
  double cpu_cycles_per_sample = 20.0;
  double cpu_frequency_hz = 2e9;
  double model_size_bits = 1e6;

  void validate() const;
};

struct TrainingTrace {
  std::vector<double> accuracy;              // per iteration, weighted device average
  std::vector<double> loss;                  // same model, full training set
  std::vector<int> local_success_count;      // I2 (or direct) successes per iteration
  std::vector<int> global_success_count;     // I1 successes per iteration
  std::vector<double> cumulative_latency_s;  // step function, bumps at BS rounds
};

/// One mini-batch SGD step; returns the updated parameter vector.
Eigen::VectorXd local_sgd_step(const Mlp& model, const Dataset& data,
                               const std::vector<int>& shard, double eta, int batch_size,
                               Rng& rng);

/// v <- v + sum_k weight_k / p_edge_k * indicator_k * (member_k - v),
/// summed in member order. Any p_edge == 0 -> invalid_argument.
Eigen::VectorXd uav_aggregate(const Eigen::VectorXd& prev_v,
                              const std::vector<Eigen::VectorXd>& members,
                              const std::vector<double>& p_over_pu,
                              const std::vector<std::uint8_t>& indicators,
                              const std::vector<double>& p_edge);

/// Same update shape with cluster weights p_u and backhaul probabilities.
Eigen::VectorXd bs_aggregate(const Eigen::VectorXd& prev_w,
                             const std::vector<Eigen::VectorXd>& uav_models,
                             const std::vector<double>& p_u,
                             const std::vector<std::uint8_t>& indicators,
                             const std::vector<double>& p_back);

TrainingTrace train(const Topology& topo, const ClusterAssignment& asg,
                    const SuccessProbabilities& probs, const Dataset& data,
                    const DataPartition& part, const TrainingConfig& cfg,
                    const ChannelParams& ch, const ResourceConfig& res);

}  // namespace uhfl
