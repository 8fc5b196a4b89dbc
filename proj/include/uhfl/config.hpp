#pragma once

#include <string>
#include <vector>

#include "uhfl/hfl.hpp"

namespace uhfl {

/// Flat experiment configuration; defaults match the reference system
/// parameter set. dB-valued keys carry a _db suffix.
struct ExperimentConfig {
  // population and geometry
  int n_devices = 50;
  int n_uavs = 10;
  double radius_m = 500.0;
  double height_m = 120.0;

  // channel
  double p_device_w = 0.75;
  double p_uav_w = 1.5;
  double alpha_los = 2.0;
  double alpha_nlos = 3.5;
  int m_los = 4;
  int m_nlos = 1;
  int m_direct = 2;
  double alpha_direct = 2.5;
  double env_a = 9.61;
  double env_b = 0.16;
  double noise_w = 4.14e-6;
  double theta_db = -5.0;

  // resources
  int rb_bs = 5;
  int rb_uav = 15;
  int rb_direct = 20;
  double bandwidth_device_hz = 1e6;
  double bandwidth_uav_hz = 1e6;

  // compute / latency
  double cpu_frequency_hz = 2e9;
  double cpu_cycles_per_sample = 20.0;
  double model_size_bits = 1e6;

  // training
  double learning_rate = 0.01;
  int batch_size = 64;
  int local_period = 2;
  int global_period = 2;
  int total_iterations = 200;
  std::string variant = "unbiased-hfl";
  std::string channel_mode = "montecarlo";
  int samples_per_device = 200;
  int labels_per_device = 2;
  int input_dim = 32;
  int hidden_dim = 64;
  int n_classes = 10;
  double blob_sigma = 1.2;
  double accuracy_target = 0.85;
  double train_theta_db = -5.0;

  // run control
  std::uint64_t seed = 1;
  int trials = 50000;
  int n_pairs = 5;

  // sweeps
  std::vector<double> theta_grid_db = {-20, -15, -10, -5, 0, 5, 10};
  std::vector<double> height_grid_m;
  std::vector<int> uav_grid = {5, 10, 15, 20};
  std::vector<double> model_size_grid_bits = {1e6};

  ExperimentConfig();  // fills height_grid_m

  ChannelParams channel() const;
  ResourceConfig resources() const;
  TrainingConfig training() const;

  void validate() const;
};

/// Strict JSON parse: unknown keys and type mismatches raise
/// invalid_argument naming the offending key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a over the canonical serialized form.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace uhfl
