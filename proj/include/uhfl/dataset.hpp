#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "uhfl/geometry.hpp"

namespace uhfl {

struct Dataset {
  Eigen::MatrixXd x;  // n_samples x input_dim, row per sample
  std::vector<int> y;
  int n_classes = 0;

  int n() const { return static_cast<int>(y.size()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

/// Synthetic Gaussian-blob classification set: one spherical cluster per
/// class, means drawn once from N(0, I).
Dataset make_blobs(int n_samples, int input_dim, int n_classes, double noise_sigma,
                   std::uint64_t seed);

/// Raw idx image/label pair (big-endian magics 0x00000803 / 0x00000801),
/// pixels scaled to [0, 1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct DataPartition {
  std::vector<std::vector<int>> shards;  // sample indices per device
  std::vector<int> n_k;                  // samples per device
  std::vector<double> p_k;               // n_k / n_total
  int n_total = 0;

  int n_devices() const { return static_cast<int>(shards.size()); }
};

/// Label-sorted shard partition: sort by label, cut into
/// n_devices * labels_per_device shards, deal labels_per_device shards
/// to each device in shuffled order.
DataPartition partition_noniid(const Dataset& data, int n_devices, int labels_per_device,
                               Rng& rng);

/// Per-cluster weight sums p_bar_u given the device clustering.
std::vector<double> cluster_weights(const DataPartition& part,
                                    const std::vector<std::vector<int>>& clusters);

}  // namespace uhfl
