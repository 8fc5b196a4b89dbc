#include "uhfl/dataset.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>

namespace uhfl {

Dataset make_blobs(int n_samples, int input_dim, int n_classes, double noise_sigma,
                   std::uint64_t seed) {
  if (n_samples < 1 || input_dim < 1 || n_classes < 2)
    throw std::invalid_argument("make_blobs: bad sizes");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd means(n_classes, input_dim);
  for (int c = 0; c < n_classes; ++c)
    for (int j = 0; j < input_dim; ++j) means(c, j) = gauss(rng);

  Dataset ds;
  ds.n_classes = n_classes;
  ds.x.resize(n_samples, input_dim);
  ds.y.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const int c = i % n_classes;  // balanced classes
    ds.y[i] = c;
    for (int j = 0; j < input_dim; ++j) ds.x(i, j) = means(c, j) + noise_sigma * gauss(rng);
  }
  return ds;
}

namespace {

std::uint32_t read_be32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("idx: truncated header");
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  std::ifstream lab(labels_path, std::ios::binary);
  if (!img) throw std::runtime_error("idx: cannot open " + images_path);
  if (!lab) throw std::runtime_error("idx: cannot open " + labels_path);

  if (read_be32(img) != 0x00000803u) throw std::runtime_error("idx: bad image magic");
  const std::uint32_t n = read_be32(img);
  const std::uint32_t rows = read_be32(img);
  const std::uint32_t cols = read_be32(img);

  if (read_be32(lab) != 0x00000801u) throw std::runtime_error("idx: bad label magic");
  if (read_be32(lab) != n) throw std::runtime_error("idx: image/label count mismatch");

  const std::size_t dim = std::size_t(rows) * cols;
  Dataset ds;
  ds.x.resize(n, dim);
  ds.y.resize(n);
  std::vector<unsigned char> row(dim);
  int max_label = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(dim));
    if (!img) throw std::runtime_error("idx: truncated image data");
    for (std::size_t j = 0; j < dim; ++j) ds.x(i, j) = row[j] / 255.0;
    char l = 0;
    lab.read(&l, 1);
    if (!lab) throw std::runtime_error("idx: truncated label data");
    ds.y[i] = static_cast<unsigned char>(l);
    max_label = std::max(max_label, ds.y[i]);
  }
  ds.n_classes = max_label + 1;
  return ds;
}

DataPartition partition_noniid(const Dataset& data, int n_devices, int labels_per_device,
                               Rng& rng) {
  if (n_devices < 1 || labels_per_device < 1)
    throw std::invalid_argument("partition_noniid: bad counts");
  if (data.n() < n_devices) throw std::invalid_argument("partition_noniid: fewer samples than devices");

  std::vector<int> order(data.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return data.y[a] < data.y[b]; });

  const int n_shards = n_devices * labels_per_device;
  std::vector<int> shard_ids(n_shards);
  std::iota(shard_ids.begin(), shard_ids.end(), 0);
  std::shuffle(shard_ids.begin(), shard_ids.end(), rng);

  DataPartition part;
  part.shards.resize(n_devices);
  part.n_k.resize(n_devices, 0);
  part.n_total = data.n();
  const int base = data.n() / n_shards;
  const int extra = data.n() % n_shards;
  // shard s covers the contiguous label-sorted slice [start_s, start_s + len_s)
  auto shard_start = [&](int s) { return s * base + std::min(s, extra); };
  for (int dev = 0; dev < n_devices; ++dev) {
    for (int j = 0; j < labels_per_device; ++j) {
      const int s = shard_ids[dev * labels_per_device + j];
      const int lo = shard_start(s);
      const int hi = shard_start(s + 1);
      for (int i = lo; i < hi; ++i) part.shards[dev].push_back(order[i]);
    }
    std::sort(part.shards[dev].begin(), part.shards[dev].end());
    part.n_k[dev] = static_cast<int>(part.shards[dev].size());
  }
  part.p_k.resize(n_devices);
  for (int dev = 0; dev < n_devices; ++dev)
    part.p_k[dev] = static_cast<double>(part.n_k[dev]) / part.n_total;
  return part;
}

std::vector<double> cluster_weights(const DataPartition& part,
                                    const std::vector<std::vector<int>>& clusters) {
  std::vector<double> pu(clusters.size(), 0.0);
  for (std::size_t u = 0; u < clusters.size(); ++u)
    for (int k : clusters[u]) pu[u] += part.p_k[k];
  return pu;
}

}  // namespace uhfl
