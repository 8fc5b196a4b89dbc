#include "uhfl/hfl.hpp"

#include <algorithm>
#include <cmath>

#include "uhfl/perf.hpp"

namespace uhfl {

Variant parse_variant(const std::string& name) {
  if (name == "unbiased-hfl") return Variant::UnbiasedHfl;
  if (name == "conventional-hfl") return Variant::ConventionalHfl;
  if (name == "fedavg") return Variant::FedAvg;
  if (name == "unbiased-fedavg") return Variant::UnbiasedFedAvg;
  throw std::invalid_argument("unknown variant: " + name);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::UnbiasedHfl: return "unbiased-hfl";
    case Variant::ConventionalHfl: return "conventional-hfl";
    case Variant::FedAvg: return "fedavg";
    case Variant::UnbiasedFedAvg: return "unbiased-fedavg";
  }
  throw std::invalid_argument("unknown variant enum");
}

void TrainingConfig::validate() const {
  if (local_period < 1) throw std::invalid_argument("local period must be >= 1");
  if (global_period % local_period != 0)
    throw std::invalid_argument("global period must be a multiple of the local period");
  if (total_iterations < global_period)
    throw std::invalid_argument("total iterations must cover one global round");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(learning_rate >= 0)) throw std::invalid_argument("bad learning rate");
}

Eigen::VectorXd local_sgd_step(const Mlp& model, const Dataset& data,
                               const std::vector<int>& shard, double eta, int batch_size,
                               Rng& rng) {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  std::vector<int> batch;
  if (static_cast<int>(shard.size()) <= batch_size) {
    batch = shard;
  } else {
    batch.reserve(batch_size);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(shard.size()) - 1);
    for (int i = 0; i < batch_size; ++i) batch.push_back(shard[pick(rng)]);
  }
  Eigen::VectorXd grad;
  model.loss_and_grad(data, batch, grad);
  return model.params - eta * grad;
}

namespace {

Eigen::VectorXd weighted_delta_update(const Eigen::VectorXd& prev,
                                      const std::vector<Eigen::VectorXd>& models,
                                      const std::vector<double>& weights,
                                      const std::vector<std::uint8_t>& indicators,
                                      const std::vector<double>& probs, const char* what) {
  if (models.size() != weights.size() || models.size() != indicators.size() ||
      models.size() != probs.size())
    throw std::invalid_argument(std::string(what) + ": size mismatch");
  for (double p : probs)
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument(std::string(what) + ": probabilities must lie in (0,1]");
  Eigen::VectorXd out = prev;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!indicators[i]) continue;
    out += (weights[i] / probs[i]) * (models[i] - prev);
  }
  return out;
}

}  // namespace

Eigen::VectorXd uav_aggregate(const Eigen::VectorXd& prev_v,
                              const std::vector<Eigen::VectorXd>& members,
                              const std::vector<double>& p_over_pu,
                              const std::vector<std::uint8_t>& indicators,
                              const std::vector<double>& p_edge) {
  return weighted_delta_update(prev_v, members, p_over_pu, indicators, p_edge,
                               "uav_aggregate");
}

Eigen::VectorXd bs_aggregate(const Eigen::VectorXd& prev_w,
                             const std::vector<Eigen::VectorXd>& uav_models,
                             const std::vector<double>& p_u,
                             const std::vector<std::uint8_t>& indicators,
                             const std::vector<double>& p_back) {
  return weighted_delta_update(prev_w, uav_models, p_u, indicators, p_back, "bs_aggregate");
}

namespace {

struct LatencyParams {
  double cycles = 20.0, cpu_hz = 2e9, bits = 1e6;
};

// Eqs-style synchronous round time built from one channel realization.
double hfl_round_latency(const ChannelRealization& cr, const ClusterAssignment& asg,
                         const DataPartition& part, const ResourceConfig& res,
                         const LatencyParams& lat, int E, int G) {
  const auto clusters = asg.clusters();
  std::vector<UavLatency> comps(clusters.size());
  for (std::size_t u = 0; u < clusters.size(); ++u) {
    for (int k : clusters[u]) {
      comps[u].t_down.push_back(latency_link(lat.bits, res.bandwidth_device, cr.sinr_edge1[k]));
      comps[u].t_up.push_back(latency_link(lat.bits, res.bandwidth_device, cr.sinr_edge2[k]));
      comps[u].t_cmp.push_back(latency_compute(lat.cycles, part.n_k[k], lat.cpu_hz));
    }
    comps[u].t_backhaul = latency_link(lat.bits, res.bandwidth_uav, cr.sinr_back[u]);
  }
  return latency_round(comps, E, G);
}

double fedavg_round_latency(const ChannelRealization& cr, const DataPartition& part,
                            const ResourceConfig& res, const LatencyParams& lat, int G) {
  double worst_com = 0.0, worst_cmp = 0.0;
  for (std::size_t k = 0; k < cr.sinr_direct.size(); ++k) {
    worst_com = std::max(worst_com,
                         latency_link(lat.bits, res.bandwidth_device, cr.sinr_direct[k]));
    worst_cmp = std::max(worst_cmp, latency_compute(lat.cycles, part.n_k[k], lat.cpu_hz));
  }
  return 2.0 * worst_com + G * worst_cmp;
}

}  // namespace

TrainingTrace train(const Topology& topo, const ClusterAssignment& asg,
                    const SuccessProbabilities& probs, const Dataset& data,
                    const DataPartition& part, const TrainingConfig& cfg,
                    const ChannelParams& ch, const ResourceConfig& res) {
  cfg.validate();
  const int nd = topo.n_devices();
  const int nu = topo.n_uavs();
  if (part.n_devices() != nd) throw std::invalid_argument("train: partition/topology mismatch");
  const bool hier = cfg.variant == Variant::UnbiasedHfl || cfg.variant == Variant::ConventionalHfl;
  const bool unbiased = cfg.variant == Variant::UnbiasedHfl || cfg.variant == Variant::UnbiasedFedAvg;
  if (unbiased) {
    for (double p : probs.edge)
      if (!(p > 0.0)) throw std::invalid_argument("train: zero edge probability");
    for (double p : probs.backhaul)
      if (!(p > 0.0)) throw std::invalid_argument("train: zero backhaul probability");
    for (double p : probs.direct)
      if (!(p > 0.0)) throw std::invalid_argument("train: zero direct probability");
  }

  const auto clusters = asg.clusters();
  const std::vector<double> p_u = cluster_weights(part, clusters);

  // independent streams so that data order is identical across variants
  Rng init_rng(cfg.seed);
  Rng data_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  Rng channel_rng(cfg.seed ^ 0xc2b2ae3d27d4eb4full);

  Mlp global(cfg.shape);
  global.init(init_rng);
  Eigen::VectorXd w_bar = global.params;
  std::vector<Eigen::VectorXd> w_dev(nd, w_bar);
  std::vector<Eigen::VectorXd> v_uav(nu, w_bar);

  const LatencyParams lat{cfg.cpu_cycles_per_sample, cfg.cpu_frequency_hz,
                          cfg.model_size_bits};
  TrainingTrace trace;
  double cum_latency = 0.0;
  Mlp probe(cfg.shape);

  for (int t = 0; t < cfg.total_iterations; ++t) {
    for (int k = 0; k < nd; ++k) {
      probe.params = w_dev[k];
      w_dev[k] = local_sgd_step(probe, data, part.shards[k], cfg.learning_rate,
                                cfg.batch_size, data_rng);
    }

    int local_ok = 0, global_ok = 0;
    const bool uav_round = hier && (t + 1) % cfg.local_period == 0;
    const bool bs_round = (t + 1) % cfg.global_period == 0;

    if (hier && uav_round) {
      ChannelRealization cr;
      std::vector<std::uint8_t> ind2(nd), ind1(nu);
      if (cfg.channel_mode == ChannelMode::MonteCarlo) {
        cr = realize_round(topo, asg, ch, res, channel_rng);
        ind2 = cr.edge_ok;
        ind1 = cr.back_ok;
      } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int k = 0; k < nd; ++k) ind2[k] = unit(channel_rng) < probs.edge[k];
        for (int u = 0; u < nu; ++u) ind1[u] = unit(channel_rng) < probs.backhaul[u];
        if (bs_round) cr = realize_round(topo, asg, ch, res, channel_rng);
      }
      for (int k = 0; k < nd; ++k) local_ok += ind2[k];
      for (int u = 0; u < nu; ++u) global_ok += ind1[u];

      for (int u = 0; u < nu; ++u) {
        if (clusters[u].empty()) continue;
        std::vector<Eigen::VectorXd> members;
        std::vector<double> weights, pe;
        std::vector<std::uint8_t> ind;
        for (int k : clusters[u]) {
          members.push_back(w_dev[k]);
          weights.push_back(p_u[u] > 0 ? part.p_k[k] / p_u[u] : 0.0);
          ind.push_back(ind2[k]);
          pe.push_back(unbiased ? probs.edge[k] : 1.0);
        }
        v_uav[u] = uav_aggregate(v_uav[u], members, weights, ind, pe);
      }

      if (bs_round) {
        std::vector<double> pb(nu);
        for (int u = 0; u < nu; ++u) pb[u] = unbiased ? probs.backhaul[u] : 1.0;
        w_bar = bs_aggregate(w_bar, v_uav, p_u, ind1, pb);
        for (int u = 0; u < nu; ++u) v_uav[u] = w_bar;
        for (int k = 0; k < nd; ++k) w_dev[k] = w_bar;
        cum_latency += hfl_round_latency(cr, asg, part, res, lat, cfg.local_period,
                                         cfg.global_period);
      } else {
        for (int k = 0; k < nd; ++k) w_dev[k] = v_uav[asg.serving_uav[k]];
      }
    } else if (!hier && bs_round) {
      ChannelRealization cr;
      std::vector<std::uint8_t> ind(nd);
      if (cfg.channel_mode == ChannelMode::MonteCarlo) {
        cr = realize_round(topo, asg, ch, res, channel_rng);
        ind = cr.direct_ok;
      } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int k = 0; k < nd; ++k) ind[k] = unit(channel_rng) < probs.direct[k];
        cr = realize_round(topo, asg, ch, res, channel_rng);
      }
      for (int k = 0; k < nd; ++k) local_ok += ind[k];
      std::vector<double> pd(nd);
      for (int k = 0; k < nd; ++k) pd[k] = unbiased ? probs.direct[k] : 1.0;
      w_bar = uav_aggregate(w_bar, w_dev, part.p_k, ind, pd);
      global_ok = local_ok;
      for (int k = 0; k < nd; ++k) w_dev[k] = w_bar;
      cum_latency += fedavg_round_latency(cr, part, res, lat, cfg.global_period);
    }

    // trace the p_k-weighted average of the device models; it coincides with
    // the broadcast model right after each global round
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(w_bar.size());
    for (int k = 0; k < nd; ++k) avg += part.p_k[k] * w_dev[k];
    probe.params = avg;
    trace.accuracy.push_back(evaluate(probe, data));
    trace.loss.push_back(full_loss(probe, data));
    trace.local_success_count.push_back(local_ok);
    trace.global_success_count.push_back(global_ok);
    trace.cumulative_latency_s.push_back(cum_latency);
  }
  return trace;
}

}  // namespace uhfl
