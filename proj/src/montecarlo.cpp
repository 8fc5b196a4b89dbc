#include "uhfl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace uhfl {
namespace {

struct DiskSampler {
  double R;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  Vec2 operator()(Rng& rng) {
    const double r = R * std::sqrt(unit(rng));
    const double phi = 2.0 * M_PI * unit(rng);
    return {r * std::cos(phi), r * std::sin(phi)};
  }
};

double dist3d_to(const Vec2& p, double offset, double h) {
  const double dx = p.x - offset;
  return std::sqrt(dx * dx + p.y * p.y + h * h);
}

LosState sample_state(double r, double h, const ChannelParams& ch, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return unit(rng) < los_probability(r, h, ch.a, ch.b) ? LosState::Los : LosState::Nlos;
}

// Count of transmitters sharing the RB of `self` under a fresh allocation.
int cochannel_count(int n, int n_rbs, int self, Rng& rng) {
  const auto rbs = allocate_rbs(n, n_rbs, rng);
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (i != self && rbs[i] == rbs[self]) ++count;
  return count;
}

// Interferer draw conditioned on the exclusion regions of the association
// policy. With no serving context (lower bounds both h) this reduces to the
// unconditioned draw.
struct InterfererDraw {
  double r;
  LosState state;
};

InterfererDraw draw_interferer(double offset, double h, const ChannelParams& ch, double R,
                               double lower_same, double lower_opp, LosState serving,
                               Rng& rng) {
  DiskSampler disk{R};
  for (int tries = 0; tries < 100000; ++tries) {
    const Vec2 p = disk(rng);
    const double r = dist3d_to(p, offset, h);
    const LosState z = sample_state(r, h, ch, rng);
    const double lower = (z == serving) ? lower_same : lower_opp;
    if (r >= lower) return {r, z};
  }
  throw NumericalFailure("interferer rejection sampling failed to converge");
}

// Serving-link power draw under the tail model used by the analytic success
// probabilities, 1 - (1 - e^{-eta x})^m with eta = m (m!)^{-1/m}: the max of
// m iid exponentials with rate eta. Exact Gamma(m, 1/m) for m = 1; for m > 1
// this keeps the validation oracle aligned with the closed-form expressions,
// whose fading tail is this approximation rather than the exact Gamma law.
double sample_serving_power(int m, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double eta = nakagami_eta(m);
  double best = 0.0;
  for (int i = 0; i < m; ++i)
    best = std::max(best, -std::log1p(-unit(rng)) / eta);
  return best;
}

double sinr(double signal, double noise, double interference) {
  const double denom = noise + interference;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return signal / denom;
}

EmpiricalEstimate finish(double successes, int n_trials) {
  EmpiricalEstimate est;
  est.n_trials = n_trials;
  est.p = successes / n_trials;
  const double half = 1.96 * std::sqrt(std::max(est.p * (1.0 - est.p), 0.0) / n_trials);
  est.ci_lo = std::max(0.0, est.p - half);
  est.ci_hi = std::min(1.0, est.p + half);
  return est;
}

}  // namespace

double sample_nakagami_power(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("Nakagami m must be >= 1");
  std::gamma_distribution<double> gamma(static_cast<double>(m), 1.0 / m);
  return gamma(rng);
}

std::vector<int> allocate_rbs(int n_transmitters, int n_rbs, Rng& rng) {
  if (n_transmitters < 1 || n_rbs < 1) throw std::invalid_argument("counts must be >= 1");
  std::vector<int> order(n_transmitters);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> rb(n_transmitters);
  for (int i = 0; i < n_transmitters; ++i) rb[order[i]] = i % n_rbs;
  return rb;
}

EmpiricalEstimate empirical_success(const Topology& topo, const ClusterAssignment& asg,
                                    LinkType link, int target, const ChannelParams& ch,
                                    const ResourceConfig& res, int n_trials,
                                    std::uint64_t seed) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  ch.validate();
  res.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double R = topo.radius;
  const double h = topo.height;
  const int nd = topo.n_devices();
  const int nu = topo.n_uavs();
  double successes = 0.0;

  for (int t = 0; t < n_trials; ++t) {
    switch (link) {
      case LinkType::Edge: {
        const double l = asg.serving_distance_l[target];
        const double x0 = topo.devices[target].norm();
        const double y0 = topo.uavs[asg.serving_uav[target]].norm();
        const LosState z = sample_state(l, h, ch, rng);
        const LosState zp = z == LosState::Los ? LosState::Nlos : LosState::Los;
        const double excl = exclusion_region(l, ch.alpha(z), ch.alpha(zp));

        // Downlink: co-channel UAVs, exclusion-constrained positions.
        double i1 = 0.0;
        const int n1 = cochannel_count(nu, res.rb_bs, asg.serving_uav[target], rng);
        for (int i = 0; i < n1; ++i) {
          const auto d = draw_interferer(x0, h, ch, R, l, excl, z, rng);
          i1 += ch.p_uav * sample_nakagami_power(ch.m(d.state), rng) * std::pow(d.r, -ch.alpha(d.state));
        }
        const double s1 = sinr(ch.p_uav * sample_serving_power(ch.m(z), rng) * std::pow(l, -ch.alpha(z)),
                               ch.noise, i1);

        // Uplink: co-channel devices, uniform transmitter policy.
        double i2 = 0.0;
        const int n2 = cochannel_count(nd, res.rb_uav, target, rng);
        for (int i = 0; i < n2; ++i) {
          const auto d = draw_interferer(y0, h, ch, R, h, h, z, rng);
          i2 += ch.p_device * sample_nakagami_power(ch.m(d.state), rng) * std::pow(d.r, -ch.alpha(d.state));
        }
        const double s2 = sinr(ch.p_device * sample_serving_power(ch.m(z), rng) * std::pow(l, -ch.alpha(z)),
                               ch.noise, i2);
        if (s1 > ch.theta && s2 > ch.theta) successes += 1.0;
        break;
      }
      case LinkType::Back: {
        const double g = asg.backhaul_distance_g[target];
        const LosState z = sample_state(g, h, ch, rng);
        double itf = 0.0;
        const int ni = cochannel_count(nu, res.rb_bs, target, rng);
        for (int i = 0; i < ni; ++i) {
          const auto d = draw_interferer(0.0, h, ch, R, h, h, z, rng);
          itf += ch.p_uav * sample_nakagami_power(ch.m(d.state), rng) * std::pow(d.r, -ch.alpha(d.state));
        }
        const double s = sinr(ch.p_uav * sample_serving_power(ch.m(z), rng) * std::pow(g, -ch.alpha(z)),
                              ch.noise, itf);
        if (s > ch.theta) successes += 1.0;
        break;
      }
      case LinkType::Direct: {
        const double q = topo.direct_distance(target);
        double itf = 0.0;
        const int ni = cochannel_count(nd, res.rb_direct, target, rng);
        for (int i = 0; i < ni; ++i) {
          const double qi = R * std::sqrt(unit(rng));
          itf += ch.p_device * sample_nakagami_power(ch.m_direct, rng) * std::pow(qi, -ch.alpha_direct);
        }
        const double s = sinr(ch.p_device * sample_serving_power(ch.m_direct, rng) * std::pow(q, -ch.alpha_direct),
                              ch.noise, itf);
        if (s > ch.theta) successes += 1.0;
        break;
      }
    }
  }
  return finish(successes, n_trials);
}

namespace {

// Single-interferer Laplace oracle: mean of exp(-s * P * fading * r^-alpha)
// over draws of the conditional interferer law, then raised to the real count.
template <typename DrawFn>
double laplace_oracle(double s, double n_interferers, int n_draws, std::uint64_t seed,
                      DrawFn&& draw_contribution) {
  if (n_interferers <= 0.0) return 1.0;
  Rng rng(seed);
  double acc = 0.0;
  for (int i = 0; i < n_draws; ++i) acc += std::exp(-s * draw_contribution(rng));
  return std::pow(acc / n_draws, n_interferers);
}

}  // namespace

double laplace_oracle_edge1(double s, double l_k, double x0, LosState serving,
                            double n_interferers, const ChannelParams& ch, double R,
                            double h, int n_draws, std::uint64_t seed) {
  const LosState zp = serving == LosState::Los ? LosState::Nlos : LosState::Los;
  const double excl = exclusion_region(l_k, ch.alpha(serving), ch.alpha(zp));
  return laplace_oracle(s, n_interferers, n_draws, seed, [&](Rng& rng) {
    const auto d = draw_interferer(x0, h, ch, R, l_k, excl, serving, rng);
    return ch.p_uav * sample_nakagami_power(ch.m(d.state), rng) * std::pow(d.r, -ch.alpha(d.state));
  });
}

double laplace_oracle_edge2(double s, double y0, double n_interferers,
                            const ChannelParams& ch, double R, double h, int n_draws,
                            std::uint64_t seed) {
  return laplace_oracle(s, n_interferers, n_draws, seed, [&](Rng& rng) {
    const auto d = draw_interferer(y0, h, ch, R, h, h, LosState::Los, rng);
    return ch.p_device * sample_nakagami_power(ch.m(d.state), rng) * std::pow(d.r, -ch.alpha(d.state));
  });
}

double laplace_oracle_back(double s, double n_interferers, const ChannelParams& ch,
                           double R, double h, int n_draws, std::uint64_t seed) {
  return laplace_oracle(s, n_interferers, n_draws, seed, [&](Rng& rng) {
    const auto d = draw_interferer(0.0, h, ch, R, h, h, LosState::Los, rng);
    return ch.p_uav * sample_nakagami_power(ch.m(d.state), rng) * std::pow(d.r, -ch.alpha(d.state));
  });
}

double laplace_oracle_direct(double s, double n_interferers, const ChannelParams& ch,
                             double R, int n_draws, std::uint64_t seed) {
  return laplace_oracle(s, n_interferers, n_draws, seed, [&](Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double q = R * std::sqrt(unit(rng));
    return ch.p_device * sample_nakagami_power(ch.m_direct, rng) * std::pow(q, -ch.alpha_direct);
  });
}

ChannelRealization realize_round(const Topology& topo, const ClusterAssignment& asg,
                                 const ChannelParams& ch, const ResourceConfig& res,
                                 Rng& rng) {
  const int nd = topo.n_devices();
  const int nu = topo.n_uavs();
  ChannelRealization cr;
  cr.sinr_edge1.resize(nd);
  cr.sinr_edge2.resize(nd);
  cr.sinr_direct.resize(nd);
  cr.sinr_back.resize(nu);
  cr.edge_ok.resize(nd);
  cr.direct_ok.resize(nd);
  cr.back_ok.resize(nu);

  const auto rb_down = allocate_rbs(nu, res.rb_bs, rng);   // UAV downlink RBs
  const auto rb_dev = allocate_rbs(nd, res.rb_uav, rng);   // device uplink RBs
  const auto rb_back = allocate_rbs(nu, res.rb_bs, rng);   // backhaul RBs
  const auto rb_dir = allocate_rbs(nd, res.rb_direct, rng);

  // Per-link fading, fresh each round.
  auto fade = [&](LosState z) { return sample_nakagami_power(ch.m(z), rng); };

  for (int k = 0; k < nd; ++k) {
    const int u = asg.serving_uav[k];
    const double l = asg.serving_distance_l[k];
    const LosState z = asg.serving_los_state[k];

    double i1 = 0.0;
    for (int u2 = 0; u2 < nu; ++u2) {
      if (u2 == u || rb_down[u2] != rb_down[u]) continue;
      const LosState zi = asg.link_state(k, u2);
      i1 += ch.p_uav * fade(zi) * std::pow(topo.link_distance(k, u2), -ch.alpha(zi));
    }
    cr.sinr_edge1[k] = sinr(ch.p_uav * fade(z) * std::pow(l, -ch.alpha(z)), ch.noise, i1);

    double i2 = 0.0;
    for (int k2 = 0; k2 < nd; ++k2) {
      if (k2 == k || rb_dev[k2] != rb_dev[k]) continue;
      const LosState zi = asg.link_state(k2, u);
      i2 += ch.p_device * fade(zi) * std::pow(topo.link_distance(k2, u), -ch.alpha(zi));
    }
    cr.sinr_edge2[k] = sinr(ch.p_device * fade(z) * std::pow(l, -ch.alpha(z)), ch.noise, i2);
    cr.edge_ok[k] = cr.sinr_edge1[k] > ch.theta && cr.sinr_edge2[k] > ch.theta;

    double idir = 0.0;
    for (int k2 = 0; k2 < nd; ++k2) {
      if (k2 == k || rb_dir[k2] != rb_dir[k]) continue;
      idir += ch.p_device * sample_nakagami_power(ch.m_direct, rng) *
              std::pow(topo.direct_distance(k2), -ch.alpha_direct);
    }
    cr.sinr_direct[k] = sinr(ch.p_device * sample_nakagami_power(ch.m_direct, rng) *
                                 std::pow(topo.direct_distance(k), -ch.alpha_direct),
                             ch.noise, idir);
    cr.direct_ok[k] = cr.sinr_direct[k] > ch.theta;
  }

  for (int u = 0; u < nu; ++u) {
    const LosState z = asg.backhaul_los_state[u];
    double itf = 0.0;
    for (int u2 = 0; u2 < nu; ++u2) {
      if (u2 == u || rb_back[u2] != rb_back[u]) continue;
      const LosState zi = asg.backhaul_los_state[u2];
      itf += ch.p_uav * fade(zi) * std::pow(asg.backhaul_distance_g[u2], -ch.alpha(zi));
    }
    cr.sinr_back[u] = sinr(ch.p_uav * fade(z) * std::pow(asg.backhaul_distance_g[u], -ch.alpha(z)),
                           ch.noise, itf);
    cr.back_ok[u] = cr.sinr_back[u] > ch.theta;
  }
  return cr;
}

}  // namespace uhfl
