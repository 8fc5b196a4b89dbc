#include "uhfl/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "uhfl/quadrature.hpp"

namespace uhfl {
namespace {

constexpr double kMassFloor = 1e-12;

double state_prob(LosState z, double r, double h, double a, double b) {
  return z == LosState::Los ? los_probability(r, h, a, b) : nlos_probability(r, h, a, b);
}

double fading_kernel(double s, double tx_power, double r, double alpha, int m) {
  return std::pow(1.0 + s * tx_power * std::pow(r, -alpha) / m, -m);
}

// One LoS-state branch of an interference Laplace transform:
// unnormalized mass W = int base*P_z and kernel integral I = int K*base*P_z.
struct Branch {
  double mass = 0.0;
  double integral = 0.0;
};

Branch eval_branch(double s, double tx_power, LosState z, double lower, double upper,
                   double offset, const ChannelParams& ch, double R, double h,
                   const QuadratureSpec& spec) {
  Branch br;
  lower = std::max(lower, h);  // distance support starts at the UAV height
  if (lower >= upper) return br;
  const double alpha = ch.alpha(z);
  const int m = ch.m(z);
  br.mass = integrate(
      [&](double r) {
        return interferer_pdf_offcenter(r, offset, R, h) * state_prob(z, r, h, ch.a, ch.b);
      },
      lower, upper, spec);
  if (br.mass < kMassFloor) {
    br.mass = 0.0;
    return br;
  }
  br.integral = integrate(
      [&](double r) {
        return fading_kernel(s, tx_power, r, alpha, m) *
               interferer_pdf_offcenter(r, offset, R, h) * state_prob(z, r, h, ch.a, ch.b);
      },
      lower, upper, spec);
  return br;
}

double mixture_power(const Branch& a, const Branch& b, double n_interferers) {
  if (n_interferers <= 0.0) return 1.0;
  const double mass = a.mass + b.mass;
  if (mass < kMassFloor) return 1.0;  // no interference possible
  const double per_interferer = (a.integral + b.integral) / mass;
  return std::pow(std::min(per_interferer, 1.0), n_interferers);
}

LosState other(LosState z) { return z == LosState::Los ? LosState::Nlos : LosState::Los; }

// Alternating binomial coverage sum around an interference Laplace transform.
template <typename LaplaceFn>
double coverage_sum(int m, double theta, double tx_power, double dist, double alpha,
                    double noise, LaplaceFn&& laplace) {
  const double eta = nakagami_eta(m);
  const double rate = eta * theta * std::pow(dist, alpha) / tx_power;
  double acc = 0.0;
  double binom = 1.0;  // C(m, j) built incrementally
  for (int j = 1; j <= m; ++j) {
    binom = binom * (m - j + 1) / j;
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    acc += sign * binom * std::exp(-j * rate * noise) * laplace(j * rate);
  }
  return acc;
}

}  // namespace

double nakagami_eta(int m) {
  if (m < 1) throw std::invalid_argument("Nakagami m must be >= 1");
  return m * std::exp(-std::lgamma(m + 1.0) / m);
}

double laplace_edge1(double s, double l_k, double x0, LosState serving,
                     double n_interferers, const ChannelParams& ch, double R, double h,
                     const QuadratureSpec& spec) {
  if (l_k < h) throw std::invalid_argument("serving distance below UAV height");
  const double w_p = std::sqrt((R + x0) * (R + x0) + h * h);
  const LosState zp = other(serving);
  const double excl = exclusion_region(l_k, ch.alpha(serving), ch.alpha(zp));
  const Branch same = eval_branch(s, ch.p_uav, serving, l_k, w_p, x0, ch, R, h, spec);
  const Branch opp = eval_branch(s, ch.p_uav, zp, excl, w_p, x0, ch, R, h, spec);
  return mixture_power(same, opp, n_interferers);
}

double laplace_edge2(double s, double y0, LosState serving, double n_interferers,
                     const ChannelParams& ch, double R, double h,
                     const QuadratureSpec& spec) {
  (void)serving;  // no exclusion regions under the uniform transmitter policy
  const double w_p = std::sqrt((R + y0) * (R + y0) + h * h);
  const Branch los = eval_branch(s, ch.p_device, LosState::Los, h, w_p, y0, ch, R, h, spec);
  const Branch nlos = eval_branch(s, ch.p_device, LosState::Nlos, h, w_p, y0, ch, R, h, spec);
  return mixture_power(los, nlos, n_interferers);
}

double laplace_back(double s, double n_interferers, const ChannelParams& ch, double R,
                    double h, const QuadratureSpec& spec) {
  const double d = std::sqrt(R * R + h * h);
  const Branch los = eval_branch(s, ch.p_uav, LosState::Los, h, d, 0.0, ch, R, h, spec);
  const Branch nlos = eval_branch(s, ch.p_uav, LosState::Nlos, h, d, 0.0, ch, R, h, spec);
  return mixture_power(los, nlos, n_interferers);
}

double laplace_direct(double s, double n_interferers, const ChannelParams& ch, double R,
                      const QuadratureSpec& spec) {
  if (n_interferers <= 0.0) return 1.0;
  const double val = integrate(
      [&](double q) {
        return fading_kernel(s, ch.p_device, q, ch.alpha_direct, ch.m_direct) * 2.0 * q / (R * R);
      },
      0.0, R, spec);
  return std::pow(std::min(val, 1.0), n_interferers);
}

double edge_success(double l_k, double x0, double y0, const ChannelParams& ch,
                    const ResourceConfig& res, const NetworkScale& net, double R,
                    double h, const QuadratureSpec& spec) {
  if (l_k < h) throw std::invalid_argument("serving distance below UAV height");
  const double n_uav_interf = static_cast<double>(net.n_uavs) / res.rb_bs - 1.0;
  const double n_dev_interf = static_cast<double>(net.n_devices) / res.rb_uav - 1.0;
  double result = 0.0;
  for (LosState z : {LosState::Los, LosState::Nlos}) {
    const double pz = state_prob(z, l_k, h, ch.a, ch.b);
    const double p1 = coverage_sum(ch.m(z), ch.theta, ch.p_uav, l_k, ch.alpha(z), ch.noise,
                                   [&](double s) {
                                     return laplace_edge1(s, l_k, x0, z, n_uav_interf, ch, R, h, spec);
                                   });
    const double p2 = coverage_sum(ch.m(z), ch.theta, ch.p_device, l_k, ch.alpha(z), ch.noise,
                                   [&](double s) {
                                     return laplace_edge2(s, y0, z, n_dev_interf, ch, R, h, spec);
                                   });
    result += pz * p1 * p2;
  }
  if (result < -1e-5 || result > 1.0 + 1e-5)
    throw NumericalFailure("edge_success outside [0,1]");
  return std::clamp(result, 0.0, 1.0);
}

double backhaul_success(double g_u, const ChannelParams& ch, const ResourceConfig& res,
                        const NetworkScale& net, double R, double h,
                        const QuadratureSpec& spec) {
  if (g_u < h) throw std::invalid_argument("backhaul distance below UAV height");
  const double n_interf = static_cast<double>(net.n_uavs) / res.rb_bs - 1.0;
  double result = 0.0;
  for (LosState z : {LosState::Los, LosState::Nlos}) {
    const double pz = state_prob(z, g_u, h, ch.a, ch.b);
    result += pz * coverage_sum(ch.m(z), ch.theta, ch.p_uav, g_u, ch.alpha(z), ch.noise,
                                [&](double s) {
                                  return laplace_back(s, n_interf, ch, R, h, spec);
                                });
  }
  if (result < -1e-5 || result > 1.0 + 1e-5)
    throw NumericalFailure("backhaul_success outside [0,1]");
  return std::clamp(result, 0.0, 1.0);
}

double direct_success(double q_k, const ChannelParams& ch, const ResourceConfig& res,
                      const NetworkScale& net, double R, const QuadratureSpec& spec) {
  const double n_interf = static_cast<double>(net.n_devices) / res.rb_direct - 1.0;
  const double result =
      coverage_sum(ch.m_direct, ch.theta, ch.p_device, q_k, ch.alpha_direct, ch.noise,
                   [&](double s) { return laplace_direct(s, n_interf, ch, R, spec); });
  if (result < -1e-5 || result > 1.0 + 1e-5)
    throw NumericalFailure("direct_success outside [0,1]");
  return std::clamp(result, 0.0, 1.0);
}

SuccessProbabilities compute_success_probabilities(const Topology& topo,
                                                   const ClusterAssignment& asg,
                                                   const ChannelParams& ch,
                                                   const ResourceConfig& res,
                                                   const QuadratureSpec& spec) {
  SuccessProbabilities sp;
  const NetworkScale net{topo.n_devices(), topo.n_uavs()};
  sp.edge.resize(topo.n_devices());
  sp.direct.resize(topo.n_devices());
  sp.backhaul.resize(topo.n_uavs());
  for (int k = 0; k < topo.n_devices(); ++k) {
    const double x0 = topo.devices[k].norm();
    const double y0 = topo.uavs[asg.serving_uav[k]].norm();
    sp.edge[k] = edge_success(asg.serving_distance_l[k], x0, y0, ch, res, net,
                              topo.radius, topo.height, spec);
    sp.direct[k] = direct_success(topo.direct_distance(k), ch, res, net, topo.radius, spec);
  }
  for (int u = 0; u < topo.n_uavs(); ++u)
    sp.backhaul[u] = backhaul_success(asg.backhaul_distance_g[u], ch, res, net,
                                      topo.radius, topo.height, spec);
  for (double p : sp.edge)
    if (!(p > 0.0) || p > 1.0) throw NumericalFailure("edge success probability outside (0,1]");
  for (double p : sp.backhaul)
    if (!(p > 0.0) || p > 1.0) throw NumericalFailure("backhaul success probability outside (0,1]");
  for (double p : sp.direct)
    if (!(p > 0.0) || p > 1.0) throw NumericalFailure("direct success probability outside (0,1]");
  return sp;
}

}  // namespace uhfl
