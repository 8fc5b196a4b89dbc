#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "uhfl/montecarlo.hpp"

using namespace uhfl;

TEST_CASE("nakagami power moments") {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 1000000; ++i) sum += sample_nakagami_power(1, rng);
  CHECK(sum / 1e6 == doctest::Approx(1.0).epsilon(0.01));

  Rng rng4(2);
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const double v = sample_nakagami_power(4, rng4);
    s1 += v;
    s2 += v * v;
  }
  const double var = s2 / 1e6 - (s1 / 1e6) * (s1 / 1e6);
  CHECK(var == doctest::Approx(0.25).epsilon(0.04));

  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i)
    CHECK(sample_nakagami_power(4, a) == sample_nakagami_power(4, b));
}

TEST_CASE("allocate_rbs balance") {
  Rng rng(1);
  auto alloc = allocate_rbs(10, 5, rng);
  std::vector<int> per_rb(5, 0);
  for (int rb : alloc) per_rb[rb]++;
  for (int c : per_rb) CHECK(c == 2);

  auto sparse = allocate_rbs(4, 10, rng);
  std::vector<int> seen(10, 0);
  for (int rb : sparse) seen[rb]++;
  for (int c : seen) CHECK(c <= 1);
}

TEST_CASE("allocate_rbs mean co-channel count") {
  Rng rng(9);
  const int n = 50, rbs = 15;
  double acc = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    auto alloc = allocate_rbs(n, rbs, rng);
    std::vector<int> per_rb(rbs, 0);
    for (int rb : alloc) per_rb[rb]++;
    double mean = 0.0;
    for (int k = 0; k < n; ++k) mean += per_rb[alloc[k]] - 1;
    acc += mean / n;
  }
  // balanced deal: r RBs carry ceil(n/rbs), the rest floor(n/rbs)
  const int f = n / rbs, r = n % rbs;
  const double expected =
      (r * (f + 1.0) * f + (rbs - r) * f * (f - 1.0)) / n;
  CHECK(acc / 10000 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("degenerate no-noise single-link round always succeeds") {
  Topology topo;
  topo.radius = 500.0;
  topo.height = 120.0;
  topo.devices = {{100.0, 0.0}};
  topo.uavs = {{100.0, 0.0}};
  ChannelParams ch;
  ch.noise = 0.0;
  ResourceConfig res;
  ClusterAssignment asg;
  asg.n_uavs = 1;
  asg.serving_uav = {0};
  asg.serving_distance_l = {topo.link_distance(0, 0)};
  asg.serving_los_state = {LosState::Los};
  asg.backhaul_distance_g = {topo.backhaul_distance(0)};
  asg.backhaul_los_state = {LosState::Los};
  asg.link_los_state = {LosState::Los};
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    ChannelRealization cr = realize_round(topo, asg, ch, res, rng);
    CHECK(std::isinf(cr.sinr_edge1[0]));
    CHECK(cr.edge_ok[0] == 1);
    CHECK(cr.back_ok[0] == 1);
  }
}

TEST_CASE("interference-free sinr median matches the gamma quantile") {
  // 1 UAV on M_b = 5 RBs: backhaul has no interferers; Rayleigh fading
  Topology topo;
  topo.radius = 500.0;
  topo.height = 120.0;
  topo.devices = {{50.0, 0.0}};
  topo.uavs = {{160.0, 0.0}};
  ChannelParams ch;
  ch.m_los = 1;
  ch.m_nlos = 1;
  ResourceConfig res;
  ClusterAssignment asg;
  asg.n_uavs = 1;
  asg.serving_uav = {0};
  asg.serving_distance_l = {topo.link_distance(0, 0)};
  asg.serving_los_state = {LosState::Los};
  asg.backhaul_distance_g = {topo.backhaul_distance(0)};
  asg.backhaul_los_state = {LosState::Los};
  asg.link_los_state = {LosState::Los};
  Rng rng(11);
  std::vector<double> sinrs;
  for (int i = 0; i < 100000; ++i)
    sinrs.push_back(realize_round(topo, asg, ch, res, rng).sinr_back[0]);
  std::nth_element(sinrs.begin(), sinrs.begin() + sinrs.size() / 2, sinrs.end());
  const double med = sinrs[sinrs.size() / 2];
  const double g = asg.backhaul_distance_g[0];
  const double expected =
      ch.p_uav * std::log(2.0) * std::pow(g, -ch.alpha_los) / ch.noise;
  CHECK(med == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("indicators monotone in theta on identical draws") {
  ChannelParams ch;
  ResourceConfig res;
  Topology topo = sample_topology(20, 5, 500.0, 120.0, 17);
  ClusterAssignment asg = associate(topo, ch, 18);
  std::vector<std::uint8_t> prev_edge, prev_back;
  bool first = true;
  for (double db : {-20.0, -10.0, 0.0, 10.0}) {
    ch.theta = db_to_linear(db);
    Rng rng(99);  // identical fading and allocation sequence per theta
    ChannelRealization cr = realize_round(topo, asg, ch, res, rng);
    if (!first) {
      for (std::size_t k = 0; k < cr.edge_ok.size(); ++k)
        CHECK(cr.edge_ok[k] <= prev_edge[k]);
      for (std::size_t u = 0; u < cr.back_ok.size(); ++u)
        CHECK(cr.back_ok[u] <= prev_back[u]);
    }
    prev_edge = cr.edge_ok;
    prev_back = cr.back_ok;
    first = false;
  }
}

TEST_CASE("empirical_success limit, determinism and CI scaling") {
  ChannelParams ch;
  ResourceConfig res;
  Topology topo = sample_topology(50, 10, 500.0, 120.0, 21);
  ClusterAssignment asg = associate(topo, ch, 22);

  ChannelParams easy = ch;
  easy.theta = db_to_linear(-100.0);
  auto est = empirical_success(topo, asg, LinkType::Edge, 0, easy, res, 2000, 7);
  CHECK(est.p == doctest::Approx(1.0).epsilon(5e-3));

  auto a = empirical_success(topo, asg, LinkType::Back, 0, ch, res, 5000, 13);
  auto b = empirical_success(topo, asg, LinkType::Back, 0, ch, res, 5000, 13);
  CHECK(a.p == b.p);
  CHECK(a.ci_lo == b.ci_lo);

  auto narrow = empirical_success(topo, asg, LinkType::Direct, 3, ch, res, 40000, 5);
  auto wide = empirical_success(topo, asg, LinkType::Direct, 3, ch, res, 10000, 5);
  const double wn = narrow.ci_hi - narrow.ci_lo;
  const double ww = wide.ci_hi - wide.ci_lo;
  if (ww > 0.0) CHECK(wn == doctest::Approx(ww / 2.0).epsilon(0.2));
}

TEST_CASE("empirical matches analytic at default threshold") {
  ChannelParams ch;
  ResourceConfig res;
  NetworkScale net;
  Topology topo = sample_topology(50, 10, 500.0, 120.0, 42);
  ClusterAssignment asg = associate(topo, ch, 7);
  const int k = 0;
  const int u = asg.serving_uav[k];
  const double ana_e = edge_success(asg.serving_distance_l[k], topo.devices[k].norm(),
                                    topo.uavs[u].norm(), ch, res, net, 500.0, 120.0);
  auto emp_e = empirical_success(topo, asg, LinkType::Edge, k, ch, res, 20000, 99);
  CHECK(std::abs(ana_e - emp_e.p) <= 0.02);
  const double ana_b =
      backhaul_success(asg.backhaul_distance_g[u], ch, res, net, 500.0, 120.0);
  auto emp_b = empirical_success(topo, asg, LinkType::Back, u, ch, res, 20000, 99);
  CHECK(std::abs(ana_b - emp_b.p) <= 0.02);
}
