#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "uhfl/hfl.hpp"

using namespace uhfl;

namespace {

std::vector<Eigen::VectorXd> random_models(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd(dim));
  for (auto& v : out)
    for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  return out;
}

}  // namespace

TEST_CASE("aggregation collapses to the weighted average under perfect channels") {
  const auto models = random_models(4, 6, 1);
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  const std::vector<std::uint8_t> ones(4, 1);
  const std::vector<double> certain(4, 1.0);
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(6, 0.5);
  Eigen::VectorXd agg = uav_aggregate(prev, models, w, ones, certain);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
  for (int i = 0; i < 4; ++i) expected += w[i] * models[i];
  CHECK((agg - expected).cwiseAbs().maxCoeff() <= 1e-12);
  // same algebra at the BS level
  Eigen::VectorXd bs = bs_aggregate(prev, models, w, ones, certain);
  CHECK((bs - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("all-failed round leaves the model unchanged") {
  const auto models = random_models(3, 5, 2);
  const std::vector<double> w = {0.5, 0.25, 0.25};
  const std::vector<std::uint8_t> zeros(3, 0);
  const std::vector<double> p(3, 0.7);
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(5, -1.0);
  CHECK((uav_aggregate(prev, models, w, zeros, p) - prev).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bs_aggregate(prev, models, w, zeros, p) - prev).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero probability rejected") {
  const auto models = random_models(2, 3, 3);
  const std::vector<double> w = {0.5, 0.5};
  const std::vector<std::uint8_t> ones(2, 1);
  CHECK_THROWS_AS(uav_aggregate(models[0], models, w, ones, {0.5, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bs_aggregate(models[0], models, w, ones, {1.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("inverse-probability weighting is unbiased at both levels") {
  const int dim = 8;
  auto models = random_models(2, dim, 4);
  for (auto& m : models) m = Eigen::VectorXd::Constant(dim, 0.2) + 0.1 * m;
  const std::vector<double> w = {0.6, 0.4};
  const std::vector<double> p(2, 0.5);
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(dim, 0.2);
  const std::vector<std::uint8_t> ones(2, 1);
  const std::vector<double> certain(2, 1.0);
  const Eigen::VectorXd full = uav_aggregate(prev, models, w, ones, certain);

  Rng rng(5);
  std::bernoulli_distribution coin(0.5);
  for (int level = 0; level < 2; ++level) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      std::vector<std::uint8_t> ind = {coin(rng), coin(rng)};
      mean += level == 0 ? uav_aggregate(prev, models, w, ind, p)
                         : bs_aggregate(prev, models, w, ind, p);
    }
    mean /= draws;
    for (int i = 0; i < dim; ++i)
      CHECK(std::abs(mean(i) - full(i)) <= 0.01 * std::max(1.0, std::abs(full(i))));
  }
}

TEST_CASE("local_sgd_step with zero learning rate is the identity") {
  Dataset ds = make_blobs(50, 8, 4, 0.5, 6);
  Mlp model(MlpShape{8, 8, 4});
  Rng rng(7);
  model.init(rng);
  std::vector<int> shard(ds.n());
  std::iota(shard.begin(), shard.end(), 0);
  Eigen::VectorXd next = local_sgd_step(model, ds, shard, 0.0, 16, rng);
  CHECK((next - model.params).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

struct Fixture {
  Topology topo;
  ClusterAssignment asg;
  SuccessProbabilities probs;
  Dataset data;
  DataPartition part;
  ChannelParams ch;
  ResourceConfig res;

  explicit Fixture(std::uint64_t seed, double theta_db = -10.0) {
    ch.theta = db_to_linear(theta_db);
    topo = sample_topology(20, 4, 500.0, 120.0, seed);
    asg = associate(topo, ch, seed + 1);
    probs = compute_success_probabilities(topo, asg, ch, res);
    for (double& p : probs.direct) p = std::max(p, 1e-3);  // keep 1/P finite
    data = make_blobs(20 * 100, 16, 10, 0.6, seed + 2);
    Rng rng(seed + 3);
    part = partition_noniid(data, 20, 2, rng);
  }
};

}  // namespace

TEST_CASE("training is deterministic per seed") {
  Fixture f(30);
  TrainingConfig cfg;
  cfg.total_iterations = 12;
  cfg.local_period = 2;
  cfg.global_period = 4;
  cfg.shape = MlpShape{16, 32, 10};
  cfg.seed = 77;
  TrainingTrace a = train(f.topo, f.asg, f.probs, f.data, f.part, cfg, f.ch, f.res);
  TrainingTrace b = train(f.topo, f.asg, f.probs, f.data, f.part, cfg, f.ch, f.res);
  REQUIRE(a.accuracy.size() == 12);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.loss == b.loss);
  CHECK(a.cumulative_latency_s == b.cumulative_latency_s);
  CHECK(a.local_success_count == b.local_success_count);
}

TEST_CASE("perfect channels at E=G=1 collapse every variant onto weighted FedAvg") {
  Fixture f(31);
  SuccessProbabilities perfect = f.probs;
  for (double& p : perfect.edge) p = 1.0;
  for (double& p : perfect.backhaul) p = 1.0;
  for (double& p : perfect.direct) p = 1.0;

  TrainingConfig cfg;
  cfg.total_iterations = 8;
  cfg.local_period = 1;
  cfg.global_period = 1;
  cfg.channel_mode = ChannelMode::Bernoulli;  // Bernoulli(1): all indicators on
  cfg.shape = MlpShape{16, 32, 10};
  cfg.seed = 78;

  std::vector<TrainingTrace> traces;
  for (Variant v : {Variant::UnbiasedHfl, Variant::ConventionalHfl, Variant::FedAvg,
                    Variant::UnbiasedFedAvg}) {
    cfg.variant = v;
    traces.push_back(train(f.topo, f.asg, perfect, f.data, f.part, cfg, f.ch, f.res));
  }
  for (std::size_t i = 1; i < traces.size(); ++i) {
    for (int t = 0; t < cfg.total_iterations; ++t) {
      CHECK(traces[i].loss[t] == doctest::Approx(traces[0].loss[t]).epsilon(1e-10));
      CHECK(traces[i].accuracy[t] == doctest::Approx(traces[0].accuracy[t]));
    }
  }
}

TEST_CASE("first global round equals the telescoped SGD form") {
  // full-batch shards make the hand computation deterministic
  Fixture f(32);
  TrainingConfig cfg;
  cfg.total_iterations = 1;
  cfg.local_period = 1;
  cfg.global_period = 1;
  cfg.batch_size = 1000;  // larger than every shard -> full batch
  cfg.channel_mode = ChannelMode::Bernoulli;
  cfg.shape = MlpShape{16, 32, 10};
  cfg.seed = 79;
  SuccessProbabilities perfect = f.probs;
  for (double& p : perfect.edge) p = 1.0;
  for (double& p : perfect.backhaul) p = 1.0;
  for (double& p : perfect.direct) p = 1.0;
  TrainingTrace tr = train(f.topo, f.asg, perfect, f.data, f.part, cfg, f.ch, f.res);

  // hand: w1 = w0 - eta * sum_k p_k grad F_k(w0)
  Mlp w0(cfg.shape);
  Rng init_rng(cfg.seed);
  w0.init(init_rng);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(cfg.shape.n_params());
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd g;
    w0.loss_and_grad(f.data, f.part.shards[k], g);
    acc += f.part.p_k[k] * g;
  }
  Mlp w1(cfg.shape);
  w1.params = w0.params - cfg.learning_rate * acc;
  CHECK(tr.loss[0] == doctest::Approx(full_loss(w1, f.data)).epsilon(1e-10));
  CHECK(tr.accuracy[0] == doctest::Approx(evaluate(w1, f.data)));
}

TEST_CASE("config validation") {
  TrainingConfig cfg;
  cfg.local_period = 2;
  cfg.global_period = 3;  // not a multiple
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.global_period = 4;
  cfg.total_iterations = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
