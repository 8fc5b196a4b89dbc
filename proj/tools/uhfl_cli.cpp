#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "uhfl/config.hpp"
#include "uhfl/perf.hpp"

namespace fs = std::filesystem;
using namespace uhfl;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> variant;
};

ExperimentConfig make_config(const CliOptions& opt) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) cfg = load_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.variant) cfg.variant = *opt.variant;
  cfg.validate();
  return cfg;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& dir, const std::string& name, const std::string& header,
            const ExperimentConfig& cfg, const std::string& subcommand) {
    fs::create_directories(dir);
    path_ = dir / (name + ".csv");
    out_.open(path_);
    if (!out_) throw std::runtime_error("cannot write " + path_.string());
    out_ << header << "\n";

    nlohmann::json meta;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    meta["subcommand"] = subcommand;
    meta["seed"] = cfg.seed;
    meta["config_hash"] = hash;
    meta["version"] = "0.1.0";
    meta["config"] = nlohmann::json::parse(serialize_config(cfg));
    std::ofstream ms(dir / (name + ".meta.json"));
    ms << meta.dump(2) << "\n";
  }

  template <typename... Args>
  void row(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out_ << buf << "\n";
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

struct World {
  Topology topo;
  ClusterAssignment asg;
};

World make_world(const ExperimentConfig& cfg, const ChannelParams& ch) {
  World w;
  w.topo = sample_topology(cfg.n_devices, cfg.n_uavs, cfg.radius_m, cfg.height_m, cfg.seed);
  w.asg = associate(w.topo, ch, cfg.seed + 1);
  return w;
}

void run_probe(const ExperimentConfig& cfg, const fs::path& out) {
  ChannelParams ch = cfg.channel();
  const ResourceConfig res = cfg.resources();
  World w = make_world(cfg, ch);
  CsvWriter csv(out, "probe", "theta_db,link,index,distance_m,probability", cfg, "probe");
  for (double db : cfg.theta_grid_db) {
    ch.theta = db_to_linear(db);
    SuccessProbabilities sp = compute_success_probabilities(w.topo, w.asg, ch, res);
    for (int k = 0; k < cfg.n_devices; ++k)
      csv.row("%.6g,edge,%d,%.6f,%.9f", db, k, w.asg.serving_distance_l[k], sp.edge[k]);
    for (int u = 0; u < cfg.n_uavs; ++u)
      csv.row("%.6g,back,%d,%.6f,%.9f", db, u, w.asg.backhaul_distance_g[u],
              sp.backhaul[u]);
    for (int k = 0; k < cfg.n_devices; ++k)
      csv.row("%.6g,direct,%d,%.6f,%.9f", db, k, w.topo.direct_distance(k), sp.direct[k]);
  }
}

void run_validate(const ExperimentConfig& cfg, const fs::path& out) {
  ChannelParams ch = cfg.channel();
  const ResourceConfig res = cfg.resources();
  const NetworkScale net{cfg.n_devices, cfg.n_uavs};
  World w = make_world(cfg, ch);
  CsvWriter csv(out, "validate", "theta_db,pair,link,analytic,empirical,ci_lo,ci_hi", cfg,
                "validate");
  for (double db : cfg.theta_grid_db) {
    ch.theta = db_to_linear(db);
    for (int p = 0; p < cfg.n_pairs; ++p) {
      const int k = p;
      const int u = w.asg.serving_uav[k];
      const std::uint64_t s = cfg.seed * 7919 + p * 100 + static_cast<int>(db + 40);
      const double ana_e =
          edge_success(w.asg.serving_distance_l[k], w.topo.devices[k].norm(),
                       w.topo.uavs[u].norm(), ch, res, net, cfg.radius_m, cfg.height_m);
      auto emp_e = empirical_success(w.topo, w.asg, LinkType::Edge, k, ch, res,
                                     cfg.trials, s);
      csv.row("%.6g,%d,edge,%.9f,%.9f,%.9f,%.9f", db, p, ana_e, emp_e.p, emp_e.ci_lo,
              emp_e.ci_hi);
      const double ana_b = backhaul_success(w.asg.backhaul_distance_g[u], ch, res, net,
                                            cfg.radius_m, cfg.height_m);
      auto emp_b = empirical_success(w.topo, w.asg, LinkType::Back, u, ch, res,
                                     cfg.trials, s + 1);
      csv.row("%.6g,%d,back,%.9f,%.9f,%.9f,%.9f", db, p, ana_b, emp_b.p, emp_b.ci_lo,
              emp_b.ci_hi);
      const double ana_d =
          direct_success(w.topo.direct_distance(k), ch, res, net, cfg.radius_m);
      auto emp_d = empirical_success(w.topo, w.asg, LinkType::Direct, k, ch, res,
                                     cfg.trials, s + 2);
      csv.row("%.6g,%d,direct,%.9f,%.9f,%.9f,%.9f", db, p, ana_d, emp_d.p, emp_d.ci_lo,
              emp_d.ci_hi);
    }
  }
}

void run_sweep_height(const ExperimentConfig& cfg, const fs::path& out) {
  ChannelParams ch = cfg.channel();
  const ResourceConfig res = cfg.resources();
  const NetworkScale net{cfg.n_devices, cfg.n_uavs};
  CsvWriter csv(out, "sweep_height", "height_m,p_edge", cfg, "sweep-height");
  const double x0 = 200.0, planar = 200.0;  // fixed pair: UAV 200 m from the device
  for (double h : cfg.height_grid_m) {
    const double l = std::sqrt(planar * planar + h * h);
    csv.row("%.6g,%.9f", h, edge_success(l, x0, 0.0, ch, res, net, cfg.radius_m, h));
  }
}

void run_sweep_uavs(const ExperimentConfig& cfg, const fs::path& out) {
  ChannelParams ch = cfg.channel();
  const ResourceConfig res = cfg.resources();
  CsvWriter csv(out, "sweep_uavs", "n_uavs,mean_edge,mean_back", cfg, "sweep-uavs");
  for (int n : cfg.uav_grid) {
    ExperimentConfig c = cfg;
    c.n_uavs = n;
    const NetworkScale net{c.n_devices, n};
    double edge_acc = 0.0, back_acc = 0.0;
    const int reps = 3;  // average over a few seeded realizations
    for (int rep = 0; rep < reps; ++rep) {
      ExperimentConfig cr = c;
      cr.seed = cfg.seed + rep;
      World w = make_world(cr, ch);
      SuccessProbabilities sp = compute_success_probabilities(w.topo, w.asg, ch, res);
      for (double p : sp.edge) edge_acc += p / sp.edge.size();
      for (double p : sp.backhaul) back_acc += p / sp.backhaul.size();
    }
    csv.row("%d,%.9f,%.9f", n, edge_acc / reps, back_acc / reps);
  }
}

struct TrainSetup {
  World w;
  SuccessProbabilities probs;
  Dataset data;
  DataPartition part;
  ChannelParams ch;
  ResourceConfig res;
};

TrainSetup make_train_setup(const ExperimentConfig& cfg) {
  TrainSetup ts;
  ts.ch = cfg.channel();
  ts.ch.theta = db_to_linear(cfg.train_theta_db);
  ts.res = cfg.resources();
  ts.w = make_world(cfg, ts.ch);
  ts.probs = compute_success_probabilities(ts.w.topo, ts.w.asg, ts.ch, ts.res);
  ts.data = make_blobs(cfg.n_devices * cfg.samples_per_device, cfg.input_dim,
                       cfg.n_classes, cfg.blob_sigma, cfg.seed + 2);
  Rng rng(cfg.seed + 3);
  ts.part = partition_noniid(ts.data, cfg.n_devices, cfg.labels_per_device, rng);
  return ts;
}

void run_train(const ExperimentConfig& cfg, const fs::path& out) {
  TrainSetup ts = make_train_setup(cfg);
  TrainingConfig tc = cfg.training();
  TrainingTrace tr =
      train(ts.w.topo, ts.w.asg, ts.probs, ts.data, ts.part, tc, ts.ch, ts.res);
  CsvWriter csv(out, "train",
                "iteration,accuracy,loss,local_success,global_success,"
                "cumulative_latency_s",
                cfg, "train");
  for (std::size_t t = 0; t < tr.accuracy.size(); ++t)
    csv.row("%zu,%.9f,%.9f,%d,%d,%.9f", t, tr.accuracy[t], tr.loss[t],
            tr.local_success_count[t], tr.global_success_count[t],
            tr.cumulative_latency_s[t]);
}

void run_bound(const ExperimentConfig& cfg, const fs::path& out) {
  TrainSetup ts = make_train_setup(cfg);
  const auto clusters = ts.w.asg.clusters();
  const std::vector<double> p_u = cluster_weights(ts.part, clusters);
  const BTerms actual =
      compute_b_terms(ts.probs.edge, ts.probs.backhaul, ts.part.p_k, p_u, clusters);

  BoundInputs in;
  in.learning_rate = 1e-3;
  in.local_period = cfg.local_period;
  in.global_period = cfg.global_period;
  in.horizon = cfg.total_iterations;
  in.cluster_weights = p_u;
  in.n_uavs = cfg.n_uavs;
  in.total_samples = ts.part.n_total;
  in.b = actual;

  CsvWriter csv(out, "bound",
                "kind,b1,b2,b3,bound,bound_appendix,bound_uniform,delta,condition", cfg,
                "bound");
  BoundInputs appendix = in;
  appendix.appendix_constants = true;
  csv.row("actual,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%d", in.b.b1, in.b.b2, in.b.b3,
          convergence_bound(in), convergence_bound(appendix),
          convergence_bound_uniform(in), uniform_bound_delta(in, 2.0, 0.5),
          static_cast<int>(improvement_condition(in.b.b2, in.b.b3, in.global_div_sq,
                                                 in.grad_bound_device_sq, in.n_uavs,
                                                 in.total_samples, 1.0)));
  for (double b2 = 0.0; b2 <= 4.0; b2 += 0.5) {
    for (double b3 = 0.0; b3 <= b2 + 1e-9; b3 += 0.5) {
      BoundInputs g = in;
      g.b = {in.b.b1, b2, b3};
      csv.row("grid,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%d", g.b.b1, b2, b3,
              convergence_bound(g), 0.0, convergence_bound_uniform(g),
              uniform_bound_delta(g, 2.0, 0.5),
              static_cast<int>(improvement_condition(b2, b3, g.global_div_sq,
                                                     g.grad_bound_device_sq, g.n_uavs,
                                                     g.total_samples, 1.0)));
    }
  }
}

void run_latency(const ExperimentConfig& cfg, const fs::path& out) {
  CsvWriter csv(out, "latency",
                "variant,model_size_bits,iterations_to_target,latency_to_target_s", cfg,
                "latency");
  for (const std::string& variant : {std::string("unbiased-hfl"),
                                     std::string("conventional-hfl")}) {
    for (double z : cfg.model_size_grid_bits) {
      ExperimentConfig c = cfg;
      c.variant = variant;
      c.model_size_bits = z;
      TrainSetup ts = make_train_setup(c);
      TrainingConfig tc = c.training();
      TrainingTrace tr =
          train(ts.w.topo, ts.w.asg, ts.probs, ts.data, ts.part, tc, ts.ch, ts.res);
      int it_hit = -1;
      double lat_hit = -1.0;
      for (std::size_t t = 0; t < tr.accuracy.size(); ++t) {
        if (tr.accuracy[t] >= cfg.accuracy_target) {
          it_hit = static_cast<int>(t);
          lat_hit = tr.cumulative_latency_s[t];
          break;
        }
      }
      csv.row("%s,%.6g,%d,%.9f", variant.c_str(), z, it_hit, lat_hit);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-assisted hierarchical FL experiment runner"};
  app.require_subcommand(1);
  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON config path");
  app.add_option("--out", opt.out_dir, "output directory");
  std::uint64_t seed_val = 0;
  int trials_val = 0;
  std::string variant_val;
  auto* seed_opt = app.add_option("--seed", seed_val, "master seed override");
  auto* trials_opt = app.add_option("--trials", trials_val, "Monte Carlo trials override");
  auto* variant_opt = app.add_option("--variant", variant_val, "training variant override");

  const char* subs[] = {"probe", "validate", "sweep-height", "sweep-uavs",
                        "train", "bound", "latency"};
  for (const char* s : subs) app.add_subcommand(s)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*seed_opt) opt.seed = seed_val;
    if (*trials_opt) opt.trials = trials_val;
    if (*variant_opt) opt.variant = variant_val;
    const ExperimentConfig cfg = make_config(opt);
    const fs::path out(opt.out_dir);
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "probe") run_probe(cfg, out);
    else if (sub == "validate") run_validate(cfg, out);
    else if (sub == "sweep-height") run_sweep_height(cfg, out);
    else if (sub == "sweep-uavs") run_sweep_uavs(cfg, out);
    else if (sub == "train") run_train(cfg, out);
    else if (sub == "bound") run_bound(cfg, out);
    else if (sub == "latency") run_latency(cfg, out);
    return 0;
  } catch (const ConvergenceFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
