#include "uhfl/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uhfl {

using nlohmann::json;

ExperimentConfig::ExperimentConfig() {
  for (double h = 10.0; h <= 1000.0; h += 10.0) height_grid_m.push_back(h);
}

ChannelParams ExperimentConfig::channel() const {
  ChannelParams ch;
  ch.alpha_los = alpha_los;
  ch.alpha_nlos = alpha_nlos;
  ch.m_los = m_los;
  ch.m_nlos = m_nlos;
  ch.m_direct = m_direct;
  ch.alpha_direct = alpha_direct;
  ch.a = env_a;
  ch.b = env_b;
  ch.p_device = p_device_w;
  ch.p_uav = p_uav_w;
  ch.noise = noise_w;
  ch.theta = db_to_linear(theta_db);
  return ch;
}

ResourceConfig ExperimentConfig::resources() const {
  ResourceConfig res;
  res.rb_bs = rb_bs;
  res.rb_uav = rb_uav;
  res.rb_direct = rb_direct;
  res.bandwidth_device = bandwidth_device_hz;
  res.bandwidth_uav = bandwidth_uav_hz;
  return res;
}

TrainingConfig ExperimentConfig::training() const {
  TrainingConfig t;
  t.learning_rate = learning_rate;
  t.local_period = local_period;
  t.global_period = global_period;
  t.total_iterations = total_iterations;
  t.batch_size = batch_size;
  t.variant = parse_variant(variant);
  if (channel_mode == "montecarlo")
    t.channel_mode = ChannelMode::MonteCarlo;
  else if (channel_mode == "bernoulli")
    t.channel_mode = ChannelMode::Bernoulli;
  else
    throw std::invalid_argument("config key 'channel_mode': expected montecarlo|bernoulli");
  t.seed = seed;
  t.shape = MlpShape{input_dim, hidden_dim, n_classes};
  t.cpu_cycles_per_sample = cpu_cycles_per_sample;
  t.cpu_frequency_hz = cpu_frequency_hz;
  t.model_size_bits = model_size_bits;
  return t;
}

void ExperimentConfig::validate() const {
  channel().validate();
  resources().validate();
  training().validate();
  if (n_devices < 1 || n_uavs < 1) throw std::invalid_argument("config: counts must be >= 1");
  if (radius_m <= 0 || height_m <= 0) throw std::invalid_argument("config: bad geometry");
  if (trials < 1 || n_pairs < 1) throw std::invalid_argument("config: bad run control");
}

namespace {

template <typename T>
void take(json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    it->get_to(out);
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config key '") + key + "': wrong type");
  }
  j.erase(it);
}

void apply(json& j, ExperimentConfig& c) {
  take(j, "n_devices", c.n_devices);
  take(j, "n_uavs", c.n_uavs);
  take(j, "radius_m", c.radius_m);
  take(j, "height_m", c.height_m);
  take(j, "p_device_w", c.p_device_w);
  take(j, "p_uav_w", c.p_uav_w);
  take(j, "alpha_los", c.alpha_los);
  take(j, "alpha_nlos", c.alpha_nlos);
  take(j, "m_los", c.m_los);
  take(j, "m_nlos", c.m_nlos);
  take(j, "m_direct", c.m_direct);
  take(j, "alpha_direct", c.alpha_direct);
  take(j, "env_a", c.env_a);
  take(j, "env_b", c.env_b);
  take(j, "noise_w", c.noise_w);
  take(j, "theta_db", c.theta_db);
  take(j, "rb_bs", c.rb_bs);
  take(j, "rb_uav", c.rb_uav);
  take(j, "rb_direct", c.rb_direct);
  take(j, "bandwidth_device_hz", c.bandwidth_device_hz);
  take(j, "bandwidth_uav_hz", c.bandwidth_uav_hz);
  take(j, "cpu_frequency_hz", c.cpu_frequency_hz);
  take(j, "cpu_cycles_per_sample", c.cpu_cycles_per_sample);
  take(j, "model_size_bits", c.model_size_bits);
  take(j, "learning_rate", c.learning_rate);
  take(j, "batch_size", c.batch_size);
  take(j, "local_period", c.local_period);
  take(j, "global_period", c.global_period);
  take(j, "total_iterations", c.total_iterations);
  take(j, "variant", c.variant);
  take(j, "channel_mode", c.channel_mode);
  take(j, "samples_per_device", c.samples_per_device);
  take(j, "labels_per_device", c.labels_per_device);
  take(j, "input_dim", c.input_dim);
  take(j, "hidden_dim", c.hidden_dim);
  take(j, "n_classes", c.n_classes);
  take(j, "blob_sigma", c.blob_sigma);
  take(j, "accuracy_target", c.accuracy_target);
  take(j, "train_theta_db", c.train_theta_db);
  take(j, "seed", c.seed);
  take(j, "trials", c.trials);
  take(j, "n_pairs", c.n_pairs);
  take(j, "theta_grid_db", c.theta_grid_db);
  take(j, "height_grid_m", c.height_grid_m);
  take(j, "uav_grid", c.uav_grid);
  take(j, "model_size_grid_bits", c.model_size_grid_bits);
  if (!j.empty())
    throw std::invalid_argument("config: unknown key '" + j.begin().key() + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  ExperimentConfig cfg;
  apply(j, cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["n_devices"] = c.n_devices;
  j["n_uavs"] = c.n_uavs;
  j["radius_m"] = c.radius_m;
  j["height_m"] = c.height_m;
  j["p_device_w"] = c.p_device_w;
  j["p_uav_w"] = c.p_uav_w;
  j["alpha_los"] = c.alpha_los;
  j["alpha_nlos"] = c.alpha_nlos;
  j["m_los"] = c.m_los;
  j["m_nlos"] = c.m_nlos;
  j["m_direct"] = c.m_direct;
  j["alpha_direct"] = c.alpha_direct;
  j["env_a"] = c.env_a;
  j["env_b"] = c.env_b;
  j["noise_w"] = c.noise_w;
  j["theta_db"] = c.theta_db;
  j["rb_bs"] = c.rb_bs;
  j["rb_uav"] = c.rb_uav;
  j["rb_direct"] = c.rb_direct;
  j["bandwidth_device_hz"] = c.bandwidth_device_hz;
  j["bandwidth_uav_hz"] = c.bandwidth_uav_hz;
  j["cpu_frequency_hz"] = c.cpu_frequency_hz;
  j["cpu_cycles_per_sample"] = c.cpu_cycles_per_sample;
  j["model_size_bits"] = c.model_size_bits;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["local_period"] = c.local_period;
  j["global_period"] = c.global_period;
  j["total_iterations"] = c.total_iterations;
  j["variant"] = c.variant;
  j["channel_mode"] = c.channel_mode;
  j["samples_per_device"] = c.samples_per_device;
  j["labels_per_device"] = c.labels_per_device;
  j["input_dim"] = c.input_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["n_classes"] = c.n_classes;
  j["blob_sigma"] = c.blob_sigma;
  j["accuracy_target"] = c.accuracy_target;
  j["train_theta_db"] = c.train_theta_db;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["n_pairs"] = c.n_pairs;
  j["theta_grid_db"] = c.theta_grid_db;
  j["height_grid_m"] = c.height_grid_m;
  j["uav_grid"] = c.uav_grid;
  j["model_size_grid_bits"] = c.model_size_grid_bits;
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace uhfl
