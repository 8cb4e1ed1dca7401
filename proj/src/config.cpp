#include "ctsn/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ctsn/errors.hpp"

namespace ctsn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename List>
std::string join(const List& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const ConfigMap& values) : values_(values) {}

  const std::string& raw(const std::string& key) const { return values_.at(key); }
  bool is_auto(const std::string& key) const { return raw(key) == "auto"; }

  double real(const std::string& key) const {
    const std::string& s = raw(key);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      fail(key, "expected a number");
    }
    return v;
  }

  std::uint64_t integer(const std::string& key) const { return parse_uint(key, raw(key)); }

  std::size_t positive(const std::string& key) const {
    const auto v = integer(key);
    if (v == 0) fail(key, "must be positive");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key) const {
    std::string s = raw(key);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(key, "expected true or false");
  }

  std::vector<std::uint64_t> list(const std::string& key) const {
    std::vector<std::uint64_t> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_uint(key, trim(item)));
    if (out.empty()) fail(key, "expected a comma-separated list");
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError(key + ": " + why + " (got '" + raw(key) + "')");
  }

 private:
  std::uint64_t parse_uint(const std::string& key, const std::string& s) const {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
      fail(key, "expected a non-negative integer");
    }
    return v;
  }

  const ConfigMap& values_;
};

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"neuron.kind", "ternary", "ternary | ctsn_static | ctsn_neuromorphic"},
      {"neuron.reset", "hard", "hard | soft (soft is ternary only)"},
      {"neuron.tau", "0.25", "membrane decay"},
      {"neuron.v_th", "0.5", "firing threshold"},
      {"neuron.a", "0.5", "surrogate window half-width"},
      {"ctsn.omega_alpha", "0", "initial omega for alpha"},
      {"ctsn.omega_beta", "0", "initial omega for beta"},
      {"ctsn.omega_gamma", "0", "initial omega for gamma"},
      {"tmpr.enabled", "true", "membrane potential regulariser on/off"},
      {"tmpr.lambda", "auto", "regulariser weight (auto: 0.05 static, 0.01 events)"},
      {"train.lr0", "0.1", "initial learning rate"},
      {"train.momentum", "0.9", "SGD momentum"},
      {"train.weight_decay", "auto", "weight decay (auto: 1e-4 static, 5e-4 events)"},
      {"train.batch_size", "64", "mini-batch size"},
      {"train.epochs", "30", "training epochs"},
      {"train.seed", "1", "root seed"},
      {"model.T", "4", "timesteps"},
      {"model.hidden", "32,32", "hidden layer widths"},
      {"model.path", "", "model file (default <out>/model.bin)"},
      {"data.source", "synthetic_static", "synthetic_static | synthetic_events | idx"},
      {"data.n_train", "2000", "synthetic training samples"},
      {"data.n_test", "2000", "synthetic evaluation samples"},
      {"data.dims", "16", "synthetic feature width"},
      {"data.classes", "4", "synthetic class count"},
      {"data.margin", "3", "norm of synthetic blob centres"},
      {"data.blobs", "3", "blobs per class"},
      {"data.rate", "0.1", "event frame nonzero fraction"},
      {"data.fidelity", "0.75", "probability an event follows its class sign"},
      {"data.normalize", "false", "standardise with training-set mean and std"},
      {"data.train_images", "", "IDX training images"},
      {"data.train_labels", "", "IDX training labels"},
      {"data.test_images", "", "IDX evaluation images"},
      {"data.test_labels", "", "IDX evaluation labels"},
      {"hist.bins", "81", "histogram bins"},
      {"hist.lo", "-2", "histogram lower edge"},
      {"hist.hi", "2", "histogram upper edge"},
      {"hist.layer", "all", "1-based hidden layer or all"},
      {"out", "runs/default", "output directory"},
      {"gradcheck.mode", "all", "ternary | ctsn | all"},
      {"gradcheck.paper_recursion", "false", "use the literal xi of the recursion"},
      {"gradcheck.fd_step", "1e-6", "central difference step"},
      {"gradcheck.networks", "100", "random networks per suite"},
      {"ablate.seeds", "1,2,3", "seeds per arm"},
      {"ablate.T", "4", "timestep values"},
  };
  return keys;
}

bool is_config_key(const std::string& key) {
  const auto& keys = config_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.key == key; });
}

std::string env_name(const std::string& key) {
  std::string out = "CTSN_";
  for (char c : key) {
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

ConfigMap parse_config_text(const std::string& text, const std::string& source) {
  ConfigMap out;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!is_config_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

ConfigMap config_from_env() {
  ConfigMap out;
  for (const auto& k : config_keys()) {
    if (const char* v = std::getenv(env_name(k.key).c_str())) out[k.key] = v;
  }
  return out;
}

std::filesystem::path RunConfig::resolved_model_path() const {
  return model_path.empty() ? out / "model.bin" : std::filesystem::path(model_path);
}

RunConfig resolve_config(const std::vector<ConfigMap>& layers) {
  ConfigMap merged;
  for (const auto& k : config_keys()) merged[k.key] = k.default_value;
  for (const auto& layer : layers) {
    for (const auto& [key, value] : layer) {
      if (!is_config_key(key)) throw ConfigError("unknown key '" + key + "'");
      merged[key] = value;
    }
  }
  const Reader r(merged);
  RunConfig cfg;

  try {
    cfg.neuron.kind = parse_neuron_kind(r.raw("neuron.kind"));
  } catch (const ArgumentError&) {
    r.fail("neuron.kind", "expected ternary, ctsn_static or ctsn_neuromorphic");
  }
  try {
    cfg.neuron.reset = parse_reset_mode(r.raw("neuron.reset"));
  } catch (const ArgumentError&) {
    r.fail("neuron.reset", "expected hard or soft");
  }
  cfg.neuron.tau = r.real("neuron.tau");
  cfg.neuron.v_th = r.real("neuron.v_th");
  cfg.neuron.a = r.real("neuron.a");
  if (!(cfg.neuron.tau > 0.0 && cfg.neuron.tau <= 1.0)) r.fail("neuron.tau", "must lie in (0, 1]");
  if (!(cfg.neuron.v_th > 0.0)) r.fail("neuron.v_th", "must be positive");
  if (!(cfg.neuron.a > 0.0)) r.fail("neuron.a", "must be positive");
  try {
    cfg.neuron.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("neuron: ") + e.what());
  }
  cfg.omega_init = {r.real("ctsn.omega_alpha"), r.real("ctsn.omega_beta"),
                    r.real("ctsn.omega_gamma")};

  const std::string source = r.raw("data.source");
  if (source == "synthetic_static") {
    cfg.data.source = DataSource::synthetic_static;
  } else if (source == "synthetic_events") {
    cfg.data.source = DataSource::synthetic_events;
  } else if (source == "idx") {
    cfg.data.source = DataSource::idx;
  } else {
    r.fail("data.source", "expected synthetic_static, synthetic_events or idx");
  }
  const bool events = cfg.data_kind() == DataKind::neuromorphic;

  cfg.train.tmpr.enabled = r.flag("tmpr.enabled");
  cfg.train.tmpr.lambda = r.is_auto("tmpr.lambda") ? (events ? 0.01 : 0.05) : r.real("tmpr.lambda");
  if (cfg.train.tmpr.lambda < 0.0) r.fail("tmpr.lambda", "must be >= 0");
  cfg.train.lr0 = r.real("train.lr0");
  if (cfg.train.lr0 < 0.0) r.fail("train.lr0", "must be >= 0");
  cfg.train.momentum = r.real("train.momentum");
  cfg.train.weight_decay =
      r.is_auto("train.weight_decay") ? (events ? 5e-4 : 1e-4) : r.real("train.weight_decay");
  if (cfg.train.weight_decay < 0.0) r.fail("train.weight_decay", "must be >= 0");
  cfg.train.batch_size = r.positive("train.batch_size");
  cfg.train.epochs = r.positive("train.epochs");
  cfg.train.seed = r.integer("train.seed");

  cfg.T = r.positive("model.T");
  cfg.hidden.clear();
  for (auto w : r.list("model.hidden")) {
    if (w == 0) r.fail("model.hidden", "widths must be positive");
    cfg.hidden.push_back(static_cast<std::size_t>(w));
  }
  cfg.model_path = r.raw("model.path");

  cfg.data.n_train = r.positive("data.n_train");
  cfg.data.n_test = r.positive("data.n_test");
  cfg.data.dims = r.positive("data.dims");
  cfg.data.classes = r.positive("data.classes");
  cfg.data.margin = r.real("data.margin");
  cfg.data.blobs = r.positive("data.blobs");
  cfg.data.rate = r.real("data.rate");
  if (cfg.data.rate < 0.0 || cfg.data.rate > 1.0) r.fail("data.rate", "must lie in [0, 1]");
  cfg.data.fidelity = r.real("data.fidelity");
  if (cfg.data.fidelity < 0.0 || cfg.data.fidelity > 1.0) {
    r.fail("data.fidelity", "must lie in [0, 1]");
  }
  cfg.data.normalize = r.flag("data.normalize");
  cfg.data.train_images = r.raw("data.train_images");
  cfg.data.train_labels = r.raw("data.train_labels");
  cfg.data.test_images = r.raw("data.test_images");
  cfg.data.test_labels = r.raw("data.test_labels");
  if (cfg.data.source == DataSource::idx) {
    for (const char* key :
         {"data.train_images", "data.train_labels", "data.test_images", "data.test_labels"}) {
      if (r.raw(key).empty()) r.fail(key, "required when data.source = idx");
    }
  }

  cfg.hist.bins = r.positive("hist.bins");
  cfg.hist.lo = r.real("hist.lo");
  cfg.hist.hi = r.real("hist.hi");
  if (!(cfg.hist.hi > cfg.hist.lo)) r.fail("hist.hi", "must exceed hist.lo");
  if (r.raw("hist.layer") != "all") cfg.hist_layer = r.positive("hist.layer");

  cfg.out = r.raw("out");
  if (cfg.out.empty()) r.fail("out", "must not be empty");

  const std::string mode = r.raw("gradcheck.mode");
  if (mode == "ternary") {
    cfg.gradcheck.mode = GradcheckMode::ternary;
  } else if (mode == "ctsn") {
    cfg.gradcheck.mode = GradcheckMode::ctsn;
  } else if (mode == "all") {
    cfg.gradcheck.mode = GradcheckMode::all;
  } else {
    r.fail("gradcheck.mode", "expected ternary, ctsn or all");
  }
  cfg.gradcheck.paper_recursion = r.flag("gradcheck.paper_recursion");
  cfg.gradcheck.fd_step = r.real("gradcheck.fd_step");
  if (!(cfg.gradcheck.fd_step > 0.0)) r.fail("gradcheck.fd_step", "must be positive");
  cfg.gradcheck.networks = r.positive("gradcheck.networks");
  cfg.gradcheck.seed = cfg.train.seed;

  cfg.ablate_seeds = r.list("ablate.seeds");
  cfg.ablate_T.clear();
  for (auto t : r.list("ablate.T")) {
    if (t == 0) r.fail("ablate.T", "timesteps must be positive");
    cfg.ablate_T.push_back(static_cast<std::size_t>(t));
  }
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  const char* source = cfg.data.source == DataSource::synthetic_static   ? "synthetic_static"
                       : cfg.data.source == DataSource::synthetic_events ? "synthetic_events"
                                                                          : "idx";
  const char* mode = cfg.gradcheck.mode == GradcheckMode::ternary ? "ternary"
                     : cfg.gradcheck.mode == GradcheckMode::ctsn  ? "ctsn"
                                                                  : "all";
  const std::map<std::string, std::string> values = {
      {"neuron.kind", std::string(to_string(cfg.neuron.kind))},
      {"neuron.reset", std::string(to_string(cfg.neuron.reset))},
      {"neuron.tau", fmt(cfg.neuron.tau)},
      {"neuron.v_th", fmt(cfg.neuron.v_th)},
      {"neuron.a", fmt(cfg.neuron.a)},
      {"ctsn.omega_alpha", fmt(cfg.omega_init.omega_alpha)},
      {"ctsn.omega_beta", fmt(cfg.omega_init.omega_beta)},
      {"ctsn.omega_gamma", fmt(cfg.omega_init.omega_gamma)},
      {"tmpr.enabled", cfg.train.tmpr.enabled ? "true" : "false"},
      {"tmpr.lambda", fmt(cfg.train.tmpr.lambda)},
      {"train.lr0", fmt(cfg.train.lr0)},
      {"train.momentum", fmt(cfg.train.momentum)},
      {"train.weight_decay", fmt(cfg.train.weight_decay)},
      {"train.batch_size", std::to_string(cfg.train.batch_size)},
      {"train.epochs", std::to_string(cfg.train.epochs)},
      {"train.seed", std::to_string(cfg.train.seed)},
      {"model.T", std::to_string(cfg.T)},
      {"model.hidden", join(cfg.hidden)},
      {"model.path", cfg.model_path},
      {"data.source", source},
      {"data.n_train", std::to_string(cfg.data.n_train)},
      {"data.n_test", std::to_string(cfg.data.n_test)},
      {"data.dims", std::to_string(cfg.data.dims)},
      {"data.classes", std::to_string(cfg.data.classes)},
      {"data.margin", fmt(cfg.data.margin)},
      {"data.blobs", std::to_string(cfg.data.blobs)},
      {"data.rate", fmt(cfg.data.rate)},
      {"data.fidelity", fmt(cfg.data.fidelity)},
      {"data.normalize", cfg.data.normalize ? "true" : "false"},
      {"data.train_images", cfg.data.train_images},
      {"data.train_labels", cfg.data.train_labels},
      {"data.test_images", cfg.data.test_images},
      {"data.test_labels", cfg.data.test_labels},
      {"hist.bins", std::to_string(cfg.hist.bins)},
      {"hist.lo", fmt(cfg.hist.lo)},
      {"hist.hi", fmt(cfg.hist.hi)},
      {"hist.layer", cfg.hist_layer ? std::to_string(*cfg.hist_layer) : "all"},
      {"out", cfg.out.string()},
      {"gradcheck.mode", mode},
      {"gradcheck.paper_recursion", cfg.gradcheck.paper_recursion ? "true" : "false"},
      {"gradcheck.fd_step", fmt(cfg.gradcheck.fd_step)},
      {"gradcheck.networks", std::to_string(cfg.gradcheck.networks)},
      {"ablate.seeds", join(cfg.ablate_seeds)},
      {"ablate.T", join(cfg.ablate_T)},
  };
  std::string out;
  for (const auto& k : config_keys()) out += k.key + " = " + values.at(k.key) + "\n";
  return out;
}

SplitData load_data(const RunConfig& cfg) {
  const DataSpec& d = cfg.data;
  SplitData out;
  if (d.source == DataSource::idx) {
    out.train = load_idx(d.train_images, d.train_labels);
    out.test = load_idx(d.test_images, d.test_labels);
    if (out.train.sample_shape() != out.test.sample_shape()) {
      throw ConfigError("data: training and evaluation images differ in shape");
    }
    const std::size_t classes = std::max(out.train.num_classes, out.test.num_classes);
    out.train.num_classes = out.test.num_classes = classes;
  } else {
    Rng rng(Rng::derive(cfg.train.seed, "data"));
    const std::size_t n = d.n_train + d.n_test;
    Dataset all = d.source == DataSource::synthetic_static
                      ? synth_static(n, d.dims, d.classes, d.margin, rng, d.blobs)
                      : synth_event_frames(n, d.dims, cfg.T, d.rate, d.classes, rng, d.fidelity);
    out.train.kind = out.test.kind = all.kind;
    out.train.num_classes = out.test.num_classes = all.num_classes;
    auto split = all.samples.begin() + static_cast<std::ptrdiff_t>(d.n_train);
    out.train.samples.assign(std::make_move_iterator(all.samples.begin()),
                             std::make_move_iterator(split));
    out.test.samples.assign(std::make_move_iterator(split),
                            std::make_move_iterator(all.samples.end()));
  }
  if (d.normalize) {
    const CorpusStats s = corpus_stats(out.train);
    if (!(s.std > 0.0)) throw ConfigError("data.normalize: training data has zero variance");
    const double mean[] = {s.mean};
    const double std[] = {s.std};
    out.train = normalize(out.train, mean, std);
    out.test = normalize(out.test, mean, std);
  }
  return out;
}

std::map<std::string, std::string> data_manifest(const RunConfig& cfg, const SplitData& data) {
  const DataSpec& d = cfg.data;
  std::map<std::string, std::string> m;
  m["seed"] = std::to_string(cfg.train.seed);
  m["train_samples"] = std::to_string(data.train.size());
  m["test_samples"] = std::to_string(data.test.size());
  m["classes"] = std::to_string(data.train.num_classes);
  m["feature_dim"] = std::to_string(data.train.feature_dim());
  m["normalize"] = d.normalize ? "true" : "false";
  switch (d.source) {
    case DataSource::synthetic_static:
      m["generator"] = "synth_static";
      m["dims"] = std::to_string(d.dims);
      m["margin"] = fmt(d.margin);
      m["blobs"] = std::to_string(d.blobs);
      break;
    case DataSource::synthetic_events:
      m["generator"] = "synth_event_frames";
      m["dims"] = std::to_string(d.dims);
      m["T"] = std::to_string(cfg.T);
      m["rate"] = fmt(d.rate);
      m["fidelity"] = fmt(d.fidelity);
      break;
    case DataSource::idx:
      m["generator"] = "idx";
      m["train_images"] = d.train_images;
      m["train_labels"] = d.train_labels;
      m["test_images"] = d.test_images;
      m["test_labels"] = d.test_labels;
      break;
  }
  return m;
}

Network build_network(const RunConfig& cfg, std::size_t input_dim, std::size_t classes) {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(classes);
  Network net(dims, cfg.neuron, cfg.T);
  Rng rng(Rng::derive(cfg.train.seed, "init"));
  net.init_uniform(rng);
  for (auto& layer : net.hidden) layer.ctsn = cfg.omega_init;
  return net;
}

}  // namespace ctsn
