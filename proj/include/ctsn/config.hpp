#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctsn/bptt.hpp"
#include "ctsn/data.hpp"
#include "ctsn/gradcheck.hpp"
#include "ctsn/network.hpp"
#include "ctsn/neuron.hpp"
#include "ctsn/trainer.hpp"

namespace ctsn {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raw key=value layer. Keys are dotted (`tmpr.lambda`).
using ConfigMap = std::map<std::string, std::string>;

struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string help;
};

// Every recognised key with its default, in echo order.
const std::vector<ConfigKey>& config_keys();
bool is_config_key(const std::string& key);

// `CTSN_` + key upper-cased with '.' replaced by '_'.
std::string env_name(const std::string& key);

// Lines of `key = value`; blank lines and `#` comments are skipped. Unknown
// keys and malformed lines throw ConfigError naming the line.
ConfigMap parse_config_text(const std::string& text, const std::string& source);
ConfigMap parse_config_file(const std::filesystem::path& path);

// Values of recognised keys present in the environment.
ConfigMap config_from_env();

enum class DataSource { synthetic_static, synthetic_events, idx };

struct DataSpec {
  DataSource source = DataSource::synthetic_static;
  std::size_t n_train = 2000;
  std::size_t n_test = 2000;
  std::size_t dims = 16;
  std::size_t classes = 4;
  double margin = 3.0;
  std::size_t blobs = 3;
  double rate = 0.1;
  double fidelity = 0.75;
  bool normalize = false;
  std::string train_images, train_labels, test_images, test_labels;
};

struct RunConfig {
  NeuronConfig neuron;
  CTSNParams omega_init;
  TrainConfig train;
  std::size_t T = 4;
  std::vector<std::size_t> hidden{32, 32};
  std::string model_path;  // empty: <out>/model.bin
  DataSpec data;
  HistogramSpec hist;
  std::optional<std::size_t> hist_layer;  // 1-based; unset means all layers
  std::filesystem::path out = "runs/default";
  GradcheckOptions gradcheck;
  std::vector<std::uint64_t> ablate_seeds{1, 2, 3};
  std::vector<std::size_t> ablate_T{4};

  DataKind data_kind() const {
    return data.source == DataSource::synthetic_events ? DataKind::neuromorphic
                                                       : DataKind::static_images;
  }
  std::filesystem::path resolved_model_path() const;
};

// Layers, lowest precedence first: defaults, then each map in order.
// `auto` values resolve against the data kind. Throws ConfigError naming the
// field on any bad value.
RunConfig resolve_config(const std::vector<ConfigMap>& layers);

// Fully resolved key=value text; feeding it back as a config file reproduces
// the run.
std::string echo_config(const RunConfig& cfg);

struct SplitData {
  Dataset train;
  Dataset test;
};

// Builds or loads both splits as the config describes. Synthetic corpora are
// drawn from Rng::derive(seed, "data").
SplitData load_data(const RunConfig& cfg);
std::map<std::string, std::string> data_manifest(const RunConfig& cfg, const SplitData& data);

// Fresh network for the config, initialised from Rng::derive(seed, "init").
Network build_network(const RunConfig& cfg, std::size_t input_dim, std::size_t classes);

}  // namespace ctsn
