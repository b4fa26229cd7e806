#include "lac/config.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "lac/linalg.hpp"

namespace lac {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& key_set() {
  static const std::set<std::string> keys = {
      "dataset.edges",     "dataset.features",   "dataset.labels",
      "dataset.name",      "dataset.raw_adjacency",
      "split.train_frac",  "split.val_frac",     "split.seed",
      "train.max_epochs",  "train.lr_encoder",   "train.lr_augmenter",
      "train.alpha",       "train.beta",         "train.tau",
      "train.seed",        "train.inner_steps_encoder",
      "train.inner_steps_augmenter",             "train.augmenter_maximizes",
      "train.symmetrized",
      "mta.embed_dim",     "mta.heads",          "mta.layers",
      "mta.epsilon",       "mta.mask_ratio",     "mta.mask_strategy",
      "encoder.hidden_dim", "encoder.out_dim",
      "eval.classifier_epochs", "eval.classifier_lr",
      "eval.classifier_repeats", "eval.clusters",
      "eval.clustering_restarts",
      "spectral.cache",
  };
  return keys;
}

}  // namespace

Config::Config() {
  values_["dataset.name"] = "dataset";
  values_["dataset.raw_adjacency"] = "false";
  values_["split.train_frac"] = "0.1";
  values_["split.val_frac"] = "0.1";
  values_["split.seed"] = "1";
  values_["train.max_epochs"] = "20";
  values_["train.lr_encoder"] = "1e-3";
  values_["train.lr_augmenter"] = "5e-3";
  values_["train.alpha"] = "0.1";
  values_["train.beta"] = "0.5";
  values_["train.tau"] = "0.5";
  values_["train.seed"] = "1";
  values_["train.inner_steps_encoder"] = "1";
  values_["train.inner_steps_augmenter"] = "1";
  values_["train.augmenter_maximizes"] = "false";
  values_["train.symmetrized"] = "true";
  values_["mta.embed_dim"] = "16";
  values_["mta.heads"] = "2";
  values_["mta.layers"] = "1";
  values_["mta.epsilon"] = "100";
  values_["mta.mask_ratio"] = "0.5";
  values_["mta.mask_strategy"] = "random";
  values_["encoder.hidden_dim"] = "256";
  values_["encoder.out_dim"] = "256";
  values_["eval.classifier_epochs"] = "300";
  values_["eval.classifier_lr"] = "0.01";
  values_["eval.classifier_repeats"] = "10";
  values_["eval.clusters"] = "0";
  values_["eval.clustering_restarts"] = "50";
}

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys(key_set().begin(), key_set().end());
  return keys;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected key = value, got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key_set().count(key) == 0) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": unknown config key '" + key + "'");
    }
    if (value.empty()) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": empty value for key '" + key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

void Config::set(const std::string& assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ParseError("override must be key=value, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  if (key_set().count(key) == 0) {
    throw ParseError("unknown config key '" + key + "'");
  }
  if (value.empty()) throw ParseError("empty value for key '" + key + "'");
  values_[key] = value;
}

bool Config::has(const std::string& key) const {
  return values_.count(key) != 0 && !values_.at(key).empty();
}

std::string Config::get_string(const std::string& key) const {
  if (key_set().count(key) == 0) throw ParseError("unknown config key '" + key + "'");
  auto it = values_.find(key);
  if (it == values_.end()) throw ParseError("config key not set: '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &pos);
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': not a number: '" + raw + "'");
  }
  if (pos != raw.size()) {
    throw ParseError("config key '" + key + "': trailing junk in '" + raw + "'");
  }
  return v;
}

std::size_t Config::get_size(const std::string& key) const {
  double v = get_double(key);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ParseError("config key '" + key + "': expected non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t Config::get_u64(const std::string& key) const {
  return static_cast<std::uint64_t>(get_size(key));
}

bool Config::get_bool(const std::string& key) const {
  std::string raw = get_string(key);
  std::transform(raw.begin(), raw.end(), raw.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ParseError("config key '" + key + "': expected boolean, got '" + raw + "'");
}

}  // namespace lac
