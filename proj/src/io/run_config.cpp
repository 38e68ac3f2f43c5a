#include "ddikit/io/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ddikit::io {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::int64_t to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' needs an integer, got '" + v + "'");
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' needs a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error("config: key '" + key + "' needs true/false, got '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scales", [](RunConfig& c, const std::string& v) { c.train.scales = static_cast<int>(to_int(v, "scales")); }},
      {"iterations", [](RunConfig& c, const std::string& v) { c.train.iterations = static_cast<int>(to_int(v, "iterations")); }},
      {"hidden_dim", [](RunConfig& c, const std::string& v) { c.train.hidden_dim = to_int(v, "hidden_dim"); }},
      {"learning_rate", [](RunConfig& c, const std::string& v) { c.train.learning_rate = to_double(v, "learning_rate"); }},
      {"weight_decay", [](RunConfig& c, const std::string& v) { c.train.weight_decay = to_double(v, "weight_decay"); }},
      {"epochs", [](RunConfig& c, const std::string& v) { c.train.epochs = static_cast<int>(to_int(v, "epochs")); }},
      {"batch_size", [](RunConfig& c, const std::string& v) { c.train.batch_size = static_cast<int>(to_int(v, "batch_size")); }},
      {"accumulation_steps", [](RunConfig& c, const std::string& v) { c.train.accumulation_steps = static_cast<int>(to_int(v, "accumulation_steps")); }},
      {"lambda_unc", [](RunConfig& c, const std::string& v) { c.train.lambda_unc = to_double(v, "lambda_unc"); }},
      {"lambda_kl", [](RunConfig& c, const std::string& v) { c.train.lambda_kl = to_double(v, "lambda_kl"); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.train.seed = static_cast<std::uint64_t>(to_int(v, "seed")); }},
      {"relation_module_enabled", [](RunConfig& c, const std::string& v) { c.train.relation_module_enabled = to_bool(v, "relation_module_enabled"); }},
      {"uncertainty_on_scale_means", [](RunConfig& c, const std::string& v) { c.train.uncertainty_on_scale_means = to_bool(v, "uncertainty_on_scale_means"); }},
      {"freeze_batchnorm", [](RunConfig& c, const std::string& v) { c.train.freeze_batchnorm = to_bool(v, "freeze_batchnorm"); }},
      {"drugs_path", [](RunConfig& c, const std::string& v) { c.drugs_path = v; }},
      {"pairs_path", [](RunConfig& c, const std::string& v) { c.pairs_path = v; }},
      {"split_mode",
       [](RunConfig& c, const std::string& v) {
         if (v != "transductive" && v != "inductive") {
           throw std::runtime_error("config: split_mode must be transductive or inductive");
         }
         c.split_mode = v;
       }},
      {"train_ratio", [](RunConfig& c, const std::string& v) { c.train_ratio = to_double(v, "train_ratio"); }},
      {"valid_ratio", [](RunConfig& c, const std::string& v) { c.valid_ratio = to_double(v, "valid_ratio"); }},
      {"test_ratio", [](RunConfig& c, const std::string& v) { c.test_ratio = to_double(v, "test_ratio"); }},
      {"drug_ratio", [](RunConfig& c, const std::string& v) { c.drug_ratio = to_double(v, "drug_ratio"); }},
      {"negative_ratio", [](RunConfig& c, const std::string& v) { c.negative_ratio = to_double(v, "negative_ratio"); }},
      {"threshold", [](RunConfig& c, const std::string& v) { c.threshold = to_double(v, "threshold"); }},
      {"checkpoint_path", [](RunConfig& c, const std::string& v) { c.checkpoint_path = v; }},
      {"loss_log_path", [](RunConfig& c, const std::string& v) { c.loss_log_path = v; }},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: line " + std::to_string(line_number) +
                               " is not 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw std::runtime_error("config: unknown key '" + key + "' at line " +
                               std::to_string(line_number));
    }
    it->second(cfg, value);
  }
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config_text(buffer.str());
}

std::string run_config_to_text(const RunConfig& cfg) {
  std::ostringstream oss;
  oss.precision(17);
  oss << "scales = " << cfg.train.scales << "\n";
  oss << "iterations = " << cfg.train.iterations << "\n";
  oss << "hidden_dim = " << cfg.train.hidden_dim << "\n";
  oss << "learning_rate = " << cfg.train.learning_rate << "\n";
  oss << "weight_decay = " << cfg.train.weight_decay << "\n";
  oss << "epochs = " << cfg.train.epochs << "\n";
  oss << "batch_size = " << cfg.train.batch_size << "\n";
  oss << "accumulation_steps = " << cfg.train.accumulation_steps << "\n";
  oss << "lambda_unc = " << cfg.train.lambda_unc << "\n";
  oss << "lambda_kl = " << cfg.train.lambda_kl << "\n";
  oss << "seed = " << cfg.train.seed << "\n";
  oss << "relation_module_enabled = " << (cfg.train.relation_module_enabled ? "true" : "false")
      << "\n";
  oss << "uncertainty_on_scale_means = "
      << (cfg.train.uncertainty_on_scale_means ? "true" : "false") << "\n";
  oss << "freeze_batchnorm = " << (cfg.train.freeze_batchnorm ? "true" : "false") << "\n";
  oss << "drugs_path = " << cfg.drugs_path << "\n";
  oss << "pairs_path = " << cfg.pairs_path << "\n";
  oss << "split_mode = " << cfg.split_mode << "\n";
  oss << "train_ratio = " << cfg.train_ratio << "\n";
  oss << "valid_ratio = " << cfg.valid_ratio << "\n";
  oss << "test_ratio = " << cfg.test_ratio << "\n";
  oss << "drug_ratio = " << cfg.drug_ratio << "\n";
  oss << "negative_ratio = " << cfg.negative_ratio << "\n";
  oss << "threshold = " << cfg.threshold << "\n";
  oss << "checkpoint_path = " << cfg.checkpoint_path << "\n";
  oss << "loss_log_path = " << cfg.loss_log_path << "\n";
  return oss.str();
}

void validate_input_paths(const RunConfig& cfg) {
  for (const auto& [what, path] : {std::pair<const char*, const std::string&>{"drugs_path", cfg.drugs_path},
                                   {"pairs_path", cfg.pairs_path}}) {
    if (path.empty()) throw std::runtime_error(std::string("config: ") + what + " is not set");
    if (!std::filesystem::exists(path)) {
      throw std::runtime_error(std::string("config: ") + what + " does not exist: " + path);
    }
  }
}

}  // namespace ddikit::io
