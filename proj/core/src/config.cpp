#include "snne/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "snne/errors.hpp"

namespace snne {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw ContractError("config: bad number for " + key + ": '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-')
    throw ContractError("config: bad count for " + key + ": '" + value + "'");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size())
    throw ContractError("config: bad count for " + key + ": '" + value + "'");
  return v;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) comma = value.size();
    const std::string item = trim(value.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace

TrainSettings parse_train_settings(const std::string& text) {
  TrainSettings s;
  bool crossentropy = false;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError("config: line " + std::to_string(line_no) +
                          " is not key = value: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    TrainConfig& t = s.train;
    if (key == "members") t.members = parse_u64(key, value);
    else if (key == "batch_size") t.batch_size = parse_u64(key, value);
    else if (key == "max_epochs") t.max_epochs = parse_u64(key, value);
    else if (key == "patience") t.patience = parse_u64(key, value);
    else if (key == "validation_fraction") t.validation_fraction = parse_double(key, value);
    else if (key == "coarse_class_count") t.coarse_class_count = parse_u64(key, value);
    else if (key == "seed") t.seed = parse_u64(key, value);
    else if (key == "threads") t.threads = parse_u64(key, value);
    else if (key == "nll_weight") t.loss.nll_weight = parse_double(key, value);
    else if (key == "aux_weight") t.loss.aux_weight = parse_double(key, value);
    else if (key == "aux_kind") t.loss.aux_kind = aux_kind_from_string(value);
    else if (key == "contrastive_temperature")
      t.loss.contrastive_temperature = parse_double(key, value);
    else if (key == "learning_rate") t.optim.learning_rate = parse_double(key, value);
    else if (key == "beta1") t.optim.beta1 = parse_double(key, value);
    else if (key == "beta2") t.optim.beta2 = parse_double(key, value);
    else if (key == "epsilon") t.optim.epsilon = parse_double(key, value);
    else if (key == "lookahead_period") t.optim.lookahead_period = parse_u64(key, value);
    else if (key == "lookahead_step") t.optim.lookahead_step = parse_double(key, value);
    else if (key == "grad_clip_norm") t.optim.grad_clip_norm = parse_double(key, value);
    else if (key == "hidden_dim") t.model.hidden_dim = parse_u64(key, value);
    else if (key == "trunk_layers") t.model.trunk_layers = parse_u64(key, value);
    else if (key == "upper_layers") t.model.upper_layers = parse_u64(key, value);
    else if (key == "projection_dim") t.model.projection_dim = parse_u64(key, value);
    else if (key == "alpha_dropout_rate")
      t.model.alpha_dropout_rate = parse_double(key, value);
    else if (key == "fill_value") t.preprocess.fill_value = parse_double(key, value);
    else if (key == "max_bins") t.preprocess.max_bins = parse_u64(key, value);
    else if (key == "eigenvalue_tolerance")
      t.preprocess.eigenvalue_tolerance = parse_double(key, value);
    else if (key == "excluded_columns") s.excluded_columns = parse_list(value);
    else throw ContractError("config: unknown key '" + key + "'");

    if (key == "aux_kind") crossentropy = t.loss.aux_kind == AuxKind::kCrossentropy;
  }

  if (crossentropy) {
    s.train.model.projection_dim = s.train.coarse_class_count;
    s.train.model.normalize_projection = false;
  }
  s.train.validate();
  return s;
}

TrainSettings load_train_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_train_settings(text.str());
}

std::string config_text(const TrainSettings& s) {
  std::ostringstream out;
  out.precision(17);
  std::string excluded;
  for (std::size_t i = 0; i < s.excluded_columns.size(); ++i) {
    if (i) excluded += ", ";
    excluded += s.excluded_columns[i];
  }
  out << "# training\n"
      << "members = " << s.train.members << "\n"
      << "batch_size = " << s.train.batch_size << "\n"
      << "max_epochs = " << s.train.max_epochs << "\n"
      << "patience = " << s.train.patience << "\n"
      << "validation_fraction = " << s.train.validation_fraction << "\n"
      << "coarse_class_count = " << s.train.coarse_class_count << "\n"
      << "seed = " << s.train.seed << "\n"
      << "threads = " << s.train.threads << "\n"
      << "# loss\n"
      << "nll_weight = " << s.train.loss.nll_weight << "\n"
      << "aux_weight = " << s.train.loss.aux_weight << "\n"
      << "aux_kind = " << aux_kind_name(s.train.loss.aux_kind) << "\n"
      << "contrastive_temperature = " << s.train.loss.contrastive_temperature << "\n"
      << "# optimizer\n"
      << "learning_rate = " << s.train.optim.learning_rate << "\n"
      << "beta1 = " << s.train.optim.beta1 << "\n"
      << "beta2 = " << s.train.optim.beta2 << "\n"
      << "epsilon = " << s.train.optim.epsilon << "\n"
      << "lookahead_period = " << s.train.optim.lookahead_period << "\n"
      << "lookahead_step = " << s.train.optim.lookahead_step << "\n"
      << "grad_clip_norm = " << s.train.optim.grad_clip_norm << "\n"
      << "# model\n"
      << "hidden_dim = " << s.train.model.hidden_dim << "\n"
      << "trunk_layers = " << s.train.model.trunk_layers << "\n"
      << "upper_layers = " << s.train.model.upper_layers << "\n"
      << "projection_dim = " << s.train.model.projection_dim << "\n"
      << "alpha_dropout_rate = " << s.train.model.alpha_dropout_rate << "\n"
      << "# preprocessing\n"
      << "fill_value = " << s.train.preprocess.fill_value << "\n"
      << "max_bins = " << s.train.preprocess.max_bins << "\n"
      << "eigenvalue_tolerance = " << s.train.preprocess.eigenvalue_tolerance << "\n"
      << "# data\n"
      << "excluded_columns = " << excluded << "\n";
  return out.str();
}

std::string default_config_text() { return config_text(TrainSettings{}); }

}  // namespace snne
