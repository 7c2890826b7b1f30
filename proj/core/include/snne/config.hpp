#ifndef SNNE_CONFIG_HPP
#define SNNE_CONFIG_HPP

#include <string>
#include <vector>

#include "snne/ensemble.hpp"

namespace snne {

// Training settings as read from a plain-text config file: `key = value`
// lines, `#` starts a comment, blank lines ignored, unknown keys rejected.
struct TrainSettings {
  TrainConfig train;
  std::vector<std::string> excluded_columns;  // comma-separated in the file
};

// With aux_kind = crossentropy the projection head carries class logits:
// projection_dim is forced to coarse_class_count and row normalization is
// turned off, whatever the file says.
TrainSettings parse_train_settings(const std::string& text);
TrainSettings load_train_settings(const std::string& path);

// Settings rendered back into config-file syntax, one line per accepted key.
std::string config_text(const TrainSettings& s);

// Every accepted key with its default.
std::string default_config_text();

}  // namespace snne

#endif  // SNNE_CONFIG_HPP
