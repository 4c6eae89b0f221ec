#pragma once

#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/io/keyval.hpp"

namespace gprloc {

enum class ThresholdRule { soft, hard };

enum class FilterStage { background, dewow, sec, wavelet };

inline const char* to_string(FilterStage s) {
  switch (s) {
    case FilterStage::background: return "background";
    case FilterStage::dewow: return "dewow";
    case FilterStage::sec: return "sec";
    case FilterStage::wavelet: return "wavelet";
  }
  return "?";
}

struct FilterConfig {
  double anomaly_limit = 50.0;  // mV, applied before stacking
  int stack_size = 3;

  // Stage order is configurable so individual stages can be reordered or
  // dropped when studying their contribution.
  std::vector<FilterStage> order = {FilterStage::background, FilterStage::dewow,
                                    FilterStage::sec, FilterStage::wavelet};

  int dewow_degree = 3;

  double sec_a = 0.015;
  double sec_b = 0.0;
  int sec_threshold = 100;  // gain clamps at this sample index

  std::string wavelet = "db6";
  int wavelet_levels = 4;
  ThresholdRule wavelet_threshold_rule = ThresholdRule::soft;
  // Scales the universal threshold; 0 turns shrinkage off, which makes the
  // wavelet stage a pure round-trip.
  double wavelet_threshold_scale = 1.0;

  void validate() const {
    if (anomaly_limit <= 0) throw ConfigError("anomaly_limit must be positive");
    if (stack_size < 1) throw ConfigError("stack_size must be >= 1");
    if (dewow_degree < 0) throw ConfigError("dewow_degree must be >= 0");
    if (sec_threshold < 0) throw ConfigError("sec_threshold must be >= 0");
    if (wavelet_levels < 1) throw ConfigError("wavelet_levels must be >= 1");
    if (wavelet_threshold_scale < 0) throw ConfigError("wavelet_threshold_scale must be >= 0");
  }
};

inline FilterStage parse_filter_stage(const std::string& s) {
  if (s == "background") return FilterStage::background;
  if (s == "dewow") return FilterStage::dewow;
  if (s == "sec") return FilterStage::sec;
  if (s == "wavelet") return FilterStage::wavelet;
  throw ConfigError("unknown filter stage '" + s + "'");
}

inline FilterConfig filter_config_from_keyval(const std::map<std::string, std::string>& m) {
  FilterConfig c;
  c.anomaly_limit = kv_get(m, "anomaly_limit", c.anomaly_limit);
  c.stack_size = kv_get(m, "stack_size", c.stack_size);
  c.dewow_degree = kv_get(m, "dewow_degree", c.dewow_degree);
  c.sec_a = kv_get(m, "sec_a", c.sec_a);
  c.sec_b = kv_get(m, "sec_b", c.sec_b);
  c.sec_threshold = kv_get(m, "sec_threshold", c.sec_threshold);
  c.wavelet = kv_get(m, "wavelet", c.wavelet);
  c.wavelet_levels = kv_get(m, "wavelet_levels", c.wavelet_levels);
  c.wavelet_threshold_scale = kv_get(m, "wavelet_threshold_scale", c.wavelet_threshold_scale);
  std::string rule = kv_get(m, "wavelet_threshold_rule", std::string("soft"));
  if (rule == "soft")
    c.wavelet_threshold_rule = ThresholdRule::soft;
  else if (rule == "hard")
    c.wavelet_threshold_rule = ThresholdRule::hard;
  else
    throw ConfigError("wavelet_threshold_rule must be 'soft' or 'hard'");
  if (kv_has(m, "filter_order")) {
    c.order.clear();
    std::istringstream ss(m.at("filter_order"));
    std::string tok;
    while (ss >> tok) c.order.push_back(parse_filter_stage(tok));
  }
  c.validate();
  return c;
}

inline FilterConfig load_filter_config(const std::string& path) {
  return filter_config_from_keyval(KeyValDoc::load(path).root);
}

inline KeyValDoc filter_config_to_keyval(const FilterConfig& c) {
  KeyValDoc doc;
  doc.root["anomaly_limit"] = format_double(c.anomaly_limit);
  doc.root["stack_size"] = format_int(c.stack_size);
  doc.root["dewow_degree"] = format_int(c.dewow_degree);
  doc.root["sec_a"] = format_double(c.sec_a);
  doc.root["sec_b"] = format_double(c.sec_b);
  doc.root["sec_threshold"] = format_int(c.sec_threshold);
  doc.root["wavelet"] = c.wavelet;
  doc.root["wavelet_levels"] = format_int(c.wavelet_levels);
  doc.root["wavelet_threshold_rule"] =
      c.wavelet_threshold_rule == ThresholdRule::soft ? "soft" : "hard";
  doc.root["wavelet_threshold_scale"] = format_double(c.wavelet_threshold_scale);
  std::string order;
  for (std::size_t i = 0; i < c.order.size(); ++i) {
    if (i) order += ' ';
    order += to_string(c.order[i]);
  }
  doc.root["filter_order"] = order;
  return doc;
}

}  // namespace gprloc
