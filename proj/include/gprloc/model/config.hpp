#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "gprloc/core/error.hpp"
#include "gprloc/io/keyval.hpp"

namespace gprloc {

enum class Pooling { kDualAttention, kPostOnly };

inline std::string to_string(Pooling p) {
  return p == Pooling::kDualAttention ? "dual_attention" : "post_only";
}

inline Pooling parse_pooling(const std::string& s) {
  if (s == "dual_attention") return Pooling::kDualAttention;
  if (s == "post_only") return Pooling::kPostOnly;
  throw ConfigError("unknown pooling '" + s + "' (dual_attention, post_only)");
}

struct ModelConfig {
  int input_dim = 200;   // samples per trace
  int token_dim = 256;
  int window_k = 10;     // traces per input window
  int layers = 6;
  int heads = 4;
  double ffn_ratio = 3.0;
  double dropout_p = 0.1;
  double alpha_init = 0.5;
  bool alpha_frozen = false;  // ablation switch: keep the blend fixed
  bool use_encoder = true;    // ablation switch: false feeds raw traces as tokens
  Pooling pooling = Pooling::kDualAttention;
  int head_hidden = 128;
  std::uint64_t seed = 1;

  int ffn_dim() const { return static_cast<int>(static_cast<double>(token_dim) * ffn_ratio); }

  void validate() const {
    if (input_dim < 1 || token_dim < 1 || window_k < 1 || layers < 1 || head_hidden < 1)
      throw ConfigError("model dimensions must be positive");
    if (heads < 1 || token_dim % heads != 0)
      throw ConfigError("token_dim must be divisible by heads");
    if (!use_encoder && token_dim != input_dim)
      throw ConfigError("without the linear encoder, token_dim must equal input_dim");
    if (ffn_ratio <= 0.0 || ffn_dim() < 1) throw ConfigError("ffn_ratio must be positive");
    if (dropout_p < 0.0 || dropout_p >= 1.0) throw ConfigError("dropout_p must be in [0, 1)");
    if (alpha_init < 0.0 || alpha_init > 1.0) throw ConfigError("alpha_init must be in [0, 1]");
  }
};

struct TrainConfig {
  int batch_size = 128;
  int epochs = 60;
  double lr_start = 1e-3;  // decayed linearly to lr_end across epochs
  double lr_end = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (lr_start <= 0.0 || lr_end <= 0.0) throw ConfigError("learning rates must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw ConfigError("adam betas must be in [0, 1)");
    if (adam_eps <= 0.0) throw ConfigError("adam_eps must be positive");
  }
};

inline ModelConfig model_config_from_keyval(const std::map<std::string, std::string>& m) {
  ModelConfig c;
  c.input_dim = kv_get(m, "input_dim", c.input_dim);
  c.token_dim = kv_get(m, "token_dim", c.token_dim);
  c.window_k = kv_get(m, "window_k", c.window_k);
  c.layers = kv_get(m, "layers", c.layers);
  c.heads = kv_get(m, "heads", c.heads);
  c.ffn_ratio = kv_get(m, "ffn_ratio", c.ffn_ratio);
  c.dropout_p = kv_get(m, "dropout_p", c.dropout_p);
  c.alpha_init = kv_get(m, "alpha_init", c.alpha_init);
  c.alpha_frozen = kv_get(m, "alpha_frozen", c.alpha_frozen);
  c.use_encoder = kv_get(m, "use_encoder", c.use_encoder);
  if (kv_has(m, "pooling")) c.pooling = parse_pooling(m.at("pooling"));
  c.head_hidden = kv_get(m, "head_hidden", c.head_hidden);
  c.seed = static_cast<std::uint64_t>(kv_get(m, "seed", static_cast<std::int64_t>(c.seed)));
  c.validate();
  return c;
}

inline void model_config_to_keyval(const ModelConfig& c, std::map<std::string, std::string>& m) {
  m["input_dim"] = format_int(c.input_dim);
  m["token_dim"] = format_int(c.token_dim);
  m["window_k"] = format_int(c.window_k);
  m["layers"] = format_int(c.layers);
  m["heads"] = format_int(c.heads);
  m["ffn_ratio"] = format_double(c.ffn_ratio);
  m["dropout_p"] = format_double(c.dropout_p);
  m["alpha_init"] = format_double(c.alpha_init);
  m["alpha_frozen"] = c.alpha_frozen ? "true" : "false";
  m["use_encoder"] = c.use_encoder ? "true" : "false";
  m["pooling"] = to_string(c.pooling);
  m["head_hidden"] = format_int(c.head_hidden);
  m["seed"] = format_int(static_cast<std::int64_t>(c.seed));
}

inline TrainConfig train_config_from_keyval(const std::map<std::string, std::string>& m) {
  TrainConfig c;
  c.batch_size = kv_get(m, "batch_size", c.batch_size);
  c.epochs = kv_get(m, "epochs", c.epochs);
  c.lr_start = kv_get(m, "lr_start", c.lr_start);
  c.lr_end = kv_get(m, "lr_end", c.lr_end);
  c.beta1 = kv_get(m, "beta1", c.beta1);
  c.beta2 = kv_get(m, "beta2", c.beta2);
  c.adam_eps = kv_get(m, "adam_eps", c.adam_eps);
  c.validate();
  return c;
}

}  // namespace gprloc
