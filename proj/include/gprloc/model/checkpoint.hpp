#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/io/keyval.hpp"
#include "gprloc/model/gprformer.hpp"

namespace gprloc {

// Checkpoint layout (little-endian host assumed):
//   magic line "gprloc-checkpoint v1\n"
//   u32 config-block length, then that many bytes of key=value text
//   u32 tensor count
//   per tensor: u32 name length, name, u32 rows, u32 cols,
//               rows*cols doubles, column-major
// Tensors appear in for_each_param order; names are part of the format.
inline constexpr const char* kCheckpointMagic = "gprloc-checkpoint v1\n";

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline std::uint32_t get_u32(std::istream& is, const std::string& what) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw InputError("checkpoint: truncated while reading " + what);
  return v;
}

}  // namespace detail

inline void save_checkpoint(const ModelParams& p, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write checkpoint '" + path + "'");
  os << kCheckpointMagic;

  std::map<std::string, std::string> kv;
  model_config_to_keyval(p.config, kv);
  std::ostringstream cfg;
  for (const auto& [k, v] : kv) cfg << k << " = " << v << "\n";
  const std::string cfg_text = cfg.str();
  detail::put_u32(os, static_cast<std::uint32_t>(cfg_text.size()));
  os << cfg_text;

  std::uint32_t count = 0;
  for_each_param(p.t, [&](const std::string&, const Eigen::MatrixXd&) { ++count; });
  detail::put_u32(os, count);
  for_each_param(p.t, [&](const std::string& name, const Eigen::MatrixXd& m) {
    detail::put_u32(os, static_cast<std::uint32_t>(name.size()));
    os << name;
    detail::put_u32(os, static_cast<std::uint32_t>(m.rows()));
    detail::put_u32(os, static_cast<std::uint32_t>(m.cols()));
    if (m.size() > 0)
      os.write(reinterpret_cast<const char*>(m.data()),
               static_cast<std::streamsize>(sizeof(double)) * m.size());
  });
  if (!os) throw InputError("checkpoint write failed for '" + path + "'");
}

inline ModelParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open checkpoint '" + path + "'");

  std::string magic(std::strlen(kCheckpointMagic), '\0');
  if (!is.read(magic.data(), static_cast<std::streamsize>(magic.size())) ||
      magic != kCheckpointMagic)
    throw InputError("'" + path + "' is not a gprloc checkpoint");

  const std::uint32_t cfg_len = detail::get_u32(is, "config length");
  std::string cfg_text(cfg_len, '\0');
  if (!is.read(cfg_text.data(), cfg_len)) throw InputError("checkpoint: truncated config block");
  std::istringstream cfg_stream(cfg_text);
  const KeyValDoc doc = KeyValDoc::parse(cfg_stream, path + " (embedded config)");
  ModelParams p;
  p.config = model_config_from_keyval(doc.root);
  detail::shape_params(p.config, p.t);

  const std::uint32_t count = detail::get_u32(is, "tensor count");
  std::uint32_t seen = 0;
  for_each_param(p.t, [&](const std::string& name, Eigen::MatrixXd& m) {
    const std::uint32_t name_len = detail::get_u32(is, "tensor name length");
    std::string stored(name_len, '\0');
    if (!is.read(stored.data(), name_len)) throw InputError("checkpoint: truncated tensor name");
    if (stored != name)
      throw InputError("checkpoint tensor order mismatch: expected '" + name + "', found '" +
                       stored + "'");
    const auto rows = detail::get_u32(is, "rows of " + name);
    const auto cols = detail::get_u32(is, "cols of " + name);
    if (rows != static_cast<std::uint32_t>(m.rows()) ||
        cols != static_cast<std::uint32_t>(m.cols()))
      throw InputError("checkpoint tensor '" + name + "' has shape " + std::to_string(rows) +
                       "x" + std::to_string(cols) + ", config implies " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (m.size() > 0 &&
        !is.read(reinterpret_cast<char*>(m.data()),
                 static_cast<std::streamsize>(sizeof(double)) * m.size()))
      throw InputError("checkpoint: truncated data for tensor '" + name + "'");
    ++seen;
  });
  if (seen != count)
    throw InputError("checkpoint declares " + std::to_string(count) + " tensors, format needs " +
                     std::to_string(seen));
  return p;
}

}  // namespace gprloc
