#include "vasum/checkpoint.hpp"

#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "vasum/error.hpp"

namespace vasum {

namespace {
constexpr char kMagic[8] = {'V', 'A', 'S', 'U', 'M', 'C', 'K', 'P'};
using json = nlohmann::ordered_json;
}  // namespace

void save_checkpoint(const ModelParameters& params, const std::filesystem::path& path) {
  params.validate();
  json header;
  header["format"] = "vasum-checkpoint";
  header["version"] = 1;
  const auto& c = params.config;
  header["config"] = {{"input_dim", c.input_dim},   {"hidden_dim", c.hidden_dim},
                      {"scale", c.scale},           {"p_drop", c.p_drop},
                      {"attention", to_string(c.attention)}, {"ln_eps", c.ln_eps}};
  json tensors = json::array();
  const auto views = params.tensors();
  for (const auto& t : views)
    tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"dtype", "float32"}});
  header["tensors"] = std::move(tensors);
  const std::string text = header.dump();

  std::vector<unsigned char> bytes(kMagic, kMagic + 8);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>(len >> (8 * i)));
  bytes.insert(bytes.end(), text.begin(), text.end());
  for (const auto& t : views)
    for (double v : t.data) detail::append_f32(bytes, static_cast<float>(v));
  if (!detail::write_file(path, bytes)) throw Error("cannot write checkpoint " + path.string());
}

ModelParameters load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("missing checkpoint " + path.string());
  const auto bytes = detail::read_file(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw Error("not a checkpoint file: " + path.string());
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[8 + i]) << (8 * i);
  if (bytes.size() < 12 + static_cast<std::size_t>(len)) throw Error("truncated checkpoint header");

  json header;
  try {
    header = json::parse(bytes.begin() + 12, bytes.begin() + 12 + len);
  } catch (const json::exception& e) {
    throw Error(std::string("corrupt checkpoint header: ") + e.what());
  }
  ModelConfig c;
  const auto& jc = header.at("config");
  c.input_dim = jc.at("input_dim").get<std::int64_t>();
  c.hidden_dim = jc.at("hidden_dim").get<std::int64_t>();
  c.scale = jc.at("scale").get<double>();
  c.p_drop = jc.at("p_drop").get<double>();
  c.attention = parse_attention(jc.at("attention").get<std::string>());
  c.ln_eps = jc.value("ln_eps", 1e-5);

  ModelParameters params = ModelParameters::zeros(c);
  auto views = params.tensors();
  const auto& jt = header.at("tensors");
  if (jt.size() != views.size()) throw Error("checkpoint tensor count does not match its config");
  std::size_t offset = 12 + len;
  for (std::size_t k = 0; k < views.size(); ++k) {
    if (jt[k].at("name").get<std::string>() != views[k].name ||
        jt[k].at("shape").get<std::vector<std::int64_t>>() != views[k].shape)
      throw Error("checkpoint tensor " + std::to_string(k) + " has unexpected name or shape");
    if (jt[k].value("dtype", "float32") != "float32") throw Error("unsupported checkpoint dtype");
    const std::size_t need = views[k].data.size() * 4;
    if (bytes.size() < offset + need) throw Error("truncated checkpoint payload");
    for (std::size_t i = 0; i < views[k].data.size(); ++i)
      views[k].data[i] = detail::load_f32_le(bytes.data() + offset + 4 * i);
    offset += need;
  }
  if (offset != bytes.size()) throw Error("trailing bytes after checkpoint payload");
  params.validate();
  return params;
}

}  // namespace vasum
