#include "sahg/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "sahg/error.hpp"

namespace sahg::model {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'A', 'H', 'G'};

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  void read(void* dst, std::size_t n) {
    if (pos_ + n > s_.size()) throw FormatError("checkpoint truncated at byte " + std::to_string(pos_));
    std::memcpy(dst, s_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    read(&v, 4);
    return v;
  }
  std::string str(std::size_t n) {
    std::string out(n, '\0');
    read(out.data(), n);
    return out;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

json dims_json(const ModelDims& d) {
  return json{{"input_dim", d.input_dim},
              {"hidden_dim", d.hidden_dim},
              {"projection_dim", d.projection_dim},
              {"num_prototypes", d.num_prototypes},
              {"warp_hidden_dim", d.warp_hidden_dim},
              {"temperature_init", d.temperature_init}};
}

ModelDims dims_from_json(const json& j) {
  ModelDims d;
  d.input_dim = j.at("input_dim").get<std::size_t>();
  d.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  d.projection_dim = j.at("projection_dim").get<std::size_t>();
  d.num_prototypes = j.at("num_prototypes").get<std::size_t>();
  d.warp_hidden_dim = j.at("warp_hidden_dim").get<std::size_t>();
  d.temperature_init = j.at("temperature_init").get<double>();
  return d;
}

}  // namespace

template <typename T>
std::string serialize_checkpoint(const SahgParams<T>& params, const json& metadata) {
  std::string out(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  const auto tensors = params.all();
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (T v : t.values()) {
      const float f = static_cast<float>(v);
      char b[4];
      std::memcpy(b, &f, 4);
      out.append(b, 4);
    }
  }
  json trailer = metadata.is_object() ? metadata : json::object();
  trailer["variant"] = std::string(to_string(params.variant));
  trailer["dims"] = dims_json(params.dims);
  const std::string text = trailer.dump();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  return out;
}

template <typename T>
SahgParams<T> deserialize_checkpoint(const std::string& bytes, json* metadata) {
  Reader in(bytes);
  if (in.str(4) != std::string(kMagic, 4)) throw FormatError("not a checkpoint (bad magic)");
  const auto version = in.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = in.u32();
  std::map<std::string, std::pair<ad::Shape, std::vector<float>>> stored;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name = in.str(in.u32());
    const auto rank = in.u32();
    if (rank > 2) throw FormatError("tensor " + name + " has rank " + std::to_string(rank));
    ad::Shape shape(rank);
    for (auto& d : shape) d = in.u32();
    std::vector<float> payload(ad::shape_numel(shape));
    in.read(payload.data(), payload.size() * 4);
    stored[name] = {std::move(shape), std::move(payload)};
  }
  json trailer;
  try {
    trailer = json::parse(in.str(in.u32()));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }
  if (!in.done()) throw FormatError("trailing bytes after checkpoint metadata");

  SahgParams<T> p;
  try {
    p = make_params<T>(dims_from_json(trailer.at("dims")), parse_variant(trailer.at("variant").get<std::string>()));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }
  const auto expected = p.all();
  if (expected.size() != stored.size()) {
    throw FormatError("checkpoint holds " + std::to_string(stored.size()) + " tensors, expected " +
                      std::to_string(expected.size()));
  }
  for (const auto& [name, t] : expected) {
    auto it = stored.find(name);
    if (it == stored.end()) throw FormatError("checkpoint is missing tensor " + name);
    if (it->second.first != t.shape()) {
      throw FormatError("tensor " + name + " has shape " + ad::shape_str(it->second.first) + ", expected " +
                        ad::shape_str(t.shape()));
    }
    auto& dst = t.storage()->value;
    const auto& src = it->second.second;
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = static_cast<T>(src[j]);
  }
  if (metadata != nullptr) *metadata = std::move(trailer);
  return p;
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const SahgParams<T>& params, const json& metadata) {
  const auto bytes = serialize_checkpoint(params, metadata);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing checkpoint " + path.string());
}

template <typename T>
SahgParams<T> load_checkpoint(const std::filesystem::path& path, json* metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint<T>(bytes, metadata);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

template std::string serialize_checkpoint<float>(const SahgParams<float>&, const json&);
template std::string serialize_checkpoint<double>(const SahgParams<double>&, const json&);
template SahgParams<float> deserialize_checkpoint<float>(const std::string&, json*);
template SahgParams<double> deserialize_checkpoint<double>(const std::string&, json*);
template void save_checkpoint<float>(const std::filesystem::path&, const SahgParams<float>&, const json&);
template void save_checkpoint<double>(const std::filesystem::path&, const SahgParams<double>&, const json&);
template SahgParams<float> load_checkpoint<float>(const std::filesystem::path&, json*);
template SahgParams<double> load_checkpoint<double>(const std::filesystem::path&, json*);

}  // namespace sahg::model
