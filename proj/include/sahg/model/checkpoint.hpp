#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "sahg/model/params.hpp"

namespace sahg::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout (little endian): "SAHG", u32 version, u32 tensor count, then
/// per tensor u32 name length, name bytes, u32 rank, u32 dims[rank] and the
/// f32 payload. A u32 length and a JSON document follow the tensors; the JSON
/// carries the variant, model dimensions and any caller metadata.
template <typename T>
std::string serialize_checkpoint(const SahgParams<T>& params, const nlohmann::json& metadata = {});

template <typename T>
SahgParams<T> deserialize_checkpoint(const std::string& bytes, nlohmann::json* metadata = nullptr);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const SahgParams<T>& params,
                     const nlohmann::json& metadata = {});

template <typename T>
SahgParams<T> load_checkpoint(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);

}  // namespace sahg::model
