#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gbid/moea.hpp"

namespace gbid {

using Json = nlohmann::json;

Json to_json(const TermSpec& term);
TermSpec term_from_json(const Json& j);

Json to_json(const PoolConfig& config);
PoolConfig pool_config_from_json(const Json& j);

/// {"config": {...}, "terms": [...]}; bit i of a genome is terms[i].
Json to_json(const TermPool& pool);
TermPool pool_from_json(const Json& j);

/// {"pool": {...}, "terms": [...], "coefficients": [...], "static_coefficients": [...]}.
/// Static coefficients appear only when the static map exists.
Json to_json(const ModelStructure& model);
/// Rebuilds a model inside the full generated pool of its config.
ModelStructure model_from_json(const Json& j);

Json to_json(const MoeaConfig& config);
MoeaConfig moea_config_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

/// 64-bit FNV-1a over bytes.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Hex FNV-1a hash of the compact, key-sorted dump.
std::string config_hash(const Json& j);

}  // namespace gbid
