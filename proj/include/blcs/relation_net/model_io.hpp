#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "blcs/relation_net/relation_net.hpp"

namespace blcs::rn {

inline constexpr const char* kModelFormat = "blcs-relation-net";
inline constexpr int kModelVersion = 1;

nlohmann::json model_to_json(const RnModel& m);
/// Throws InvalidInput on a wrong format tag, version or shape.
RnModel model_from_json(const nlohmann::json& j);

void save_model(const RnModel& m, const std::filesystem::path& path);
RnModel load_model(const std::filesystem::path& path);

}  // namespace blcs::rn
