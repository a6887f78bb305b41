#pragma once

#include <filesystem>
#include <string>

#include "a2pm/patterns.hpp"
#include "a2pm/pipeline.hpp"

namespace a2pm {

// JSON persistence for the artifacts that travel between CLI commands.
// Numbers round-trip exactly.

std::string schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const std::string& text);
void save_schema(const FeatureSchema& schema, const std::filesystem::path& path);
FeatureSchema load_schema(const std::filesystem::path& path);

std::string encoding_to_json(const EncodingMap& encoding);
EncodingMap encoding_from_json(const std::string& text);
void save_encoding(const EncodingMap& encoding, const std::filesystem::path& path);
EncodingMap load_encoding(const std::filesystem::path& path);

// Fitted A2PM state, schema included, so fitting and attacking can run as
// separate commands.
std::string state_to_json(const A2pmState& state);
A2pmState state_from_json(const std::string& text);
void save_state(const A2pmState& state, const std::filesystem::path& path);
A2pmState load_state(const std::filesystem::path& path);

}  // namespace a2pm
