#pragma once

#include <string>

#include <json.hpp>

#include "tbrain/engine.hpp"

namespace tbrain {

inline constexpr int kSnapshotVersion = 1;

/// JSON container; every floating-point array is stored as the hex digits of
/// its IEEE-754 bit patterns so that numbers round-trip exactly.
nlohmann::json snapshot_to_json(const Engine& engine);
/// Throws SnapshotError on a version mismatch or a malformed payload.
Engine snapshot_from_json(const nlohmann::json& j);

std::string snapshot_text(const Engine& engine);
void save_snapshot(const Engine& engine, const std::string& path);
/// Throws IoError when the file cannot be read, SnapshotError when it does
/// not hold a valid snapshot.
Engine load_snapshot(const std::string& path);

/// Hex encoding of doubles, 16 digits per value.
std::string encode_doubles(const double* data, std::size_t count);
std::vector<double> decode_doubles(const std::string& text);

}  // namespace tbrain
