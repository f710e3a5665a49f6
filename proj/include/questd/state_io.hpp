#pragma once

#include <string>
#include <string_view>

#include "questd/engine.hpp"
#include "questd/json_codec.hpp"

namespace questd {

inline constexpr int kStateSchemaVersion = 1;

/// Canonical JSON form of the full state (object keys sorted).
Json state_to_json(const EngineState& state);
/// Throws CorruptState on schema violations or when stored levels disagree with progress.
EngineState state_from_json(const Json& j);

/// Hex SHA-256 over the canonical serialization.
std::string digest(const EngineState& state);

/// Versioned state file: {"schema_version":1, "digest":..., "state":{...}}.
std::string save(const EngineState& state);
/// Throws CorruptState on parse failure, unknown version or digest mismatch.
EngineState load(std::string_view bytes);

/// Read model served by `status --json` and GET /state.
Json state_view(const EngineState& state);

/// Catalog as dumped by `achievements --json` and GET /achievements.
Json catalog_json();

Json to_json(const Notification& notification);
/// One terminal line, e.g. "[LEVEL-UP] The Tester → Silver (100 runs)".
std::string render_line(const Notification& notification);

}  // namespace questd
