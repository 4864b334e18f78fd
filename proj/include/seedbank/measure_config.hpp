#pragma once

#include <string>

#include <json.hpp>

#include "seedbank/measure.hpp"

namespace seedbank {

/// Parse `{"type": "atoms", "atoms": [[rate, weight], ...]}`,
/// `{"type": "gamma", "a": _, "b": _, "c": _}` or `{"type": "empty"}`.
/// Throws std::invalid_argument on malformed input.
RateMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const RateMeasure& m);

/// Accepts inline JSON text or, when `text` names an existing file, the
/// file's contents.
RateMeasure parse_measure(const std::string& text);

}  // namespace seedbank
