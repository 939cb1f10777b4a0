#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsflab/arrival.hpp"
#include "lsflab/metrics.hpp"
#include "lsflab/shapes.hpp"
#include "lsflab/singular.hpp"
#include "lsflab/stability.hpp"

namespace lsflab {

using Json = nlohmann::ordered_json;

/// Schema version stamped into every JSON artifact.
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kLsf1Version = 1;

Json to_json(const Vec3& v);
Json to_json(const ShapeSpec& s);
ShapeSpec shape_from_json(const Json& j);
Json to_json(const SolveConfig& c);
Json to_json(const PerturbationSpec& p);
Json to_json(const SingularThresholds& t);
Json to_json(const CriticalPoint& p);
/// geometry, type, time, positions, per-endpoint Hessian eigenvalues, probes.
Json to_json(const SingularComponent& c);
Json components_json(const std::vector<SingularComponent>& comps);
Json to_json(const MetricsReport& m);
Json to_json(const StabilityRow& r);
Json to_json(const StabilityReport& r);

/// One line per amplitude: amplitude, gaps, containment, type match.
std::string stability_csv(const StabilityReport& r);

/// Pretty-printed with a trailing newline. Non-finite numbers become null.
void write_json(const std::filesystem::path& path, const Json& j);
/// Throws ConfigError if the file is missing or unparsable.
Json read_json(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lsflab
