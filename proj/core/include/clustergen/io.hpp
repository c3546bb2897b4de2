#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clustergen/sampling.hpp"

namespace clustergen {

/// Shortest form that prints 17 significant digits ("%.17g").
std::string format_double(double v);

/// Header x1..x{dim},label; one row per point.
void write_dataset_csv(std::ostream& out, const Dataset& d);

/// Header "label"; one row per point.
void write_labels_csv(std::ostream& out, const std::vector<int>& labels);

/// Reads a CSV written by write_dataset_csv. A trailing "label" column is
/// optional. Throws Error with the 1-based line number on malformed input.
Dataset read_dataset_csv(std::istream& in);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string archetype;
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> files;  ///< relative to the output directory
  bool distorted = false;
  bool wrapped = false;
  std::string status = "ok";  ///< "ok" or the failure message
};

/// Record of one generate run: every emitted file traces back to
/// (archetype, seed).
struct RunManifest {
  std::string tool_version;
  std::uint64_t master_seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<nlohmann::json> archetypes;
  std::vector<ManifestEntry> entries;
};

nlohmann::json manifest_to_json(const RunManifest& m);

/// ISO-8601 UTC timestamp of now.
std::string utc_timestamp();

/// 2D scatter plot, one circle per point, colors by label from a fixed
/// palette. Throws Error for dim != 2.
std::string render_scatter_svg(const Dataset& d, int width = 640, int height = 640);

/// Flat key/value reader for the small TOML subset used in config files:
/// [section] headers, `key = "string" | number | true/false`, # comments.
/// Keys inside a section are returned as "section.key".
std::map<std::string, std::string> read_simple_toml(std::istream& in);

}  // namespace clustergen
