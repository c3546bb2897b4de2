#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "clustergen/archetype.hpp"
#include "clustergen/errors.hpp"

namespace clustergen {

using nlohmann::json;

namespace {

constexpr std::string_view kKeys[] = {
    "name",          "n_clusters",      "dim",          "n_samples",
    "aspect_ref",    "aspect_maxmin",   "radius_maxmin", "scale",
    "max_overlap",   "min_overlap",     "imbalance_ratio", "distributions",
    "distribution_proportions", "seed",
};

[[noreturn]] void bad_type(std::string_view key, std::string_view expected, const json& got) {
  throw ValidationError({std::string(key) + " must be " + std::string(expected) + " (got " +
                         got.dump() + ")"});
}

int as_int(std::string_view key, const json& v) {
  if (v.is_number_integer()) {
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      bad_type(key, "an integer in range", v);
    return static_cast<int>(x);
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && std::floor(x) == x && std::abs(x) < 2e9) return static_cast<int>(x);
  }
  bad_type(key, "an integer", v);
}

double as_double(std::string_view key, const json& v) {
  if (!v.is_number()) bad_type(key, "a number", v);
  return v.get<double>();
}

DistributionSpec parse_distribution(const json& v) {
  auto lookup = [](const std::string& name) {
    auto f = family_from_name(name);
    if (!f) throw ValidationError({"distributions: unsupported distribution \"" + name + "\""});
    return *f;
  };
  if (v.is_string()) return DistributionSpec::with_defaults(lookup(v.get<std::string>()));
  if (!v.is_object() || !v.contains("name") || !v["name"].is_string())
    bad_type("distributions entry", "a name or an object with a \"name\"", v);

  DistributionSpec spec = DistributionSpec::with_defaults(lookup(v["name"].get<std::string>()));
  const auto names = family_param_names(spec.family);
  for (const auto& [key, value] : v.items()) {
    if (key == "name") continue;
    const auto it = std::find(names.begin(), names.end(), key);
    if (it == names.end())
      throw ValidationError({"distributions: " + std::string(spec.name()) +
                             " has no parameter \"" + key + "\""});
    spec.params[static_cast<std::size_t>(it - names.begin())] = as_double(key, value);
  }
  return spec;
}

json distribution_to_json(const DistributionSpec& d) {
  if (d.has_default_params()) return std::string(d.name());
  json j = {{"name", d.name()}};
  const auto names = family_param_names(d.family);
  for (std::size_t i = 0; i < names.size() && i < d.params.size(); ++i)
    j[std::string(names[i])] = d.params[i];
  return j;
}

}  // namespace

json archetype_to_json(const Archetype& a) {
  json j;
  j["name"] = a.name;
  j["n_clusters"] = a.n_clusters;
  j["dim"] = a.dim;
  j["n_samples"] = a.n_samples;
  j["aspect_ref"] = a.aspect_ref;
  j["aspect_maxmin"] = a.aspect_maxmin;
  j["radius_maxmin"] = a.radius_maxmin;
  j["scale"] = a.scale;
  j["max_overlap"] = a.max_overlap;
  j["min_overlap"] = a.min_overlap;
  j["imbalance_ratio"] = a.imbalance_ratio;
  json dists = json::array();
  for (const auto& d : a.distributions) dists.push_back(distribution_to_json(d));
  j["distributions"] = std::move(dists);
  if (a.distribution_proportions) j["distribution_proportions"] = *a.distribution_proportions;
  if (a.seed) j["seed"] = *a.seed;
  return j;
}

Archetype archetype_from_json(const json& j, const Archetype& defaults,
                              std::vector<std::string>* applied_defaults) {
  if (!j.is_object()) bad_type("archetype", "a JSON object", j);
  std::vector<std::string> unknown;
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      unknown.push_back("unknown key \"" + key + "\"");
  }
  if (!unknown.empty()) throw ValidationError(std::move(unknown));

  Archetype a = defaults;
  auto missing = [&](std::string_view key) {
    if (j.contains(key)) return false;
    if (applied_defaults) applied_defaults->emplace_back(key);
    return true;
  };

  if (!missing("name")) {
    if (!j["name"].is_string()) bad_type("name", "a string", j["name"]);
    a.name = j["name"].get<std::string>();
  }
  if (!missing("n_clusters")) a.n_clusters = as_int("n_clusters", j["n_clusters"]);
  if (!missing("dim")) a.dim = as_int("dim", j["dim"]);
  if (missing("n_samples")) {
    a.n_samples = 100 * a.n_clusters;
  } else {
    a.n_samples = as_int("n_samples", j["n_samples"]);
  }
  if (!missing("aspect_ref")) a.aspect_ref = as_double("aspect_ref", j["aspect_ref"]);
  if (!missing("aspect_maxmin")) a.aspect_maxmin = as_double("aspect_maxmin", j["aspect_maxmin"]);
  if (!missing("radius_maxmin")) a.radius_maxmin = as_double("radius_maxmin", j["radius_maxmin"]);
  if (!missing("scale")) a.scale = as_double("scale", j["scale"]);
  if (!missing("max_overlap")) a.max_overlap = as_double("max_overlap", j["max_overlap"]);
  if (!missing("min_overlap")) a.min_overlap = as_double("min_overlap", j["min_overlap"]);
  if (!missing("imbalance_ratio"))
    a.imbalance_ratio = as_double("imbalance_ratio", j["imbalance_ratio"]);
  if (!missing("distributions")) {
    const auto& d = j["distributions"];
    if (!d.is_array()) bad_type("distributions", "a list", d);
    a.distributions.clear();
    for (const auto& entry : d) a.distributions.push_back(parse_distribution(entry));
  }
  if (!missing("distribution_proportions")) {
    const auto& p = j["distribution_proportions"];
    if (p.is_null()) {
      a.distribution_proportions.reset();
    } else {
      if (!p.is_array()) bad_type("distribution_proportions", "a list of numbers", p);
      std::vector<double> props;
      for (const auto& x : p) props.push_back(as_double("distribution_proportions", x));
      a.distribution_proportions = std::move(props);
    }
  }
  if (!missing("seed")) {
    const auto& s = j["seed"];
    if (s.is_null()) {
      a.seed.reset();
    } else {
      if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0))
        bad_type("seed", "a nonnegative integer", s);
      a.seed = s.get<std::uint64_t>();
    }
  }
  return a;
}

std::vector<Archetype> read_archetypes_jsonl(std::istream& in) {
  std::vector<Archetype> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Archetype defaults;
      defaults.name = "archetype_" + std::to_string(line_no);
      out.push_back(archetype_from_json(json::parse(line), defaults));
    } catch (const json::exception& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what(),
                            {"line " + std::to_string(line_no) + ": malformed JSON"});
    } catch (const ValidationError& e) {
      std::vector<std::string> v;
      for (const auto& msg : e.violations()) v.push_back("line " + std::to_string(line_no) + ": " + msg);
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what(), std::move(v));
    }
  }
  return out;
}

std::string archetype_to_jsonl(const std::vector<Archetype>& archetypes) {
  std::string out;
  for (const auto& a : archetypes) {
    out += archetype_to_json(a).dump();
    out += '\n';
  }
  return out;
}

}  // namespace clustergen
