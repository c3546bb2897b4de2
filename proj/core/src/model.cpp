#include "clustergen/model.hpp"

#include "clustergen/errors.hpp"

namespace clustergen {

using nlohmann::json;

Eigen::MatrixXd covariance_of(const Cluster& c) {
  const Eigen::MatrixXd scaled = c.axes * c.axis_lengths.cwiseAbs2().asDiagonal();
  Eigen::MatrixXd cov = scaled * c.axes.transpose();
  // Symmetrize away rounding so Cholesky sees an exactly symmetric matrix.
  return 0.5 * (cov + cov.transpose());
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j, std::string_view what) {
  if (!j.is_array()) throw Error(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

json model_to_json(const MixtureModel& m) {
  json clusters = json::array();
  for (const auto& c : m.clusters) {
    json axes = json::array();
    for (Eigen::Index r = 0; r < c.axes.rows(); ++r) axes.push_back(vector_to_json(c.axes.row(r).transpose()));
    json dist = {{"name", c.distribution.name()}, {"params", c.distribution.params}};
    clusters.push_back({{"center", vector_to_json(c.center)},
                        {"axes", std::move(axes)},
                        {"axis_lengths", vector_to_json(c.axis_lengths)},
                        {"distribution", std::move(dist)}});
  }
  return {{"archetype", m.archetype_name},
          {"dim", m.dim()},
          {"group_sizes", m.group_sizes},
          {"clusters", std::move(clusters)}};
}

MixtureModel model_from_json(const json& j) {
  try {
    MixtureModel m;
    m.archetype_name = j.at("archetype").get<std::string>();
    m.group_sizes = j.at("group_sizes").get<std::vector<int>>();
    for (const auto& cj : j.at("clusters")) {
      Cluster c;
      c.center = vector_from_json(cj.at("center"), "center");
      c.axis_lengths = vector_from_json(cj.at("axis_lengths"), "axis_lengths");
      const auto& rows = cj.at("axes");
      const auto p = c.center.size();
      if (static_cast<Eigen::Index>(rows.size()) != p || c.axis_lengths.size() != p)
        throw Error("cluster dimensions disagree");
      c.axes.resize(p, p);
      for (Eigen::Index r = 0; r < p; ++r) c.axes.row(r) = vector_from_json(rows[static_cast<std::size_t>(r)], "axes row").transpose();
      const auto& dj = cj.at("distribution");
      const auto family = family_from_name(dj.at("name").get<std::string>());
      if (!family) throw Error("unsupported distribution " + dj.at("name").dump());
      c.distribution = {*family, dj.at("params").get<std::vector<double>>()};
      m.clusters.push_back(std::move(c));
    }
    if (m.group_sizes.size() != m.clusters.size()) throw Error("group_sizes and clusters disagree");
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed mixture model JSON: ") + e.what());
  }
}

}  // namespace clustergen
