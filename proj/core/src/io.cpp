#include "clustergen/io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "clustergen/errors.hpp"

namespace clustergen {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
  for (Eigen::Index c = 0; c < d.dim(); ++c) out << 'x' << (c + 1) << ',';
  out << "label\n";
  for (Eigen::Index r = 0; r < d.size(); ++r) {
    for (Eigen::Index c = 0; c < d.dim(); ++c) out << format_double(d.points(r, c)) << ',';
    out << (static_cast<std::size_t>(r) < d.labels.size() ? d.labels[r] : -1) << '\n';
  }
}

void write_labels_csv(std::ostream& out, const std::vector<int>& labels) {
  out << "label\n";
  for (int l : labels) out << l << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("line 1: dataset CSV is empty");
  auto header = split_csv(strip(line));
  bool has_label = !header.empty() && strip(header.back()) == "label";
  const std::size_t dim = header.size() - (has_label ? 1 : 0);
  for (std::size_t c = 0; c < dim; ++c)
    if (strip(header[c]) != "x" + std::to_string(c + 1))
      throw Error("line 1: expected column x" + std::to_string(c + 1) + ", got \"" + header[c] + "\"");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                  " fields, got " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < dim; ++c) {
      // strtod rather than stod: subnormals report ERANGE but parse exactly.
      const std::string cell = strip(cells[c]);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      const auto used = static_cast<std::size_t>(end - cell.c_str());
      if (cell.empty() || used != cell.size() || !std::isfinite(v))
        throw Error("line " + std::to_string(line_no) + ": \"" + cells[c] + "\" is not a number");
      values.push_back(v);
    }
    if (has_label) {
      try {
        std::size_t used = 0;
        labels.push_back(std::stoi(cells.back(), &used));
        if (used != strip(cells.back()).size()) throw std::invalid_argument("label");
      } catch (const std::exception&) {
        throw Error("line " + std::to_string(line_no) + ": \"" + cells.back() + "\" is not an integer label");
      }
    }
  }
  Dataset d;
  const auto n = static_cast<Eigen::Index>(dim ? values.size() / dim : 0);
  d.points = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(dim));
  d.labels = std::move(labels);
  return d;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  static thread_local std::mt19937_64 salt{std::random_device{}()};
  const auto tmp = path.parent_path() /
                   ("." + path.filename().string() + ".tmp" + std::to_string(salt() % 1000000007ULL));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  j["master_seed"] = m.master_seed;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["archetypes"] = m.archetypes;
  auto& entries = j["datasets"] = nlohmann::json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"archetype", e.archetype},
                       {"index", e.index},
                       {"seed", e.seed},
                       {"files", e.files},
                       {"distorted", e.distorted},
                       {"wrapped", e.wrapped},
                       {"status", e.status}});
  }
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string render_scatter_svg(const Dataset& d, int width, int height) {
  if (d.size() > 0 && d.dim() != 2)
    throw Error("plot supports 2D datasets only (got dim " + std::to_string(d.dim()) +
                "); reduce the dimensionality first");
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                             "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr int kMargin = 40;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const int x0 = kMargin, y0 = height - kMargin, x1 = width - kMargin, y1 = kMargin;
  s << "<line class=\"axis\" x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
    << "\" stroke=\"black\"/>\n";
  s << "<line class=\"axis\" x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
    << "\" stroke=\"black\"/>\n";
  if (d.size() > 0) {
    const Eigen::RowVectorXd lo = d.points.colwise().minCoeff();
    const Eigen::RowVectorXd hi = d.points.colwise().maxCoeff();
    auto span = [](double a, double b) { return b > a ? b - a : 1.0; };
    const double sx = (x1 - x0) / span(lo[0], hi[0]);
    const double sy = (y0 - y1) / span(lo[1], hi[1]);
    char buf[160];
    for (Eigen::Index r = 0; r < d.size(); ++r) {
      const int label = static_cast<std::size_t>(r) < d.labels.size() ? d.labels[r] : 0;
      const char* color = kPalette[static_cast<std::size_t>(std::abs(label)) % std::size(kPalette)];
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"%s\" fill-opacity=\"0.7\"/>\n",
                    x0 + (d.points(r, 0) - lo[0]) * sx, y0 - (d.points(r, 1) - lo[1]) * sy, color);
      s << buf;
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::map<std::string, std::string> read_simple_toml(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside quoted strings.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error("config line " + std::to_string(line_no) + ": unterminated section");
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (key.empty()) throw Error("config line " + std::to_string(line_no) + ": empty key");
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw Error("config line " + std::to_string(line_no) + ": unterminated string");
      value = value.substr(1, value.size() - 2);
    }
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

}  // namespace clustergen
