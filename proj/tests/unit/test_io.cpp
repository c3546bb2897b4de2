#include <bit>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "clustergen/errors.hpp"
#include "clustergen/io.hpp"

using namespace clustergen;
namespace fs = std::filesystem;

namespace {

Dataset random_dataset(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1e3);
  Dataset d;
  d.points.resize(n, dim);
  d.labels.resize(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < dim; ++c) d.points(r, c) = g(rng) * std::pow(10.0, (r + c) % 7 - 3);
    d.labels[r] = r % 5;
  }
  return d;
}

std::string error_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_dataset_csv(in);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, RoundTripIsBitExact) {
  Dataset d = random_dataset(50, 3, 1);
  d.points(0, 0) = std::numeric_limits<double>::denorm_min();
  d.points(1, 1) = -0.0;
  d.points(2, 2) = 0.1 + 0.2;
  std::ostringstream out;
  write_dataset_csv(out, d);
  std::istringstream in(out.str());
  const Dataset back = read_dataset_csv(in);
  ASSERT_EQ(back.size(), d.size());
  ASSERT_EQ(back.dim(), d.dim());
  for (int r = 0; r < d.size(); ++r)
    for (int c = 0; c < d.dim(); ++c) EXPECT_EQ(std::bit_cast<std::uint64_t>(back.points(r, c)),
                                                std::bit_cast<std::uint64_t>(d.points(r, c)));
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "x1,x2,x3,label");
}

TEST(Csv, LabelColumnOptional) {
  std::istringstream in("x1,x2\n1,2\n3,4\n");
  const Dataset d = read_dataset_csv(in);
  EXPECT_EQ(d.size(), 2);
  EXPECT_TRUE(d.labels.empty());
}

TEST(Csv, ErrorsNameTheLine) {
  EXPECT_NE(error_of("x1,x2,label\n1,2,0\n1,oops,0\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("x1,x2\n1,2\n1\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("").find("line 1"), std::string::npos);
}

TEST(Labels, OneRowPerPoint) {
  std::ostringstream out;
  write_labels_csv(out, {2, 0, 1});
  EXPECT_EQ(out.str(), "label\n2\n0\n1\n");
}

TEST(Svg, OneCirclePerPoint) {
  Dataset d = random_dataset(37, 2, 2);
  const std::string svg = render_scatter_svg(d);
  std::size_t circles = 0;
  for (auto p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 37u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("class=\"axis\""), std::string::npos);
}

TEST(Svg, EmptyDatasetHasAxesOnly) {
  Dataset d;
  d.points.resize(0, 2);
  const std::string svg = render_scatter_svg(d);
  EXPECT_EQ(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("class=\"axis\""), std::string::npos);
}

TEST(Svg, RejectsOtherDimensions) {
  EXPECT_THROW(render_scatter_svg(random_dataset(5, 10, 3)), Error);
}

TEST(Toml, SectionsValuesAndComments) {
  std::istringstream in(
      "# config\n[api]\nbase_url = \"http://x/#y\"  # trailing\nmax_attempts = 5\n\n[defaults]\ndim = 3\n"
      "flag = true\n");
  const auto kv = read_simple_toml(in);
  EXPECT_EQ(kv.at("api.base_url"), "http://x/#y");
  EXPECT_EQ(kv.at("api.max_attempts"), "5");
  EXPECT_EQ(kv.at("defaults.dim"), "3");
  EXPECT_EQ(kv.at("defaults.flag"), "true");
  std::istringstream bad("[api]\nnovalue\n");
  try {
    read_simple_toml(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemp) {
  const fs::path dir = fs::path(testing::TempDir()) / "clustergen_atomic";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path p = dir / "out.txt";
  atomic_write_file(p, "first");
  atomic_write_file(p, "second");
  EXPECT_EQ(read_file(p), "second");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1);
}

TEST(Manifest, ListsEntries) {
  RunManifest m;
  m.master_seed = 7;
  m.entries.push_back({"a", 0, 11, {"a_0.csv"}, false, false, "ok"});
  const auto j = manifest_to_json(m);
  EXPECT_EQ(j["datasets"].size(), 1u);
  EXPECT_EQ(j["datasets"][0]["files"][0], "a_0.csv");
  EXPECT_EQ(j["master_seed"], 7);
}

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
}
