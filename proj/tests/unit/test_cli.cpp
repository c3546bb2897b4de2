#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "clustergen/archetype.hpp"
#include "clustergen/io.hpp"
#include "listings.hpp"

using namespace clustergen;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / ("clustergen_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string listings_jsonl(const fs::path& dir) {
  std::vector<Archetype> all;
  for (const auto& l : listings::all()) all.push_back(l.archetype);
  return write_text(dir / "listings.jsonl", archetype_to_jsonl(all));
}

std::set<std::string> files_in(const fs::path& dir) {
  std::set<std::string> s;
  for (const auto& e : fs::directory_iterator(dir)) s.insert(e.path().filename().string());
  return s;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string fixture_path(const std::string& name) { return std::string(CLUSTERGEN_FIXTURE_DIR) + "/" + name; }

}  // namespace

TEST(CliGenerate, BenchmarkArchetypesGiveSixtyFilesAndCompleteManifest) {
  const fs::path dir = fresh_dir("sixty");
  const std::string jsonl = listings_jsonl(dir);
  const fs::path out = dir / "out";
  const auto r = run({"generate", "--archetypes", jsonl, "-n", "10", "--seed", "42", "-o", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto files = files_in(out);
  ASSERT_EQ(files.erase("manifest.json"), 1u);
  EXPECT_EQ(files.size(), 60u);

  const auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
  std::multiset<std::string> listed;
  std::set<std::pair<std::string, std::uint64_t>> traced;
  for (const auto& e : manifest["datasets"]) {
    for (const auto& f : e["files"]) listed.insert(f.get<std::string>());
    traced.insert({e["archetype"].get<std::string>(), e["seed"].get<std::uint64_t>()});
  }
  EXPECT_EQ(listed.size(), files.size());
  EXPECT_EQ(std::set<std::string>(listed.begin(), listed.end()), files);
  EXPECT_EQ(traced.size(), 60u);
}

TEST(CliGenerate, SameInvocationIsByteIdentical) {
  const fs::path dir = fresh_dir("repeat");
  const std::string arch =
      R"({"name": "small", "n_clusters": 4, "dim": 3, "n_samples": 200, "distributions": ["normal", "gamma"]})";
  std::vector<std::string> outs;
  for (const char* sub : {"a", "b"}) {
    const fs::path out = dir / sub;
    const auto r = run({"generate", "--archetype", arch, "-n", "3", "--seed", "5", "-o", out.string(), "--distort",
                        "--wrap", "--labels-file", "--save-models", "-j", sub[0] == 'a' ? "1" : "3"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  auto a = files_in(dir / "a"), b = files_in(dir / "b");
  EXPECT_EQ(a, b);
  a.erase("manifest.json");
  EXPECT_EQ(a.size(), 9u);
  for (const auto& f : a) EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;

  const auto d = run({"generate", "--archetype", arch, "-n", "1", "--seed", "6", "-o", (dir / "c").string()});
  ASSERT_EQ(d.code, 0);
  EXPECT_NE(read_file(dir / "c" / "small_0.csv"), read_file(dir / "a" / "small_0.csv"));
}

TEST(CliGenerate, MalformedJsonlNamesTheLine) {
  const fs::path dir = fresh_dir("malformed");
  const std::string jsonl = write_text(dir / "bad.jsonl", "{\"name\": \"ok\", \"n_clusters\": 3}\n\n{\"name\": oops}\n");
  const auto r = run({"generate", "--archetypes", jsonl, "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(CliGenerate, InvalidArchetypeIsValidationFailure) {
  const fs::path dir = fresh_dir("invalid");
  const auto r = run({"generate", "--archetype", R"({"n_clusters": 3, "max_overlap": 0.01, "min_overlap": 0.5})",
                      "-o", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("overlap"), std::string::npos) << r.err;
}

TEST(CliValidate, ReportedMaxWithinBound) {
  const auto r = run({"validate-overlap", "--archetype",
                      R"({"name": "v", "n_clusters": 6, "dim": 2, "max_overlap": 0.05, "min_overlap": 0.001})",
                      "--seed", "3", "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 1u + 15u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"i", "j", "q_lda", "alpha_lda", "alpha_c2c", "alpha_exact"}));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_LE(std::stod(rows[k][3]), 0.05 + 1e-9);
    ASSERT_EQ(rows[k].size(), 6u);
    EXPECT_FALSE(rows[k][5].empty());
    // The exact search optimizes over every axis, the LDA axis included.
    EXPECT_LE(std::stod(rows[k][5]), std::stod(rows[k][3]) + 1e-12);
  }
  EXPECT_NE(r.err.find("max pairwise alpha_lda"), std::string::npos);
}

TEST(CliValidate, SingleClusterModelHasEmptyReport) {
  const auto r = run({"validate-overlap", "--archetype", R"({"name": "one", "n_clusters": 1})"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).size(), 1u);
  EXPECT_NE(r.err.find("single-cluster"), std::string::npos);
}

TEST(CliValidate, SavedModelMatchesArchetypeRoute) {
  const fs::path dir = fresh_dir("model");
  const std::string arch = R"({"name": "m", "n_clusters": 3, "dim": 2})";
  ASSERT_EQ(run({"generate", "--archetype", arch, "-n", "1", "--seed", "9", "--save-models", "-o", dir.string()}).code, 0);
  const auto from_model = run({"validate-overlap", "--model", (dir / "m_0_model.json").string()});
  const auto from_arch = run({"validate-overlap", "--archetype", arch, "--seed", "9"});
  ASSERT_EQ(from_model.code, 0) << from_model.err;
  EXPECT_EQ(from_model.out, from_arch.out);
}

TEST(CliNl, DryRunPrintsPrompts) {
  const auto r = run({"nl", "five oblong clusters", "--dry-run"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("five oblong clusters"), std::string::npos);
}

TEST(CliNl, EmptyDescriptionIsNlFailure) {
  const auto r = run({"nl", "  ", "--dry-run"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliNl, FixtureReplayGivesListingJson) {
  const auto l = listings::all()[0];
  const auto r = run({"nl", l.description, "--fixtures", fixture_path("nl_recorded.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(archetype_from_json(nlohmann::json::parse(r.out)), l.archetype);
}

TEST(CliNl, ErrorsSurfaceRawText) {
  const auto r = run({"nl", "describe a feeling", "--fixtures", fixture_path("nl_recorded.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("Sorry, I can't."), std::string::npos) << r.err;
}

TEST(CliNl, MissingApiKeyIsNlFailure) {
  const fs::path dir = fresh_dir("nlcfg");
  const std::string cfg = write_text(dir / "c.toml", "[api]\napi_key_env = \"CLUSTERGEN_SURELY_UNSET\"\n");
  const auto r = run({"nl", "three clusters", "--config", cfg});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("CLUSTERGEN_SURELY_UNSET"), std::string::npos) << r.err;
}

TEST(CliPlot, TwoDimensionalOnly) {
  const fs::path dir = fresh_dir("plot");
  ASSERT_EQ(run({"generate", "--archetype", R"({"name": "p2", "n_clusters": 3, "dim": 2, "n_samples": 90})", "-n",
                 "1", "-o", dir.string()}).code, 0);
  const auto ok = run({"plot", (dir / "p2_0.csv").string()});
  ASSERT_EQ(ok.code, 0) << ok.err;
  std::size_t circles = 0;
  for (auto p = ok.out.find("<circle"); p != std::string::npos; p = ok.out.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 90u);

  ASSERT_EQ(run({"generate", "--archetype", R"({"name": "p10", "n_clusters": 3, "dim": 10, "n_samples": 30})", "-n",
                 "1", "-o", dir.string()}).code, 0);
  const auto bad = run({"plot", (dir / "p10_0.csv").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("2"), std::string::npos);
}

TEST(CliFilters, DistortKeepsShapeAndWrapAddsColumn) {
  const fs::path dir = fresh_dir("filters");
  ASSERT_EQ(run({"generate", "--archetype", R"({"name": "f", "n_clusters": 3, "dim": 3, "n_samples": 60})", "-n",
                 "1", "-o", dir.string()}).code, 0);
  const std::string in = (dir / "f_0.csv").string();
  const auto d = run({"distort", in, "--seed", "1"});
  ASSERT_EQ(d.code, 0) << d.err;
  std::istringstream ds(d.out);
  const Dataset dd = read_dataset_csv(ds);
  EXPECT_EQ(dd.size(), 60);
  EXPECT_EQ(dd.dim(), 3);
  const auto w = run({"wrap", in});
  ASSERT_EQ(w.code, 0) << w.err;
  std::istringstream ws(w.out);
  const Dataset wd = read_dataset_csv(ws);
  EXPECT_EQ(wd.dim(), 4);
  for (int r = 0; r < wd.size(); ++r) EXPECT_NEAR(wd.points.row(r).norm(), 1.0, 1e-12);
}

TEST(CliHyperparams, VariantsRespectBounds) {
  const auto r = run({"hyperparams", "--archetype", R"({"name": "h", "n_clusters": 6, "dim": 5})", "-n", "20",
                      "--min-clusters", "4", "--max-clusters", "8", "--min-dim", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto variants = read_archetypes_jsonl(in);
  ASSERT_EQ(variants.size(), 20u);
  for (const auto& v : variants) {
    EXPECT_GE(v.n_clusters, 4);
    EXPECT_LE(v.n_clusters, 8);
    EXPECT_GE(v.dim, 3);
  }
}

TEST(CliBench, WritesMetricRows) {
  const auto r = run({"bench", "--archetype", R"({"name": "b", "n_clusters": 3, "dim": 2, "n_samples": 150})", "-n",
                      "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "archetype");
}

TEST(CliArgs, UnknownSubcommandFails) {
  EXPECT_NE(run({"frobnicate"}).code, 0);
}
