#include "cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "clustergen/archetype.hpp"
#include "clustergen/errors.hpp"
#include "clustergen/io.hpp"
#include "clustergen/metrics.hpp"
#include "clustergen/mixture.hpp"
#include "clustergen/nl.hpp"
#include "clustergen/overlap.hpp"
#include "clustergen/postprocess.hpp"
#include "clustergen/sampling.hpp"

namespace clustergen::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = CLUSTERGEN_VERSION;

// Archetypes from a JSONL file or a single inline JSON object.
std::vector<Archetype> load_archetypes(const std::string& path, const std::string& inline_json) {
  if (!inline_json.empty() && !path.empty())
    throw ValidationError({"give either --archetypes or --archetype, not both"});
  if (!inline_json.empty()) {
    std::istringstream in(inline_json);
    return read_archetypes_jsonl(in);
  }
  if (path.empty()) throw ValidationError({"no archetypes given (use --archetypes FILE or --archetype JSON)"});
  std::ifstream in(path);
  if (!in) throw ValidationError({"cannot open archetype file " + path});
  auto out = read_archetypes_jsonl(in);
  if (out.empty()) throw ValidationError({"archetype file " + path + " is empty"});
  return out;
}

std::string to_csv(const Dataset& d) {
  std::ostringstream s;
  write_dataset_csv(s, d);
  return s.str();
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return read_dataset_csv(in);
  } catch (const Error& e) {
    throw ValidationError(path + ": " + e.what(), {e.what()});
  }
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") out << content;
  else atomic_write_file(path, content);
}

// Loads a TOML config; the [api] section configures the NL client, and
// [defaults] supplies archetype defaults for missing keys.
struct Config {
  nl::ClientConfig client;
  Archetype defaults;
};

Config load_config(const std::string& path) {
  Config cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw ValidationError({"cannot open config file " + path});
  nlohmann::json defaults = nlohmann::json::object();
  for (const auto& [key, value] : read_simple_toml(in)) {
    if (key == "api.base_url") cfg.client.base_url = value;
    else if (key == "api.model") cfg.client.model = value;
    else if (key == "api.api_key_env") cfg.client.api_key_env = value;
    else if (key == "api.max_attempts") cfg.client.max_attempts = std::stoi(value);
    else if (key == "api.timeout_seconds") cfg.client.timeout_seconds = std::stod(value);
    else if (key.rfind("defaults.", 0) == 0) {
      const std::string field = key.substr(9);
      try {
        defaults[field] = nlohmann::json::parse(value);
      } catch (const nlohmann::json::exception&) {
        defaults[field] = value;
      }
    } else {
      throw ValidationError({"config " + path + ": unknown key " + key});
    }
  }
  if (!defaults.empty()) {
    if (!defaults.contains("name")) defaults["name"] = cfg.defaults.name;
    cfg.defaults = archetype_from_json(defaults);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string archetypes_path;
  std::string archetype_json;
  int n_datasets = 10;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool distort = false;
  bool wrap = false;
  int jobs = 1;
  bool save_models = false;
  bool labels_file = false;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  const auto archetypes = load_archetypes(args.archetypes_path, args.archetype_json);
  std::set<std::string> names;
  for (const auto& a : archetypes) {
    require_valid(a);
    if (!names.insert(a.name).second) throw ValidationError({"duplicate archetype name " + a.name});
  }
  if (args.n_datasets < 1) throw ValidationError({"--n-datasets must be >= 1"});
  fs::create_directories(args.out_dir);

  RunManifest manifest;
  manifest.tool_version = kVersion;
  manifest.master_seed = args.seed;
  manifest.started_at = utc_timestamp();
  for (const auto& a : archetypes) manifest.archetypes.push_back(archetype_to_json(a));

  struct Task {
    const Archetype* archetype;
    std::uint64_t index;
  };
  std::vector<Task> tasks;
  for (const auto& a : archetypes)
    for (int i = 0; i < args.n_datasets; ++i) tasks.push_back({&a, static_cast<std::uint64_t>(i)});
  manifest.entries.resize(tasks.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> any_convergence_failure{false};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Archetype& a = *tasks[t].archetype;
      ManifestEntry& e = manifest.entries[t];
      e.archetype = a.name;
      e.index = tasks[t].index;
      e.seed = derive_seed(a.seed.value_or(args.seed), a.name, e.index);
      e.distorted = args.distort;
      e.wrapped = args.wrap;
      const std::string stem = a.name + "_" + std::to_string(e.index);
      try {
        Rng rng(e.seed);
        const MixtureModel model = sample_mixture_model(a, rng);
        Dataset d = sample_dataset(model, rng);
        if (args.distort) d.points = distort(d.points, derive_seed(e.seed, "distort", 0));
        if (args.wrap) d.points = wrap_around_sphere(d.points);
        atomic_write_file(fs::path(args.out_dir) / (stem + ".csv"), to_csv(d));
        e.files.push_back(stem + ".csv");
        if (args.labels_file) {
          std::ostringstream s;
          write_labels_csv(s, d.labels);
          atomic_write_file(fs::path(args.out_dir) / (stem + "_labels.csv"), s.str());
          e.files.push_back(stem + "_labels.csv");
        }
        if (args.save_models) {
          atomic_write_file(fs::path(args.out_dir) / (stem + "_model.json"), model_to_json(model).dump(2) + "\n");
          e.files.push_back(stem + "_model.json");
        }
      } catch (const NonConvergenceError& ex) {
        e.status = std::string("convergence failure: ") + ex.what();
        any_convergence_failure = true;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(args.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  manifest.finished_at = utc_timestamp();
  atomic_write_file(fs::path(args.out_dir) / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");

  std::size_t ok = 0;
  for (const auto& e : manifest.entries) {
    if (e.status == "ok") ++ok;
    else err << e.archetype << " #" << e.index << ": " << e.status << '\n';
  }
  out << "wrote " << ok << " of " << tasks.size() << " datasets to " << args.out_dir << '\n';
  return any_convergence_failure ? kConvergenceFailure : kOk;
}

// ---------------------------------------------------------------------------
// validate-overlap

struct ValidateArgs {
  std::string model_path;
  std::string archetypes_path;
  std::string archetype_json;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  bool exact = false;
  std::string out_path;
};

int cmd_validate_overlap(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  MixtureModel model;
  if (!args.model_path.empty()) {
    try {
      model = model_from_json(nlohmann::json::parse(read_file(args.model_path)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError({args.model_path + ": " + e.what()});
    }
  } else {
    const auto archetypes = load_archetypes(args.archetypes_path, args.archetype_json);
    const Archetype& a = archetypes.front();
    Rng rng(derive_seed(a.seed.value_or(args.seed), a.name, args.index));
    model = sample_mixture_model(a, rng);
  }
  const auto report = overlap_report(model, args.exact);
  std::ostringstream csv;
  write_overlap_csv(csv, report);
  write_output(args.out_path, csv.str(), out);

  if (model.size() < 2) {
    err << "single-cluster model: no cluster pairs, overlap report is empty\n";
    return kOk;
  }
  const auto s = summarize(report, model.size());
  err << "max pairwise alpha_lda: " << format_double(s.max_pairwise) << '\n';
  err << "max-neighbor alpha_lda per cluster:";
  for (double v : s.max_neighbor) err << ' ' << format_double(v);
  err << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// nl

struct NlArgs {
  std::string description;
  bool dry_run = false;
  std::string fixtures;
  std::string config;
  std::string log;
};

int cmd_nl(const NlArgs& args, std::ostream& out, std::ostream& err) {
  if (args.dry_run) {
    out << nl::render_prompt(nl::PromptKind::kParams, args.description) << "\n\n";
    out << nl::render_prompt(nl::PromptKind::kIdentifier, args.description) << '\n';
    return kOk;
  }
  const Config cfg = load_config(args.config);
  std::unique_ptr<nl::Completer> completer;
  if (!args.fixtures.empty()) {
    completer = std::make_unique<nl::FixtureCompleter>(nl::FixtureCompleter::load(args.fixtures));
  } else {
    completer = std::make_unique<nl::ChatClient>(cfg.client, nullptr);
  }
  const auto result = nl::archetype_from_description(args.description, *completer, cfg.defaults);
  if (!args.log.empty()) nl::append_exchange_log(args.log, result.exchanges);
  const auto& applied = result.exchanges.front().applied_defaults;
  if (!applied.empty()) {
    err << "filled from defaults:";
    for (const auto& k : applied) err << ' ' << k;
    err << '\n';
  }
  out << archetype_to_json(result.archetype).dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// plot, distort, wrap

int cmd_plot(const std::string& in_path, const std::string& out_path, std::ostream& out) {
  const Dataset d = load_dataset(in_path);
  if (d.size() > 0 && d.dim() != 2)
    throw ValidationError({"plot supports 2D datasets only (got dim " + std::to_string(d.dim()) +
                           "); dimensionality reduction is out of scope"});
  write_output(out_path, render_scatter_svg(d), out);
  return kOk;
}

int cmd_distort(const std::string& in_path, const std::string& out_path, std::uint64_t seed, int width,
                std::ostream& out) {
  Dataset d = load_dataset(in_path);
  if (d.dim() < 1) throw ValidationError({in_path + ": dataset has no feature columns"});
  d.points = distort(d.points, seed, width);
  write_output(out_path, to_csv(d), out);
  return kOk;
}

int cmd_wrap(const std::string& in_path, const std::string& out_path, std::optional<double> prescale,
             std::ostream& out) {
  Dataset d = load_dataset(in_path);
  if (prescale && !(*prescale > 0.0)) throw ValidationError({"--prescale must be > 0"});
  d.points = wrap_around_sphere(d.points, prescale);
  write_output(out_path, to_csv(d), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// bench: K-Means against ground truth on freshly generated datasets

struct BenchArgs {
  std::string archetypes_path;
  std::string archetype_json;
  int n_datasets = 10;
  std::uint64_t seed = 0;
  bool distort = false;
  std::string out_path;
};

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  const auto archetypes = load_archetypes(args.archetypes_path, args.archetype_json);
  for (const auto& a : archetypes) require_valid(a);
  std::ostringstream csv;
  csv << "archetype,seed,max_overlap,ami,ari,silhouette\n";
  bool failed = false;
  for (const auto& a : archetypes) {
    for (int i = 0; i < args.n_datasets; ++i) {
      const std::uint64_t seed = derive_seed(a.seed.value_or(args.seed), a.name, static_cast<std::uint64_t>(i));
      try {
        Rng rng(seed);
        Dataset d = sample_dataset(sample_mixture_model(a, rng), rng);
        if (args.distort) d.points = distort(d.points, derive_seed(seed, "distort", 0));
        const auto truth = Labeling::from(d.labels);
        const auto fit = kmeans(d.points, a.n_clusters, rng);
        const double sil = truth.k() >= 2 ? silhouette(d.points, fit.labeling.k() >= 2 ? fit.labeling : truth) : 0.0;
        csv << a.name << ',' << seed << ',' << format_double(a.max_overlap) << ','
            << format_double(ami(truth, fit.labeling)) << ',' << format_double(ari(truth, fit.labeling)) << ','
            << format_double(sil) << '\n';
      } catch (const NonConvergenceError& e) {
        err << a.name << " #" << i << ": " << e.what() << '\n';
        failed = true;
      }
    }
  }
  write_output(args.out_path, csv.str(), out);
  return failed ? kConvergenceFailure : kOk;
}

// ---------------------------------------------------------------------------
// hyperparams

struct HyperArgs {
  std::string archetype_json;
  std::string archetypes_path;
  int n = 10;
  std::uint64_t seed = 0;
  HyperparamBounds bounds;
  std::string out_path;
};

int cmd_hyperparams(const HyperArgs& args, std::ostream& out) {
  const auto archetypes = load_archetypes(args.archetypes_path, args.archetype_json);
  std::vector<Archetype> all;
  for (const auto& a : archetypes) {
    Rng rng(derive_seed(a.seed.value_or(args.seed), a.name, 0));
    auto v = sample_hyperparams(a, args.n, args.bounds, rng);
    all.insert(all.end(), v.begin(), v.end());
  }
  write_output(args.out_path, archetype_to_jsonl(all), out);
  return kOk;
}

// Optional integer flag bound to an std::optional<int>.
void optional_int(CLI::App* app, const std::string& name, std::optional<int>& target, const std::string& help) {
  app->add_option_function<int>(name, [&target](int v) { target = v; }, help);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic clustered data from high-level archetypes", "clustergen"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample datasets from archetypes and write CSV files");
  g->add_option("--archetypes", gen.archetypes_path, "JSONL file, one archetype per line");
  g->add_option("--archetype", gen.archetype_json, "Inline archetype JSON object");
  g->add_option("-n,--n-datasets", gen.n_datasets, "Datasets per archetype")->capture_default_str();
  g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  g->add_option("-o,--out", gen.out_dir, "Output directory")->required();
  g->add_flag("--distort", gen.distort, "Pass each dataset through a random network");
  g->add_flag("--wrap", gen.wrap, "Wrap each dataset around the sphere (after --distort)");
  g->add_option("-j,--jobs", gen.jobs, "Parallel workers")->capture_default_str();
  g->add_flag("--save-models", gen.save_models, "Also write the mixture model JSON per dataset");
  g->add_flag("--labels-file", gen.labels_file, "Also write labels to a separate CSV");

  ValidateArgs val;
  auto* v = app.add_subcommand("validate-overlap", "Report pairwise overlaps of a mixture model");
  v->add_option("--model", val.model_path, "Model JSON written by generate --save-models");
  v->add_option("--archetypes", val.archetypes_path, "JSONL file; the first archetype is used");
  v->add_option("--archetype", val.archetype_json, "Inline archetype JSON object");
  v->add_option("--seed", val.seed, "Master seed")->capture_default_str();
  v->add_option("--index", val.index, "Dataset index for seed derivation")->capture_default_str();
  v->add_flag("--exact", val.exact, "Include the exact Gaussian overlap");
  v->add_option("-o,--out", val.out_path, "Output CSV (default stdout)");

  NlArgs nla;
  auto* n = app.add_subcommand("nl", "Turn an English description into an archetype");
  n->add_option("description", nla.description, "Archetype description")->required();
  n->add_flag("--dry-run", nla.dry_run, "Print the rendered prompts and exit");
  n->add_option("--fixtures", nla.fixtures, "Replay recorded responses from this JSON file");
  n->add_option("--config", nla.config, "TOML config with [api] and [defaults] sections");
  n->add_option("--log", nla.log, "Append prompt exchanges to this JSONL file");

  std::string plot_in, plot_out;
  auto* p = app.add_subcommand("plot", "Scatter plot of a 2D dataset as SVG");
  p->add_option("input", plot_in, "Dataset CSV")->required();
  p->add_option("-o,--out", plot_out, "Output SVG (default stdout)");

  std::string dist_in, dist_out;
  std::uint64_t dist_seed = 0;
  int dist_width = DistortNetwork::kDefaultWidth;
  auto* d = app.add_subcommand("distort", "Pass a dataset CSV through a random network");
  d->add_option("input", dist_in, "Dataset CSV")->required();
  d->add_option("-o,--out", dist_out, "Output CSV (default stdout)");
  d->add_option("--seed", dist_seed, "Network seed")->capture_default_str();
  d->add_option("--width", dist_width, "Hidden width")->capture_default_str();

  std::string wrap_in, wrap_out;
  std::optional<double> prescale;
  auto* w = app.add_subcommand("wrap", "Wrap a dataset CSV around the sphere");
  w->add_option("input", wrap_in, "Dataset CSV")->required();
  w->add_option("-o,--out", wrap_out, "Output CSV (default stdout)");
  w->add_option_function<double>("--prescale", [&prescale](double x) { prescale = x; },
                                 "Divide by this instead of the median norm");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "K-Means AMI/ARI/silhouette on generated datasets");
  b->add_option("--archetypes", bench.archetypes_path, "JSONL file, one archetype per line");
  b->add_option("--archetype", bench.archetype_json, "Inline archetype JSON object");
  b->add_option("-n,--n-datasets", bench.n_datasets, "Datasets per archetype")->capture_default_str();
  b->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
  b->add_flag("--distort", bench.distort, "Distort datasets before clustering");
  b->add_option("-o,--out", bench.out_path, "Output CSV (default stdout)");

  HyperArgs hyp;
  auto* h = app.add_subcommand("hyperparams", "Resample n_clusters, dim and n_samples of an archetype");
  h->add_option("--archetypes", hyp.archetypes_path, "JSONL file, one archetype per line");
  h->add_option("--archetype", hyp.archetype_json, "Inline archetype JSON object");
  h->add_option("-n,--count", hyp.n, "Variants per archetype")->capture_default_str();
  h->add_option("--seed", hyp.seed, "Master seed")->capture_default_str();
  optional_int(h, "--min-clusters", hyp.bounds.min_clusters, "Lower bound on n_clusters");
  optional_int(h, "--max-clusters", hyp.bounds.max_clusters, "Upper bound on n_clusters");
  optional_int(h, "--min-dim", hyp.bounds.min_dim, "Lower bound on dim");
  optional_int(h, "--max-dim", hyp.bounds.max_dim, "Upper bound on dim");
  optional_int(h, "--min-samples", hyp.bounds.min_samples, "Lower bound on n_samples");
  optional_int(h, "--max-samples", hyp.bounds.max_samples, "Upper bound on n_samples");
  h->add_option("-o,--out", hyp.out_path, "Output JSONL (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailure;
  }

  try {
    if (*g) return cmd_generate(gen, out, err);
    if (*v) return cmd_validate_overlap(val, out, err);
    if (*n) return cmd_nl(nla, out, err);
    if (*p) return cmd_plot(plot_in, plot_out, out);
    if (*d) return cmd_distort(dist_in, dist_out, dist_seed, dist_width, out);
    if (*w) return cmd_wrap(wrap_in, wrap_out, prescale, out);
    if (*b) return cmd_bench(bench, out, err);
    if (*h) return cmd_hyperparams(hyp, out);
  } catch (const nl::NlError& e) {
    err << "error [" << nl::error_code_name(e.code()) << "]: " << e.what() << '\n';
    for (const auto& line : e.attempts()) err << "  " << line << '\n';
    if (!e.raw_response().empty()) err << "raw response:\n" << e.raw_response() << '\n';
    return kNlFailure;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergenceFailure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
  return kValidationFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"clustergen"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace clustergen::cli
