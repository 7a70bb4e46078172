/*
 * Copyright 2026 The DAPr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dapr_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

#include "dapr/baselines.hpp"
#include "dapr/config.hpp"
#include "dapr/csv.hpp"
#include "dapr/datagen.hpp"
#include "dapr/error.hpp"
#include "dapr/explain.hpp"
#include "dapr/models.hpp"
#include "dapr/rng.hpp"
#include "dapr/sweep.hpp"
#include "dapr/training.hpp"
#include "dapr_cli/run_config.hpp"

namespace dapr::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::size_t jobs = 1;
  bool verbose = false;
};

// Thrown for bad flag values discovered after parsing.
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

fs::path OutputDir(const Globals& g, const std::optional<fs::path>& fallback) {
  fs::path dir;
  if (g.out) {
    dir = *g.out;
  } else if (fallback) {
    dir = *fallback;
  } else {
    throw UsageError("no output directory: pass --out or set \"output\"");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
  return dir;
}

void WriteJson(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

void WriteWeightsCsv(const fs::path& path, const std::vector<std::string>& names,
                     const std::vector<double>& weights) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  WriteCsvRow(out, {"feature", "weight"});
  for (std::size_t i = 0; i < weights.size(); ++i) {
    WriteCsvRow(out, {names[i], FormatDouble(weights[i])});
  }
}

std::size_t NonNegative(long long value, const char* flag) {
  if (value < 0) throw UsageError(std::string(flag) + " must be >= 0");
  return static_cast<std::size_t>(value);
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  long long n = 1000;
  long long nuisance = 50;
  long long p = 500;
  long long k = 4;
  double noise_std = 0.1;
};

int CmdGen(GeneratorKind kind, const GenArgs& a, const Globals& g, std::ostream& out) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.n = NonNegative(a.n, "--n");
  spec.nuisance = NonNegative(a.nuisance, "--nuisance");
  spec.p = NonNegative(a.p, "--p");
  spec.k = NonNegative(a.k, "--k");
  if (!(a.noise_std >= 0.0) || !std::isfinite(a.noise_std)) {
    throw UsageError("--noise-std must be finite and >= 0");
  }
  spec.noise_std = a.noise_std;
  const fs::path dir = OutputDir(g, std::nullopt);
  const GeneratedData data = Generate(spec, g.seed.value_or(0));
  SaveCsv(dir, data.dataset, data.meta);
  if (!data.true_weights.empty()) {
    WriteWeightsCsv(dir / "weights.csv", data.dataset.feature_names, data.true_weights);
  }
  if (g.verbose) {
    out << "wrote " << data.dataset.num_rows() << " x " << data.dataset.num_features()
        << " dataset to " << dir.string() << "\n";
  }
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct LoadedRun {
  Dataset dataset;
  MetaFeatureMatrix meta;
  std::vector<double> true_weights;
};

LoadedRun LoadData(const RunConfig& c) {
  if (c.generator) {
    GeneratedData d = Generate(*c.generator, c.seed);
    return {std::move(d.dataset), std::move(d.meta), std::move(d.true_weights)};
  }
  const DataFiles& f = *c.files;
  SplitSpec split;
  split.file = f.splits;
  split.train_fraction = f.train_fraction;
  split.val_fraction = f.val_fraction;
  split.seed = c.seed;
  LoadedData d = LoadCsv(f.features, f.labels, f.metafeatures, split, f.task);
  return {std::move(d.dataset), std::move(d.meta), {}};
}

json MetricsJson(const RunConfig& c, const Metrics& val, const Metrics& test,
                 std::optional<std::size_t> best_epoch) {
  json doc;
  doc["variant"] = std::string(VariantKindName(c.variant));
  doc["seed"] = c.seed;
  doc["config"] = c.document;
  doc["task"] = std::string(TaskKindName(test.task));
  doc["metric"] = test.task == TaskKind::kRegression ? "mse" : "accuracy";
  doc["test_metric"] = test.value();
  doc["val_metric"] = val.value();
  doc["test_loss"] = test.loss;
  doc["val_loss"] = val.loss;
  doc["best_epoch"] = best_epoch ? json(*best_epoch) : json(nullptr);
  return doc;
}

void WriteExplanations(const fs::path& dir, const Mlp& prior, const MetaFeatureMatrix& meta,
                       const ExplainSettings& e, std::uint64_t seed) {
  AttributionConfig ac;
  ac.n_samples = e.n_samples;
  ac.seed = SubstreamSeed(seed, "explain");
  WriteExplanationsCsv(dir / "explanations.csv", meta, SecondOrderExplanations(prior, meta, ac));
  for (const std::string& name : e.pdp) {
    std::size_t j = 0;
    while (j < meta.names.size() && meta.names[j] != name) ++j;
    if (j == meta.names.size()) throw InvalidArgument("unknown meta-feature '" + name + "' for pdp");
    WritePdpCsv(dir / ("pdp_" + name + ".csv"), PartialDependence(prior, meta.values, j, e.grid));
  }
}

int CmdTrain(const std::string& config_path, const Globals& g, std::ostream& out) {
  RunConfig c = ParseRunConfig(ReadJsonFile(config_path), fs::path(config_path).parent_path());
  if (g.seed) c.seed = *g.seed;
  const fs::path dir = OutputDir(g, c.output);
  LoadedRun data = LoadData(c);
  const Dataset& ds = data.dataset;
  const std::size_t p = ds.num_features();

  DaprConfig config = c.trainer;
  config.seed = c.seed;
  if (!c.document.contains("trainer") || !c.document["trainer"].contains("loss")) {
    config.loss = DefaultLoss(ds.task);
  }

  if (c.variant == VariantKind::kLasso || c.variant == VariantKind::kMerge) {
    const Tensor x = ds.Features(Split::kTrain);
    const std::vector<double> y = ds.Labels(Split::kTrain);
    if (ds.task != TaskKind::kRegression) throw InvalidArgument("linear baselines need regression data");
    LinearModel model;
    json checkpoint;
    if (c.variant == VariantKind::kLasso) {
      model = LassoFit(x, y, c.lasso_lambda);
    } else {
      MergeResult r = MergeFit(x, y, data.meta.values, c.merge);
      model = r.model;
      checkpoint["beta"] = r.beta;
      checkpoint["iterations"] = r.iterations;
      checkpoint["converged"] = r.converged;
    }
    checkpoint["weights"] = model.weights;
    checkpoint["intercept"] = model.intercept;
    WriteJson(dir / "model.json", checkpoint);
    TrainHistory{}.WriteCsv(dir / "history.csv");
    WriteJson(dir / "metrics.json",
              MetricsJson(c, EvaluateLinear(model, ds, Split::kVal),
                          EvaluateLinear(model, ds, Split::kTest), std::nullopt));
    return kExitOk;
  }

  const std::vector<std::size_t> hidden =
      c.predictor.hidden
          ? *c.predictor.hidden
          : std::vector<std::size_t>(
                [&] {
                  auto s = DefaultArchitecture(
                      c.generator ? c.generator->kind : GeneratorKind::kMetaRegression, p);
                  return std::vector<std::size_t>(s.begin() + 1, s.end() - 1);
                }());
  const std::uint64_t init_seed = SubstreamSeed(c.seed, "init");
  try {
    if (c.variant == VariantKind::kDapr || c.variant == VariantKind::kDaprNoise) {
      const MetaFeatureMatrix meta =
          c.variant == VariantKind::kDaprNoise
              ? GenNoiseMetaFeatures(data.meta.feature_names, data.meta.width(), c.seed)
              : data.meta;
      DaprResult r = TrainDapr(ds, meta, BuildNetwork(c.predictor, p, hidden, init_seed),
                               BuildPrior(c.prior, meta.width(), SubstreamSeed(c.seed, "prior-init")),
                               config);
      SaveMlp(r.model, dir / "model.json");
      SaveMlp(r.prior, dir / "prior.json");
      r.history.WriteCsv(dir / "history.csv");
      const std::size_t top = c.explain && c.explain->top_n > 0 ? c.explain->top_n : p;
      WriteImportanceCsv(dir / "importance.csv", RankFeatures(r.prior, meta, top));
      if (c.explain) WriteExplanations(dir, r.prior, meta, *c.explain, c.seed);
      WriteJson(dir / "metrics.json",
                MetricsJson(c, Evaluate(r.model, ds, Split::kVal), Evaluate(r.model, ds, Split::kTest),
                            r.history.best_epoch));
    } else if (c.variant == VariantKind::kNaive) {
      const Dataset augmented = AppendMetaFeatures(ds, data.meta);
      StandardResult r = NaiveMetaFeatureMlp(
          ds, data.meta,
          BuildNetwork(c.predictor, NaiveInputWidth(p, data.meta.width()), hidden, init_seed),
          config);
      SaveMlp(r.model, dir / "model.json");
      r.history.WriteCsv(dir / "history.csv");
      WriteJson(dir / "metrics.json",
                MetricsJson(c, Evaluate(r.model, augmented, Split::kVal),
                            Evaluate(r.model, augmented, Split::kTest), r.history.best_epoch));
    } else {
      WeightRegularizer reg;
      if (c.variant == VariantKind::kMlpL1) reg = {WeightPenalty::kL1, c.weight_penalty};
      if (c.variant == VariantKind::kMlpL2) reg = {WeightPenalty::kL2, c.weight_penalty};
      StandardResult r =
          TrainStandard(ds, BuildNetwork(c.predictor, p, hidden, init_seed), config, reg);
      SaveMlp(r.model, dir / "model.json");
      r.history.WriteCsv(dir / "history.csv");
      WriteJson(dir / "metrics.json",
                MetricsJson(c, Evaluate(r.model, ds, Split::kVal), Evaluate(r.model, ds, Split::kTest),
                            r.history.best_epoch));
    }
  } catch (const DivergenceError& e) {
    WriteJson(dir / "diagnostics.json", {{"error", e.what()},
                                         {"epoch", e.epoch()},
                                         {"batch", e.batch()},
                                         {"term", e.term()}});
    throw;
  }
  if (g.verbose) out << "wrote run artifacts to " << dir.string() << "\n";
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

int CmdSweep(const std::string& spec_path, const Globals& g, std::ostream& out) {
  SweepSpec spec = ParseSweepSpec(ReadJsonFile(spec_path));
  if (g.seed) {
    // Offsets every listed seed so one flag moves the whole sweep.
    for (std::uint64_t& s : spec.seeds) s += *g.seed;
  }
  const fs::path dir = OutputDir(g, std::nullopt);
  const SweepResult result = RunSweep(spec, g.jobs, [&](const TrialResult& t) {
    if (!g.verbose) return;
    out << t.variant << " setting=" << (std::isnan(t.setting) ? std::string("-") : FormatDouble(t.setting))
        << " seed=" << t.seed << (t.ok ? " test=" + FormatDouble(t.test_metric) : " FAILED: " + t.error)
        << "\n";
  });
  WriteResultsCsv(dir / "results.csv", result);
  if (result.failures > 0) {
    out << result.failures << " of " << result.trials.size() << " trials failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---- explain ---------------------------------------------------------------

struct ExplainArgs {
  std::string prior;
  std::string meta;
  std::string features;
  std::vector<std::string> pdp;
  long long grid = 50;
  long long samples = 200;
  long long top = 0;
};

int CmdExplain(const ExplainArgs& a, const Globals& g, std::ostream& out) {
  if (a.grid < 2) throw UsageError("--grid must be >= 2");
  if (a.samples < 1) throw UsageError("--samples must be >= 1");
  const std::size_t top = NonNegative(a.top, "--top");
  const Mlp prior = LoadMlp(a.prior);
  const MetaFeatureMatrix meta = ReadMetaFeaturesCsv(a.meta);
  if (prior.input_width() != meta.width()) {
    throw ParseError(a.meta, 0, 0,
                     "meta-feature matrix has " + std::to_string(meta.width()) +
                         " columns but the prior expects " + std::to_string(prior.input_width()));
  }
  if (!a.features.empty()) {
    const CsvTable header = ReadCsv(a.features);
    if (header.header != meta.feature_names) {
      throw ParseError(a.meta, 0, 0, "feature names are not aligned with " + a.features);
    }
  }
  const fs::path dir = OutputDir(g, std::nullopt);
  ExplainSettings e;
  e.n_samples = static_cast<std::size_t>(a.samples);
  e.grid = static_cast<std::size_t>(a.grid);
  e.pdp = a.pdp;
  WriteExplanations(dir, prior, meta, e, g.seed.value_or(0));
  WriteImportanceCsv(dir / "importance.csv",
                     RankFeatures(prior, meta, top > 0 ? top : meta.num_features()));
  if (g.verbose) out << "wrote explanations to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deep attribution prior training and analysis", "dapr"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  std::string out_dir;
  CLI::Option* seed_option = app.add_option("--seed", seed, "Seed for every random substream");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--jobs", g.jobs, "Concurrent sweep trials")->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", g.verbose, "Progress messages");
  app.fallthrough();

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->require_subcommand(1);
  GenArgs moons;
  CLI::App* gen_moons = gen->add_subcommand("two-moons", "Two moons with nuisance features");
  gen_moons->add_option("--n", moons.n, "Samples");
  gen_moons->add_option("--nuisance", moons.nuisance, "Nuisance features");
  GenArgs reg;
  reg.n = 300;
  CLI::App* gen_reg = gen->add_subcommand("meta-regression", "Meta-feature driven regression");
  gen_reg->add_option("--n", reg.n, "Samples");
  gen_reg->add_option("--p", reg.p, "Features");
  gen_reg->add_option("--k", reg.k, "Meta-features");
  gen_reg->add_option("--noise-std", reg.noise_std, "Label noise standard deviation");

  CLI::App* train = app.add_subcommand("train", "Train one model from a run configuration");
  std::string train_config;
  train->add_option("config", train_config, "Run configuration (JSON)")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Run an experiment sweep");
  std::string sweep_spec;
  sweep->add_option("spec", sweep_spec, "Sweep specification (JSON)")->required();

  CLI::App* explain = app.add_subcommand("explain", "Explain a trained prior");
  ExplainArgs ea;
  explain->add_option("--prior", ea.prior, "Prior checkpoint (JSON)")->required();
  explain->add_option("--meta", ea.meta, "metafeatures.csv")->required();
  explain->add_option("--features", ea.features, "features.csv to check alignment against");
  explain->add_option("--pdp", ea.pdp, "Meta-feature for a partial dependence curve");
  explain->add_option("--grid", ea.grid, "Partial dependence grid size");
  explain->add_option("--samples", ea.samples, "Expected Gradients samples per feature");
  explain->add_option("--top", ea.top, "Rows of importance.csv (0: all)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'dapr --help' for usage\n";
    return kExitUsage;
  }
  if (seed_option->count() > 0) g.seed = seed;
  if (!out_dir.empty()) g.out = out_dir;

  try {
    if (gen_moons->parsed()) return CmdGen(GeneratorKind::kTwoMoons, moons, g, out);
    if (gen_reg->parsed()) return CmdGen(GeneratorKind::kMetaRegression, reg, g, out);
    if (train->parsed()) return CmdTrain(train_config, g, out);
    if (sweep->parsed()) return CmdSweep(sweep_spec, g, out);
    if (explain->parsed()) return CmdExplain(ea, g, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << "run 'dapr --help' for usage\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dapr::cli
