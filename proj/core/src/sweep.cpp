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

#include "dapr/sweep.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "dapr/baselines.hpp"
#include "dapr/csv.hpp"
#include "dapr/error.hpp"
#include "dapr/rng.hpp"
#include "dapr/stats.hpp"

namespace dapr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<VariantKind, std::string_view>> kVariantNames = {
    {VariantKind::kMlp, "mlp"},     {VariantKind::kMlpL1, "mlp_l1"},
    {VariantKind::kMlpL2, "mlp_l2"}, {VariantKind::kDapr, "dapr"},
    {VariantKind::kDaprNoise, "dapr_noise"}, {VariantKind::kLasso, "lasso"},
    {VariantKind::kMerge, "merge"}, {VariantKind::kNaive, "naive"},
};

bool IsDapr(VariantKind kind) {
  return kind == VariantKind::kDapr || kind == VariantKind::kDaprNoise;
}

bool IsLinear(VariantKind kind) {
  return kind == VariantKind::kLasso || kind == VariantKind::kMerge;
}

std::vector<std::size_t> HiddenOf(const std::vector<std::size_t>& sizes) {
  return {sizes.begin() + 1, sizes.end() - 1};
}

std::vector<std::size_t> WithEnds(std::size_t in, const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

std::vector<std::string> Names(std::initializer_list<std::string_view> names) {
  return {names.begin(), names.end()};
}

// Validation ranking: the task metric first, then validation loss.
bool BetterSelection(TaskKind task, const Metrics& a, const Metrics& b) {
  if (BetterMetric(task, a.value(), b.value())) return true;
  if (BetterMetric(task, b.value(), a.value())) return false;
  return a.loss < b.loss;
}

std::string FormatSetting(double setting) {
  return std::isnan(setting) ? "" : FormatDouble(setting);
}

void ZeroOutputLayer(Mlp& mlp) {
  mlp.weight(mlp.num_layers() - 1).setZero();
  mlp.bias(mlp.num_layers() - 1).setZero();
}

}  // namespace

Mlp BuildNetwork(const NetworkSpec& spec, std::size_t in, const std::vector<std::size_t>& hidden,
                 std::uint64_t seed) {
  Mlp mlp = BuildMlp(WithEnds(in, hidden), spec.activation, seed);
  if (spec.zero_output) ZeroOutputLayer(mlp);
  return mlp;
}

Mlp BuildPrior(const PriorSpec& spec, std::size_t k, std::uint64_t seed) {
  Mlp mlp = spec.linear ? BuildMlp({k, 1}, Activation::kIdentity, seed)
                        : BuildMlp(WithEnds(k, spec.hidden), spec.activation, seed);
  if (spec.zero_output) ZeroOutputLayer(mlp);
  return mlp;
}

std::string_view GeneratorKindName(GeneratorKind kind) {
  return kind == GeneratorKind::kTwoMoons ? "two-moons" : "meta-regression";
}

GeneratorKind ParseGeneratorKind(std::string_view name) {
  if (name == "two-moons") return GeneratorKind::kTwoMoons;
  if (name == "meta-regression") return GeneratorKind::kMetaRegression;
  throw InvalidArgument("unknown generator '" + std::string(name) + "'");
}

GeneratorSpec GeneratorSpec::With(const std::string& parameter, double value) const {
  GeneratorSpec out = *this;
  auto count = [&] {
    if (!(value >= 0.0) || value != std::floor(value)) {
      throw InvalidArgument("sweep value for '" + parameter + "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(value);
  };
  if (parameter == "n") {
    out.n = count();
  } else if (parameter == "nuisance") {
    out.nuisance = count();
  } else if (parameter == "p") {
    out.p = count();
  } else if (parameter == "k") {
    out.k = count();
  } else if (parameter == "noise_std") {
    out.noise_std = value;
  } else {
    throw InvalidArgument("unknown sweep parameter '" + parameter + "'");
  }
  return out;
}

GeneratedData Generate(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.kind == GeneratorKind::kTwoMoons) {
    TwoMoonsData d = GenTwoMoons(spec.n, spec.nuisance, seed);
    return {std::move(d.dataset), std::move(d.meta), {}};
  }
  MetaRegressionData d = GenMetaRegression(spec.n, spec.p, spec.k, spec.noise_std, seed);
  return {std::move(d.dataset), std::move(d.meta), std::move(d.true_weights)};
}

std::string_view VariantKindName(VariantKind kind) {
  for (const auto& [k, name] : kVariantNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

VariantKind ParseVariantKind(std::string_view name) {
  for (const auto& [k, n] : kVariantNames) {
    if (n == name) return k;
  }
  throw InvalidArgument("unknown variant kind '" + std::string(name) + "'");
}

std::vector<double> DefaultLambdaGrid(VariantKind kind) {
  switch (kind) {
    case VariantKind::kDapr:
    case VariantKind::kDaprNoise:
      return {0.01, 0.1, 1.0, 10.0};
    case VariantKind::kMlpL1:
    case VariantKind::kMlpL2:
      return {1e-4, 1e-3, 1e-2};
    case VariantKind::kLasso:
      return {0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
    case VariantKind::kMerge:
      return {1.0, 0.1, 0.01, 0.001};
    default:
      return {0.0};
  }
}

std::vector<double> DefaultLearningRateGrid() { return {1e-3, 1e-4}; }

std::vector<std::size_t> DefaultArchitecture(GeneratorKind kind, std::size_t p) {
  if (kind == GeneratorKind::kTwoMoons) return TwoMoonsArchitecture(p);
  return {p, 512, 256, 1};
}

DaprConfig ReadTrainerConfig(ConfigReader& r, DaprConfig c) {
  c.lambda = r.Number("lambda", c.lambda, 0.0);
  c.lr_f = r.Number("lr_f", c.lr_f, 0.0, true);
  if (r.Has("lr_g")) c.lr_g = r.Number("lr_g", c.prior_learning_rate(), 0.0, true);
  c.batch_size = r.Size("batch_size", c.batch_size, 1);
  c.max_epochs = r.Size("max_epochs", c.max_epochs, 1);
  c.patience = r.Size("patience", c.patience, 1);
  c.eg_samples_per_step = r.Size("eg_samples_per_step", c.eg_samples_per_step, 1);
  c.target = ParseAttributionTarget(
      r.String("target", std::string(AttributionTargetName(c.target)), Names({"signed", "magnitude"})));
  if (r.Has("loss")) {
    c.loss = ParseLossKind(r.String("loss", "mse", Names({"mse", "bce"})));
  }
  c.update_prior = r.Bool("update_prior", c.update_prior);
  return c;
}

NetworkSpec ReadNetworkSpec(ConfigReader& r) {
  NetworkSpec s;
  if (r.Has("hidden")) s.hidden = r.SizeList("hidden", {}, 1);
  s.activation = ParseActivation(
      r.String("activation", "relu", Names({"relu", "softplus", "tanh", "identity"})));
  s.zero_output = r.String("output_init", "default", Names({"default", "zero"})) == "zero";
  r.RejectUnknownKeys();
  return s;
}

PriorSpec ReadPriorSpec(ConfigReader& r) {
  PriorSpec s;
  s.linear = r.String("type", "mlp", Names({"linear", "mlp"})) == "linear";
  s.hidden = r.SizeList("hidden", s.hidden, 1);
  s.activation = ParseActivation(
      r.String("activation", "relu", Names({"relu", "softplus", "tanh", "identity"})));
  s.zero_output = r.String("output_init", "default", Names({"default", "zero"})) == "zero";
  r.RejectUnknownKeys();
  return s;
}

SweepSpec ParseSweepSpec(const nlohmann::json& doc) {
  ConfigReader root(doc);
  SweepSpec spec;

  ConfigReader gen = root.Section("generator", true);
  gen.Require("name");
  const std::string name = gen.String("name", "two-moons", Names({"two-moons", "meta-regression"}));
  spec.generator.kind = ParseGeneratorKind(name);
  spec.generator.n = gen.Size("n", spec.generator.n, 1);
  spec.generator.nuisance = gen.Size("nuisance", spec.generator.nuisance);
  spec.generator.p = gen.Size("p", spec.generator.p, 1);
  spec.generator.k = gen.Size("k", spec.generator.k, 1);
  spec.generator.noise_std = gen.Number("noise_std", spec.generator.noise_std, 0.0);
  gen.RejectUnknownKeys();

  if (root.Has("sweep")) {
    ConfigReader axis = root.Section("sweep");
    axis.Require("parameter");
    axis.Require("values");
    SweepAxis a;
    a.parameter = axis.String("parameter", "nuisance", Names({"n", "nuisance", "p", "k", "noise_std"}));
    a.values = axis.NumberList("values", {}, 0.0);
    axis.RejectUnknownKeys();
    spec.axis = a;
  }

  spec.seeds = root.UnsignedList("seeds", spec.seeds);

  std::set<std::string> names;
  for (ConfigReader& v : root.SectionList("variants", true)) {
    VariantSpec variant;
    v.Require("kind");
    variant.kind = ParseVariantKind(v.String(
        "kind", "mlp",
        Names({"mlp", "mlp_l1", "mlp_l2", "dapr", "dapr_noise", "lasso", "merge", "naive"})));
    variant.name = v.String("name", std::string(VariantKindName(variant.kind)));
    if (!names.insert(variant.name).second) v.Fail("name", "duplicate variant name '" + variant.name + "'");
    ConfigReader model = v.Section("model");
    variant.model = ReadNetworkSpec(model);
    ConfigReader prior = v.Section("prior");
    variant.prior = ReadPriorSpec(prior);
    variant.lambdas = v.NumberList("lambda", {}, 0.0);
    variant.learning_rates = v.NumberList("lr_f", {}, 0.0, true);
    v.RejectUnknownKeys();
    spec.variants.push_back(std::move(variant));
  }

  ConfigReader trainer = root.Section("trainer");
  spec.trainer = ReadTrainerConfig(trainer);
  trainer.RejectUnknownKeys();
  root.RejectUnknownKeys();
  root.ThrowIfErrors();

  for (const VariantSpec& v : spec.variants) {
    if (spec.generator.kind == GeneratorKind::kTwoMoons && IsLinear(v.kind)) {
      throw ConfigError({"variants: '" + v.name + "' (" + std::string(VariantKindName(v.kind)) +
                         ") needs a regression generator"});
    }
  }
  return spec;
}

TrialResult RunTrial(const SweepSpec& spec, const VariantSpec& variant, const GeneratedData& data,
                     double setting, std::uint64_t seed) {
  TrialResult out;
  out.variant = variant.name;
  out.setting = setting;
  out.seed = seed;
  out.prior_spearman = kNaN;
  try {
    const Dataset& dataset = data.dataset;
    const TaskKind task = dataset.task;
    const std::size_t p = dataset.num_features();
    const std::vector<double> lambdas =
        variant.lambdas.empty() ? DefaultLambdaGrid(variant.kind) : variant.lambdas;

    if (variant.kind == VariantKind::kLasso || variant.kind == VariantKind::kMerge) {
      if (task != TaskKind::kRegression) throw InvalidArgument("linear baselines need regression data");
      const Tensor x = dataset.Features(Split::kTrain);
      const std::vector<double> y = dataset.Labels(Split::kTrain);
      const double lambda_max = variant.kind == VariantKind::kLasso ? LassoLambdaMax(x, y) : 1.0;
      std::optional<Metrics> best_val;
      LinearModel best;
      for (double l : lambdas) {
        LinearModel model;
        if (variant.kind == VariantKind::kLasso) {
          model = LassoFit(x, y, l * lambda_max);
        } else {
          MergeConfig mc;
          mc.coupling = l;
          model = MergeFit(x, y, data.meta.values, mc).model;
        }
        const Metrics val = EvaluateLinear(model, dataset, Split::kVal);
        if (!best_val || BetterSelection(task, val, *best_val)) {
          best_val = val;
          best = model;
          out.lambda = variant.kind == VariantKind::kLasso ? l * lambda_max : l;
        }
      }
      out.val_metric = best_val->value();
      out.test_metric = EvaluateLinear(best, dataset, Split::kTest).value();
      out.ok = true;
      return out;
    }

    const std::vector<double> rates =
        variant.learning_rates.empty() ? DefaultLearningRateGrid() : variant.learning_rates;
    const std::vector<std::size_t> hidden =
        variant.model.hidden ? *variant.model.hidden
                             : HiddenOf(DefaultArchitecture(spec.generator.kind, p));
    const std::vector<double> grid =
        variant.kind == VariantKind::kMlp || variant.kind == VariantKind::kNaive
            ? std::vector<double>{0.0}
            : lambdas;
    const std::uint64_t init_seed = SubstreamSeed(seed, "init");
    const MetaFeatureMatrix meta = variant.kind == VariantKind::kDaprNoise
                                       ? GenNoiseMetaFeatures(data.meta.feature_names,
                                                              data.meta.width(), seed)
                                       : data.meta;

    std::optional<Metrics> best_val;
    Mlp best_model;
    Mlp best_prior;
    for (double l : grid) {
      for (double lr : rates) {
        DaprConfig config = spec.trainer;
        config.seed = seed;
        config.loss = DefaultLoss(task);
        config.lambda = l;
        config.lr_f = lr;
        Mlp model;
        Mlp prior;
        std::size_t best_epoch = 0;
        Metrics val;
        if (variant.kind == VariantKind::kNaive) {
          StandardResult r = NaiveMetaFeatureMlp(
              dataset, meta,
              BuildNetwork(variant.model, NaiveInputWidth(p, meta.width()), hidden, init_seed),
              config);
          // Evaluate through the augmented inputs.
          const Dataset augmented = AppendMetaFeatures(dataset, meta);
          val = Evaluate(r.model, augmented, Split::kVal);
          if (!best_val || BetterSelection(task, val, *best_val)) {
            best_val = val;
            out.lambda = l;
            out.lr_f = lr;
            out.best_epoch = r.history.best_epoch;
            out.test_metric = Evaluate(r.model, augmented, Split::kTest).value();
          }
          continue;
        }
        Mlp init = BuildNetwork(variant.model, p, hidden, init_seed);
        if (IsDapr(variant.kind)) {
          DaprResult r = TrainDapr(dataset, meta, std::move(init),
                                   BuildPrior(variant.prior, meta.width(),
                                              SubstreamSeed(seed, "prior-init")),
                                   config);
          model = std::move(r.model);
          prior = std::move(r.prior);
          best_epoch = r.history.best_epoch;
        } else {
          WeightRegularizer reg;
          if (variant.kind == VariantKind::kMlpL1) reg = {WeightPenalty::kL1, l};
          if (variant.kind == VariantKind::kMlpL2) reg = {WeightPenalty::kL2, l};
          StandardResult r = TrainStandard(dataset, std::move(init), config, reg);
          model = std::move(r.model);
          best_epoch = r.history.best_epoch;
        }
        val = Evaluate(model, dataset, Split::kVal);
        if (!best_val || BetterSelection(task, val, *best_val)) {
          best_val = val;
          best_model = std::move(model);
          best_prior = std::move(prior);
          out.lambda = l;
          out.lr_f = lr;
          out.best_epoch = best_epoch;
        }
      }
    }
    out.val_metric = best_val->value();
    if (variant.kind != VariantKind::kNaive) {
      out.test_metric = Evaluate(best_model, dataset, Split::kTest).value();
    }
    if (IsDapr(variant.kind) && !data.true_weights.empty()) {
      const std::vector<double> g = ToVector(best_prior.Predict(meta.values));
      std::vector<double> abs_g(g.size());
      std::vector<double> abs_w(data.true_weights.size());
      for (std::size_t i = 0; i < g.size(); ++i) abs_g[i] = std::abs(g[i]);
      for (std::size_t i = 0; i < abs_w.size(); ++i) abs_w[i] = std::abs(data.true_weights[i]);
      out.prior_spearman = SpearmanCorrelation(abs_g, abs_w);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

std::vector<AggregateResult> Aggregate(const std::vector<TrialResult>& trials) {
  std::vector<AggregateResult> out;
  std::vector<std::vector<double>> metrics;
  std::vector<std::vector<double>> spearman;
  auto find = [&](const TrialResult& t) -> std::size_t {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const bool same_setting = (std::isnan(out[i].setting) && std::isnan(t.setting)) ||
                                out[i].setting == t.setting;
      if (out[i].variant == t.variant && same_setting) return i;
    }
    out.push_back({t.variant, t.setting, 0, 0.0, 0.0, kNaN});
    metrics.emplace_back();
    spearman.emplace_back();
    return out.size() - 1;
  };
  for (const TrialResult& t : trials) {
    const std::size_t i = find(t);
    if (!t.ok) continue;
    metrics[i].push_back(t.test_metric);
    if (!std::isnan(t.prior_spearman)) spearman[i].push_back(t.prior_spearman);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].n = metrics[i].size();
    out[i].mean = metrics[i].empty() ? kNaN : Mean(metrics[i]);
    out[i].standard_error = metrics[i].empty() ? kNaN : StandardError(metrics[i]);
    if (!spearman[i].empty()) out[i].mean_prior_spearman = Mean(spearman[i]);
  }
  return out;
}

SweepResult RunSweep(const SweepSpec& spec, std::size_t jobs, const TrialCallback& on_trial) {
  if (spec.variants.empty()) throw InvalidArgument("sweep has no variants");
  if (spec.seeds.empty()) throw InvalidArgument("sweep has no seeds");
  spec.trainer.Validate();
  const std::vector<double> settings = spec.axis ? spec.axis->values : std::vector<double>{kNaN};

  struct Group {
    double setting;
    std::uint64_t seed;
    std::optional<GeneratedData> data;
    std::string error;
  };
  std::vector<Group> groups;
  for (double s : settings) {
    for (std::uint64_t seed : spec.seeds) {
      Group g{s, seed, std::nullopt, {}};
      try {
        const GeneratorSpec gen = spec.axis ? spec.generator.With(spec.axis->parameter, s)
                                            : spec.generator;
        g.data = Generate(gen, seed);
      } catch (const std::exception& e) {
        g.error = std::string("data generation failed: ") + e.what();
      }
      groups.push_back(std::move(g));
    }
  }

  const std::size_t n_variants = spec.variants.size();
  SweepResult result;
  result.trials.resize(groups.size() * n_variants);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < result.trials.size(); t = next++) {
      const Group& g = groups[t / n_variants];
      const VariantSpec& v = spec.variants[t % n_variants];
      TrialResult r;
      if (g.data) {
        r = RunTrial(spec, v, *g.data, g.setting, g.seed);
      } else {
        r.variant = v.name;
        r.setting = g.setting;
        r.seed = g.seed;
        r.prior_spearman = kNaN;
        r.error = g.error;
      }
      result.trials[t] = r;
      if (on_trial) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        on_trial(r);
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, result.trials.size()));
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < n_threads; ++i) threads.emplace_back(worker);
  worker();
  for (std::thread& th : threads) th.join();

  for (const TrialResult& t : result.trials) result.failures += t.ok ? 0 : 1;
  result.aggregates = Aggregate(result.trials);
  return result;
}

void WriteResultsCsv(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  auto num = [](double v) { return std::isnan(v) ? std::string() : FormatDouble(v); };
  WriteCsvRow(out, {"aggregate", "variant", "setting", "seed", "ok", "lambda", "lr_f",
                    "val_metric", "test_metric", "best_epoch", "prior_spearman", "n", "mean",
                    "se", "error"});
  for (const TrialResult& t : result.trials) {
    std::string error = t.error;
    for (char& c : error) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    WriteCsvRow(out, {"0", t.variant, FormatSetting(t.setting), std::to_string(t.seed),
                      t.ok ? "1" : "0", t.ok ? num(t.lambda) : "", t.ok ? num(t.lr_f) : "",
                      t.ok ? num(t.val_metric) : "", t.ok ? num(t.test_metric) : "",
                      t.ok ? std::to_string(t.best_epoch) : "", num(t.prior_spearman), "", "", "",
                      error});
  }
  for (const AggregateResult& a : result.aggregates) {
    WriteCsvRow(out, {"1", a.variant, FormatSetting(a.setting), "", "", "", "", "", "", "",
                      num(a.mean_prior_spearman), std::to_string(a.n), num(a.mean),
                      num(a.standard_error), ""});
  }
}

}  // namespace dapr
