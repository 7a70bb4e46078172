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

#include "dapr_cli/run_config.hpp"

namespace dapr::cli {
namespace {

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig ParseRunConfig(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.document = doc;
  ConfigReader root(doc);
  c.seed = root.Unsigned("seed", 0);
  if (root.Has("output")) c.output = Resolve(base_dir, root.String("output", ""));

  ConfigReader data = root.Section("data", true);
  if (data.valid() && data.Has("generator") == data.Has("files")) {
    data.Fail("", "exactly one of 'generator' or 'files' is required");
  }
  if (data.Has("generator")) {
    ConfigReader gen = data.Section("generator");
    gen.Require("name");
    GeneratorSpec g;
    g.kind = ParseGeneratorKind(
        gen.String("name", "two-moons", {"two-moons", "meta-regression"}));
    g.n = gen.Size("n", g.n, 1);
    g.nuisance = gen.Size("nuisance", g.nuisance);
    g.p = gen.Size("p", g.p, 1);
    g.k = gen.Size("k", g.k, 1);
    g.noise_std = gen.Number("noise_std", g.noise_std, 0.0);
    gen.RejectUnknownKeys();
    c.generator = g;
  }
  if (data.Has("files")) {
    ConfigReader files = data.Section("files");
    for (const char* key : {"features", "labels", "metafeatures"}) files.Require(key);
    DataFiles f;
    f.features = Resolve(base_dir, files.String("features", ""));
    f.labels = Resolve(base_dir, files.String("labels", ""));
    f.metafeatures = Resolve(base_dir, files.String("metafeatures", ""));
    if (files.Has("splits")) f.splits = Resolve(base_dir, files.String("splits", ""));
    f.task = ParseTaskKind(files.String("task", "regression", {"regression", "classification"}));
    f.train_fraction = files.Number("train_fraction", f.train_fraction, 0.0, true);
    f.val_fraction = files.Number("val_fraction", f.val_fraction, 0.0, true);
    if (f.train_fraction + f.val_fraction >= 1.0) {
      files.Fail("val_fraction", "train_fraction + val_fraction must be < 1");
    }
    files.RejectUnknownKeys();
    c.files = f;
  }
  data.RejectUnknownKeys();

  ConfigReader model = root.Section("model", true);
  ConfigReader predictor = model.Section("predictor");
  c.predictor = ReadNetworkSpec(predictor);
  ConfigReader prior = model.Section("prior");
  c.prior = ReadPriorSpec(prior);
  model.RejectUnknownKeys();

  ConfigReader trainer = root.Section("trainer", true);
  trainer.Require("variant");
  c.variant = ParseVariantKind(trainer.String(
      "variant", "dapr",
      {"mlp", "mlp_l1", "mlp_l2", "dapr", "dapr_noise", "lasso", "merge", "naive"}));
  c.trainer = ReadTrainerConfig(trainer);
  c.weight_penalty = trainer.Number("weight_penalty", c.weight_penalty, 0.0);
  c.lasso_lambda = trainer.Number("lasso_lambda", c.lasso_lambda, 0.0);
  ConfigReader merge = trainer.Section("merge");
  c.merge.coupling = merge.Number("coupling", c.merge.coupling, 0.0);
  c.merge.ridge = merge.Number("ridge", c.merge.ridge, 0.0);
  c.merge.max_iterations = merge.Size("max_iterations", c.merge.max_iterations, 1);
  c.merge.tolerance = merge.Number("tolerance", c.merge.tolerance, 0.0, true);
  merge.RejectUnknownKeys();
  trainer.RejectUnknownKeys();

  if (root.Has("explain")) {
    ConfigReader explain = root.Section("explain");
    ExplainSettings e;
    e.n_samples = explain.Size("n_samples", e.n_samples, 1);
    e.top_n = explain.Size("top_n", e.top_n);
    e.grid = explain.Size("grid", e.grid, 2);
    e.pdp = explain.StringList("pdp", {});
    explain.RejectUnknownKeys();
    c.explain = e;
  }
  root.RejectUnknownKeys();
  root.ThrowIfErrors();
  return c;
}

}  // namespace dapr::cli
