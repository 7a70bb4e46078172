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

#include "dapr/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "dapr/attribution.hpp"
#include "dapr/csv.hpp"
#include "dapr/error.hpp"
#include "dapr/rng.hpp"

namespace dapr {
namespace {

double LossValue(LossKind loss, const Tensor& outputs, std::span<const double> labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < outputs.rows(); ++i) {
    const double z = outputs(i, 0);
    const double y = labels[static_cast<std::size_t>(i)];
    if (loss == LossKind::kMse) {
      total += (z - y) * (z - y);
    } else {
      const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
      total += softplus - y * z;
    }
  }
  return total / static_cast<double>(outputs.rows());
}

Var LossNode(LossKind loss, Var outputs, const Tensor& labels) {
  Graph& graph = *outputs.graph();
  const Var y = graph.Constant(labels);
  if (loss == LossKind::kMse) return Mean(Square(Sub(outputs, y)));
  return Mean(Sub(Softplus(outputs), Mul(y, outputs)));
}

std::vector<Tensor> GradientValues(std::span<const Var> vars) {
  std::vector<Tensor> out;
  out.reserve(vars.size());
  for (const Var& v : vars) out.push_back(v.value());
  return out;
}

// Shared minibatch bookkeeping of both trainers.
struct TrainingData {
  Tensor train_x;
  std::vector<double> train_y;
  Tensor val_x;
  std::vector<double> val_y;

  explicit TrainingData(const Dataset& dataset)
      : train_x(dataset.Features(Split::kTrain)),
        train_y(dataset.Labels(Split::kTrain)),
        val_x(dataset.Features(Split::kVal)),
        val_y(dataset.Labels(Split::kVal)) {
    if (train_x.rows() == 0) throw InvalidArgument("training split is empty");
    if (val_x.rows() == 0) throw InvalidArgument("validation split is empty");
  }

  std::size_t train_rows() const { return static_cast<std::size_t>(train_x.rows()); }
};

Tensor LabelColumn(std::span<const double> all, std::span<const std::size_t> rows) {
  Tensor out(static_cast<Eigen::Index>(rows.size()), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i), 0) = all[rows[i]];
  return out;
}

// Tracks the best validation loss and decides when to stop.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when this epoch is the new best.
  bool Update(double val_loss) {
    if (val_loss < best_) {
      best_ = val_loss;
      since_best_ = 0;
      return true;
    }
    ++since_best_;
    return false;
  }
  bool ShouldStop() const { return since_best_ >= patience_; }

 private:
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t since_best_ = 0;
};

void CheckFinite(double value, std::size_t epoch, std::size_t batch, const char* term) {
  if (!std::isfinite(value)) {
    throw DivergenceError(epoch, batch, term, "value is " + std::to_string(value));
  }
}

// Runs one optimizer step, reporting a non-finite intermediate as divergence.
template <typename Step>
void GuardedStep(std::size_t epoch, std::size_t batch, const char* term, Step&& step) {
  try {
    step();
  } catch (const NumericError& e) {
    throw DivergenceError(epoch, batch, term, e.what());
  }
}

std::vector<std::vector<std::size_t>> Minibatches(std::size_t n, std::size_t batch_size, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + batch_size);
    batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                         perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

// Attributions of each batch row averaged over samples_per_row single draws.
// Rows of the returned node follow the batch order.
Var BatchAttributions(Graph& graph, const Mlp& model, std::span<const Var> params,
                      const Tensor& batch, const Tensor& references, const EgDraws& draws,
                      std::size_t samples_per_row) {
  const Eigen::Index rows = batch.rows();
  const auto expanded = static_cast<Eigen::Index>(rows * static_cast<Eigen::Index>(samples_per_row));
  Tensor inputs(expanded, batch.cols());
  Tensor refs(expanded, batch.cols());
  for (Eigen::Index s = 0; s < expanded; ++s) {
    inputs.row(s) = batch.row(s % rows);
    refs.row(s) = references.row(static_cast<Eigen::Index>(draws.reference_rows[static_cast<std::size_t>(s)]));
  }
  const Var per_draw = ExpectedGradientsGraph(graph, model, params, inputs, refs, draws.alphas);
  if (samples_per_row == 1) return per_draw;
  Tensor averaging = Tensor::Zero(rows, expanded);
  for (Eigen::Index s = 0; s < expanded; ++s) {
    averaging(s % rows, s) = 1.0 / static_cast<double>(samples_per_row);
  }
  return MatMul(graph.Constant(std::move(averaging)), per_draw);
}

Var ApplyTarget(AttributionTarget target, Var attributions) {
  return target == AttributionTarget::kMagnitude ? Abs(attributions) : attributions;
}

Var PriorImportance(Graph& graph, const Mlp& prior, std::span<const Var> prior_params,
                    const Tensor& meta) {
  return Transpose(prior.Forward(graph.Constant(meta), prior_params));
}

void CheckWidth(const Mlp& model, const Dataset& dataset) {
  if (model.input_width() != dataset.num_features()) {
    throw InvalidArgument("model input width " + std::to_string(model.input_width()) +
                          " does not match " + std::to_string(dataset.num_features()) +
                          " features");
  }
  if (model.output_width() != 1) throw InvalidArgument("prediction model must have one output");
}

}  // namespace

std::string_view LossKindName(LossKind loss) {
  return loss == LossKind::kMse ? "mse" : "bce";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "bce") return LossKind::kBinaryCrossEntropy;
  throw InvalidArgument("unknown loss '" + std::string(name) + "'");
}

std::string_view AttributionTargetName(AttributionTarget target) {
  return target == AttributionTarget::kSigned ? "signed" : "magnitude";
}

AttributionTarget ParseAttributionTarget(std::string_view name) {
  if (name == "signed") return AttributionTarget::kSigned;
  if (name == "magnitude") return AttributionTarget::kMagnitude;
  throw InvalidArgument("unknown attribution target '" + std::string(name) + "'");
}

LossKind DefaultLoss(TaskKind task) {
  return task == TaskKind::kClassification ? LossKind::kBinaryCrossEntropy : LossKind::kMse;
}

void DaprConfig::Validate() const {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(lr_f > 0.0)) throw InvalidArgument("lr_f must be > 0");
  if (!(prior_learning_rate() > 0.0)) throw InvalidArgument("lr_g must be > 0");
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  if (patience == 0) throw InvalidArgument("patience must be >= 1");
  if (eg_samples_per_step == 0) throw InvalidArgument("eg_samples_per_step must be >= 1");
}

void TrainHistory::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "epoch,train_loss,penalty,val_loss,val_metric,best\n";
  for (const EpochRecord& r : epochs) {
    WriteCsvRow(out, {std::to_string(r.epoch), FormatDouble(r.train_loss), FormatDouble(r.penalty),
                      FormatDouble(r.val_loss), FormatDouble(r.val_metric),
                      r.epoch == best_epoch ? "1" : "0"});
  }
}

bool BetterMetric(TaskKind task, double a, double b) {
  return task == TaskKind::kRegression ? a < b : a > b;
}

Metrics EvaluatePredictions(TaskKind task, std::span<const double> predictions,
                            std::span<const double> labels) {
  if (predictions.size() != labels.size()) {
    throw ShapeError("predictions and labels differ in length");
  }
  if (labels.empty()) throw InvalidArgument("cannot evaluate an empty split");
  Metrics m;
  m.task = task;
  const double n = static_cast<double>(labels.size());
  double sq = 0.0, correct = 0.0, ce = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double z = predictions[i];
    const double y = labels[i];
    sq += (z - y) * (z - y);
    if (task == TaskKind::kClassification) {
      const double predicted = z >= 0.0 ? 1.0 : 0.0;  // sigmoid(z) >= 0.5
      correct += predicted == y ? 1.0 : 0.0;
      ce += (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y * z;
    }
  }
  m.mse = sq / n;
  m.accuracy = correct / n;
  m.loss = task == TaskKind::kRegression ? m.mse : ce / n;
  return m;
}

Metrics Evaluate(const Mlp& model, const Dataset& dataset, Split split) {
  const Tensor x = dataset.Features(split);
  if (x.rows() == 0) {
    throw InvalidArgument("split '" + std::string(SplitName(split)) + "' is empty");
  }
  const Tensor out = model.Predict(x);
  return EvaluatePredictions(dataset.task, Values(out), dataset.Labels(split));
}

StandardResult TrainStandard(const Dataset& dataset, Mlp model, const DaprConfig& config,
                             const WeightRegularizer& regularizer, const StepObserver& observer) {
  config.Validate();
  CheckWidth(model, dataset);
  if (!(regularizer.strength >= 0.0)) throw InvalidArgument("weight penalty must be >= 0");
  const TrainingData data(dataset);
  Rng shuffle_rng = MakeRng(config.seed, "shuffle");
  AdamState state({config.lr_f}, model.parameters());
  EarlyStopping stopping(config.patience);
  StandardResult result;
  result.model = model;
  const bool penalized = regularizer.kind != WeightPenalty::kNone && regularizer.strength > 0.0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto batches = Minibatches(data.train_rows(), config.batch_size, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      GuardedStep(epoch, b, "prediction step", [&] {
        Graph graph;
        const std::vector<Var> params = model.Bind(graph);
        const Var x = graph.Constant(GatherRows(data.train_x, batches[b]));
        const Var loss = LossNode(config.loss, model.Forward(x, params),
                                  LabelColumn(data.train_y, batches[b]));
        CheckFinite(loss.value()(0, 0), epoch, b, "prediction loss");
        Var total = loss;
        if (penalized) {
          Var reg;
          for (const Var& p : params) {
            const Var term = regularizer.kind == WeightPenalty::kL1 ? Sum(Abs(p)) : Sum(Square(p));
            reg = reg.valid() ? Add(reg, term) : term;
          }
          total = Add(loss, Scale(reg, regularizer.strength));
          CheckFinite(total.value()(0, 0), epoch, b, "weight penalty");
        }
        const std::vector<Tensor> grads = GradientValues(graph.Gradient(total, params));
        AdamStep(model.parameters(), grads, state);
        if (observer) observer(StepPhase::kPrediction, model, Mlp());
        loss_sum += loss.value()(0, 0);
      });
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(batches.size());
    const Tensor val_out = model.Predict(data.val_x);
    const Metrics val = EvaluatePredictions(dataset.task, Values(val_out), data.val_y);
    record.val_loss = LossValue(config.loss, val_out, data.val_y);
    record.val_metric = val.value();
    CheckFinite(record.val_loss, epoch, batches.size(), "validation loss");
    result.history.epochs.push_back(record);
    if (stopping.Update(record.val_loss)) {
      result.history.best_epoch = epoch;
      result.model = model;
    }
    if (stopping.ShouldStop()) break;
  }
  return result;
}

DaprResult TrainDapr(const Dataset& dataset, const MetaFeatureMatrix& meta, Mlp model, Mlp prior,
                     const DaprConfig& config, const StepObserver& observer) {
  config.Validate();
  CheckWidth(model, dataset);
  if (meta.num_features() != dataset.num_features()) {
    throw InvalidArgument("meta-feature matrix has " + std::to_string(meta.num_features()) +
                          " rows for " + std::to_string(dataset.num_features()) + " features");
  }
  if (prior.input_width() != meta.width() || prior.output_width() != 1) {
    throw InvalidArgument("prior must map " + std::to_string(meta.width()) +
                          " meta-features to one output");
  }
  const TrainingData data(dataset);
  Rng shuffle_rng = MakeRng(config.seed, "shuffle");
  Rng eg_rng = MakeRng(config.seed, "eg");
  AdamState f_state({config.lr_f}, model.parameters());
  AdamState g_state({config.prior_learning_rate()}, prior.parameters());
  EarlyStopping stopping(config.patience);
  DaprResult result;
  result.model = model;
  result.prior = prior;
  const std::size_t draws_per_row = config.eg_samples_per_step;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto batches = Minibatches(data.train_rows(), config.batch_size, shuffle_rng);
    double loss_sum = 0.0;
    double penalty_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const Tensor batch_x = GatherRows(data.train_x, batches[b]);
      const EgDraws draws =
          SampleEgDraws(batches[b].size() * draws_per_row, data.train_rows(), eg_rng);

      // Prediction step: G(M) fixed, gradient flows through the attributions.
      GuardedStep(epoch, b, "prediction step", [&] {
        Graph graph;
        const std::vector<Var> params = model.Bind(graph);
        const Var loss = LossNode(config.loss, model.Forward(graph.Constant(batch_x), params),
                                  LabelColumn(data.train_y, batches[b]));
        CheckFinite(loss.value()(0, 0), epoch, b, "prediction loss");
        Var total = loss;
        if (config.lambda > 0.0) {
          const std::vector<Var> prior_params = prior.Bind(graph, /*requires_grad=*/false);
          const Var importance = PriorImportance(graph, prior, prior_params, meta.values);
          const Var phi = ApplyTarget(
              config.target, BatchAttributions(graph, model, params, batch_x, data.train_x, draws,
                                               draws_per_row));
          const Var penalty = AttributionPenalty(phi, importance);
          CheckFinite(penalty.value()(0, 0), epoch, b, "attribution penalty");
          total = Add(loss, Scale(penalty, config.lambda));
        }
        const std::vector<Tensor> grads = GradientValues(graph.Gradient(total, params));
        AdamStep(model.parameters(), grads, f_state);
        loss_sum += loss.value()(0, 0);
      });
      if (observer) observer(StepPhase::kPrediction, model, prior);

      // Prior step: attributions of the updated f are constants.
      GuardedStep(epoch, b, "prior step", [&] {
        Graph graph;
        const std::vector<Var> frozen = model.Bind(graph, /*requires_grad=*/false);
        const Tensor phi = ApplyTarget(
            config.target, BatchAttributions(graph, model, frozen, batch_x, data.train_x, draws,
                                             draws_per_row)).value();
        const std::vector<Var> prior_params = prior.Bind(graph);
        const Var importance = PriorImportance(graph, prior, prior_params, meta.values);
        const Var penalty = AttributionPenalty(graph.Constant(phi), importance);
        CheckFinite(penalty.value()(0, 0), epoch, b, "prior penalty");
        penalty_sum += penalty.value()(0, 0);
        if (config.update_prior) {
          const Var objective = Scale(penalty, config.lambda);
          const std::vector<Tensor> grads = GradientValues(graph.Gradient(objective, prior_params));
          AdamStep(prior.parameters(), grads, g_state);
          if (observer) observer(StepPhase::kPrior, model, prior);
        }
      });
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(batches.size());
    record.penalty = penalty_sum / static_cast<double>(batches.size());
    const Tensor val_out = model.Predict(data.val_x);
    const Metrics val = EvaluatePredictions(dataset.task, Values(val_out), data.val_y);
    record.val_loss = LossValue(config.loss, val_out, data.val_y);
    record.val_metric = val.value();
    CheckFinite(record.val_loss, epoch, batches.size(), "validation loss");
    result.history.epochs.push_back(record);
    if (stopping.Update(record.val_loss)) {
      result.history.best_epoch = epoch;
      result.model = model;
      result.prior = prior;
    }
    if (stopping.ShouldStop()) break;
  }
  return result;
}

}  // namespace dapr
