// Copyright 2026 The angmetric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "angmetric/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "angmetric/evaluation.hpp"
#include "angmetric/gradient_check.hpp"
#include "angmetric/io.hpp"
#include "angmetric/training.hpp"

namespace angmetric {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

struct SynthFlags {
  std::size_t classes = 10;
  std::size_t per_class = 20;
  std::size_t dim = 32;
  double center_scale = 1.0;
  double noise = 0.1;
  std::size_t nuisance_dims = 0;
  double nuisance_sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct SplitFlags {
  std::string data;
  double train_fraction = 0.5;
  std::uint64_t seed = 0;
  std::string train_out;
  std::string test_out;
};

struct TrainFlags {
  std::string data;
  std::string loss;
  std::optional<double> alpha;
  double margin = kDefaultMargin;
  double lambda = kDefaultLambda;
  std::size_t batch = 32;
  std::size_t iters = 2000;
  double lr = 0.05;
  std::size_t embed_dim = 16;
  std::string encoder = "linear";
  std::size_t hidden_dim = 64;
  bool normalize = false;
  std::uint64_t seed = 0;
  std::string out_model;
  std::string out_history;
};

struct EmbedFlags {
  std::string model;
  std::string data;
  std::string out;
};

struct EvalFlags {
  std::string data;
  std::vector<std::size_t> recall{1, 2, 4, 8};
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
};

struct GradCheckFlags {
  std::string loss;
  std::size_t trials = 1000;
  std::size_t dim = 8;
  double tol = 1e-5;
  std::uint64_t seed = 0;
};

struct SweepFlags {
  TrainFlags train;
  std::string eval_data;
  std::vector<double> alphas;
  std::vector<std::size_t> recall{1, 2, 4, 8};
  std::optional<std::size_t> k;
};

void add_train_options(CLI::App* cmd, TrainFlags& f, bool with_outputs) {
  cmd->add_option("--data", f.data, "training feature file")->required();
  cmd->add_option("--loss", f.loss,
                  "triplet | triplet-npair | angular | npair | npair-angular")
      ->required();
  cmd->add_option("--margin", f.margin, "triplet margin")->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "angular weight in npair-angular")
      ->capture_default_str();
  cmd->add_option("--batch", f.batch, "mini-batch size")->capture_default_str();
  cmd->add_option("--iters", f.iters, "training iterations")->capture_default_str();
  cmd->add_option("--lr", f.lr, "learning rate")->capture_default_str();
  cmd->add_option("--embed-dim", f.embed_dim, "embedding dimension")
      ->capture_default_str();
  cmd->add_option("--encoder", f.encoder, "identity | linear | mlp")
      ->capture_default_str();
  cmd->add_option("--hidden-dim", f.hidden_dim, "mlp hidden width")
      ->capture_default_str();
  cmd->add_flag("--normalize", f.normalize, "L2-normalize embeddings");
  cmd->add_option("--seed", f.seed, "random seed")->required();
  if (with_outputs) {
    cmd->add_option("--alpha", f.alpha, "angle bound in degrees");
    cmd->add_option("--out-model", f.out_model, "model file to write")->required();
    cmd->add_option("--out-history", f.out_history,
                    "per-iteration loss file to write");
  }
}

TrainConfig make_config(const TrainFlags& f, std::size_t input_dim) {
  TrainConfig c;
  const auto loss = parse_loss_kind(f.loss);
  if (!loss) throw UsageError("unknown loss '" + f.loss + "'");
  c.loss = *loss;
  if (uses_alpha(c.loss)) {
    if (!f.alpha) {
      throw UsageError("--alpha is required for loss '" + f.loss + "'");
    }
    c.alpha_degrees = *f.alpha;
  }
  const auto kind = parse_encoder_kind(f.encoder);
  if (!kind) throw UsageError("unknown encoder '" + f.encoder + "'");
  c.margin = f.margin;
  c.lambda = f.lambda;
  c.batch_size = f.batch;
  c.iterations = f.iters;
  c.learning_rate = f.lr;
  c.seed = f.seed;
  c.encoder.kind = *kind;
  c.encoder.input_dim = input_dim;
  c.encoder.embed_dim = *kind == EncoderKind::kIdentity ? input_dim : f.embed_dim;
  c.encoder.hidden_dim = f.hidden_dim;
  c.encoder.normalize_output = f.normalize;
  try {
    validate_config(c);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::string history_text(const std::vector<double>& history) {
  std::string out;
  for (double v : history) out += format_double(v) + '\n';
  return out;
}

std::optional<bool> normalize_flag_from(const std::vector<std::string>& comments) {
  const std::string key = "normalize_output=";
  for (const auto& c : comments) {
    const auto pos = c.find(key);
    if (pos == std::string::npos) continue;
    const char v = pos + key.size() < c.size() ? c[pos + key.size()] : '?';
    if (v == '1') return true;
    if (v == '0') return false;
  }
  return std::nullopt;
}

FeatureFile embed_file(const EncoderModel& model, const FeatureFile& in) {
  if (in.data.dim() != model.spec().input_dim) {
    throw InvalidInput("model expects input dimension " +
                       std::to_string(model.spec().input_dim) +
                       " but data has dimension " + std::to_string(in.data.dim()));
  }
  FeatureFile out;
  out.comments.push_back(std::string("normalize_output=") +
                         (model.spec().normalize_output ? "1" : "0"));
  out.data = LabeledDataset(encode(model, in.data.samples()), in.data.labels());
  return out;
}

std::string eval_report(const FeatureFile& file, std::span<const std::size_t> recall,
                        std::optional<std::size_t> k, std::uint64_t seed) {
  MetricReport report = evaluate_embeddings(file.data.samples(), file.data.labels(),
                                            recall, k, seed);
  report.normalize_output = normalize_flag_from(file.comments);
  return format_report(report);
}

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  const LabeledDataset data = generate_synthetic(f.classes, f.per_class, f.dim,
                                                 f.center_scale, f.noise, f.seed,
                                                 {f.nuisance_dims, f.nuisance_sigma});
  write_text_file(f.out, serialize_feature_file(data));
  out << "rows\t" << data.size() << "\nclasses\t" << data.num_classes()
      << "\ndim\t" << data.dim() << '\n';
  return kExitOk;
}

int cmd_split(const SplitFlags& f, std::ostream& out) {
  const FeatureFile in = read_feature_file(f.data);
  const auto [train, test] = split_by_class(in.data, f.train_fraction, f.seed);
  write_text_file(f.train_out, serialize_feature_file(train));
  write_text_file(f.test_out, serialize_feature_file(test));
  out << "train_rows\t" << train.size() << "\ntrain_classes\t"
      << train.num_classes() << "\ntest_rows\t" << test.size()
      << "\ntest_classes\t" << test.num_classes() << '\n';
  return kExitOk;
}

int cmd_train(const TrainFlags& f, std::ostream& out) {
  const FeatureFile in = read_feature_file(f.data);
  const TrainConfig config = make_config(f, in.data.dim());
  const TrainResult result = train(in.data, config);
  write_text_file(f.out_model, serialize_model(result.model));
  if (!f.out_history.empty()) {
    write_text_file(f.out_history, history_text(result.history));
  }
  out << "loss\t" << loss_kind_name(config.loss) << "\niterations\t"
      << result.history.size() << "\ninitial_loss\t"
      << fixed6(result.history.front()) << "\nfinal_loss\t"
      << fixed6(result.history.back()) << '\n';
  return kExitOk;
}

int cmd_embed(const EmbedFlags& f, std::ostream& out) {
  const EncoderModel model = read_model_file(f.model);
  const FeatureFile embedded = embed_file(model, read_feature_file(f.data));
  write_text_file(f.out, serialize_feature_file(embedded.data, embedded.comments));
  out << "rows\t" << embedded.data.size() << "\ndim\t" << embedded.data.dim()
      << '\n';
  return kExitOk;
}

int cmd_eval(const EvalFlags& f, std::ostream& out) {
  out << eval_report(read_feature_file(f.data), f.recall, f.k, f.seed);
  return kExitOk;
}

int cmd_grad_check(const GradCheckFlags& f, std::ostream& out) {
  const auto loss = parse_checked_loss(f.loss);
  if (!loss) throw UsageError("unknown loss '" + f.loss + "'");
  GradCheckOptions opts;
  opts.trials = f.trials;
  opts.dim = f.dim;
  opts.tolerance = f.tol;
  opts.seed = f.seed;
  const GradCheckReport r = run_gradient_check(*loss, opts);
  out << "loss\t" << checked_loss_name(*loss) << "\ntrials\t" << r.trials
      << "\nchecked\t" << r.checked << "\nkink_skipped\t" << r.kink_skipped
      << "\nmax_relative_error\t" << sci(r.max_relative_error) << "\ntolerance\t"
      << sci(f.tol) << "\nresult\t" << (r.passed ? "pass" : "fail") << '\n';
  return r.passed ? kExitOk : kExitRuntime;
}

int cmd_sweep_alpha(const SweepFlags& f, std::ostream& out) {
  if (f.alphas.empty()) throw UsageError("--alphas needs at least one value");
  const FeatureFile train_file = read_feature_file(f.train.data);
  const FeatureFile eval_file =
      f.eval_data.empty() ? train_file : read_feature_file(f.eval_data);
  // Validate every alpha before spending time on training.
  std::vector<TrainConfig> configs;
  for (double alpha : f.alphas) {
    TrainFlags tf = f.train;
    tf.alpha = alpha;
    configs.push_back(make_config(tf, train_file.data.dim()));
    if (!uses_alpha(configs.back().loss)) {
      throw UsageError("sweep-alpha needs an angular loss, got '" + f.train.loss + "'");
    }
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const TrainResult result = train(train_file.data, configs[i]);
    // Round-trip through the model text so the sweep sees exactly what a
    // separate train/embed run would.
    std::istringstream model_text(serialize_model(result.model));
    const EncoderModel model = parse_model(model_text);
    out << "# alpha=" << format_double(f.alphas[i]) << '\n'
        << eval_report(embed_file(model, eval_file), f.recall, f.k, f.train.seed);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Angular-loss metric learning toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SynthFlags synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic feature file");
  c_synth->add_option("--classes", synth.classes)->capture_default_str();
  c_synth->add_option("--per-class", synth.per_class)->capture_default_str();
  c_synth->add_option("--dim", synth.dim)->capture_default_str();
  c_synth->add_option("--center-scale", synth.center_scale)->capture_default_str();
  c_synth->add_option("--noise", synth.noise)->capture_default_str();
  c_synth->add_option("--nuisance-dims", synth.nuisance_dims,
                      "trailing coordinates that get extra shared noise")
      ->capture_default_str();
  c_synth->add_option("--nuisance-sigma", synth.nuisance_sigma)->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->required();
  c_synth->add_option("--out", synth.out)->required();

  SplitFlags split;
  auto* c_split = app.add_subcommand("split", "class-disjoint train/test split");
  c_split->add_option("--data", split.data)->required();
  c_split->add_option("--train-fraction", split.train_fraction)->capture_default_str();
  c_split->add_option("--seed", split.seed)->required();
  c_split->add_option("--train-out", split.train_out)->required();
  c_split->add_option("--test-out", split.test_out)->required();

  TrainFlags trainf;
  auto* c_train = app.add_subcommand("train", "train an encoder");
  add_train_options(c_train, trainf, true);

  EmbedFlags embed;
  auto* c_embed = app.add_subcommand("embed", "embed a feature file with a model");
  c_embed->add_option("--model", embed.model)->required();
  c_embed->add_option("--data", embed.data)->required();
  c_embed->add_option("--out", embed.out)->required();

  EvalFlags evalf;
  auto* c_eval = app.add_subcommand("eval", "Recall@R, NMI and F1 of embeddings");
  c_eval->add_option("--data", evalf.data)->required();
  c_eval->add_option("--recall", evalf.recall, "comma-separated R values")
      ->delimiter(',');
  c_eval->add_option("--k", evalf.k, "k-means clusters (default: #labels)");
  c_eval->add_option("--seed", evalf.seed)->required();

  GradCheckFlags gc;
  auto* c_gc = app.add_subcommand("grad-check", "finite-difference gradient check");
  c_gc->add_option("--loss", gc.loss,
                   "triplet | angular | angular-batch | npair | npair-angular | "
                   "triplet-npair")
      ->required();
  c_gc->add_option("--trials", gc.trials)->capture_default_str();
  c_gc->add_option("--dim", gc.dim)->capture_default_str();
  c_gc->add_option("--tol", gc.tol)->capture_default_str();
  c_gc->add_option("--seed", gc.seed)->required();

  SweepFlags sweep;
  sweep.train.loss = "npair-angular";
  auto* c_sweep = app.add_subcommand("sweep-alpha", "train and evaluate per alpha");
  add_train_options(c_sweep, sweep.train, false);
  c_sweep->get_option("--loss")->required(false);
  c_sweep->add_option("--alphas", sweep.alphas, "comma-separated degrees")
      ->delimiter(',')
      ->required();
  c_sweep->add_option("--eval-data", sweep.eval_data,
                      "feature file to evaluate on (default: --data)");
  c_sweep->add_option("--recall", sweep.recall)->delimiter(',');
  c_sweep->add_option("--k", sweep.k);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_synth) return cmd_synth(synth, out);
    if (*c_split) return cmd_split(split, out);
    if (*c_train) return cmd_train(trainf, out);
    if (*c_embed) return cmd_embed(embed, out);
    if (*c_eval) return cmd_eval(evalf, out);
    if (*c_gc) return cmd_grad_check(gc, out);
    if (*c_sweep) return cmd_sweep_alpha(sweep, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitData;
  } catch (const SamplingError& e) {
    err << "sampling error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace angmetric
