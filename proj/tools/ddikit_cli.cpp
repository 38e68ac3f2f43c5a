#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "ddikit/chem/featurize.hpp"
#include "ddikit/chem/smiles.hpp"
#include "ddikit/core/gradcheck.hpp"
#include "ddikit/eval/interpret.hpp"
#include "ddikit/eval/metrics.hpp"
#include "ddikit/eval/negatives.hpp"
#include "ddikit/eval/splits.hpp"
#include "ddikit/io/checkpoint.hpp"
#include "ddikit/io/dataset.hpp"
#include "ddikit/io/run_config.hpp"
#include "ddikit/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace ddikit;

namespace {

// Exit codes: 0 success, 1 validation failure, 2 runtime error.
int run_phases(const std::function<void()>& validate, const std::function<void()>& run) {
  try {
    validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

struct SplitParts {
  std::vector<std::size_t> train, valid, test;
  std::size_t discarded_mixed = 0;
  std::vector<int> train_drugs;
};

/// Builds the configured split over the loaded corpus and, when the pair
/// table carries no explicit negatives, appends sampled ones per split part
/// (corrupting only drugs legal for that part).
SplitParts prepare_splits(io::DatasetBundle& bundle, const io::RunConfig& cfg) {
  SplitParts parts;
  const auto& pairs = bundle.data.pairs;
  const int n_drugs = static_cast<int>(bundle.data.molecules.size());

  if (cfg.split_mode == "inductive") {
    auto spec = eval::inductive_split(pairs, n_drugs, cfg.drug_ratio, cfg.train.seed);
    parts.train = spec.train;
    parts.test = spec.test;
    parts.discarded_mixed = spec.discarded_mixed;
    parts.train_drugs = spec.train_drugs;
  } else {
    auto spec = eval::transductive_split(pairs, {cfg.train_ratio, cfg.valid_ratio, cfg.test_ratio},
                                         cfg.train.seed);
    parts.train = spec.train;
    parts.valid = spec.valid;
    parts.test = spec.test;
  }

  bool has_negatives = false;
  for (const auto& ex : pairs) has_negatives = has_negatives || ex.label == 0;
  if (has_negatives || cfg.negative_ratio <= 0.0) return parts;

  // Positive-only corpus: synthesize negatives per part.
  auto append_negatives = [&](std::vector<std::size_t>& part, std::uint64_t salt,
                              const std::vector<int>& universe) {
    if (part.empty()) return;
    std::vector<data::PairExample> positives;
    positives.reserve(part.size());
    for (auto idx : part) positives.push_back(pairs[idx]);
    auto sampled = universe.empty()
                       ? eval::sample_negatives(positives, n_drugs, cfg.negative_ratio,
                                                core::seed_mix(cfg.train.seed, salt))
                       : eval::sample_negatives_from(positives, universe, cfg.negative_ratio,
                                                     core::seed_mix(cfg.train.seed, salt));
    if (sampled.skipped > 0) {
      std::cerr << "warning: skipped " << sampled.skipped
                << " negatives after 100 rejection attempts\n";
    }
    for (auto& neg : sampled.negatives) {
      part.push_back(bundle.data.pairs.size());
      bundle.data.pairs.push_back(neg);
    }
  };

  std::vector<int> test_drugs;
  if (cfg.split_mode == "inductive") {
    std::vector<char> is_train(static_cast<std::size_t>(n_drugs), 0);
    for (int d : parts.train_drugs) is_train[static_cast<std::size_t>(d)] = 1;
    for (int d = 0; d < n_drugs; ++d) {
      if (!is_train[static_cast<std::size_t>(d)]) test_drugs.push_back(d);
    }
  }
  append_negatives(parts.train, 101, cfg.split_mode == "inductive" ? parts.train_drugs
                                                                   : std::vector<int>{});
  append_negatives(parts.valid, 102, {});
  append_negatives(parts.test, 103, cfg.split_mode == "inductive" ? test_drugs
                                                                  : std::vector<int>{});
  return parts;
}

std::vector<int> labels_of(const data::PairDataset& data, const std::vector<std::size_t>& idx) {
  std::vector<int> labels;
  labels.reserve(idx.size());
  for (auto i : idx) labels.push_back(data.pairs[i].label);
  return labels;
}

std::string loss_log_text(const std::vector<train::EpochLog>& log) {
  std::ostringstream oss;
  oss.precision(10);
  oss << "epoch\tpred\tunc\tkl\ttotal\tlr\n";
  for (const auto& entry : log) {
    oss << entry.epoch << "\t" << entry.loss.pred << "\t" << entry.loss.unc << "\t"
        << entry.loss.kl << "\t" << entry.loss.total << "\t" << entry.lr << "\n";
  }
  return oss.str();
}

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed_override) {
  io::RunConfig cfg;
  io::DatasetBundle bundle;
  return run_phases(
      [&] {
        cfg = io::parse_run_config(config_path);
        if (seed_override) cfg.train.seed = *seed_override;
        cfg.train.validate();
        io::validate_input_paths(cfg);
        bundle = io::load_dataset(cfg.drugs_path, cfg.pairs_path);
      },
      [&] {
        if (bundle.dropped_molecules > 0) {
          std::cerr << "warning: dropped " << bundle.dropped_molecules
                    << " drugs with unparseable SMILES and " << bundle.dropped_pairs
                    << " dependent pairs\n";
        }
        auto parts = prepare_splits(bundle, cfg);
        auto result = train::fit(bundle.data, parts.train, cfg.train);
        write_atomic(cfg.loss_log_path, loss_log_text(result.log));
        io::save_checkpoint(cfg.checkpoint_path, result.params, cfg.train, nullptr,
                            cfg.train.seed);
        std::cout << "trained " << result.optimizer_steps << " optimizer steps over "
                  << parts.train.size() << " pairs\n";
        std::cout << "checkpoint: " << cfg.checkpoint_path << "\n";
        std::cout << "loss log: " << cfg.loss_log_path << "\n";
        std::cout << "final total loss: " << result.log.back().loss.total << "\n";
      });
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint_path,
             const std::string& split_name, const std::string& out_path) {
  io::RunConfig cfg;
  io::DatasetBundle bundle;
  return run_phases(
      [&] {
        cfg = io::parse_run_config(config_path);
        io::validate_input_paths(cfg);
        if (!fs::exists(checkpoint_path)) {
          throw std::runtime_error("checkpoint does not exist: " + checkpoint_path);
        }
        if (split_name != "train" && split_name != "valid" && split_name != "test") {
          throw std::runtime_error("--split must be train, valid or test");
        }
        bundle = io::load_dataset(cfg.drugs_path, cfg.pairs_path);
      },
      [&] {
        auto parts = prepare_splits(bundle, cfg);
        const auto& idx = split_name == "train" ? parts.train
                          : split_name == "valid" ? parts.valid
                                                  : parts.test;
        if (idx.empty()) throw std::runtime_error("split '" + split_name + "' is empty");

        auto params = io::restore_model(io::load_checkpoint(checkpoint_path));
        auto preds = train::predict(params, bundle.data, idx);
        auto labels = labels_of(bundle.data, idx);
        auto report = eval::evaluate(preds.probability, preds.variance, labels, cfg.threshold);

        std::string text = report.to_text();
        if (bundle.data.relation_count > 1) {
          std::vector<std::size_t> positives;
          for (auto i : idx) {
            if (bundle.data.pairs[i].label == 1) positives.push_back(i);
          }
          if (!positives.empty()) {
            auto argmax = train::predict_relation_argmax(params, bundle.data, positives);
            std::vector<int> truth;
            for (auto i : positives) truth.push_back(bundle.data.pairs[i].relation);
            text += "macro_f1\t" +
                    std::to_string(eval::macro_f1(argmax, truth, bundle.data.relation_count)) +
                    "\n";
          }
        }
        std::cout << text;
        if (!out_path.empty()) write_atomic(out_path, text);
      });
}

int cmd_predict(const std::string& checkpoint_path, const std::string& smiles_a,
                const std::string& smiles_b, std::optional<int> relation) {
  chem::MolecularGraph a, b;
  return run_phases(
      [&] {
        if (!fs::exists(checkpoint_path)) {
          throw std::runtime_error("checkpoint does not exist: " + checkpoint_path);
        }
        a = chem::parse_smiles(smiles_a);
        b = chem::parse_smiles(smiles_b);
      },
      [&] {
        chem::featurize_graph(a);
        chem::featurize_graph(b);
        auto params = io::restore_model(io::load_checkpoint(checkpoint_path));
        const int n_rel = params.config.relation_count;
        if (relation && (*relation < 0 || *relation >= n_rel)) {
          throw std::invalid_argument("relation id out of range; checkpoint has " +
                                      std::to_string(n_rel) + " relations");
        }

        int best_relation = relation.value_or(0);
        model::PredictionOutput best;
        if (relation) {
          best = model::forward_pair(params, a, b, *relation, model::Mode::Eval);
        } else {
          // Scan all relations, keep the highest-scoring one.
          bool first = true;
          for (int r = 0; r < n_rel; ++r) {
            auto out = model::forward_pair(params, a, b, r, model::Mode::Eval);
            if (first || out.mu > best.mu) {
              best = out;
              best_relation = r;
              first = false;
            }
          }
        }
        std::cout.precision(10);
        std::cout << "relation\t" << best_relation << (relation ? "" : "\t(argmax)") << "\n";
        std::cout << "probability\t" << best.probability << "\n";
        std::cout << "variance\t" << best.variance << "\n";
        std::cout << "mu\t" << best.mu << "\n";
        std::cout << "s\t" << best.s << "\n";
        std::cout << "alpha_i";
        for (double v : best.alpha_i) std::cout << "\t" << v;
        std::cout << "\nalpha_j";
        for (double v : best.alpha_j) std::cout << "\t" << v;
        std::cout << "\n";
      });
}

int cmd_split(const std::string& config_path, const std::string& prefix) {
  io::RunConfig cfg;
  io::DatasetBundle bundle;
  return run_phases(
      [&] {
        cfg = io::parse_run_config(config_path);
        io::validate_input_paths(cfg);
        bundle = io::load_dataset(cfg.drugs_path, cfg.pairs_path);
      },
      [&] {
        auto parts = prepare_splits(bundle, cfg);
        auto dump = [&](const std::vector<std::size_t>& idx, const std::string& name) {
          if (idx.empty()) return;
          std::ostringstream oss;
          oss << "drug_id_1,drug_id_2,relation_id,label\n";
          for (auto i : idx) {
            const auto& ex = bundle.data.pairs[i];
            oss << bundle.drug_ids[static_cast<std::size_t>(ex.i)] << ","
                << bundle.drug_ids[static_cast<std::size_t>(ex.j)] << "," << ex.relation << ","
                << ex.label << "\n";
          }
          write_atomic(prefix + "_" + name + ".csv", oss.str());
          std::cout << name << ": " << idx.size() << " pairs\n";
        };
        dump(parts.train, "train");
        dump(parts.valid, "valid");
        dump(parts.test, "test");
        if (cfg.split_mode == "inductive") {
          std::ostringstream oss;
          oss << "train_drugs";
          for (int d : parts.train_drugs) {
            oss << "\n" << bundle.drug_ids[static_cast<std::size_t>(d)];
          }
          oss << "\n";
          write_atomic(prefix + "_train_drugs.txt", oss.str());
          std::ostringstream log;
          log << "mode\tinductive\n";
          log << "drug_ratio\t" << cfg.drug_ratio << "\n";
          log << "discarded_mixed_pairs\t" << parts.discarded_mixed << "\n";
          write_atomic(prefix + "_split_log.txt", log.str());
          std::cout << "discarded mixed pairs: " << parts.discarded_mixed << "\n";
        }
      });
}

int cmd_interpret(const std::string& config_path, const std::string& checkpoint_path,
                  const std::string& drug_a, const std::string& drug_b, int relation, int radius,
                  const std::string& prefix) {
  io::RunConfig cfg;
  io::DatasetBundle bundle;
  return run_phases(
      [&] {
        cfg = io::parse_run_config(config_path);
        io::validate_input_paths(cfg);
        if (!fs::exists(checkpoint_path)) {
          throw std::runtime_error("checkpoint does not exist: " + checkpoint_path);
        }
        bundle = io::load_dataset(cfg.drugs_path, cfg.pairs_path);
        for (const auto* id : {&drug_a, &drug_b}) {
          if (!bundle.id_to_index.count(*id)) {
            throw std::runtime_error("unknown drug id '" + *id + "'");
          }
        }
      },
      [&] {
        auto params = io::restore_model(io::load_checkpoint(checkpoint_path));
        const auto& mol_a =
            bundle.data.molecules[static_cast<std::size_t>(bundle.id_to_index.at(drug_a))];
        const auto& mol_b =
            bundle.data.molecules[static_cast<std::size_t>(bundle.id_to_index.at(drug_b))];

        auto similarity_table = [&](const chem::MolecularGraph& mol) {
          auto batch = graph::batch_single(mol, params.config.node_dim, params.config.edge_dim);
          auto enc = model::encode_multiscale(batch, params, model::Mode::Eval);
          auto sim = eval::atom_similarity_matrix(enc.node_states.back());
          std::ostringstream oss;
          oss.precision(8);
          for (std::size_t r = 0; r < sim.n; ++r) {
            for (std::size_t c = 0; c < sim.n; ++c) {
              oss << (c ? "\t" : "") << sim.at(r, c);
            }
            oss << "\n";
          }
          return oss.str();
        };
        write_atomic(prefix + "_similarity_a.tsv", similarity_table(mol_a));
        write_atomic(prefix + "_similarity_b.tsv", similarity_table(mol_b));

        auto attr = eval::atom_attribution(params, mol_a, mol_b, relation, radius);
        std::ostringstream oss;
        oss.precision(8);
        oss << "drug\tatom\telement\tscore\ttop\tin_neighbourhood\n";
        auto dump_side = [&](const eval::AttributionSide& side, const chem::MolecularGraph& mol,
                             const std::string& tag) {
          std::set<int> hood(side.neighbourhood.begin(), side.neighbourhood.end());
          for (std::size_t at = 0; at < side.scores.size(); ++at) {
            oss << tag << "\t" << at << "\t" << mol.atoms[at].element << "\t" << side.scores[at]
                << "\t" << (static_cast<int>(at) == side.top_atom ? 1 : 0) << "\t"
                << (hood.count(static_cast<int>(at)) ? 1 : 0) << "\n";
          }
        };
        dump_side(attr.left, mol_a, drug_a);
        dump_side(attr.right, mol_b, drug_b);
        write_atomic(prefix + "_attribution.tsv", oss.str());
        std::cout << "wrote " << prefix << "_similarity_a.tsv, " << prefix
                  << "_similarity_b.tsv, " << prefix << "_attribution.tsv\n";
        if (attr.left.flagged_uniform || attr.right.flagged_uniform) {
          std::cout << "note: zero total gradient, attribution fell back to uniform\n";
        }
      });
}

/// Finite-difference verification of every differentiable primitive plus the
/// full composite loss on a two-pair fixture batch.
int cmd_gradcheck() {
  using core::Tensor;
  bool all_ok = true;
  std::cout.precision(3);

  auto report_line = [&](const std::string& name, const core::GradCheckReport& report) {
    const bool ok = report.ok();
    all_ok = all_ok && ok;
    std::cout << (ok ? "pass" : "FAIL") << "\t" << name << "\tmax_rel_err "
              << report.max_rel_error << "\t(" << report.elements_checked << " elements)\n";
  };

  core::RandomStream rng(2024);
  auto rand_tensor = [&](core::Shape shape, double lo = -1.0, double hi = 1.0) {
    std::vector<double> vals(static_cast<std::size_t>(core::shape_size(shape)));
    for (auto& v : vals) v = rng.uniform(lo, hi);
    return Tensor::from_values(std::move(shape), std::move(vals), true);
  };
  auto check1 = [&](const std::string& name, const std::function<Tensor(const Tensor&)>& op,
                    Tensor x) {
    report_line(name, core::check_gradients(
                          [&](const std::vector<Tensor>& in) {
                            return core::sum_all(core::square(op(in[0])));
                          },
                          {x}, 1e-5, 1e-4));
  };

  check1("sigmoid", [](const Tensor& t) { return core::sigmoid(t); }, rand_tensor({3, 4}));
  check1("tanh", [](const Tensor& t) { return core::tanh_op(t); }, rand_tensor({3, 4}));
  check1("exp", [](const Tensor& t) { return core::exp_op(t); }, rand_tensor({3, 4}));
  check1("log", [](const Tensor& t) { return core::log_op(t); }, rand_tensor({3, 4}, 0.5, 2.0));
  check1("square", [](const Tensor& t) { return core::square(t); }, rand_tensor({3, 4}));
  check1("scale", [](const Tensor& t) { return core::scale(t, -1.7); }, rand_tensor({3, 4}));
  check1("add_scalar", [](const Tensor& t) { return core::add_scalar(t, 0.3); },
         rand_tensor({3, 4}));
  check1("clamp", [](const Tensor& t) { return core::clamp(t, -0.9, 0.9); },
         rand_tensor({3, 4}, -0.8, 0.8));
  check1("transpose", [](const Tensor& t) { return core::transpose(t); }, rand_tensor({3, 4}));
  check1("reshape", [](const Tensor& t) { return core::reshape(t, {4, 3}); }, rand_tensor({3, 4}));
  check1("softmax_rows", [](const Tensor& t) { return core::softmax(t, 1); }, rand_tensor({3, 4}));
  check1("softmax_cols", [](const Tensor& t) { return core::softmax(t, 0); }, rand_tensor({3, 4}));
  check1("sum_axis", [](const Tensor& t) { return core::sum_axis(t, 1); }, rand_tensor({3, 4}));
  check1("mean_axis", [](const Tensor& t) { return core::mean_axis(t, 0); }, rand_tensor({3, 4}));
  check1("mean_all", [](const Tensor& t) { return core::mean_all(t); }, rand_tensor({3, 4}));
  check1("gather_rows", [](const Tensor& t) { return core::gather_rows(t, {2, 0, 2, 1}); },
         rand_tensor({3, 4}));
  check1("scatter_sum", [](const Tensor& t) { return core::scatter_sum(t, {1, 0, 1}, 2); },
         rand_tensor({3, 4}));
  check1("segment_softmax",
         [](const Tensor& t) { return core::segment_softmax(t, {0, 0, 1, 1, 1}, 2); },
         rand_tensor({5, 1}));
  check1("prelu", [](const Tensor& t) {
    return core::prelu(t, Tensor::from_values({1, 1}, {0.25}));
  }, rand_tensor({3, 4}));

  {
    auto a = rand_tensor({3, 4});
    auto b = rand_tensor({4, 2});
    report_line("matmul", core::check_gradients(
                              [](const std::vector<Tensor>& in) {
                                return core::sum_all(core::square(core::matmul(in[0], in[1])));
                              },
                              {a, b}, 1e-5, 1e-4));
  }
  for (auto [name, op] : {std::pair<const char*, Tensor (*)(const Tensor&, const Tensor&)>
                              {"add", core::add}, {"sub", core::sub}, {"mul", core::mul}}) {
    auto a = rand_tensor({2, 5});
    auto b = rand_tensor({2, 5});
    report_line(name, core::check_gradients(
                          [op](const std::vector<Tensor>& in) {
                            return core::sum_all(core::square(op(in[0], in[1])));
                          },
                          {a, b}, 1e-5, 1e-4));
  }
  {
    auto x = rand_tensor({4, 3});
    auto bias = rand_tensor({1, 3});
    report_line("add_rowvec", core::check_gradients(
                                  [](const std::vector<Tensor>& in) {
                                    return core::sum_all(core::square(core::add_rowvec(in[0], in[1])));
                                  },
                                  {x, bias}, 1e-5, 1e-4));
    auto colv = rand_tensor({4, 1});
    report_line("mul_colvec", core::check_gradients(
                                  [](const std::vector<Tensor>& in) {
                                    return core::sum_all(core::square(core::mul_colvec(in[0], in[1])));
                                  },
                                  {x, colv}, 1e-5, 1e-4));
    auto c1 = rand_tensor({2, 3});
    auto c2 = rand_tensor({2, 3});
    report_line("concat", core::check_gradients(
                              [](const std::vector<Tensor>& in) {
                                return core::sum_all(core::square(core::concat(in[0], in[1], 1)));
                              },
                              {c1, c2}, 1e-5, 1e-4));
  }
  {
    auto mu = rand_tensor({5, 1}, -2.0, 2.0);
    auto y = Tensor::from_values({5, 1}, {1, 0, 1, 0, 1});
    report_line("bce_with_logits", core::check_gradients(
                                       [&y](const std::vector<Tensor>& in) {
                                         return core::bce_with_logits_mean(in[0], y);
                                       },
                                       {mu}, 1e-5, 1e-4));
  }
  for (bool training : {true, false}) {
    auto x = rand_tensor({5, 3});
    auto gamma = rand_tensor({1, 3}, 0.5, 1.5);
    auto beta = rand_tensor({1, 3});
    report_line(training ? "batchnorm_train" : "batchnorm_eval",
                core::check_gradients(
                    [training](const std::vector<Tensor>& in) {
                      core::BatchNormStats stats(3);
                      return core::sum_all(core::square(
                          core::batchnorm(in[0], in[1], in[2], stats, training, false)));
                    },
                    {x, gamma, beta}, 1e-5, 1e-4));
  }

  // Full composite loss on a two-pair batch of three-atom molecules.
  {
    model::ModelConfig mc;
    mc.hidden_dim = 6;
    mc.scales = 2;
    mc.iterations = 2;
    mc.relation_count = 2;
    model::ModelParams params(mc);
    core::RandomStream init(7);
    params.init(init);

    auto m1 = chem::parse_smiles("CCO");
    auto m2 = chem::parse_smiles("CC=O");
    auto m3 = chem::parse_smiles("CCN");
    auto m4 = chem::parse_smiles("COC");
    for (auto* m : {&m1, &m2, &m3, &m4}) chem::featurize_graph(*m);

    auto left = graph::batch_graphs({&m1, &m3}, chem::kNodeFeatureDim, chem::kEdgeFeatureDim);
    auto right = graph::batch_graphs({&m2, &m4}, chem::kNodeFeatureDim, chem::kEdgeFeatureDim);
    for (std::size_t g = 0; g < 2; ++g) {
      left.noise_seed[g] = core::seed_mix(11, g, 0);
      right.noise_seed[g] = core::seed_mix(11, g, 1);
    }
    auto labels = Tensor::from_values({2, 1}, {1.0, 0.0});

    std::vector<Tensor> inputs;
    for (auto& [name, tensor] : params.named_parameters()) inputs.push_back(tensor);
    auto loss_fn = [&](const std::vector<Tensor>&) {
      auto fwd = model::forward_batch(params, left, model::make_inputs(left), right,
                                      model::make_inputs(right), {0, 1}, model::Mode::Train,
                                      model::BnPolicy{true, false});
      auto loss = train::total_loss(train::bce_with_logits(fwd.mu, labels),
                                    train::uncertainty_loss(fwd.mu, fwd.s, labels),
                                    core::add(core::mean_all(fwd.kl_i), core::mean_all(fwd.kl_j)),
                                    0.1, 0.01);
      return loss.total;
    };
    report_line("composite_loss", core::check_gradients(loss_fn, inputs, 1e-6, 1e-4));
  }

  std::cout << (all_ok ? "gradcheck: all checks passed\n" : "gradcheck: FAILURES above\n");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drug-drug interaction prediction toolkit"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, out_path, prefix = "out";
  std::string smiles_a, smiles_b, drug_a, drug_b, split_name = "test";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> relation_opt;
  int relation = 0, radius = 1;

  auto* train_cmd = app.add_subcommand("train", "train a model from a run configuration");
  train_cmd->add_option("--config", config_path, "run configuration file")->required();
  std::uint64_t seed_value = 0;
  auto* seed_opt = train_cmd->add_option("--seed", seed_value, "override the configured seed");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  eval_cmd->add_option("--config", config_path, "run configuration file")->required();
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval_cmd->add_option("--split", split_name, "train | valid | test (default test)");
  eval_cmd->add_option("--out", out_path, "also write the report to this file");

  auto* predict_cmd = app.add_subcommand("predict", "score a pair of SMILES strings");
  predict_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  predict_cmd->add_option("--smiles-a", smiles_a, "first drug SMILES")->required();
  predict_cmd->add_option("--smiles-b", smiles_b, "second drug SMILES")->required();
  int predict_relation = -1;
  auto* rel_opt = predict_cmd->add_option("--relation", predict_relation,
                                          "relation id (omit to take the best over relations)");

  auto* split_cmd = app.add_subcommand("split", "emit split files for the configured corpus");
  split_cmd->add_option("--config", config_path, "run configuration file")->required();
  split_cmd->add_option("--out-prefix", prefix, "output file prefix");

  auto* gradcheck_cmd =
      app.add_subcommand("gradcheck", "finite-difference checks of every primitive and the "
                                      "composite loss");

  auto* interpret_cmd =
      app.add_subcommand("interpret", "atom similarity matrices and gradient attribution");
  interpret_cmd->add_option("--config", config_path, "run configuration file")->required();
  interpret_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  interpret_cmd->add_option("--drug-a", drug_a, "first drug id")->required();
  interpret_cmd->add_option("--drug-b", drug_b, "second drug id")->required();
  interpret_cmd->add_option("--relation", relation, "relation id (default 0)");
  interpret_cmd->add_option("--radius", radius, "neighbourhood radius (default 1)");
  interpret_cmd->add_option("--out-prefix", prefix, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*seed_opt) seed_override = seed_value;
  if (*rel_opt) relation_opt = predict_relation;

  if (train_cmd->parsed()) return cmd_train(config_path, seed_override);
  if (eval_cmd->parsed()) return cmd_eval(config_path, checkpoint_path, split_name, out_path);
  if (predict_cmd->parsed()) return cmd_predict(checkpoint_path, smiles_a, smiles_b, relation_opt);
  if (split_cmd->parsed()) return cmd_split(config_path, prefix);
  if (gradcheck_cmd->parsed()) return cmd_gradcheck();
  if (interpret_cmd->parsed()) {
    return cmd_interpret(config_path, checkpoint_path, drug_a, drug_b, relation, radius, prefix);
  }
  return 1;
}
