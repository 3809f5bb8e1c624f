#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rednet/corruption.hpp"
#include "rednet/engine.hpp"
#include "rednet/error.hpp"
#include "rednet/gradcheck.hpp"
#include "rednet/image.hpp"
#include "rednet/metrics.hpp"
#include "rednet/model_io.hpp"
#include "run_config.hpp"

namespace rednet::cli {

namespace {

std::string format_psnr(double v) {
  if (v == kInfinitePsnr) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string format_ssim(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  return path.string() + ".tmp";
}

// Writes via a temporary sibling and renames it into place.
template <typename Write>
void write_atomically(const std::filesystem::path& path, Write write) {
  const auto tmp = temp_sibling(path);
  try {
    write(tmp);
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

struct TrainArgs {
  std::string config, data, out, log;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig rc = load_run_config(a.config);
  if (!a.data.empty()) rc.data = a.data;
  if (!a.out.empty()) rc.out = a.out;
  if (!a.log.empty()) rc.log = a.log;
  if (a.seed) rc.train.seed = *a.seed;
  if (rc.out.empty()) throw ValueError("train: no model output path (--out or 'out' key)");
  if (rc.log.empty()) rc.log = rc.out.string() + ".log.csv";

  TrainResult result;
  if (const auto* pd = std::get_if<PairDir>(&rc.train.corruption)) {
    result = train_pairs(rc.network, rc.train, load_pairdir(pd->path));
  } else {
    if (rc.data.empty()) throw ValueError("train: no data directory (--data or 'data' key)");
    result = train(rc.network, rc.train, load_pgm_dir(rc.data));
  }

  write_atomically(rc.out, [&](const std::filesystem::path& p) { save_network(result.net, p); });
  write_atomically(rc.log, [&](const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw Error("cannot open '" + p.string() + "' for writing");
    result.log.write_csv(os);
    if (!os) throw Error("failed writing '" + p.string() + "'");
  });

  const auto& last = result.log.records.back();
  out << "trained " << last.iteration << " iterations; loss=" << last.loss
      << " val_psnr=" << format_psnr(last.val_psnr) << '\n';
  return 0;
}

struct CorruptArgs {
  std::string spec, input, output;
  std::uint64_t seed = 0;
};

int cmd_corrupt(const CorruptArgs& a) {
  const CorruptionSpec spec = parse_corruption(a.spec);
  RngStream rng(a.seed);
  write_pgm(corrupt(read_pgm(a.input), spec, rng), a.output);
  return 0;
}

struct RestoreArgs {
  std::string model, input, output;
  bool ensemble = false;
};

int cmd_restore(const RestoreArgs& a) {
  const Network<float> net = load_network(a.model);
  const Image img = read_pgm(a.input);
  write_pgm(a.ensemble ? restore_ensemble(net, img) : restore(net, img), a.output);
  return 0;
}

struct EvalArgs {
  std::string clean, restored, model, pairs;
  bool ensemble = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (!a.clean.empty() || !a.restored.empty()) {
    if (a.clean.empty() || a.restored.empty()) {
      throw ValueError("eval: --clean and --restored go together");
    }
    const MetricReport r = measure(read_pgm(a.restored), read_pgm(a.clean));
    out << "psnr=" << format_psnr(r.psnr) << " ssim=" << format_ssim(r.ssim) << '\n';
    return 0;
  }
  if (a.model.empty() || a.pairs.empty()) {
    throw ValueError("eval: give --clean/--restored, or --model with --pairs");
  }
  const EvalTable table = evaluate(load_network(a.model), load_pairdir(a.pairs), a.ensemble);
  for (const auto& row : table.rows) {
    if (row.report) {
      out << row.name << " psnr=" << format_psnr(row.report->psnr)
          << " ssim=" << format_ssim(row.report->ssim) << '\n';
    } else {
      out << row.name << " error: " << row.error << '\n';
    }
  }
  out << "mean psnr=" << format_psnr(table.mean.psnr) << " ssim=" << format_ssim(table.mean.ssim)
      << " images=" << table.evaluated << '\n';
  return table.evaluated == table.rows.size() ? 0 : 1;
}

struct GradArgs {
  std::size_t depth = 4, filters = 4, kernel = 3, size = 8;
  std::string skip = "mirror:1";
  std::vector<std::size_t> downsample;
  std::uint64_t seed = 0;
  double step = 1e-3;
};

constexpr double kGradTolerance = 1e-4;

int cmd_gradcheck(const GradArgs& a, std::ostream& out) {
  NetworkConfig cfg;
  cfg.depth = a.depth;
  cfg.filters = a.filters;
  cfg.kernel = a.kernel;
  cfg.skip = SkipMode::parse(a.skip);
  cfg.downsample_layers = a.downsample;
  cfg.init_seed = a.seed;
  GradCheckOptions opts;
  opts.height = opts.width = a.size;
  opts.step = a.step;
  opts.seed = a.seed;
  const GradCheckResult r = check_network_gradients(cfg, opts);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max_rel_error=%.3e params=%.3e input=%.3e checked=%zu",
                r.max_rel_error, r.max_param_error, r.max_input_error, r.checked);
  out << buf << '\n';
  return r.max_rel_error < kGradTolerance ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Image restoration with convolutional encoder-decoder networks", "rednet"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a network on clean images");
  train_cmd->add_option("--config", ta.config, "key=value run configuration")->required();
  train_cmd->add_option("--data", ta.data, "Directory of clean .pgm images");
  train_cmd->add_option("--out", ta.out, "Model file to write");
  train_cmd->add_option("--log", ta.log, "CSV training log (default <out>.log.csv)");
  train_cmd->add_option("--seed", ta.seed, "Override the training seed");

  CorruptArgs ca;
  auto* corrupt_cmd = app.add_subcommand("corrupt", "Apply a synthetic corruption to an image");
  corrupt_cmd->add_option("--spec", ca.spec, "e.g. gaussian:30, sr:3, blur:disk:5")->required();
  corrupt_cmd->add_option("--seed", ca.seed, "Random seed");
  corrupt_cmd->add_option("--input", ca.input)->required();
  corrupt_cmd->add_option("--output", ca.output)->required();

  RestoreArgs ra;
  auto* restore_cmd = app.add_subcommand("restore", "Restore an image with a trained model");
  restore_cmd->add_option("--model", ra.model)->required();
  restore_cmd->add_option("--input", ra.input)->required();
  restore_cmd->add_option("--output", ra.output)->required();
  restore_cmd->add_flag("--ensemble", ra.ensemble, "Average over the 8 rotations/flips");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM of images or of a model on pairs");
  eval_cmd->add_option("--clean", ea.clean);
  eval_cmd->add_option("--restored", ea.restored);
  eval_cmd->add_option("--model", ea.model);
  eval_cmd->add_option("--pairs", ea.pairs, "Directory of <name>.clean.pgm/<name>.corrupt.pgm");
  eval_cmd->add_flag("--ensemble", ea.ensemble);

  GradArgs ga;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of backpropagation");
  grad_cmd->add_option("--depth", ga.depth);
  grad_cmd->add_option("--filters", ga.filters);
  grad_cmd->add_option("--kernel", ga.kernel);
  grad_cmd->add_option("--skip", ga.skip, "none | mirror:<step> | sequential:<block>");
  grad_cmd->add_option("--downsample", ga.downsample, "Encoder layers with stride 2")
      ->delimiter(',');
  grad_cmd->add_option("--size", ga.size, "Input height and width");
  grad_cmd->add_option("--step", ga.step, "Finite-difference step");
  grad_cmd->add_option("--seed", ga.seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    err << "rednet: " << msg << '\n';
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(ta, out);
    if (corrupt_cmd->parsed()) return cmd_corrupt(ca);
    if (restore_cmd->parsed()) return cmd_restore(ra);
    if (eval_cmd->parsed()) return cmd_eval(ea, out);
    if (grad_cmd->parsed()) return cmd_gradcheck(ga, out);
  } catch (const std::exception& e) {
    err << "rednet: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rednet::cli
