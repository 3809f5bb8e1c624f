#include "rednet/engine.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rednet/dihedral.hpp"
#include "rednet/error.hpp"

namespace rednet {

template <typename T>
LossGrad<T> mse_loss_grad(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("mse_loss_grad: prediction " + pred.shape().str() + " and target " +
                     target.shape().str() + " differ");
  }
  const double n = double(pred.n());
  LossGrad<T> out{0.0, Tensor<T>(pred.shape())};
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = double(pred[i]) - double(target[i]);
    sse += d * d;
    out.grad[i] = T(2.0 * d / n);
  }
  out.loss = sse / n;
  return out;
}

template LossGrad<float> mse_loss_grad(const Tensor<float>&, const Tensor<float>&);
template LossGrad<double> mse_loss_grad(const Tensor<double>&, const Tensor<double>&);

void TrainConfig::validate() const {
  if (batch < 1) throw ValueError("batch size must be >= 1");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ValueError("validation fraction must lie in [0, 1)");
  }
  if (patch_size < 1) throw ValueError("patch size must be >= 1");
  if (patch_stride < 1) throw ValueError("patch stride must be >= 1");
  if (log_interval < 1) throw ValueError("log interval must be >= 1");
  adam.validate();
  if (!std::holds_alternative<PairDir>(corruption)) rednet::validate(corruption);
}

namespace {

std::string number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Sample {
  Image clean;
  std::optional<Image> corrupted;  // fixed corruption, when not redrawn per use
};

double mean_psnr(const Network<float>& net, const std::vector<Sample>& val, std::size_t chunk) {
  if (val.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (std::size_t start = 0; start < val.size(); start += chunk) {
    const std::size_t end = std::min(val.size(), start + chunk);
    std::vector<const Image*> inputs;
    for (std::size_t i = start; i < end; ++i) inputs.push_back(&*val[i].corrupted);
    const Tensor<float> out = forward(net, stack<float>(inputs), false).output;
    for (std::size_t i = start; i < end; ++i) {
      Image restored(val[i].clean.h, val[i].clean.w);
      const auto s = out.sample(i - start);
      std::copy(s.begin(), s.end(), restored.px.begin());
      total += psnr(restored, val[i].clean);
    }
  }
  return total / double(val.size());
}

TrainResult train_samples(const NetworkConfig& netcfg, const TrainConfig& cfg,
                          std::vector<Sample> samples) {
  cfg.validate();
  if (samples.empty()) {
    throw ValueError("no training patches: every image is smaller than the patch size " +
                     std::to_string(cfg.patch_size));
  }
  Network<float> net = build_network<float>(netcfg);
  if (cfg.patch_size % net.size_multiple() != 0) {
    throw ValueError("patch size " + std::to_string(cfg.patch_size) + " must be a multiple of " +
                     std::to_string(net.size_multiple()) + " for this network");
  }

  const RngStream master(cfg.seed);
  RngStream split_rng = master.derive(1);
  RngStream val_rng = master.derive(2);
  RngStream batch_rng = master.derive(3);
  RngStream probe_rng = master.derive(4);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[split_rng.uniform_index(i)]);
  }
  std::size_t n_val = std::size_t(std::floor(cfg.val_fraction * double(samples.size())));
  n_val = std::min(n_val, samples.size() - 1);
  if (cfg.max_val_patches) n_val = std::min(n_val, cfg.max_val_patches);

  const bool redraw = is_stochastic(cfg.corruption);
  std::vector<Sample> val, tr;
  for (std::size_t k = 0; k < order.size(); ++k) {
    Sample s = std::move(samples[order[k]]);
    if (k < n_val) {
      if (!s.corrupted) s.corrupted = corrupt(s.clean, cfg.corruption, val_rng);
      val.push_back(std::move(s));
    } else {
      if (!s.corrupted && !redraw) s.corrupted = corrupt(s.clean, cfg.corruption, val_rng);
      tr.push_back(std::move(s));
    }
  }

  TrainResult result{std::move(net), {}};
  TrainLog& log = result.log;
  log.train_patches = tr.size();
  log.val_patches = val.size();
  if (val.empty()) {
    log.val_baseline_psnr = std::numeric_limits<double>::quiet_NaN();
  } else {
    double total = 0.0;
    for (const auto& s : val) total += psnr(*s.corrupted, s.clean);
    log.val_baseline_psnr = total / double(val.size());
  }

  auto draw_batch = [&](RngStream& rng, Tensor<float>& input, Tensor<float>& target) {
    std::vector<Image> redrawn;
    std::vector<const Image*> ins, outs;
    redrawn.reserve(cfg.batch);
    for (std::size_t b = 0; b < cfg.batch; ++b) {
      const Sample& s = tr[rng.uniform_index(tr.size())];
      if (s.corrupted) {
        ins.push_back(&*s.corrupted);
      } else {
        redrawn.push_back(corrupt(s.clean, cfg.corruption, rng));
        ins.push_back(&redrawn.back());
      }
      outs.push_back(&s.clean);
    }
    input = stack<float>(ins);
    target = stack<float>(outs);
  };

  Network<float>& model = result.net;
  const std::size_t chunk = std::max<std::size_t>(cfg.batch, 1);
  {
    Tensor<float> input, target;
    draw_batch(probe_rng, input, target);
    const auto lg = mse_loss_grad(forward(model, input, false).output, target);
    log.records.push_back({0, lg.loss, mean_psnr(model, val, chunk)});
  }

  AdamState state;
  double interval_loss = 0.0;
  std::size_t interval_count = 0;
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    Tensor<float> input, target;
    draw_batch(batch_rng, input, target);
    auto fr = forward(model, input, true);
    const auto lg = mse_loss_grad(fr.output, target);
    if (!std::isfinite(lg.loss)) {
      throw Error("training diverged: non-finite loss at iteration " + std::to_string(it));
    }
    const auto grads = backward(model, *fr.cache, lg.grad);
    const auto views = grads.views();
    adam_step<float>(model.parameters(), views, state, cfg.adam);

    interval_loss += lg.loss;
    ++interval_count;
    if (it % cfg.log_interval == 0 || it == cfg.iterations) {
      log.records.push_back(
          {it, interval_loss / double(interval_count), mean_psnr(model, val, chunk)});
      interval_loss = 0.0;
      interval_count = 0;
    }
  }
  return result;
}

std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = std::ptrdiff_t(2 * n - 2);
  std::ptrdiff_t j = i % period;
  if (j < 0) j += period;
  return std::size_t(j < std::ptrdiff_t(n) ? j : period - j);
}

}  // namespace

TrainResult train(const NetworkConfig& netcfg, const TrainConfig& cfg,
                  const std::vector<Image>& clean_images) {
  if (std::holds_alternative<PairDir>(cfg.corruption)) {
    throw ValueError("pairdir corruption needs train_pairs(), not clean images");
  }
  std::vector<Sample> samples;
  for (const auto& img : clean_images) {
    if (img.h < cfg.patch_size || img.w < cfg.patch_size) continue;
    for (auto& p : extract_patches(img, cfg.patch_size, cfg.patch_stride)) {
      samples.push_back({std::move(p), std::nullopt});
    }
  }
  return train_samples(netcfg, cfg, std::move(samples));
}

TrainResult train_pairs(const NetworkConfig& netcfg, const TrainConfig& cfg,
                        const std::vector<ImagePair>& pairs) {
  std::vector<Sample> samples;
  for (const auto& pair : pairs) {
    if (!pair.corrupted.same_shape(pair.clean)) {
      throw ShapeError("pair '" + pair.name + "': corrupted and clean images differ in size");
    }
    if (pair.clean.h < cfg.patch_size || pair.clean.w < cfg.patch_size) continue;
    auto clean = extract_patches(pair.clean, cfg.patch_size, cfg.patch_stride);
    auto bad = extract_patches(pair.corrupted, cfg.patch_size, cfg.patch_stride);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      samples.push_back({std::move(clean[i]), std::move(bad[i])});
    }
  }
  TrainConfig pair_cfg = cfg;
  pair_cfg.corruption = GaussianNoise{0.0};  // unused: every sample carries its corruption
  return train_samples(netcfg, pair_cfg, std::move(samples));
}

void TrainLog::write_csv(std::ostream& os) const {
  os << "iteration,loss,val_psnr\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << number(r.loss) << ',' << number(r.val_psnr) << '\n';
  }
}

std::string TrainLog::csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

Image restore(const Network<float>& net, const Image& img) {
  if (img.h == 0 || img.w == 0) throw ValueError("cannot restore an empty image");
  const std::size_t m = net.size_multiple();
  const std::size_t ph = (img.h + m - 1) / m * m;
  const std::size_t pw = (img.w + m - 1) / m * m;
  Tensor<float> x(Shape{1, 1, ph, pw});
  for (std::size_t y = 0; y < ph; ++y) {
    const std::size_t sy = reflect(std::ptrdiff_t(y), img.h);
    for (std::size_t xx = 0; xx < pw; ++xx) {
      x(0, 0, y, xx) = img.at(sy, reflect(std::ptrdiff_t(xx), img.w));
    }
  }
  const Tensor<float> out = forward(net, x, false).output;
  Image restored(img.h, img.w);
  for (std::size_t y = 0; y < img.h; ++y)
    for (std::size_t xx = 0; xx < img.w; ++xx) restored.at(y, xx) = out(0, 0, y, xx);
  return restored;
}

Image restore_ensemble(const Network<float>& net, const Image& img) {
  std::vector<double> acc(img.size(), 0.0);
  const Tensor<float> base = to_tensor<float>(img);
  for (int k = 0; k < 8; ++k) {
    const Image turned = to_image(dihedral(base, k));
    const Tensor<float> back = dihedral_inverse(to_tensor<float>(restore(net, turned)), k);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += double(back[i]);
  }
  Image out(img.h, img.w);
  for (std::size_t i = 0; i < acc.size(); ++i) out.px[i] = float(acc[i] / 8.0);
  return out;
}

EvalTable evaluate(const Network<float>& net, const std::vector<ImagePair>& pairs, bool ensemble) {
  if (pairs.empty()) throw ValueError("evaluate: no image pairs given");
  EvalTable table;
  double psnr_total = 0.0, ssim_total = 0.0;
  for (const auto& pair : pairs) {
    EvalRow row{pair.name, std::nullopt, {}};
    try {
      if (!pair.corrupted.same_shape(pair.clean)) {
        throw ShapeError("corrupted is " + std::to_string(pair.corrupted.h) + "x" +
                         std::to_string(pair.corrupted.w) + ", clean is " +
                         std::to_string(pair.clean.h) + "x" + std::to_string(pair.clean.w));
      }
      const Image restored = ensemble ? restore_ensemble(net, pair.corrupted)
                                      : restore(net, pair.corrupted);
      row.report = measure(restored, pair.clean);
      psnr_total += row.report->psnr;
      ssim_total += row.report->ssim;
      ++table.evaluated;
    } catch (const Error& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  if (table.evaluated > 0) {
    table.mean = {psnr_total / double(table.evaluated), ssim_total / double(table.evaluated)};
  } else {
    table.mean = {std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()};
  }
  return table;
}

}  // namespace rednet
