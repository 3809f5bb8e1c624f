#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rednet/corruption.hpp"
#include "rednet/image.hpp"
#include "rednet/metrics.hpp"
#include "rednet/network.hpp"
#include "rednet/optim.hpp"

namespace rednet {

template <typename T>
struct LossGrad {
  double loss = 0.0;
  Tensor<T> grad;
};

/// (1/N) sum_i ||pred_i - target_i||_F^2 over the N samples of the batch,
/// and its gradient 2 (pred - target) / N.
template <typename T>
LossGrad<T> mse_loss_grad(const Tensor<T>& pred, const Tensor<T>& target);

struct TrainConfig {
  std::size_t batch = 32;
  std::size_t iterations = 1000;
  AdamHyper adam;
  CorruptionSpec corruption = GaussianNoise{30.0};
  std::size_t patch_size = 50;
  std::size_t patch_stride = 25;
  double val_fraction = 0.1;
  std::size_t log_interval = 100;
  /// Largest number of validation patches restored per log record; 0 = all.
  std::size_t max_val_patches = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainRecord {
  std::size_t iteration = 0;
  double loss = 0.0;      // mean batch loss since the previous record
  double val_psnr = 0.0;  // mean over validation patches; NaN without validation data
};

struct TrainLog {
  std::vector<TrainRecord> records;
  /// Mean PSNR of the corrupted validation patches against their clean
  /// versions; the do-nothing baseline.
  double val_baseline_psnr = 0.0;
  std::size_t train_patches = 0;
  std::size_t val_patches = 0;

  /// `iteration,loss,val_psnr` with a header row.
  void write_csv(std::ostream& os) const;
  std::string csv() const;
};

struct TrainResult {
  Network<float> net;
  TrainLog log;
};

/// Patches are cut from every image, split into training and validation
/// sets, and corrupted per `cfg.corruption`; stochastic corruptions are redrawn
/// every time a patch enters a batch. Record 0 holds the initial network's
/// loss on a probe batch and its validation PSNR.
TrainResult train(const NetworkConfig& netcfg, const TrainConfig& cfg,
                  const std::vector<Image>& clean_images);

/// Same loop over externally corrupted pairs (cfg.corruption is ignored).
TrainResult train_pairs(const NetworkConfig& netcfg, const TrainConfig& cfg,
                        const std::vector<ImagePair>& pairs);

/// Runs the network on an image of any size: reflect-pads bottom/right up
/// to the network's size multiple, forwards, and crops back.
Image restore(const Network<float>& net, const Image& img);

/// Mean of the restorations of all eight dihedral transforms, each mapped
/// back to the original orientation.
Image restore_ensemble(const Network<float>& net, const Image& img);

struct EvalRow {
  std::string name;
  std::optional<MetricReport> report;
  std::string error;
};

struct EvalTable {
  std::vector<EvalRow> rows;
  MetricReport mean;
  std::size_t evaluated = 0;
};

/// Restores each corrupted image and scores it against the clean one.
/// Pairs with mismatched shapes are reported in their row and skipped.
EvalTable evaluate(const Network<float>& net, const std::vector<ImagePair>& pairs, bool ensemble);

}  // namespace rednet
