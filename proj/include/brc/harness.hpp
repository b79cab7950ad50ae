#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "brc/allocator.hpp"
#include "brc/block_grid.hpp"
#include "brc/codec.hpp"
#include "brc/container.hpp"
#include "brc/predictor.hpp"

namespace brc {

inline constexpr std::string_view kToolVersion = "brc 1.0.0";

struct ControlOptions {
  int block_size = 256;
  double lambda_init = 0.6;
  double lambda_step = 0.01;
  double lambda_min = 0.05;
  int ratio = 1;
  /// Unset means auto: code every block at lambda_init and aim for auto_fraction of that rate.
  std::optional<double> target_bpp;
  double auto_fraction = 0.95;
  int workers = 1;

  RateControlConfig rate_config(double target) const { return {lambda_init, lambda_step, lambda_min, target}; }
};

struct CallCounts {
  std::size_t target = 0;  ///< auto-target pre-pass
  std::size_t fit = 0;     ///< two passes per sampled block
  std::size_t final = 0;   ///< one pass per block at its allocated lambda

  std::size_t control() const { return fit + final; }
  std::size_t total() const { return target + fit + final; }
};

struct RunReport {
  double target_bpp = 0.0;
  double achieved_model_bpp = 0.0;
  double achieved_actual_bpp = 0.0;
  double delta_r_percent = 0.0;
  double psnr_db = 0.0;
  double wall_time_s = 0.0;
  std::size_t codec_calls = 0;
  CallCounts calls;
  std::size_t blocks = 0;
  std::size_t sampled_blocks = 0;
  int sampling_ratio = 1;
  double lambda_init = 0.0;
  AllocationOutcome outcome = AllocationOutcome::Success;
};

/// Fills the derived fields (delta R, PSNR, call totals) of a report.
RunReport measure(double target_bpp, double model_bpp, double actual_bpp, double actual_mse, double wall_time_s,
                  const CallCounts& calls);

enum class FitStatus { Measured, Predicted, Rejected };

const char* to_string(FitStatus s) noexcept;

struct BlockOutcome {
  std::size_t index = 0;
  double gradient = 0.0;
  double lambda_final = 0.0;
  double modeled_bpp = 0.0;
  double actual_bpp = 0.0;
  double actual_mse = 0.0;
  FitStatus status = FitStatus::Predicted;
};

struct ControlRun {
  RunReport report;
  BlockGrid grid;
  SamplingPlan plan;
  std::optional<CoefficientLines> lines;
  std::vector<BlockRdProfile> profiles;
  AllocationState allocation;
  std::vector<BlockOutcome> blocks;
  Bitstream bitstream;
  Plane reconstruction;
};

/// Full pipeline: sample, two fitting passes per sampled block at (lambda_init,
/// lambda_init / 2), gradient regression, prediction, greedy allocation, final coding.
/// Sampled blocks whose passes violate the model sign conventions are predicted instead.
ControlRun run_control(const Image& image, const CodecBackend& backend, const ControlOptions& options);

void write_control_csv(std::ostream& out, const ControlRun& run, std::string_view flags);
void write_lines_csv(std::ostream& out, const ControlRun& run, std::string_view flags);
void write_report(std::ostream& out, const RunReport& report);

struct FitOptions {
  int block_size = 256;
  std::vector<double> lambdas{0.1, 0.3, 0.5, 0.7, 0.9};
  int workers = 1;
};

struct FitRow {
  std::size_t block_index = 0;
  double gradient = 0.0;
  std::string model_kind;
  double param1 = 0.0;
  double param2 = 0.0;
  double rmse = 0.0;
  std::string status = "ok";
};

/// Per block: log-linear rate, log-linear distortion and power-law distortion fits.
std::vector<FitRow> run_fit(const Image& image, const CodecBackend& backend, const FitOptions& options);
void write_fit_csv(std::ostream& out, const std::vector<FitRow>& rows, std::string_view flags);

struct SweepOptions {
  ControlOptions control;
  std::vector<double> lambda_inits{0.3, 0.6, 0.9};
  std::vector<int> ratios{1, 2, 3, 4, 8};
};

struct SweepRow {
  std::string image;
  double lambda_init = 0.0;
  int ratio = 1;
  std::optional<RunReport> report;
  std::string error;
};

std::vector<std::filesystem::path> collect_images(const std::filesystem::path& path_or_dir);
std::vector<SweepRow> run_sweep(const std::vector<std::filesystem::path>& images, const CodecBackend& backend,
                                const SweepOptions& options);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const SweepOptions& options,
                     std::string_view flags);

/// Decodes every block of a container with `backend` and stitches the luma plane.
Image decode_bitstream(const Bitstream& bs, const CodecBackend& backend);

}  // namespace brc
