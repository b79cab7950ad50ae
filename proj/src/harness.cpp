#include "brc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "brc/csv.hpp"
#include "brc/error.hpp"

namespace brc {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be written
// by index so that output never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double pixel_weighted(const std::vector<double>& values, const std::vector<std::size_t>& counts) {
  double sum = 0.0, pixels = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i] * static_cast<double>(counts[i]);
    pixels += static_cast<double>(counts[i]);
  }
  return pixels > 0.0 ? sum / pixels : 0.0;
}

using Clock = std::chrono::steady_clock;

}  // namespace

const char* to_string(FitStatus s) noexcept {
  switch (s) {
    case FitStatus::Measured: return "measured";
    case FitStatus::Predicted: return "predicted";
    case FitStatus::Rejected: return "rejected";
  }
  return "?";
}

RunReport measure(double target_bpp, double model_bpp, double actual_bpp, double actual_mse, double wall_time_s,
                  const CallCounts& calls) {
  RunReport r;
  r.target_bpp = target_bpp;
  r.achieved_model_bpp = model_bpp;
  r.achieved_actual_bpp = actual_bpp;
  r.delta_r_percent = target_bpp > 0.0 ? 100.0 * std::abs(actual_bpp - target_bpp) / target_bpp : 0.0;
  r.psnr_db = psnr_from_mse(actual_mse);
  r.wall_time_s = wall_time_s;
  r.calls = calls;
  r.codec_calls = calls.total();
  return r;
}

ControlRun run_control(const Image& image, const CodecBackend& backend, const ControlOptions& options) {
  const Image luma = to_luma(image);
  ControlRun run;
  run.grid = partition(luma, options.block_size);
  const std::size_t n = run.grid.size();
  const std::vector<std::size_t> pixels = run.grid.pixel_counts();
  options.rate_config(options.target_bpp.value_or(0.0)).validate();
  if (options.ratio < 1) throw Error(Errc::InvalidArgument, "sampling ratio must be at least 1");

  CountingBackend counter(backend);
  CallCounts calls;

  double target = 0.0;
  if (options.target_bpp) {
    target = *options.target_bpp;
  } else {
    std::vector<double> rates(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
      rates[i] = counter.encode(run.grid.blocks[i], options.lambda_init).rate;
    });
    target = options.auto_fraction * pixel_weighted(rates, pixels);
  }
  calls.target = counter.encode_calls();
  counter.reset();

  const auto started = Clock::now();

  run.plan = select_samples(run.grid, options.ratio);
  const std::vector<std::size_t>& sampled = run.plan.sampled_indices;
  const double lam_hi = options.lambda_init;
  const double lam_lo = options.lambda_init / 2.0;
  std::vector<std::optional<BlockRdProfile>> measured(sampled.size());
  parallel_for(sampled.size(), options.workers, [&](std::size_t s) {
    const Block& block = run.grid.blocks[sampled[s]];
    const CodingSample hi = counter.encode(block, lam_hi).sample(lam_hi);
    const CodingSample lo = counter.encode(block, lam_lo).sample(lam_lo);
    try {
      measured[s] = measure_profile(block.index, hi, lo);
    } catch (const Error& e) {
      if (e.code() != Errc::NonMonotonicSamples && e.code() != Errc::DegenerateSamples) throw;
    }
  });
  calls.fit = counter.encode_calls();
  counter.reset();

  std::vector<MeasuredProfile> training;
  run.profiles.resize(n);
  std::vector<FitStatus> status(n, FitStatus::Predicted);
  for (std::size_t s = 0; s < sampled.size(); ++s) {
    const std::size_t i = sampled[s];
    if (measured[s]) {
      run.profiles[i] = *measured[s];
      status[i] = FitStatus::Measured;
      training.push_back({run.grid.blocks[i].gradient, *measured[s]});
    } else {
      status[i] = FitStatus::Rejected;
    }
  }
  const bool needs_prediction =
      std::any_of(status.begin(), status.end(), [](FitStatus s) { return s != FitStatus::Measured; });
  if (training.size() >= 2) {
    run.lines = fit_coefficient_lines(training);
  } else if (needs_prediction) {
    throw Error(Errc::InsufficientSamples, "fewer than two sampled blocks produced usable models");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (status[i] != FitStatus::Measured) run.profiles[i] = predict_profile(*run.lines, run.grid.blocks[i]);

  run.allocation = allocate(run.profiles, pixels, options.rate_config(target));
  const double wall = std::chrono::duration<double>(Clock::now() - started).count();

  std::vector<EncodeResult> finals(n);
  std::vector<double> final_lambdas(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    final_lambdas[i] = quantize_lambda(run.allocation.lambdas[i]);
    finals[i] = counter.encode(run.grid.blocks[i], final_lambdas[i]);
  });
  calls.final = counter.encode_calls();

  std::vector<double> rates(n), distortions(n);
  std::vector<Plane> recon(n);
  run.bitstream.width = static_cast<std::uint32_t>(run.grid.image_width);
  run.bitstream.height = static_cast<std::uint32_t>(run.grid.image_height);
  run.bitstream.block_size = static_cast<std::uint16_t>(options.block_size);
  run.blocks.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rates[i] = finals[i].rate;
    distortions[i] = finals[i].distortion;
    recon[i] = std::move(finals[i].reconstruction);
    run.bitstream.blocks.push_back(
        {final_lambdas[i], static_cast<std::uint32_t>(finals[i].payload_bits), std::move(finals[i].payload)});
    run.blocks[i] = {i,
                     run.grid.blocks[i].gradient,
                     final_lambdas[i],
                     run.allocation.rates[i],
                     rates[i],
                     distortions[i],
                     status[i]};
  }
  run.reconstruction = assemble(run.grid, recon);

  run.report = measure(target, run.allocation.total_bpp, pixel_weighted(rates, pixels),
                       pixel_weighted(distortions, pixels), wall, calls);
  run.report.blocks = n;
  run.report.sampled_blocks = sampled.size();
  run.report.sampling_ratio = options.ratio;
  run.report.lambda_init = options.lambda_init;
  run.report.outcome = run.allocation.outcome;
  return run;
}

void write_control_csv(std::ostream& out, const ControlRun& run, std::string_view flags) {
  CsvWriter csv(out);
  csv.comment(std::string(kToolVersion) + " control " + std::string(flags));
  csv.row({"index", "gradient", "lambda_final", "modeled_bpp", "actual_bpp", "actual_mse", "fit"});
  for (const auto& b : run.blocks)
    csv.row({std::to_string(b.index), format_number(b.gradient), format_number(b.lambda_final),
             format_number(b.modeled_bpp), format_number(b.actual_bpp), format_number(b.actual_mse),
             to_string(b.status)});
  const RunReport& r = run.report;
  csv.comment("outcome " + std::string(r.outcome == AllocationOutcome::Success ? "success" : "target_unreachable") +
              " target_bpp " + format_number(r.target_bpp) + " model_bpp " + format_number(r.achieved_model_bpp) +
              " actual_bpp " + format_number(r.achieved_actual_bpp) + " delta_r_percent " +
              format_number(r.delta_r_percent) + " codec_calls " + std::to_string(r.codec_calls));
}

void write_lines_csv(std::ostream& out, const ControlRun& run, std::string_view flags) {
  CsvWriter csv(out);
  csv.comment(std::string(kToolVersion) + " control " + std::string(flags));
  csv.row({"target", "slope", "intercept", "r_squared"});
  if (!run.lines) return;
  for (const auto& l : *run.lines)
    csv.row({to_string(l.target), format_number(l.slope), format_number(l.intercept), format_number(l.r_squared)});
}

void write_report(std::ostream& out, const RunReport& r) {
  out << "target_bpp " << format_number(r.target_bpp) << '\n'
      << "achieved_model_bpp " << format_number(r.achieved_model_bpp) << '\n'
      << "achieved_actual_bpp " << format_number(r.achieved_actual_bpp) << '\n'
      << "delta_r_percent " << format_number(r.delta_r_percent) << '\n'
      << "psnr_db " << format_number(r.psnr_db) << '\n'
      << "wall_time_s " << format_number(r.wall_time_s) << '\n'
      << "codec_calls " << r.codec_calls << " (target " << r.calls.target << ", fit " << r.calls.fit << ", final "
      << r.calls.final << ")\n"
      << "blocks " << r.blocks << " sampled " << r.sampled_blocks << " ratio 1:" << r.sampling_ratio << '\n'
      << "lambda_init " << format_number(r.lambda_init) << '\n'
      << "outcome " << (r.outcome == AllocationOutcome::Success ? "success" : "target_unreachable") << '\n';
}

std::vector<FitRow> run_fit(const Image& image, const CodecBackend& backend, const FitOptions& options) {
  if (options.lambdas.size() < 2) throw Error(Errc::InvalidArgument, "fit needs at least two lambda values");
  const BlockGrid grid = partition(to_luma(image), options.block_size);
  std::vector<std::vector<CodingSample>> samples(grid.size());
  parallel_for(grid.size(), options.workers, [&](std::size_t i) {
    for (double lam : options.lambdas) samples[i].push_back(backend.encode(grid.blocks[i], lam).sample(lam));
  });

  std::vector<FitRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = grid.blocks[i].gradient;
    for (const char* kind : {"rate_loglinear", "distortion_loglinear", "distortion_power"}) {
      FitRow row{i, g, kind};
      try {
        if (std::string_view(kind) == "distortion_power") {
          const PowerModel m = fit_power(samples[i]);
          row.param1 = m.coeff;
          row.param2 = m.exponent;
          row.rmse = fit_rmse(m, samples[i]);
        } else {
          const ModelKind mk = std::string_view(kind) == "rate_loglinear" ? ModelKind::Rate : ModelKind::Distortion;
          const LogLinearModel m = fit_least_squares(samples[i], mk);
          row.param1 = m.slope;
          row.param2 = m.intercept;
          row.rmse = fit_rmse(m, samples[i]);
        }
      } catch (const Error& e) {
        row.status = to_string(e.code());
        row.param1 = row.param2 = row.rmse = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_fit_csv(std::ostream& out, const std::vector<FitRow>& rows, std::string_view flags) {
  CsvWriter csv(out);
  csv.comment(std::string(kToolVersion) + " fit " + std::string(flags));
  csv.row({"block_index", "gradient", "model_kind", "slope_or_coeff", "intercept_or_exponent", "rmse", "status"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.block_index), format_number(r.gradient), r.model_kind, format_number(r.param1),
             format_number(r.param2), format_number(r.rmse), r.status});
}

std::vector<std::filesystem::path> collect_images(const std::filesystem::path& path_or_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(path_or_dir, ec)) throw Error(Errc::Io, "no such file or directory: " + path_or_dir.string());
  if (!fs::is_directory(path_or_dir)) return {path_or_dir};
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(path_or_dir)) {
    const std::string ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end());
  return images;
}

std::vector<SweepRow> run_sweep(const std::vector<std::filesystem::path>& images, const CodecBackend& backend,
                                const SweepOptions& options) {
  if (options.lambda_inits.empty() || options.ratios.empty())
    throw Error(Errc::InvalidArgument, "sweep needs at least one lambda_init and one ratio");
  std::vector<SweepRow> rows;
  for (const auto& path : images) {
    std::optional<Image> image;
    std::string load_error;
    try {
      image = load_image(path);
    } catch (const Error& e) {
      load_error = e.what();
    }
    for (double lam : options.lambda_inits) {
      for (int k : options.ratios) {
        SweepRow row{path.filename().string(), lam, k, std::nullopt, {}};
        if (!image) {
          row.error = load_error;
        } else {
          ControlOptions opts = options.control;
          opts.lambda_init = lam;
          opts.ratio = k;
          try {
            row.report = run_control(*image, backend, opts).report;
          } catch (const Error& e) {
            row.error = e.what();
          }
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const SweepOptions& options,
                     std::string_view flags) {
  CsvWriter csv(out);
  csv.comment(std::string(kToolVersion) + " sweep " + std::string(flags));
  csv.row({"image", "lambda_init", "ratio", "blocks", "sampled", "target_bpp", "model_bpp", "actual_bpp",
           "delta_r_percent", "psnr_db", "wall_time_s", "codec_calls", "fit_calls", "outcome", "error"});
  for (const auto& row : rows) {
    if (!row.report) {
      csv.row({row.image, format_number(row.lambda_init), std::to_string(row.ratio), "", "", "", "", "", "", "", "",
               "", "", "error", "\"" + row.error + "\""});
      continue;
    }
    const RunReport& r = *row.report;
    csv.row({row.image, format_number(row.lambda_init), std::to_string(row.ratio), std::to_string(r.blocks),
             std::to_string(r.sampled_blocks), format_number(r.target_bpp), format_number(r.achieved_model_bpp),
             format_number(r.achieved_actual_bpp), format_number(r.delta_r_percent), format_number(r.psnr_db),
             format_number(r.wall_time_s), std::to_string(r.codec_calls), std::to_string(r.calls.fit),
             r.outcome == AllocationOutcome::Success ? "success" : "target_unreachable", ""});
  }

  // Means over successful cells, one row per (lambda_init, ratio) in option order.
  for (double lam : options.lambda_inits) {
    for (int k : options.ratios) {
      double dr = 0.0, time = 0.0, calls = 0.0;
      std::size_t count = 0;
      for (const auto& row : rows) {
        if (row.report && row.lambda_init == lam && row.ratio == k) {
          dr += row.report->delta_r_percent;
          time += row.report->wall_time_s;
          calls += static_cast<double>(row.report->codec_calls);
          ++count;
        }
      }
      if (count == 0) continue;
      const double c = static_cast<double>(count);
      csv.row({"MEAN", format_number(lam), std::to_string(k), "", "", "", "", "", format_number(dr / c), "",
               format_number(time / c), format_number(calls / c), "", std::to_string(count) + " images", ""});
    }
  }
}

Image decode_bitstream(const Bitstream& bs, const CodecBackend& backend) {
  const int bsize = bs.block_size;
  const int w = static_cast<int>(bs.width), h = static_cast<int>(bs.height);
  Plane plane(h, w);
  std::size_t i = 0;
  for (int y = 0; y < h; y += bsize) {
    for (int x = 0; x < w; x += bsize, ++i) {
      if (i >= bs.blocks.size()) throw Error(Errc::MalformedContainer, "too few blocks for the image size");
      const int bw = std::min(bsize, w - x), bh = std::min(bsize, h - y);
      const ContainerBlock& b = bs.blocks[i];
      plane.block(y, x, bh, bw) = backend.decode(b.payload, bw, bh, b.lam);
    }
  }
  if (i != bs.blocks.size()) throw Error(Errc::MalformedContainer, "too many blocks for the image size");
  return from_plane(plane);
}

}  // namespace brc
