// Command-line front end: fit, control, sweep, decode.
//
// Exit codes: 0 success, 2 usage error, 3 target unreachable, 4 I/O or format error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "brc/csv.hpp"
#include "brc/error.hpp"
#include "brc/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitUnreachable = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
  std::string backend = "dct";
  int block_size = 256;
  double lambda_init = 0.6;
  double lambda_step = 0.01;
  double lambda_min = 0.05;
  int ratio = 1;
  double target_bpp = -1.0;
  bool auto_target = false;
  std::uint64_t seed = 0;
  double noise = 0.0;
  int workers = 1;
  std::string out;

  // Everything that influences results. Output paths and worker count are left
  // out so that reruns into other files stay byte-identical.
  std::string describe() const {
    std::ostringstream s;
    s << "--backend " << backend << " --block-size " << block_size << " --lambda-init "
      << brc::format_number(lambda_init) << " --lambda-step " << brc::format_number(lambda_step)
      << " --lambda-min " << brc::format_number(lambda_min) << " --ratio " << ratio;
    if (auto_target || target_bpp < 0.0) s << " --auto-target";
    else s << " --target-bpp " << brc::format_number(target_bpp);
    s << " --seed " << seed << " --noise " << brc::format_number(noise);
    return s.str();
  }

  brc::SyntheticSpec synthetic() const {
    brc::SyntheticSpec spec;
    spec.seed = seed;
    spec.noise_amplitude = noise;
    return spec;
  }

  brc::ControlOptions control() const {
    brc::ControlOptions o;
    o.block_size = block_size;
    o.lambda_init = lambda_init;
    o.lambda_step = lambda_step;
    o.lambda_min = lambda_min;
    o.ratio = ratio;
    if (!auto_target && target_bpp >= 0.0) o.target_bpp = target_bpp;
    o.workers = workers;
    return o;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_control) {
  cmd->add_option("--backend", f.backend, "Codec backend")->check(CLI::IsMember({"synthetic", "dct"}));
  cmd->add_option("--block-size", f.block_size, "Block edge in pixels")->check(CLI::Range(8, 65535));
  cmd->add_option("--seed", f.seed, "Seed for synthetic backend noise");
  cmd->add_option("--noise", f.noise, "Relative noise amplitude of the synthetic backend")->check(CLI::Range(0.0, 0.99));
  cmd->add_option("--workers", f.workers, "Worker threads for block coding")->check(CLI::PositiveNumber);
  if (!with_control) return;
  cmd->add_option("--lambda-init", f.lambda_init, "Initial lambda");
  cmd->add_option("--lambda-step", f.lambda_step, "Lambda decrement per greedy step");
  cmd->add_option("--lambda-min", f.lambda_min, "Lambda floor");
  cmd->add_option("--ratio", f.ratio, "Sampling ratio denominator k (1:k)")->check(CLI::PositiveNumber);
  auto* target = cmd->add_option("--target-bpp", f.target_bpp, "Target bits per pixel")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--auto-target", f.auto_target, "Target 0.95x the rate at lambda-init")->excludes(target);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw CLI::ValidationError("list", "bad number '" + item + "'");
    values.push_back(v);
  }
  return values;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw brc::Error(brc::Errc::Io, "cannot create " + path);
  fn(out);
  if (!out) throw brc::Error(brc::Errc::Io, "write failed for " + path);
}

int exit_code_for(const brc::Error& e) {
  switch (e.code()) {
    case brc::Errc::InvalidArgument:
    case brc::Errc::BlockTooSmall:
      return kExitUsage;
    default:
      return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-level rate control with gradient-predicted R-lambda / D-lambda models"};
  app.set_version_flag("--version", std::string(brc::kToolVersion));
  app.require_subcommand(1);

  CommonFlags flags;
  std::string image_path, lambdas_text = "0.1,0.3,0.5,0.7,0.9";
  std::string bitstream_path, report_path, lines_path, reference_path;
  std::string lambda_inits_text = "0.3,0.6,0.9", ratios_text = "1,2,3,4,8";

  auto* fit = app.add_subcommand("fit", "Per-block R-lambda and D-lambda fits with RMSE");
  fit->add_option("image", image_path, "PGM/PPM image")->required();
  fit->add_option("--lambdas", lambdas_text, "Comma-separated lambda values");
  fit->add_option("--out", flags.out, "CSV output (default stdout)");
  add_common(fit, flags, false);

  auto* control = app.add_subcommand("control", "Run block-level rate control on one image");
  control->add_option("image", image_path, "PGM/PPM image")->required();
  control->add_option("--out", flags.out, "Per-block CSV output (default stdout)");
  control->add_option("--bitstream", bitstream_path, "BRC1 container output");
  control->add_option("--report", report_path, "Run report output (default stderr)");
  control->add_option("--lines-out", lines_path, "Gradient-to-coefficient lines CSV");
  add_common(control, flags, true);

  auto* sweep = app.add_subcommand("sweep", "Sampling-ratio sweep over images");
  sweep->add_option("images", image_path, "Image file or directory of PGM/PPM files")->required();
  sweep->add_option("--lambda-inits", lambda_inits_text, "Comma-separated initial lambdas");
  sweep->add_option("--ratios", ratios_text, "Comma-separated sampling ratio denominators");
  sweep->add_option("--out", flags.out, "CSV output (default stdout)");
  add_common(sweep, flags, true);

  auto* dec = app.add_subcommand("decode", "Decode a BRC1 container to PGM");
  dec->add_option("bitstream", bitstream_path, "BRC1 container")->required();
  dec->add_option("--out", flags.out, "PGM output")->required();
  dec->add_option("--reference", reference_path, "Reference image for PSNR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit) {
      brc::FitOptions opts;
      opts.block_size = flags.block_size;
      opts.workers = flags.workers;
      try {
        opts.lambdas = parse_list(lambdas_text);
      } catch (const std::exception&) {
        std::cerr << "error: --lambdas must be a comma-separated list of numbers\n";
        return kExitUsage;
      }
      if (opts.lambdas.size() < 2) {
        std::cerr << "error: fit needs at least two lambda values\n";
        return kExitUsage;
      }
      const auto backend = brc::make_backend(flags.backend, flags.synthetic());
      const auto rows = brc::run_fit(brc::load_image(image_path), *backend, opts);
      std::string desc = "--backend " + flags.backend + " --block-size " + std::to_string(flags.block_size) +
                         " --lambdas " + lambdas_text + " --seed " + std::to_string(flags.seed) + " --noise " +
                         brc::format_number(flags.noise);
      with_output(flags.out, [&](std::ostream& os) { brc::write_fit_csv(os, rows, desc); });
      return kExitOk;
    }

    if (*control) {
      const auto backend = brc::make_backend(flags.backend, flags.synthetic());
      const brc::ControlRun run = brc::run_control(brc::load_image(image_path), *backend, flags.control());
      const std::string desc = flags.describe();
      with_output(flags.out, [&](std::ostream& os) { brc::write_control_csv(os, run, desc); });
      if (!bitstream_path.empty()) brc::write_bitstream(bitstream_path, run.bitstream);
      if (!lines_path.empty()) with_output(lines_path, [&](std::ostream& os) { brc::write_lines_csv(os, run, desc); });
      if (report_path.empty()) brc::write_report(std::cerr, run.report);
      else with_output(report_path, [&](std::ostream& os) { brc::write_report(os, run.report); });
      return run.report.outcome == brc::AllocationOutcome::Success ? kExitOk : kExitUnreachable;
    }

    if (*sweep) {
      brc::SweepOptions opts;
      opts.control = flags.control();
      try {
        opts.lambda_inits = parse_list(lambda_inits_text);
        opts.ratios.clear();
        for (double r : parse_list(ratios_text)) {
          if (r < 1 || r != static_cast<int>(r)) throw std::invalid_argument("ratio");
          opts.ratios.push_back(static_cast<int>(r));
        }
      } catch (const std::exception&) {
        std::cerr << "error: --lambda-inits and --ratios take comma-separated numbers (ratios positive integers)\n";
        return kExitUsage;
      }
      if (opts.lambda_inits.empty() || opts.ratios.empty()) {
        std::cerr << "error: sweep lists must be nonempty\n";
        return kExitUsage;
      }
      const auto backend = brc::make_backend(flags.backend, flags.synthetic());
      const auto rows = brc::run_sweep(brc::collect_images(image_path), *backend, opts);
      const std::string desc = flags.describe() + " --lambda-inits " + lambda_inits_text + " --ratios " + ratios_text;
      with_output(flags.out, [&](std::ostream& os) { brc::write_sweep_csv(os, rows, opts, desc); });
      return kExitOk;
    }

    if (*dec) {
      const brc::Bitstream bs = brc::read_bitstream(bitstream_path);
      const brc::Image img = brc::decode_bitstream(bs, brc::DctBackend{});
      brc::write_image(flags.out, img);
      if (!reference_path.empty()) {
        const brc::Image ref = brc::to_luma(brc::load_image(reference_path));
        const double err = brc::mse(brc::to_plane(ref), brc::to_plane(img));
        std::cout << "psnr_db " << brc::format_number(brc::psnr_from_mse(err)) << '\n';
      }
      return kExitOk;
    }
  } catch (const brc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
