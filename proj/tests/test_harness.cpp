#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "brc/error.hpp"
#include "brc/harness.hpp"
#include "support/corpus.hpp"

using namespace brc;

namespace {

SyntheticBackend synthetic(double noise = 0.0, std::uint64_t seed = 0) {
  SyntheticSpec spec;
  spec.noise_amplitude = noise;
  spec.seed = seed;
  return SyntheticBackend(spec);
}

ControlOptions control_options(int block_size, int ratio, std::optional<double> target = std::nullopt) {
  ControlOptions o;
  o.block_size = block_size;
  o.ratio = ratio;
  o.target_bpp = target;
  return o;
}

std::string control_csv(const ControlRun& run) {
  std::ostringstream os;
  write_control_csv(os, run, "--test");
  return os.str();
}

}  // namespace

TEST_CASE("codec call accounting") {
  const SyntheticBackend syn = synthetic();
  const Image img = testing::textured_image(384, 256, 128, 1);  // 3 x 2 = 6 blocks

  const ControlRun k1 = run_control(img, syn, control_options(128, 1, 8.0));
  CHECK(k1.report.calls.target == 0);
  CHECK(k1.report.calls.fit == 12);
  CHECK(k1.report.calls.final == 6);
  CHECK(k1.report.codec_calls == 18);

  const ControlRun k3 = run_control(img, syn, control_options(128, 3, 8.0));
  CHECK(k3.report.sampled_blocks == 2);
  CHECK(k3.report.codec_calls == 10);

  const ControlRun automatic = run_control(img, syn, control_options(128, 3));
  CHECK(automatic.report.calls.target == 6);
  CHECK(automatic.report.codec_calls == 16);

  const Image big = testing::textured_image(768, 512, 64, 2);  // 96 blocks
  for (int k : {1, 2, 3, 4, 8}) {
    const ControlRun run = run_control(big, syn, control_options(64, k));
    const std::size_t s = std::max<std::size_t>(2, (96 + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k));
    CHECK(run.report.sampled_blocks == s);
    CHECK(run.report.calls.control() == 2 * s + 96);
    CHECK(run.report.calls.total() == 2 * s + 96 + 96);
  }
}

TEST_CASE("noiseless synthetic runs recover the ground truth") {
  const SyntheticBackend syn = synthetic();
  const Image img = testing::textured_image(512, 512, 64, 3);
  for (int k : {1, 3, 8}) {
    const ControlRun run = run_control(img, syn, control_options(64, k));
    REQUIRE(run.lines);
    CHECK((*run.lines)[0].slope == doctest::Approx(1.5).epsilon(1e-9));
    CHECK((*run.lines)[3].intercept == doctest::Approx(2.0).epsilon(1e-9));
    for (const Block& b : run.grid.blocks) {
      const BlockRdProfile truth = syn.spec().profile_at(b.index, b.gradient);
      const BlockRdProfile& got = run.profiles[b.index];
      CHECK(std::abs(got.a() - truth.a()) < 1e-6);
      CHECK(std::abs(got.b() - truth.b()) < 1e-6);
      CHECK(std::abs(got.a_prime() - truth.a_prime()) < 1e-6);
      CHECK(std::abs(got.b_prime() - truth.b_prime()) < 1e-6);
    }
    CHECK(run.report.outcome == AllocationOutcome::Success);
    CHECK(run.report.achieved_model_bpp <= run.report.target_bpp);
    CHECK(run.report.delta_r_percent <= 0.5);
    CHECK(run.report.wall_time_s > 0.0);
  }
}

TEST_CASE("rate error under measurement noise") {
  double k1 = 0.0, k3 = 0.0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const SyntheticBackend syn = synthetic(0.02, seed);
    const Image img = testing::textured_image(512, 512, 32, 10 + seed);
    k1 += run_control(img, syn, control_options(32, 1)).report.delta_r_percent / 4.0;
    k3 += run_control(img, syn, control_options(32, 3)).report.delta_r_percent / 4.0;
  }
  CHECK(k1 <= 1.0);
  CHECK(k3 <= 2.0);
}

TEST_CASE("unreachable targets are reported") {
  const SyntheticBackend syn = synthetic();
  const ControlRun run = run_control(testing::textured_image(256, 256, 64, 4), syn, control_options(64, 1, 0.0));
  CHECK(run.report.outcome == AllocationOutcome::TargetUnreachable);
  for (double lam : run.allocation.lambdas) CHECK(lam == doctest::Approx(0.05));
  CHECK(control_csv(run).find("# outcome target_unreachable") != std::string::npos);
}

TEST_CASE("bitstream agrees with the report and decodes to the reconstruction") {
  const DctBackend dct;
  const Image img = testing::natural_like_image(200, 136, 5);
  const ControlRun run = run_control(img, dct, control_options(64, 2));
  const double bpp = static_cast<double>(run.bitstream.total_payload_bits()) / (200.0 * 136.0);
  CHECK(bpp == doctest::Approx(run.report.achieved_actual_bpp).epsilon(1e-12));
  const double dr = 100.0 * std::abs(bpp - run.report.target_bpp) / run.report.target_bpp;
  CHECK(dr == doctest::Approx(run.report.delta_r_percent).epsilon(1e-9));

  const Bitstream parsed = parse_bitstream(serialize(run.bitstream));
  const Image decoded = decode_bitstream(parsed, dct);
  CHECK(to_plane(decoded) == run.reconstruction);
  const double psnr = psnr_from_mse(mse(to_plane(to_luma(img)), to_plane(decoded)));
  CHECK(std::abs(psnr - run.report.psnr_db) <= 0.01);
}

TEST_CASE("flat sampled blocks fall back to prediction") {
  const DctBackend dct;
  const Image img = testing::half_flat_half_noise(256, 128, 6);
  const ControlRun run = run_control(img, dct, control_options(32, 1));
  std::size_t rejected = 0;
  for (const auto& b : run.blocks) {
    if (b.status == FitStatus::Rejected) ++rejected;
    CHECK(run.profiles[b.index].rate_model.sign_valid());
    CHECK(run.profiles[b.index].dist_model.sign_valid());
  }
  CHECK(rejected > 0);
}

TEST_CASE("results do not depend on the worker count") {
  const DctBackend dct;
  const Image img = testing::natural_like_image(320, 192, 7);
  ControlOptions o = control_options(64, 2);
  const ControlRun one = run_control(img, dct, o);
  o.workers = 4;
  const ControlRun four = run_control(img, dct, o);
  CHECK(control_csv(one) == control_csv(four));
  CHECK(serialize(one.bitstream) == serialize(four.bitstream));

  FitOptions f;
  f.block_size = 64;
  const auto a = run_fit(img, dct, f);
  f.workers = 3;
  const auto b = run_fit(img, dct, f);
  std::ostringstream sa, sb;
  write_fit_csv(sa, a, "x");
  write_fit_csv(sb, b, "x");
  CHECK(sa.str() == sb.str());
}

TEST_CASE("fit rows") {
  const SyntheticBackend syn = synthetic();
  FitOptions f;
  f.block_size = 256;
  const auto rows = run_fit(testing::textured_image(768, 512, 256, 8), syn, f);
  REQUIRE(rows.size() == 18);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].block_index == i / 3);
    CHECK(rows[i].status == "ok");
    if (rows[i].model_kind != "distortion_power") CHECK(rows[i].rmse < 1e-9);
  }
  CHECK(rows[0].model_kind == "rate_loglinear");
  CHECK(rows[0].param1 == doctest::Approx(1.5 * rows[0].gradient + 0.5));
  f.lambdas = {0.5};
  CHECK_THROWS_AS(run_fit(testing::textured_image(64, 64, 32, 9), syn, f), Error);
}

TEST_CASE("sweep") {
  const SyntheticBackend syn = synthetic(0.02, 1);
  testing::TempDir dir("sweep");
  SweepOptions opts;
  opts.control.block_size = 32;
  opts.lambda_inits = {0.6};

  std::ostringstream empty;
  write_sweep_csv(empty, run_sweep(collect_images(dir.path()), syn, opts), opts, "x");
  std::size_t lines = 0;
  for (char c : empty.str()) lines += c == '\n';
  CHECK(lines == 2);

  for (int i = 0; i < 3; ++i) write_image(dir / ("img" + std::to_string(i) + ".pgm"), testing::textured_image(256, 256, 32, 20 + static_cast<std::uint64_t>(i)));
  { std::ofstream(dir / "notes.txt") << "ignored"; }
  { std::ofstream(dir / "broken.pgm") << "P5 garbage"; }
  const auto images = collect_images(dir.path());
  REQUIRE(images.size() == 4);
  const auto rows = run_sweep(images, syn, opts);
  CHECK(rows.size() == 4 * opts.ratios.size());
  std::size_t errors = 0;
  for (const auto& r : rows) errors += r.report ? 0 : 1;
  CHECK(errors == opts.ratios.size());

  std::vector<double> calls;
  for (int k : opts.ratios)
    for (const auto& r : rows)
      if (r.report && r.image == "img0.pgm" && r.ratio == k) calls.push_back(static_cast<double>(r.report->calls.control()));
  for (std::size_t i = 1; i < calls.size(); ++i) CHECK(calls[i] < calls[i - 1]);

  std::ostringstream csv;
  write_sweep_csv(csv, rows, opts, "x");
  CHECK(csv.str().find("MEAN,0.6,1,") != std::string::npos);
  CHECK(csv.str().find("MEAN,0.6,8,") != std::string::npos);
  CHECK_THROWS_AS(collect_images(dir / "missing"), Error);
}

TEST_CASE("invalid options") {
  const SyntheticBackend syn = synthetic();
  const Image img = testing::textured_image(64, 64, 32, 30);
  CHECK_THROWS_AS(run_control(img, syn, control_options(4, 1)), Error);
  CHECK_THROWS_AS(run_control(img, syn, control_options(32, 0)), Error);
  ControlOptions o = control_options(32, 1);
  o.lambda_min = 0.9;
  CHECK_THROWS_AS(run_control(img, syn, o), Error);
}
