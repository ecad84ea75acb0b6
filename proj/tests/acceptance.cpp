// Copyright 2026 The epicolor Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "epicolor/colorize.hpp"
#include "epicolor/dsift.hpp"
#include "epicolor/em.hpp"
#include "epicolor/image.hpp"
#include "epicolor/likelihood.hpp"
#include "epicolor/model_io.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace epicolor {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared by criteria 2 and 4.
TrainConfig two_region_config(int iterations) {
  TrainConfig c;
  c.patch_size = 8;
  c.omega = 0.5;
  c.lambda = 0.5;
  c.iterations = iterations;
  return c;
}

Outcome posterior_normalization() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  double worst = 0.0;
  bool nonneg = true;
  for (int n = 0; n < 1000; ++n) {
    const int L = std::uniform_int_distribution<int>(1, 64)(gen);
    std::uniform_real_distribution<double> ll(-1000, 100), p(0, 1);
    std::vector<double> scores(L), pi(L);
    for (double& v : scores) v = ll(gen);
    for (double& v : pi) v = p(gen);
    const auto q = e_step(scores, MappingPrior::from_probabilities(pi));
    double s = 0.0;
    for (double v : q) {
      s += v;
      nonneg = nonneg && v >= 0.0;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && nonneg && t < 1.0,
          fmt("1000 instances, max |row sum - 1| = %.3g, %.3f s", worst, t)};
}

Outcome em_monotonicity() {
  const auto t0 = Clock::now();
  const auto r = train(testing::two_region_image(32), two_region_config(10));
  const double t = seconds_since(t0);
  double prev = r.initial_objective;
  int violations = 0, unexplained = 0;
  for (const auto& rec : r.history) {
    if (rec.objective < prev - 1e-6 * std::abs(prev)) {
      ++violations;
      if (!rec.floors.any()) ++unexplained;
    }
    prev = rec.objective;
  }
  return {unexplained == 0 && t < 30.0,
          fmt("%g -> %g over %g iterations", r.initial_objective, r.history.back().objective,
              static_cast<double>(r.history.size())) +
              fmt(", %g decreases (%g without floor activity), %.2f s", violations, unexplained, t)};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  double naive_err = 0.0, fast_rel = 0.0, mstep_err = 0.0;
  const int instances = 200;
  for (int seed = 0; seed < instances; ++seed) {
    const auto inst = testing::random_tiny_instance(5000 + seed);
    const auto& e = inst.model.yiq;
    const int channels[] = {0, 1, 2};
    for (const auto& patch : inst.set.patches) {
      const auto oracle = testing::oracle_patch_ll(patch, e, {0, 1, 2});
      const auto naive = patch_log_likelihoods_naive(patch, e, channels);
      const auto fast = patch_log_likelihoods(patch, e);
      for (std::size_t l = 0; l < oracle.size(); ++l) {
        naive_err = std::max(naive_err, std::abs(naive[l] - oracle[l]));
        fast_rel = std::max(fast_rel,
                            std::abs(fast[l] - naive[l]) / std::max(1.0, std::abs(naive[l])));
      }
    }
    const auto got = m_step(inst.set, inst.posterior, inst.model).model;
    const auto want = testing::oracle_m_step(inst.set, inst.posterior, inst.model);
    auto diff = [&](const std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) mstep_err = std::max(mstep_err, std::abs(a[i] - b[i]));
    };
    diff(got.yiq.mu, want.yiq.mu);
    diff(got.yiq.phi, want.yiq.phi);
    diff(got.dsift.mu, want.dsift.mu);
    diff(got.dsift.phi, want.dsift.phi);
    for (std::size_t l = 0; l < want.prior.log_pi.size(); ++l)
      mstep_err = std::max(mstep_err, std::abs(std::exp(got.prior.log_pi[l]) -
                                               std::exp(want.prior.log_pi[l])));
  }
  const double t = seconds_since(t0);
  return {naive_err <= 1e-10 && mstep_err <= 1e-10 && fast_rel <= 1e-8 && t < 10.0,
          fmt("200 instances, naive %.3g, m-step %.3g, ", naive_err, mstep_err) +
              fmt("fast-path relative %.3g, %.2f s", fast_rel, t)};
}

Outcome self_colorization() {
  const auto t0 = Clock::now();
  const auto rgb = testing::two_region_image(32);
  const auto model = train(rgb, two_region_config(20)).model;
  ColorizeOptions opts;
  opts.omega = 0.25;
  const auto out = colorize_yiq(grayscale_as_luminance(rgb), model, opts);
  const double t = seconds_since(t0);

  const auto a = rgb_to_yiq(testing::kRegionA), b = rgb_to_yiq(testing::kRegionB);
  double err = 0.0;
  int correct = 0;
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) {
      const bool in_b = testing::in_region_b(r, c, 32);
      const auto& truth = in_b ? b : a;
      const double i = out.at(r, c, 1), q = out.at(r, c, 2);
      err += std::abs(i - truth[1]) + std::abs(q - truth[2]);
      const double da = std::hypot(i - a[1], q - a[2]), db = std::hypot(i - b[1], q - b[2]);
      if (in_b ? db < da : da < db) ++correct;
    }
  const double mae = err / (32 * 32 * 2);
  const double frac = correct / 1024.0;
  return {mae <= 0.05 && frac >= 0.9 && t < 60.0,
          fmt("IQ MAE %.4f, %.1f%% pixels nearest correct region, %.2f s", mae, 100 * frac, t)};
}

Outcome color_round_trip() {
  const auto t0 = Clock::now();
  RasterImage lattice(17 * 17, 17, 3, ChannelSemantics::kRGB);
  for (int r = 0; r < 17; ++r)
    for (int g = 0; g < 17; ++g)
      for (int b = 0; b < 17; ++b) {
        lattice.at(r, g * 17 + b, 0) = r / 16.0;
        lattice.at(r, g * 17 + b, 1) = g / 16.0;
        lattice.at(r, g * 17 + b, 2) = b / 16.0;
      }
  const auto back = yiq_to_rgb(rgb_to_yiq(lattice));
  double worst = 0.0;
  for (std::size_t i = 0; i < lattice.data().size(); ++i)
    worst = std::max(worst, std::abs(back.data()[i] - lattice.data()[i]));
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 1.0, fmt("17^3 lattice, max error %.3g, %.4f s", worst, t)};
}

Outcome descriptor_invariances() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(606);
  std::uniform_int_distribution<int> level(0, 1024), shift(-1024, 1024);
  std::uniform_real_distribution<double> unit(0.0, 1.0), scale(0.01, 100.0);
  int shift_mismatches = 0;
  double contrast_err = 0.0;
  for (int n = 0; n < 100; ++n) {
    const int k = 8 + n % 9;
    const int grid = 1 + n % 4;
    // Brightness: values on the 1/1024 lattice, so adding a lattice constant
    // leaves every difference exact and the descriptors must agree bit for bit.
    RasterImage p(k, k, 1, ChannelSemantics::kY);
    for (double& v : p.data()) v = level(gen) / 1024.0;
    RasterImage shifted = p;
    const double c = shift(gen) / 1024.0;
    for (double& v : shifted.data()) v += c;
    if (patch_descriptor(shifted, grid).values != patch_descriptor(p, grid).values)
      ++shift_mismatches;
    // Contrast: continuous values, so no gradient sits on an orientation bin edge.
    RasterImage q(k, k, 1, ChannelSemantics::kY);
    for (double& v : q.data()) v = unit(gen);
    RasterImage scaled = q;
    const double a = scale(gen);
    for (double& v : scaled.data()) v *= a;
    const auto base = patch_descriptor(q, grid).values;
    const auto d = patch_descriptor(scaled, grid).values;
    for (std::size_t i = 0; i < d.size(); ++i)
      contrast_err = std::max(contrast_err, std::abs(d[i] - base[i]));
  }
  RasterImage flat(12, 12, 1, ChannelSemantics::kY);
  for (double& v : flat.data()) v = 0.73;
  const auto z = patch_descriptor(flat, 3).values;
  const bool zero = std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; });
  const double t = seconds_since(t0);
  return {shift_mismatches == 0 && contrast_err <= 1e-12 && zero && t < 1.0,
          fmt("100+100 patches, %g brightness mismatches, contrast error %.3g", shift_mismatches,
              contrast_err) +
              (zero ? ", constant patch -> 0" : ", constant patch NOT zero") +
              fmt(", %.3f s", t)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EPICOLOR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<char> file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "epicolor_acceptance_determinism";
  fs::create_directories(dir);
  const auto ref = (dir / "ref.png").string();
  save_image(testing::two_region_image(32), ref);
  const std::string common = "train --ref " + ref + " --patch-size 8 --iters 5 --seed 7";
  const int s1 = run_cli(common + " --out " + (dir / "a.eptm").string());
  const int s2 = run_cli(common + " --out " + (dir / "b.eptm").string());
  const int s3 = run_cli(common + " --threads 1 --out " + (dir / "serial.eptm").string());
  const int s4 = run_cli(common + " --threads 4 --out " + (dir / "parallel.eptm").string());
  const bool ran = s1 == 0 && s2 == 0 && s3 == 0 && s4 == 0;
  const auto a = file_bytes(dir / "a.eptm");
  const bool repeat = ran && !a.empty() && a == file_bytes(dir / "b.eptm");
  const bool threads = ran && file_bytes(dir / "serial.eptm") == file_bytes(dir / "parallel.eptm");

  // In-process, including the per-iteration objectives.
  auto cfg = two_region_config(5);
  cfg.threads = 1;
  const auto serial = train(testing::two_region_image(32), cfg);
  cfg.threads = 4;
  const auto parallel = train(testing::two_region_image(32), cfg);
  bool same_history = serial.history.size() == parallel.history.size();
  for (std::size_t i = 0; same_history && i < serial.history.size(); ++i)
    same_history = serial.history[i].objective == parallel.history[i].objective;
  const bool in_process = serialize_model(serial.model) == serialize_model(parallel.model) &&
                          same_history;
  fs::remove_all(dir);
  return {repeat && threads && in_process,
          std::string("repeat runs ") + (repeat ? "identical" : "DIFFER") + ", 1 vs 4 threads " +
              (threads ? "identical" : "DIFFER") + ", in-process serial/parallel " +
              (in_process ? "identical" : "DIFFER")};
}

DualEpitome shift_model(const DualEpitome& m, int a, int b) {
  DualEpitome s = m;
  const int rows = m.yiq.rows, cols = m.yiq.cols, D = m.dsift.dims;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int r2 = (r + a) % rows, c2 = (c + b) % cols;
      for (int ch = 0; ch < 3; ++ch) {
        s.yiq.mu[s.yiq.index(r2, c2, ch)] = m.yiq.mean(r, c, ch);
        s.yiq.phi[s.yiq.index(r2, c2, ch)] = m.yiq.variance(r, c, ch);
      }
      const int l = r * cols + c, l2 = r2 * cols + c2;
      s.prior.log_pi[l2] = m.prior.log_pi[l];
      for (int d = 0; d < D; ++d) {
        s.dsift.mu[l2 * D + d] = m.dsift.mu[l * D + d];
        s.dsift.phi[l2 * D + d] = m.dsift.phi[l * D + d];
      }
    }
  return s;
}

Outcome toroidal_symmetry() {
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto inst = testing::random_tiny_instance(8000 + seed);
    std::mt19937_64 gen(seed);
    const int a = std::uniform_int_distribution<int>(0, inst.model.yiq.rows - 1)(gen);
    const int b = std::uniform_int_distribution<int>(0, inst.model.yiq.cols - 1)(gen);
    const double before = total_log_likelihood(inst.set, inst.model);
    const double after = total_log_likelihood(inst.set, shift_model(inst.model, a, b));
    worst = std::max(worst, std::abs(after - before));
  }
  return {worst <= 1e-10, fmt("100 random models, max |change| = %.3g", worst)};
}

Outcome performance() {
  // End-to-end training at desk scale.
  RasterImage ref = testing::two_region_image(64);
  std::mt19937_64 gen(909);
  std::uniform_real_distribution<double> noise(-0.03, 0.03);
  for (double& v : ref.data()) v = std::clamp(v + noise(gen), 0.0, 1.0);
  TrainConfig cfg;
  cfg.patch_size = 12;
  cfg.iterations = 20;
  cfg.convergence_tolerance = 0.0;  // run all 20 iterations
  const auto t0 = Clock::now();
  const auto r = train(ref, cfg);
  const double train_s = seconds_since(t0);

  // Likelihood engines on a 32x32 epitome (L = 1024), K = 12.
  const Epitome& e = r.model.yiq;
  const auto yiq = rgb_to_yiq(ref);
  const auto grid = sample_grid(64, 64, 12, 0.5);
  std::vector<RasterImage> patches;
  for (std::size_t k = 0; k < 16; ++k) patches.push_back(extract_patch(yiq, grid.anchors[k], 12));
  const int channels[] = {0, 1, 2};
  double sink = 0.0;
  auto t1 = Clock::now();
  for (const auto& p : patches) sink += patch_log_likelihoods_naive(p, e, channels)[0];
  const double naive_s = seconds_since(t1);
  t1 = Clock::now();
  const PatchScorer scorer(e, 12, {0, 1, 2});  // construction counted
  for (const auto& p : patches) sink += scorer.score(p)[0];
  const double fast_s = seconds_since(t1);
  const double speedup = naive_s / fast_s;
  const bool big_enough = e.rows * e.cols >= 32 * 32;
  return {train_s < 300.0 && speedup >= 3.0 && big_enough && std::isfinite(sink),
          fmt("64x64, K=12, 20 iterations in %.2f s; fast path %.1fx faster than naive at L=%g",
              train_s, speedup, static_cast<double>(e.rows * e.cols))};
}

}  // namespace
}  // namespace epicolor

int main() {
  using epicolor::Outcome;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"posterior normalization", epicolor::posterior_normalization},
      {"EM monotonicity", epicolor::em_monotonicity},
      {"oracle equivalence", epicolor::oracle_equivalence},
      {"self-colorization recovery", epicolor::self_colorization},
      {"color-space round trip", epicolor::color_round_trip},
      {"descriptor invariances", epicolor::descriptor_invariances},
      {"determinism", epicolor::determinism},
      {"toroidal symmetry", epicolor::toroidal_symmetry},
      {"performance smoke test", epicolor::performance},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("%s criterion %d (%s): %s\n", o.passed ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
