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

// epicolor: train an epitome from a color reference and colorize grayscale
// images with it.
//
//   epicolor train --ref ref.png --out model.eptm [--patch-size 12] ...
//   epicolor colorize --model model.eptm --target gray.png --out color.png
//   epicolor selftest
//
// Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 corrupt model
// file, 4 internal error.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "epicolor/epicolor.h"

namespace {

struct ImageDeleter {
  void operator()(epc_image* p) const { epc_image_free(p); }
};
struct ModelDeleter {
  void operator()(epc_model* p) const { epc_model_free(p); }
};
using ImagePtr = std::unique_ptr<epc_image, ImageDeleter>;
using ModelPtr = std::unique_ptr<epc_model, ModelDeleter>;

int report(epc_status status, const char* what) {
  if (status != EPC_OK) {
    std::fprintf(stderr, "epicolor: %s: %s: %s\n", what, epc_status_string(status),
                 epc_last_error());
  }
  return static_cast<int>(status);
}

struct TrainArgs {
  std::string ref;
  std::string out;
  epc_train_options options{};
};

int run_train(const TrainArgs& args) {
  epc_image* raw_ref = nullptr;
  if (auto s = epc_image_load_png(args.ref.c_str(), &raw_ref); s != EPC_OK) {
    return report(s, "loading reference");
  }
  ImagePtr ref(raw_ref);

  epc_model* raw_model = nullptr;
  auto print_iteration = [](uint32_t iteration, double loglik, void*) {
    std::printf("iter %u loglik %.17g\n", iteration, loglik);
    std::fflush(stdout);
  };
  if (auto s = epc_train(ref.get(), &args.options, print_iteration, nullptr, &raw_model);
      s != EPC_OK) {
    return report(s, "training");
  }
  ModelPtr model(raw_model);
  return report(epc_model_save(model.get(), args.out.c_str()), "saving model");
}

struct ColorizeArgs {
  std::string model;
  std::string target;
  std::string out;
  epc_colorize_options options{};
  bool luma_remap = false;
};

int run_colorize(const ColorizeArgs& args) {
  epc_model* raw_model = nullptr;
  if (auto s = epc_model_load(args.model.c_str(), &raw_model); s != EPC_OK) {
    return report(s, "loading model");
  }
  ModelPtr model(raw_model);

  epc_image* raw_target = nullptr;
  if (auto s = epc_image_load_png(args.target.c_str(), &raw_target); s != EPC_OK) {
    return report(s, "loading target");
  }
  ImagePtr target(raw_target);

  epc_colorize_options options = args.options;
  options.luma_remap = args.luma_remap ? 1 : 0;
  epc_image* raw_out = nullptr;
  if (auto s = epc_colorize(model.get(), target.get(), &options, &raw_out); s != EPC_OK) {
    return report(s, "colorizing");
  }
  ImagePtr colored(raw_out);
  return report(epc_image_save_png(colored.get(), args.out.c_str()), "saving output");
}

int run_selftest(bool inject_fault) {
  uint32_t failures = 0;
  auto print = [](const char* property, int passed, const char* detail, void*) {
    std::printf("%s %s (%s)\n", passed ? "PASS" : "FAIL", property, detail);
  };
  const uint32_t flags = inject_fault ? EPC_SELFTEST_INJECT_VARIANCE_FAULT : 0u;
  if (auto s = epc_selftest(flags, print, nullptr, &failures); s != EPC_OK) {
    return report(s, "selftest");
  }
  if (failures > 0) {
    std::printf("%u propert%s failed\n", failures, failures == 1 ? "y" : "ies");
    return 1;
  }
  std::printf("all properties passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epitome-based automatic image colorization"};
  app.require_subcommand(1);

  TrainArgs train;
  epc_train_options_init(&train.options);
  auto* train_cmd = app.add_subcommand("train", "Train an epitome from a color reference image");
  train_cmd->add_option("--ref", train.ref, "Reference color PNG")->required();
  train_cmd->add_option("--out", train.out, "Output model file")->required();
  train_cmd->add_option("--patch-size", train.options.patch_size, "Patch size K")
      ->capture_default_str();
  train_cmd->add_option("--lambda", train.options.lambda,
                        "Weight of color vs. descriptor likelihood, in [0, 1]")
      ->capture_default_str();
  train_cmd->add_option("--iters", train.options.iterations, "Maximum EM iterations")
      ->capture_default_str();
  train_cmd->add_option("--omega", train.options.omega,
                        "Patch gap as a fraction of K, in (0, 1]")
      ->capture_default_str();
  train_cmd->add_option("--sift-grid", train.options.sift_grid,
                        "Descriptor grid R (8R^2 dimensions)")
      ->capture_default_str();
  train_cmd->add_option("--epitome-scale", train.options.epitome_scale,
                        "Epitome side length relative to the reference")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.options.seed, "Initialization seed")
      ->capture_default_str();
  train_cmd->add_option("--threads", train.options.threads, "Worker threads (0 = all)")
      ->capture_default_str();

  ColorizeArgs colorize;
  epc_colorize_options_init(&colorize.options);
  auto* colorize_cmd = app.add_subcommand("colorize", "Colorize a grayscale image");
  colorize_cmd->add_option("--model", colorize.model, "Model file from 'train'")->required();
  colorize_cmd->add_option("--target", colorize.target, "Grayscale (or RGB) PNG")->required();
  colorize_cmd->add_option("--out", colorize.out, "Output RGB PNG")->required();
  colorize_cmd->add_option("--omega", colorize.options.omega,
                           "Patch gap as a fraction of K, in (0, 1]")
      ->capture_default_str();
  colorize_cmd->add_flag("--luma-remap", colorize.luma_remap,
                         "Match target luminance statistics to the model first");
  colorize_cmd->add_option("--threads", colorize.options.threads, "Worker threads (0 = all)")
      ->capture_default_str();

  bool inject_fault = false;
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the built-in oracle checks");
  selftest_cmd->add_flag("--inject-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(EPC_ERR_INVALID_INPUT);
  }

  if (*train_cmd) return run_train(train);
  if (*colorize_cmd) return run_colorize(colorize);
  return run_selftest(inject_fault);
}
