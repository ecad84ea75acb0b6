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

#include "epicolor/epicolor.h"

#include <algorithm>
#include <new>
#include <string>
#include <utility>

#include "epicolor/colorize.hpp"
#include "epicolor/em.hpp"
#include "epicolor/errors.hpp"
#include "epicolor/image.hpp"
#include "epicolor/model_io.hpp"
#include "epicolor/selftest.hpp"

struct epc_image {
  epicolor::RasterImage image;
};

struct epc_model {
  epicolor::DualEpitome model;
};

namespace {

thread_local std::string last_error;

epc_status fail(epc_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body` and maps library exceptions onto status codes.
template <typename Body>
epc_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return EPC_OK;
  } catch (const epicolor::InvalidInput& e) {
    return fail(EPC_ERR_INVALID_INPUT, e.what());
  } catch (const epicolor::IoError& e) {
    return fail(EPC_ERR_IO, e.what());
  } catch (const epicolor::CorruptModel& e) {
    return fail(EPC_ERR_CORRUPT_MODEL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EPC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EPC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EPC_ERR_INTERNAL, "unknown error");
  }
}

epc_status null_argument(const char* name) {
  return fail(EPC_ERR_INVALID_INPUT, std::string(name) + " must not be null");
}

}  // namespace

extern "C" {

const char* epc_status_string(epc_status status) {
  switch (status) {
    case EPC_OK: return "ok";
    case EPC_ERR_INVALID_INPUT: return "invalid input";
    case EPC_ERR_IO: return "i/o error";
    case EPC_ERR_CORRUPT_MODEL: return "corrupt model file";
    case EPC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* epc_last_error(void) { return last_error.c_str(); }

void epc_train_options_init(epc_train_options* options) {
  if (!options) return;
  const epicolor::TrainConfig defaults;
  options->patch_size = static_cast<uint32_t>(defaults.patch_size);
  options->lambda = defaults.lambda;
  options->iterations = static_cast<uint32_t>(defaults.iterations);
  options->omega = defaults.omega;
  options->sift_grid = static_cast<uint32_t>(defaults.descriptor_grid);
  options->epitome_scale = defaults.epitome_scale;
  options->seed = defaults.seed;
  options->threads = defaults.threads;
}

void epc_colorize_options_init(epc_colorize_options* options) {
  if (!options) return;
  const epicolor::ColorizeOptions defaults;
  options->omega = defaults.omega;
  options->luma_remap = defaults.luma_remap ? 1 : 0;
  options->threads = defaults.threads;
}

epc_status epc_image_load_png(const char* path, epc_image** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new epc_image{epicolor::load_image(path)}; });
}

epc_status epc_image_save_png(const epc_image* image, const char* path) {
  if (!image) return null_argument("image");
  if (!path) return null_argument("path");
  return guarded([&] { epicolor::save_image(image->image, path); });
}

epc_status epc_image_create(uint32_t width, uint32_t height, uint32_t channels,
                            const double* pixels, epc_image** out) {
  if (!pixels) return null_argument("pixels");
  if (!out) return null_argument("out");
  *out = nullptr;
  if (channels != 1 && channels != 3) {
    return fail(EPC_ERR_INVALID_INPUT, "channels must be 1 or 3");
  }
  return guarded([&] {
    const std::size_t n = static_cast<std::size_t>(width) * height * channels;
    *out = new epc_image{epicolor::RasterImage(
        static_cast<int>(width), static_cast<int>(height), static_cast<int>(channels),
        channels == 1 ? epicolor::ChannelSemantics::kY : epicolor::ChannelSemantics::kRGB,
        std::vector<double>(pixels, pixels + n))};
  });
}

epc_status epc_image_info(const epc_image* image, uint32_t* width,
                          uint32_t* height, uint32_t* channels) {
  if (!image) return null_argument("image");
  if (width) *width = static_cast<uint32_t>(image->image.width());
  if (height) *height = static_cast<uint32_t>(image->image.height());
  if (channels) *channels = static_cast<uint32_t>(image->image.channels());
  return EPC_OK;
}

epc_status epc_image_pixels(const epc_image* image, double* pixels, size_t count) {
  if (!image) return null_argument("image");
  if (!pixels) return null_argument("pixels");
  const auto data = image->image.data();
  if (count != data.size()) {
    return fail(EPC_ERR_INVALID_INPUT, "pixel buffer has " + std::to_string(count) +
                                           " slots, image has " +
                                           std::to_string(data.size()) + " values");
  }
  std::copy(data.begin(), data.end(), pixels);
  return EPC_OK;
}

void epc_image_free(epc_image* image) { delete image; }

epc_status epc_train(const epc_image* reference, const epc_train_options* options,
                     epc_iteration_fn on_iteration, void* user_data,
                     epc_model** out) {
  if (!reference) return null_argument("reference");
  if (!out) return null_argument("out");
  *out = nullptr;
  epc_train_options opts;
  if (options) {
    opts = *options;
  } else {
    epc_train_options_init(&opts);
  }
  return guarded([&] {
    epicolor::TrainConfig config;
    config.patch_size = static_cast<int>(opts.patch_size);
    config.lambda = opts.lambda;
    config.iterations = static_cast<int>(opts.iterations);
    config.omega = opts.omega;
    config.descriptor_grid = static_cast<int>(opts.sift_grid);
    config.epitome_scale = opts.epitome_scale;
    config.seed = opts.seed;
    config.threads = opts.threads;
    epicolor::IterationCallback callback;
    if (on_iteration) {
      callback = [&](const epicolor::IterationRecord& r) {
        on_iteration(static_cast<uint32_t>(r.iteration), r.objective, user_data);
      };
    }
    auto result = epicolor::train(reference->image, config, callback);
    *out = new epc_model{std::move(result.model)};
  });
}

epc_status epc_model_save(const epc_model* model, const char* path) {
  if (!model) return null_argument("model");
  if (!path) return null_argument("path");
  return guarded([&] { epicolor::save_model(model->model, path); });
}

epc_status epc_model_load(const char* path, epc_model** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new epc_model{epicolor::load_model(path)}; });
}

epc_status epc_model_info(const epc_model* model, uint32_t* rows, uint32_t* cols,
                          uint32_t* patch_size, uint32_t* sift_grid, double* lambda) {
  if (!model) return null_argument("model");
  const auto& m = model->model;
  if (rows) *rows = static_cast<uint32_t>(m.yiq.rows);
  if (cols) *cols = static_cast<uint32_t>(m.yiq.cols);
  if (patch_size) *patch_size = static_cast<uint32_t>(m.patch_size);
  if (sift_grid) *sift_grid = static_cast<uint32_t>(m.descriptor_grid);
  if (lambda) *lambda = m.lambda;
  return EPC_OK;
}

void epc_model_free(epc_model* model) { delete model; }

epc_status epc_colorize(const epc_model* model, const epc_image* target,
                        const epc_colorize_options* options, epc_image** out) {
  if (!model) return null_argument("model");
  if (!target) return null_argument("target");
  if (!out) return null_argument("out");
  *out = nullptr;
  epc_colorize_options opts;
  if (options) {
    opts = *options;
  } else {
    epc_colorize_options_init(&opts);
  }
  return guarded([&] {
    epicolor::ColorizeOptions o;
    o.omega = opts.omega;
    o.luma_remap = opts.luma_remap != 0;
    o.threads = opts.threads;
    *out = new epc_image{epicolor::colorize(target->image, model->model, o)};
  });
}

epc_status epc_selftest(uint32_t flags, epc_selftest_fn report, void* user_data,
                        uint32_t* failures) {
  return guarded([&] {
    epicolor::SelfTestOptions options;
    options.inject_variance_sign_fault = (flags & EPC_SELFTEST_INJECT_VARIANCE_FAULT) != 0;
    uint32_t failed = 0;
    for (const auto& r : epicolor::run_selftest(options)) {
      if (!r.passed) ++failed;
      if (report) report(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user_data);
    }
    if (failures) *failures = failed;
  });
}

}  // extern "C"
