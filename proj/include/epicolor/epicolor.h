/* Copyright 2026 The epicolor Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libepicolor: epitome training from a color reference image
 * and automatic colorization of grayscale targets.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an epc_status; the
 * message of the most recent failure on the calling thread is available from
 * epc_last_error(). Handles are immutable after creation, so a model or
 * image may be shared by any number of threads.
 */

#ifndef EPICOLOR_EPICOLOR_H_
#define EPICOLOR_EPICOLOR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EPICOLOR_BUILDING)
#    define EPC_API __declspec(dllexport)
#  else
#    define EPC_API __declspec(dllimport)
#  endif
#else
#  define EPC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as the CLI exit codes. */
typedef enum epc_status {
  EPC_OK = 0,
  EPC_ERR_INVALID_INPUT = 1,
  EPC_ERR_IO = 2,
  EPC_ERR_CORRUPT_MODEL = 3,
  EPC_ERR_INTERNAL = 4
} epc_status;

typedef struct epc_image epc_image;
typedef struct epc_model epc_model;

typedef struct epc_train_options {
  uint32_t patch_size;      /* K, default 12 */
  double lambda;            /* color vs descriptor weight, default 0.5 */
  uint32_t iterations;      /* EM iterations, default 20 */
  double omega;             /* patch gap as a fraction of K, default 0.5 */
  uint32_t sift_grid;       /* R, default 3 */
  double epitome_scale;     /* epitome side / image side, default 0.5 */
  uint64_t seed;            /* default 0 */
  uint32_t threads;         /* 0 = all cores; output does not depend on it */
} epc_train_options;

typedef struct epc_colorize_options {
  double omega;             /* default 0.25 */
  int luma_remap;           /* default 0 */
  uint32_t threads;         /* 0 = all cores */
} epc_colorize_options;

/* Called after each EM iteration with the objective of the updated model. */
typedef void (*epc_iteration_fn)(uint32_t iteration, double loglik,
                                 void* user_data);

/* Called once per self-test property. */
typedef void (*epc_selftest_fn)(const char* property, int passed,
                                const char* detail, void* user_data);

#define EPC_SELFTEST_INJECT_VARIANCE_FAULT 0x1u

EPC_API const char* epc_status_string(epc_status status);
EPC_API const char* epc_last_error(void);

EPC_API void epc_train_options_init(epc_train_options* options);
EPC_API void epc_colorize_options_init(epc_colorize_options* options);

/* Images: 8-bit PNG in/out, values in [0, 1]. channels is 1 (gray) or 3 (RGB). */
EPC_API epc_status epc_image_load_png(const char* path, epc_image** out);
EPC_API epc_status epc_image_save_png(const epc_image* image, const char* path);
EPC_API epc_status epc_image_create(uint32_t width, uint32_t height,
                                    uint32_t channels, const double* pixels,
                                    epc_image** out);
EPC_API epc_status epc_image_info(const epc_image* image, uint32_t* width,
                                  uint32_t* height, uint32_t* channels);
/* Copies width * height * channels interleaved values into `pixels`. */
EPC_API epc_status epc_image_pixels(const epc_image* image, double* pixels,
                                    size_t count);
EPC_API void epc_image_free(epc_image* image);

EPC_API epc_status epc_train(const epc_image* reference,
                             const epc_train_options* options,
                             epc_iteration_fn on_iteration, void* user_data,
                             epc_model** out);
EPC_API epc_status epc_model_save(const epc_model* model, const char* path);
EPC_API epc_status epc_model_load(const char* path, epc_model** out);
EPC_API epc_status epc_model_info(const epc_model* model, uint32_t* rows,
                                  uint32_t* cols, uint32_t* patch_size,
                                  uint32_t* sift_grid, double* lambda);
EPC_API void epc_model_free(epc_model* model);

/* Target may be gray or RGB (reduced to luminance). Output is RGB. */
EPC_API epc_status epc_colorize(const epc_model* model, const epc_image* target,
                                const epc_colorize_options* options,
                                epc_image** out);

/* Runs the oracle self-test. *failures receives the number of failed
   properties; the status is EPC_OK whenever the suite itself ran. */
EPC_API epc_status epc_selftest(uint32_t flags, epc_selftest_fn report,
                                void* user_data, uint32_t* failures);

#ifdef __cplusplus
}
#endif

#endif /* EPICOLOR_EPICOLOR_H_ */
