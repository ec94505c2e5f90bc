// Copyright 2026 The WACSE Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WACSE_WACSE_H_
#define WACSE_WACSE_H_

/* C interface to the wacse library. Every call returns a status code; on
 * failure wacse_last_error() describes the problem for the calling thread.
 * Objects are opaque handles released with the matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WACSE_API __declspec(dllexport)
#else
#define WACSE_API __attribute__((visibility("default")))
#endif

typedef enum wacse_status {
  WACSE_OK = 0,
  WACSE_ERR_RUNTIME = 1,
  WACSE_ERR_NOT_FOUND = 2,
  WACSE_ERR_CONFIG = 3,
  WACSE_ERR_PARSE = 4,
  WACSE_ERR_ARGUMENT = 5
} wacse_status;

typedef struct wacse_config wacse_config;
typedef struct wacse_corpus wacse_corpus;
typedef struct wacse_model wacse_model;

/* Called after every dev evaluation during training. */
typedef void (*wacse_progress_fn)(int step, double total_loss,
                                  double dev_metric, void* user);

WACSE_API const char* wacse_version(void);
/* Message of the last failed call on this thread; "" if none. */
WACSE_API const char* wacse_last_error(void);

/* ---- run configuration ---- */

WACSE_API wacse_status wacse_config_default(wacse_config** out);
WACSE_API wacse_status wacse_config_load(const char* path, wacse_config** out);
WACSE_API wacse_status wacse_config_parse(const char* json, wacse_config** out);
WACSE_API void wacse_config_free(wacse_config* config);
/* Writes the resolved configuration as JSON. */
WACSE_API wacse_status wacse_config_save(const wacse_config* config,
                                         const char* path);
/* Checks every invariant after overrides. */
WACSE_API wacse_status wacse_config_validate(const wacse_config* config);

WACSE_API wacse_status wacse_config_set_corpus_seed(wacse_config* config,
                                                    uint64_t seed);
WACSE_API wacse_status wacse_config_set_train_seed(wacse_config* config,
                                                   uint64_t seed);
WACSE_API wacse_status wacse_config_set_threshold(wacse_config* config,
                                                  double threshold);
WACSE_API wacse_status wacse_config_set_weights(wacse_config* config,
                                                double alpha, double beta,
                                                double gamma);
/* "A,B,G" */
WACSE_API wacse_status wacse_config_set_weights_text(wacse_config* config,
                                                     const char* text);
WACSE_API wacse_status wacse_config_set_lang_embedding(wacse_config* config,
                                                       int enabled);
/* "gold", "ibm1" or "file" */
WACSE_API wacse_status wacse_config_set_provider(wacse_config* config,
                                                 const char* provider);
WACSE_API wacse_status wacse_config_set_alignments_path(wacse_config* config,
                                                        const char* path);
WACSE_API wacse_status wacse_config_set_steps(wacse_config* config, int steps);
WACSE_API wacse_status wacse_config_set_output_dir(wacse_config* config,
                                                   const char* dir);
/* Empty string when unset. The pointer lives as long as the config. */
WACSE_API const char* wacse_config_output_dir(const wacse_config* config);
WACSE_API double wacse_config_dev_fraction(const wacse_config* config);

/* ---- parallel corpora ---- */

/* Synthetic corpus from the config's corpus section and corpus seed. */
WACSE_API wacse_status wacse_corpus_generate(const wacse_config* config,
                                             wacse_corpus** out);
WACSE_API wacse_status wacse_corpus_load(const char* path, wacse_corpus** out);
WACSE_API wacse_status wacse_corpus_save(const wacse_corpus* corpus,
                                         const char* path);
WACSE_API void wacse_corpus_free(wacse_corpus* corpus);
WACSE_API size_t wacse_corpus_size(const wacse_corpus* corpus);
/* Number of pairs for one language pair. */
WACSE_API size_t wacse_corpus_pair_count(const wacse_corpus* corpus,
                                         int src_lang, int tgt_lang);
/* Splits every language pair by pair-id hash. */
WACSE_API wacse_status wacse_corpus_split(const wacse_corpus* corpus,
                                          double dev_fraction,
                                          wacse_corpus** train,
                                          wacse_corpus** dev);

/* ---- alignment ---- */

/* Aligns every pair with the config's provider, writing raw scored links in
 * the alignment file format. Links below `threshold` are dropped. */
WACSE_API wacse_status wacse_align(const wacse_config* config,
                                   const wacse_corpus* corpus,
                                   double threshold, const char* out_path);

/* ---- training ---- */

/* Trains on `train`, selects the best checkpoint on `dev` and writes
 * model.ckpt and metrics.tsv into out_dir. `model` may be NULL. */
WACSE_API wacse_status wacse_train(const wacse_config* config,
                                   const wacse_corpus* train,
                                   const wacse_corpus* dev,
                                   const char* out_dir,
                                   wacse_progress_fn progress, void* user,
                                   wacse_model** model);

/* ---- models ---- */

WACSE_API wacse_status wacse_model_load(const char* path, wacse_model** out);
WACSE_API wacse_status wacse_model_save(const wacse_model* model,
                                        const char* path);
WACSE_API void wacse_model_free(wacse_model* model);
WACSE_API int wacse_model_dim(const wacse_model* model);
/* Sentence vector of space-separated `words` in language `lang`. `out`
 * holds wacse_model_dim() doubles. */
WACSE_API wacse_status wacse_model_embed(const wacse_model* model, int lang,
                                         const char* words, double* out);

/* ---- evaluation ---- */

/* Retrieval, mining, STS and aligned-word statistics over `corpus`, written
 * as key<TAB>value lines. `config` may be NULL for defaults. */
WACSE_API wacse_status wacse_evaluate(const wacse_model* model,
                                      const wacse_corpus* corpus,
                                      const wacse_config* config,
                                      const char* report_path);

/* 2-D PCA coordinates of embedding-layer word vectors. Words are drawn by
 * frequency from `corpus`, or uniformly from the vocabulary when `corpus`
 * is NULL. */
WACSE_API wacse_status wacse_export_projection(const wacse_model* model,
                                               const wacse_corpus* corpus,
                                               int n_words, uint64_t seed,
                                               const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* WACSE_WACSE_H_ */
