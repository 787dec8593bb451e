#ifndef RHGVEC_H
#define RHGVEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define RHGVEC_OK 0

#define RHGVEC_ERR_NULL_POINTER 1

#define RHGVEC_ERR_INVALID_ARGUMENT 2

#define RHGVEC_ERR_DIMENSION_MISMATCH 3

#define RHGVEC_ERR_DEGENERATE 4

#define RHGVEC_ERR_CONVERGENCE 5

#define RHGVEC_ERR_IO 6

#define RHGVEC_ERR_PARSE 7

#define RHGVEC_ERR_BUFFER_TOO_SMALL 8

#define RHGVEC_ERR_PANIC 9

/**
 * Orthogonal map, permutation and loss of one alignment.
 */
typedef struct RhgvecAlignment RhgvecAlignment;

/**
 * An `n × d` embedding matrix with one label per row.
 */
typedef struct RhgvecEmbedding RhgvecEmbedding;

/**
 * A sampled random hyperbolic graph.
 */
typedef struct RhgvecGraph RhgvecGraph;

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *rhgvec_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rhgvec_version(void);

/**
 * Density of the distance between two random points of a disk of radius
 * `radius` with radial parameter `alpha`, evaluated at `x > 0`.
 *
 * # Safety
 * `density` must be a valid pointer to one `double`.
 */
int32_t rhgvec_distance_density(double radius, double alpha, double x, double *density);

/**
 * Samples a random hyperbolic graph with `n` nodes whose expected mean
 * degree is `kbar` and degree exponent is `gamma`.
 *
 * # Safety
 * `graph` must be a valid pointer; on success it receives a handle to be
 * released with `rhgvec_graph_free`.
 */
int32_t rhgvec_graph_generate(uintptr_t n,
                              double kbar,
                              double gamma,
                              uint64_t seed,
                              struct RhgvecGraph **graph);

/**
 * # Safety
 * `graph` must be null or a handle from `rhgvec_graph_generate` not yet freed.
 */
void rhgvec_graph_free(struct RhgvecGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
uintptr_t rhgvec_graph_num_nodes(const struct RhgvecGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle.
 */
uintptr_t rhgvec_graph_num_edges(const struct RhgvecGraph *graph);

/**
 * Disk radius and radial parameter of the graph.
 *
 * # Safety
 * `graph` must be a live handle; `radius` and `alpha` valid pointers.
 */
int32_t rhgvec_graph_disk(const struct RhgvecGraph *graph, double *radius, double *alpha);

/**
 * Writes edges as `2 · num_edges` node ids `(i₀, j₀, i₁, j₁, …)` with
 * `i < j`.
 *
 * # Safety
 * `graph` must be a live handle; `pairs` must hold `len` values.
 */
int32_t rhgvec_graph_edges(const struct RhgvecGraph *graph, uint32_t *pairs, uintptr_t len);

/**
 * `dim`-dimensional spectral embedding of the graph's connection
 * probabilities.
 *
 * # Safety
 * `graph` must be a live handle; `embedding` a valid pointer.
 */
int32_t rhgvec_graph_embed(const struct RhgvecGraph *graph,
                           uintptr_t dim,
                           uint64_t seed,
                           struct RhgvecEmbedding **embedding);

/**
 * Copies a row-major `n × d` matrix; rows are labelled `0 … n−1`.
 *
 * # Safety
 * `data` must point to `n · d` readable values; `embedding` must be valid.
 */
int32_t rhgvec_embedding_from_rows(const double *data,
                                   uintptr_t n,
                                   uintptr_t d,
                                   struct RhgvecEmbedding **embedding);

/**
 * `n × d` matrix of i.i.d. standard normal entries.
 *
 * # Safety
 * `embedding` must be a valid pointer.
 */
int32_t rhgvec_embedding_random(uintptr_t n,
                                uintptr_t d,
                                uint64_t seed,
                                struct RhgvecEmbedding **embedding);

/**
 * Reads the text format `n d` followed by `label v₁ … v_d` rows.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `embedding` a valid pointer.
 */
int32_t rhgvec_embedding_load(const char *path, struct RhgvecEmbedding **embedding);

/**
 * # Safety
 * `embedding` must be a live handle; `path` a NUL-terminated string.
 */
int32_t rhgvec_embedding_save(const struct RhgvecEmbedding *embedding, const char *path);

/**
 * # Safety
 * `embedding` must be a live handle.
 */
uintptr_t rhgvec_embedding_rows(const struct RhgvecEmbedding *embedding);

/**
 * # Safety
 * `embedding` must be a live handle.
 */
uintptr_t rhgvec_embedding_dim(const struct RhgvecEmbedding *embedding);

/**
 * Copies the matrix row-major into `out_values`, which holds `len` values.
 *
 * # Safety
 * `embedding` must be a live handle; `out_values` must hold `len` values.
 */
int32_t rhgvec_embedding_values(const struct RhgvecEmbedding *embedding,
                                double *out_values,
                                uintptr_t len);

/**
 * # Safety
 * `embedding` must be null or a live handle.
 */
void rhgvec_embedding_free(struct RhgvecEmbedding *embedding);

/**
 * Aligns `target` to `reference`: finds an orthogonal map and a row
 * permutation so that `reference · Q ≈ P · target`. Zero for
 * `batch_size` or `epochs` selects the default.
 *
 * # Safety
 * Both embeddings must be live handles; `alignment` a valid pointer.
 */
int32_t rhgvec_align(const struct RhgvecEmbedding *reference,
                     const struct RhgvecEmbedding *target,
                     uintptr_t batch_size,
                     uintptr_t epochs,
                     uint64_t seed,
                     struct RhgvecAlignment **alignment);

/**
 * Final objective value on the normalized inputs.
 *
 * # Safety
 * `alignment` must be a live handle.
 */
double rhgvec_alignment_loss(const struct RhgvecAlignment *alignment);

/**
 * Writes the permutation: entry `i` is the target row matched to
 * reference row `i`.
 *
 * # Safety
 * `alignment` must be a live handle; `perm` must hold `len` values.
 */
int32_t rhgvec_alignment_permutation(const struct RhgvecAlignment *alignment,
                                     uintptr_t *perm,
                                     uintptr_t len);

/**
 * Writes the `d × d` orthogonal map row-major.
 *
 * # Safety
 * `alignment` must be a live handle; `q` must hold `len` values.
 */
int32_t rhgvec_alignment_map(const struct RhgvecAlignment *alignment, double *q, uintptr_t len);

/**
 * Reorders the rows of `target` by the alignment's permutation, taking
 * row labels from `reference`.
 *
 * # Safety
 * All handles must be live; `aligned` a valid pointer.
 */
int32_t rhgvec_alignment_apply(const struct RhgvecAlignment *alignment,
                               const struct RhgvecEmbedding *reference,
                               const struct RhgvecEmbedding *target,
                               struct RhgvecEmbedding **aligned);

/**
 * # Safety
 * `alignment` must be null or a live handle.
 */
void rhgvec_alignment_free(struct RhgvecAlignment *alignment);

#endif  /* RHGVEC_H */
