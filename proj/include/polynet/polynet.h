/* C interface to the polytope-cover network library. All functions return
 * PN_OK or an error code; pn_last_error() holds the message for the calling
 * thread. Handles are opaque and freed with the matching *_free call. */

#ifndef POLYNET_H
#define POLYNET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pn_status {
  PN_OK = 0,
  PN_ERR_INVALID_ARGUMENT = 1,
  PN_ERR_DIMENSION_MISMATCH = 2,
  PN_ERR_UNBOUNDED_POLYTOPE = 3,
  PN_ERR_EMPTY_POLYTOPE = 4,
  PN_ERR_NUMERIC = 5,
  PN_ERR_IO = 6,
  PN_ERR_BUDGET_EXCEEDED = 7,
  PN_ERR_PRECONDITION = 8,
  PN_ERR_UNKNOWN = 99
} pn_status;

typedef struct pn_dataset pn_dataset;
typedef struct pn_network pn_network;
typedef struct pn_cover pn_cover;

/* Message for the most recent failure on this thread. */
const char* pn_last_error(void);

void pn_string_free(char* s);

/* ------------------------------------------------------------------ */
/* datasets                                                            */
/* ------------------------------------------------------------------ */

/* kind: swiss_roll | xor | two_circles | two_moons | two_triangles |
 * hexagon_pentagon */
pn_status pn_dataset_generate(const char* kind, size_t n, double noise,
                              uint64_t seed, pn_dataset** out);
pn_status pn_dataset_load_csv(const char* path, pn_dataset** out);
pn_status pn_dataset_save_csv(const pn_dataset* data, const char* path);

/* IDX image/label pair binarized one-vs-rest (see pn_dataset docs). */
pn_status pn_dataset_load_idx(const char* images_path, const char* labels_path,
                              int cls, int complement, double noise_rate,
                              uint64_t seed, pn_dataset** out);
pn_status pn_dataset_load_cifar(const char* const* paths, size_t num_paths,
                                int cls, int complement, double noise_rate,
                                uint64_t seed, pn_dataset** out);

size_t pn_dataset_size(const pn_dataset* data);
size_t pn_dataset_dim(const pn_dataset* data);
int pn_dataset_label(const pn_dataset* data, size_t i);
pn_status pn_dataset_point(const pn_dataset* data, size_t i, double* out);
double pn_dataset_min_interclass_distance(const pn_dataset* data);
void pn_dataset_free(pn_dataset* data);

/* ------------------------------------------------------------------ */
/* covers                                                              */
/* ------------------------------------------------------------------ */

pn_status pn_cover_load(const char* path, pn_cover** out);
pn_status pn_cover_save(const pn_cover* cover, const char* path);
/* Hand-built cover matching a synthetic kind. */
pn_status pn_cover_reference(const char* kind, pn_cover** out);

pn_status pn_cover_classify(const pn_cover* cover, const double* x, size_t dim,
                            int* label_out);
pn_status pn_cover_vote(const pn_cover* cover, const double* x, size_t dim,
                        int* vote_out);
/* accuracy plus the number of points violating the voting semantics;
 * *first_offender = SIZE_MAX when the cover is valid. */
pn_status pn_cover_validate(const pn_cover* cover, const pn_dataset* data,
                            double* accuracy_out, size_t* num_offenders_out,
                            size_t* first_offender_out);
size_t pn_cover_num_positives(const pn_cover* cover);
size_t pn_cover_num_negatives(const pn_cover* cover);
/* -1 when the entry is functional (face count unknown). positive != 0 picks
 * the positive list. */
long long pn_cover_face_count(const pn_cover* cover, int positive, size_t index);
void pn_cover_free(pn_cover* cover);

/* ------------------------------------------------------------------ */
/* networks                                                            */
/* ------------------------------------------------------------------ */

pn_status pn_network_load(const char* path, pn_network** out);
pn_status pn_network_save(const pn_network* net, const char* path);
pn_status pn_network_forward(const pn_network* net, const double* x, size_t dim,
                             double* out);
/* "2->20->4->1" style summary; plain "d->m->1" for two-layer nets. */
pn_status pn_network_architecture(const pn_network* net, char** out);
pn_status pn_network_sign_accuracy(const pn_network* net, const pn_dataset* data,
                                   double* out);
/* Implicit-bias initialization of a constrained two-layer net. */
pn_status pn_network_init_constrained(size_t width, size_t dim, double scale,
                                      uint64_t seed, int sign, double lambda,
                                      pn_network** out);
/* Sum of `subnets` constrained subnets under one output layer. */
pn_status pn_network_init_three_layer(size_t subnets, size_t width, size_t dim,
                                      double scale, uint64_t seed, double lambda,
                                      pn_network** out);
void pn_network_free(pn_network* net);

/* ------------------------------------------------------------------ */
/* pipeline operations                                                 */
/* ------------------------------------------------------------------ */

/* Three-layer classifier built from per-polytope indicators. data may be
 * NULL; when given, every indicator must be exactly 0/1 on every point. */
pn_status pn_construct_cover_network(const pn_cover* cover, double epsilon,
                                     double safety, int sample_budget,
                                     const pn_dataset* data, pn_network** out);

/* Full-batch gradient descent. loss: mse | bce | wbce. telemetry_csv may be
 * NULL; rows are step,loss,accuracy,active_neurons at the given stride. */
pn_status pn_train(pn_network* net, const pn_dataset* data, const char* loss,
                   double eta, size_t iterations, double lambda0, double lambda1,
                   int threads, const char* telemetry_csv, size_t telemetry_stride);

/* One compression pass on a constrained net. removed_out is set to the
 * removed neuron index or -1. */
pn_status pn_compress(pn_network* net, const pn_dataset* data, double lambda_scale,
                      long long* removed_out, size_t* scaled_out,
                      size_t* width_out, double* accuracy_out);

/* Gradient-descent epochs interleaved with compression passes, then
 * compression to the 0-or-lambda plateau on every subnet. */
pn_status pn_train_with_compression(pn_network* net, const pn_dataset* data,
                                    double eta, size_t epochs,
                                    size_t iters_per_epoch, double lambda_scale,
                                    int threads, size_t* width_out,
                                    size_t* passes_out, double* accuracy_out);

/* Cover extraction; dispatches on the network kind. */
pn_status pn_extract_cover(const pn_network* net, const pn_dataset* data,
                           double tol, pn_cover** out);

/* Sequential polytope search. config_json may be NULL or override any of:
 * lambda_bias, lambda0, lambda1, acc_th, width, max_polytopes, max_width,
 * eta, train_iters, finetune_rounds, finetune_iters, lambda_scale,
 * init_scale, seed, threads. summary_json_out (optional) receives
 * {"polytopes":…,"faces":[…],"accuracy":…,"complete":…}. */
pn_status pn_search_cover(const pn_dataset* data, const char* config_json,
                          pn_cover** cover_out, char** summary_json_out);

/* Width-bound evaluation. profile_json selects the formula:
 *   {"formula":"lower_bound_convex","d":2,"m":6,"widths":[3]}
 *   {"formula":"simplicial_width","d":2,"counts":[0,0,2]}
 *   {"formula":"betti_width","d":2,"m":6,"beta":[1,1,0]}
 *   {"formula":"betti_lower","widths":[4,2],"beta":[1,2,3]}
 *   {"formula":"faces","d":2,"m":4,"widths":[4,1]} */
pn_status pn_bounds_eval(const char* profile_json, char** report_json_out);

/* Decision values on a regular grid over the data bounding box (plus 10%
 * padding), written as x,y,value CSV. */
pn_status pn_network_grid_csv(const pn_network* net, const pn_dataset* data,
                              size_t resolution, const char* path);
pn_status pn_cover_grid_csv(const pn_cover* cover, const pn_dataset* data,
                            size_t resolution, const char* path);

/* Guided-descent demonstration on the built-in fixture. Writes step,loss
 * rows when trace_csv is non-NULL. strictly_decreasing_out reports whether
 * every step decreased the loss (1e-12 slack) until it fell below 1e-10. */
pn_status pn_guided_run(const char* loss, uint64_t seed, size_t max_steps,
                        double target_loss, const char* trace_csv,
                        double* final_loss_out, size_t* steps_out,
                        int* strictly_decreasing_out);

#ifdef __cplusplus
}
#endif

#endif /* POLYNET_H */
