#ifndef ARITHGRAPH_H
#define ARITHGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AG_OK 0

#define AG_ERR_NULL 1

#define AG_ERR_UTF8 2

// Syntax or axiom violation in a graph, or an unknown vertex.
#define AG_ERR_GRAPH 3

// Hypotheses of the requested result are not met.
#define AG_ERR_PRECONDITION 4

#define AG_ERR_INVALID_ARGUMENT 5

#define AG_ERR_PANIC 6

#define AG_VERDICT_TRIVIAL_IMAGE 0

#define AG_VERDICT_IN_PSI 1

#define AG_VERDICT_NOT_IN_PSI 2

#define AG_VERDICT_CONJECTURAL_NOT_IN_PSI 3

#define AG_VERDICT_UNKNOWN 4

// Opaque handle to a validated graph and its cached analyses.
typedef struct AgGraph AgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; never null.
const char *ag_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void ag_string_free(char *s);

// Parses and validates a graph file's contents.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
int32_t ag_graph_parse(const char *text, struct AgGraph **out);

// Generates a family member, e.g. `family = "cycle"`, `args = "6"`.
// Arguments are separated by whitespace; `seed < 0` means none.
//
// # Safety
// String arguments must be NUL-terminated and `out` valid.
int32_t ag_graph_generate(const char *family, const char *args, int64_t seed, struct AgGraph **out);

// # Safety
// `g` must be null or a handle from this library, not yet freed.
void ag_graph_free(struct AgGraph *g);

// # Safety
// `g` must be a live handle and `out` valid.
int32_t ag_graph_vertex_count(const struct AgGraph *g, size_t *out);

// Index of the vertex called `name`.
//
// # Safety
// `g` must be a live handle, `name` NUL-terminated and `out` valid.
int32_t ag_graph_vertex_index(const struct AgGraph *g, const char *name, size_t *out);

// Serialized graph in the line format.
//
// # Safety
// `g` must be a live handle and `out` valid.
int32_t ag_graph_to_text(const struct AgGraph *g, char **out);

// Group of components as text, e.g. `Z/2 x Z/2`.
//
// # Safety
// `g` must be a live handle and `out` valid.
int32_t ag_phi_describe(const struct AgGraph *g, char **out);

// Nontrivial invariant factors, comma separated (empty for the trivial
// group).
//
// # Safety
// `g` must be a live handle and `out` valid.
int32_t ag_phi_invariant_factors(const struct AgGraph *g, char **out);

// Order of `E(c, c2)`; with `ell > 0`, the order of its `ell`-part.
//
// # Safety
// `g` must be a live handle and `out` valid.
int32_t ag_pair_order(const struct AgGraph *g, size_t c, size_t c2, uint64_t ell, char **out);

// Structural order of the `ell`-part of `E(c, c2)`; fails with
// `AG_ERR_PRECONDITION` outside its hypotheses.
//
// # Safety
// `g` must be a live handle and `out` valid.
int32_t ag_structural_order(const struct AgGraph *g, size_t c, size_t c2, uint64_t ell, char **out);

// `<E(c, c2), E(d, d2)>` in Q/Z as `a/b` (or `0`).
//
// # Safety
// `g` must be a live handle and `out` valid.
int32_t ag_pairing(const struct AgGraph *g, size_t c, size_t c2, size_t d, size_t d2, char **out);

// Membership verdict. `verdict` receives an `AG_VERDICT_*` code,
// `order` (may be null) the order for `AG_VERDICT_IN_PSI` and an empty
// string otherwise, `citation` (may be null) a static tag naming the
// justifying result; do not free it.
//
// # Safety
// `g` must be a live handle and the out-pointers valid or null as noted.
int32_t ag_classify(const struct AgGraph *g,
                    size_t c,
                    size_t c2,
                    uint64_t ell,
                    uint64_t residue_char,
                    int32_t *verdict,
                    char **order,
                    const char **citation);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ARITHGRAPH_H */
