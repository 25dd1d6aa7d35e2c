#ifndef PREQUANT_COMPLEX_HPP
#define PREQUANT_COMPLEX_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prequant/homology.hpp"

namespace prequant
{

struct Edge
{
    std::size_t tail;
    std::size_t head;

    friend bool operator==(Edge const&, Edge const&) = default;
};

/// One traversal of an edge; direction +1 runs tail -> head, -1 head -> tail.
struct Step
{
    std::size_t edge;
    int direction;

    friend bool operator==(Step const&, Step const&) = default;
};

using BoundaryWord = std::vector<Step>;

/**
 * A 2-dimensional CW complex: vertices 0..n-1, oriented edges, and faces
 * attached along closed edge paths.
 */
struct CWComplex
{
    std::size_t n_vertices = 0;
    std::vector<Edge> edges;
    std::vector<BoundaryWord> faces;

    std::size_t step_tail(Step s) const { return s.direction > 0 ? edges[s.edge].tail : edges[s.edge].head; }
    std::size_t step_head(Step s) const { return s.direction > 0 ? edges[s.edge].head : edges[s.edge].tail; }
};

struct Diagnostic
{
    std::string code;   ///< e.g. "bad endpoint", "open face boundary"
    std::string detail;
};

/// std::nullopt when every invariant holds, otherwise the first violation.
std::optional<Diagnostic> validate_complex(CWComplex const& c);

/// Throws ConnectivityError for a disconnected complex, ValidationError otherwise.
void require_valid(CWComplex const& c);

struct EdgePath
{
    std::size_t start = 0;
    std::vector<Step> steps;

    friend bool operator==(EdgePath const&, EdgePath const&) = default;
};

/// Throws ValidationError if a step is malformed or does not chain.
void validate_path(CWComplex const& c, EdgePath const& p);
std::size_t end_vertex(CWComplex const& c, EdgePath const& p);
/// Visited vertices, steps.size() + 1 of them.
std::vector<std::size_t> path_vertices(CWComplex const& c, EdgePath const& p);
bool is_loop(CWComplex const& c, EdgePath const& p);

/// Throws CompositionError if p does not end where q starts.
EdgePath compose(CWComplex const& c, EdgePath const& p, EdgePath const& q);
EdgePath reverse(CWComplex const& c, EdgePath const& p);

/**
 * Breadth-first spanning tree. Edges not in the tree are the generators of
 * the edge-path group, numbered in edge-index order.
 */
struct SpanningTree
{
    std::size_t root = 0;
    std::vector<bool> in_tree;                            ///< per edge
    std::vector<std::optional<std::size_t>> parent_edge;  ///< per vertex; empty at root
    std::vector<std::size_t> generator_edges;             ///< non-tree edges
    std::vector<std::optional<std::size_t>> generator_of; ///< per edge

    std::vector<std::size_t> tree_edges() const;
    std::size_t n_generators() const { return generator_edges.size(); }

    /// Unique tree geodesic from v to the root.
    EdgePath path_to_root(CWComplex const& c, std::size_t v) const;
    EdgePath path_from_root(CWComplex const& c, std::size_t v) const;
    /// Root -> tail, the generator edge, head -> root.
    EdgePath generator_loop(CWComplex const& c, std::size_t generator) const;
};

/// Throws ConnectivityError if some vertex is unreachable from `root`.
SpanningTree spanning_tree(CWComplex const& c, std::size_t root = 0);

using ExponentVector = std::vector<std::int64_t>;

struct FundamentalPresentation
{
    FinitePresentation presentation;
    SpanningTree tree;
};

/// One generator per non-tree edge, one relator per face.
FundamentalPresentation fundamental_presentation(CWComplex const& c, std::size_t basepoint = 0);

/// Signed count of non-tree edge traversals; defined for open paths too.
ExponentVector path_class(SpanningTree const& tree, EdgePath const& p);

/// Homology coordinates of a loop (one per generator). Throws NotALoopError.
ExponentVector homology_class(CWComplex const& c, SpanningTree const& tree, EdgePath const& loop);

/// Everything needed to evaluate characters on loops of a complex.
struct SpaceHomology
{
    FundamentalPresentation fundamental;
    FirstHomology homology;
};

SpaceHomology analyze_space(CWComplex const& c, std::size_t basepoint = 0);

/// Vertices x edges incidence matrix: d(edge) = head - tail.
IntegerMatrix boundary_matrix_1(CWComplex const& c);
/// Edges x faces: column f is the signed edge chain of face f's boundary.
IntegerMatrix boundary_matrix_2(CWComplex const& c);

/**
 * Integer basis of ker d2 (the 2-cycles). Each vector has one coefficient
 * per face and its first nonzero coefficient is positive.
 */
std::vector<ExponentVector> two_cycle_basis(CWComplex const& c);

} // namespace prequant

#endif
