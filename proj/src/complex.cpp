#include "prequant/complex.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "prequant/error.hpp"

namespace prequant
{

namespace
{

std::string str(std::size_t n)
{
    return std::to_string(n);
}

bool reachable_from_zero(CWComplex const& c)
{
    std::vector<std::vector<std::size_t>> adj(c.n_vertices);
    for (Edge const& e : c.edges)
    {
        adj[e.tail].push_back(e.head);
        adj[e.head].push_back(e.tail);
    }
    std::vector<bool> seen(c.n_vertices, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!queue.empty())
    {
        std::size_t const u = queue.front();
        queue.pop_front();
        for (std::size_t w : adj[u])
            if (!seen[w])
            {
                seen[w] = true;
                ++count;
                queue.push_back(w);
            }
    }
    return count == c.n_vertices;
}

} // namespace

std::optional<Diagnostic> validate_complex(CWComplex const& c)
{
    if (c.n_vertices == 0)
        return Diagnostic{"no vertices", "a complex needs at least one vertex"};

    for (std::size_t i = 0; i < c.edges.size(); ++i)
    {
        Edge const& e = c.edges[i];
        if (e.tail >= c.n_vertices || e.head >= c.n_vertices)
            return Diagnostic{"bad endpoint", "edge " + str(i) + " joins " + str(e.tail) + " -> "
                                                  + str(e.head) + " in a complex with "
                                                  + str(c.n_vertices) + " vertices"};
    }

    for (std::size_t f = 0; f < c.faces.size(); ++f)
    {
        BoundaryWord const& w = c.faces[f];
        for (Step const& s : w)
        {
            if (s.edge >= c.edges.size())
                return Diagnostic{"bad face edge",
                                  "face " + str(f) + " references edge " + str(s.edge)};
            if (s.direction != 1 && s.direction != -1)
                return Diagnostic{"bad direction", "face " + str(f) + " uses direction "
                                                       + std::to_string(s.direction)};
        }
        for (std::size_t k = 0; k < w.size(); ++k)
        {
            Step const next = w[(k + 1) % w.size()];
            if (c.step_head(w[k]) != c.step_tail(next))
                return Diagnostic{"open face boundary",
                                  "face " + str(f) + " breaks after step " + str(k) + ": vertex "
                                      + str(c.step_head(w[k])) + " vs "
                                      + str(c.step_tail(next))};
        }
    }

    if (!reachable_from_zero(c))
        return Diagnostic{"disconnected complex", "not every vertex is reachable from vertex 0"};
    return std::nullopt;
}

void require_valid(CWComplex const& c)
{
    if (auto d = validate_complex(c))
    {
        if (d->code == "disconnected complex")
            throw ConnectivityError(d->code + ": " + d->detail);
        throw ValidationError(d->code + ": " + d->detail);
    }
}

// ------------------------------------------------------------------------
// Paths
// ------------------------------------------------------------------------

void validate_path(CWComplex const& c, EdgePath const& p)
{
    if (p.start >= c.n_vertices)
        throw ValidationError("path starts at vertex " + str(p.start) + " outside the complex");
    std::size_t at = p.start;
    for (std::size_t k = 0; k < p.steps.size(); ++k)
    {
        Step const s = p.steps[k];
        if (s.edge >= c.edges.size())
            throw ValidationError("path step " + str(k) + " uses unknown edge " + str(s.edge));
        if (s.direction != 1 && s.direction != -1)
            throw ValidationError("path step " + str(k) + " has direction "
                                  + std::to_string(s.direction));
        if (c.step_tail(s) != at)
            throw ValidationError("path step " + str(k) + " leaves from vertex "
                                  + str(c.step_tail(s)) + " but the path is at " + str(at));
        at = c.step_head(s);
    }
}

std::size_t end_vertex(CWComplex const& c, EdgePath const& p)
{
    validate_path(c, p);
    return p.steps.empty() ? p.start : c.step_head(p.steps.back());
}

std::vector<std::size_t> path_vertices(CWComplex const& c, EdgePath const& p)
{
    validate_path(c, p);
    std::vector<std::size_t> vs{p.start};
    vs.reserve(p.steps.size() + 1);
    for (Step const& s : p.steps)
        vs.push_back(c.step_head(s));
    return vs;
}

bool is_loop(CWComplex const& c, EdgePath const& p)
{
    return end_vertex(c, p) == p.start;
}

EdgePath compose(CWComplex const& c, EdgePath const& p, EdgePath const& q)
{
    std::size_t const mid = end_vertex(c, p);
    validate_path(c, q);
    if (mid != q.start)
        throw CompositionError("cannot compose: first path ends at " + str(mid)
                               + ", second starts at " + str(q.start));
    EdgePath r = p;
    r.steps.insert(r.steps.end(), q.steps.begin(), q.steps.end());
    return r;
}

EdgePath reverse(CWComplex const& c, EdgePath const& p)
{
    EdgePath r{end_vertex(c, p), {}};
    r.steps.reserve(p.steps.size());
    for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it)
        r.steps.push_back({it->edge, -it->direction});
    return r;
}

// ------------------------------------------------------------------------
// Spanning tree and presentation
// ------------------------------------------------------------------------

std::vector<std::size_t> SpanningTree::tree_edges() const
{
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < in_tree.size(); ++e)
        if (in_tree[e])
            out.push_back(e);
    return out;
}

EdgePath SpanningTree::path_to_root(CWComplex const& c, std::size_t v) const
{
    EdgePath p{v, {}};
    while (parent_edge[v])
    {
        std::size_t const e = *parent_edge[v];
        int const dir = c.edges[e].tail == v ? 1 : -1;
        p.steps.push_back({e, dir});
        v = c.step_head({e, dir});
    }
    return p;
}

EdgePath SpanningTree::path_from_root(CWComplex const& c, std::size_t v) const
{
    return reverse(c, path_to_root(c, v));
}

EdgePath SpanningTree::generator_loop(CWComplex const& c, std::size_t generator) const
{
    std::size_t const e = generator_edges.at(generator);
    EdgePath loop = path_from_root(c, c.edges[e].tail);
    loop.steps.push_back({e, 1});
    EdgePath const back = path_to_root(c, c.edges[e].head);
    loop.steps.insert(loop.steps.end(), back.steps.begin(), back.steps.end());
    return loop;
}

SpanningTree spanning_tree(CWComplex const& c, std::size_t root)
{
    if (root >= c.n_vertices)
        throw ValidationError("spanning tree root " + str(root) + " is not a vertex");
    std::vector<std::vector<std::size_t>> incident(c.n_vertices);
    for (std::size_t e = 0; e < c.edges.size(); ++e)
    {
        Edge const& edge = c.edges[e];
        if (edge.tail >= c.n_vertices || edge.head >= c.n_vertices)
            throw ValidationError("edge " + str(e) + " has an endpoint outside the complex");
        incident[edge.tail].push_back(e);
        if (edge.head != edge.tail)
            incident[edge.head].push_back(e);
    }

    SpanningTree t;
    t.root = root;
    t.in_tree.assign(c.edges.size(), false);
    t.parent_edge.assign(c.n_vertices, std::nullopt);
    t.generator_of.assign(c.edges.size(), std::nullopt);

    std::vector<bool> seen(c.n_vertices, false);
    std::deque<std::size_t> queue{root};
    seen[root] = true;
    std::size_t visited = 1;
    while (!queue.empty())
    {
        std::size_t const u = queue.front();
        queue.pop_front();
        for (std::size_t e : incident[u])
        {
            Edge const& edge = c.edges[e];
            std::size_t const w = edge.tail == u ? edge.head : edge.tail;
            if (seen[w])
                continue;
            seen[w] = true;
            ++visited;
            t.in_tree[e] = true;
            t.parent_edge[w] = e;
            queue.push_back(w);
        }
    }
    if (visited != c.n_vertices)
        throw ConnectivityError("complex is disconnected: " + str(visited) + " of "
                                + str(c.n_vertices) + " vertices reachable from " + str(root));

    for (std::size_t e = 0; e < c.edges.size(); ++e)
        if (!t.in_tree[e])
        {
            t.generator_of[e] = t.generator_edges.size();
            t.generator_edges.push_back(e);
        }
    return t;
}

FundamentalPresentation fundamental_presentation(CWComplex const& c, std::size_t basepoint)
{
    require_valid(c);
    SpanningTree tree = spanning_tree(c, basepoint);
    std::vector<GroupWord> relators;
    relators.reserve(c.faces.size());
    for (BoundaryWord const& face : c.faces)
    {
        std::vector<Letter> letters;
        for (Step const& s : face)
            if (auto g = tree.generator_of[s.edge])
                letters.push_back({*g, s.direction});
        relators.emplace_back(std::move(letters));
    }
    FinitePresentation p(tree.n_generators(), std::move(relators));
    return {std::move(p), std::move(tree)};
}

ExponentVector path_class(SpanningTree const& tree, EdgePath const& p)
{
    ExponentVector v(tree.n_generators(), 0);
    for (Step const& s : p.steps)
    {
        if (s.edge >= tree.generator_of.size())
            throw ValidationError("path uses edge " + str(s.edge) + " outside the tree's complex");
        if (auto g = tree.generator_of[s.edge])
            v[*g] += s.direction;
    }
    return v;
}

ExponentVector homology_class(CWComplex const& c, SpanningTree const& tree, EdgePath const& loop)
{
    if (!is_loop(c, loop))
        throw NotALoopError("path from " + str(loop.start) + " ends at " + str(end_vertex(c, loop))
                            + "; homology classes are defined for loops");
    return path_class(tree, loop);
}

SpaceHomology analyze_space(CWComplex const& c, std::size_t basepoint)
{
    FundamentalPresentation fp = fundamental_presentation(c, basepoint);
    FirstHomology h = first_homology(fp.presentation);
    return {std::move(fp), std::move(h)};
}

// ------------------------------------------------------------------------
// Chain complex
// ------------------------------------------------------------------------

IntegerMatrix boundary_matrix_1(CWComplex const& c)
{
    IntegerMatrix b(c.n_vertices, c.edges.size());
    for (std::size_t e = 0; e < c.edges.size(); ++e)
    {
        b(c.edges[e].head, e) += 1;
        b(c.edges[e].tail, e) -= 1;
    }
    return b;
}

IntegerMatrix boundary_matrix_2(CWComplex const& c)
{
    IntegerMatrix b(c.edges.size(), c.faces.size());
    for (std::size_t f = 0; f < c.faces.size(); ++f)
        for (Step const& s : c.faces[f])
            b(s.edge, f) += s.direction;
    return b;
}

std::vector<ExponentVector> two_cycle_basis(CWComplex const& c)
{
    if (c.faces.empty())
        return {};
    SmithDecomposition const s = smith_normal_form(boundary_matrix_2(c));
    std::size_t const rank = s.rank();

    std::vector<ExponentVector> basis;
    for (std::size_t j = rank; j < c.faces.size(); ++j)
    {
        ExponentVector v(c.faces.size());
        int sign = 0;
        for (std::size_t f = 0; f < c.faces.size(); ++f)
        {
            BigInt const& x = s.V(f, j);
            if (sign == 0 && x != 0)
                sign = x > 0 ? 1 : -1;
            if (abs(x) > std::numeric_limits<std::int64_t>::max())
                throw SizeError("2-cycle coefficient exceeds 64-bit range");
            v[f] = x.convert_to<std::int64_t>();
        }
        for (auto& x : v)
            x *= sign;
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace prequant
