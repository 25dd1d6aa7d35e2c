#ifndef PREQUANT_TESTS_SUPPORT_HPP
#define PREQUANT_TESTS_SUPPORT_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "prequant/complex.hpp"
#include "prequant/io.hpp"

namespace support
{

using prequant::CWComplex;
using prequant::EdgePath;
using prequant::Step;

inline std::string fixture(std::string const& name)
{
    return std::string(FIXTURE_DIR) + "/" + name;
}

inline prequant::io::json load(std::string const& name)
{
    return prequant::io::load_file(fixture(name));
}

inline CWComplex ring(std::size_t n)
{
    CWComplex c;
    c.n_vertices = n;
    for (std::size_t v = 0; v < n; ++v)
        c.edges.push_back({v, (v + 1) % n});
    return c;
}

/// One vertex with `n` loop edges.
inline CWComplex wedge(std::size_t n)
{
    CWComplex c;
    c.n_vertices = 1;
    c.edges.assign(n, {0, 0});
    return c;
}

/// n x n square grid on the torus, all plaquettes filled.
/// Edge 2*(i + n*j) runs in x from (i, j), edge 2*(i + n*j) + 1 runs in y.
inline CWComplex torus_grid(std::size_t n)
{
    CWComplex c;
    c.n_vertices = n * n;
    auto vid = [n](std::size_t i, std::size_t j) { return (i % n) + n * (j % n); };
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
        {
            c.edges.push_back({vid(i, j), vid(i + 1, j)});
            c.edges.push_back({vid(i, j), vid(i, j + 1)});
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
        {
            std::size_t const x0 = 2 * vid(i, j);
            std::size_t const y1 = 2 * vid(i + 1, j) + 1;
            std::size_t const x2 = 2 * vid(i, j + 1);
            std::size_t const y0 = 2 * vid(i, j) + 1;
            c.faces.push_back({{x0, 1}, {y1, 1}, {x2, -1}, {y0, -1}});
        }
    return c;
}

inline std::vector<std::vector<Step>> incident_steps(CWComplex const& c)
{
    std::vector<std::vector<Step>> out(c.n_vertices);
    for (std::size_t e = 0; e < c.edges.size(); ++e)
    {
        out[c.edges[e].tail].push_back({e, 1});
        out[c.edges[e].head].push_back({e, -1});
    }
    return out;
}

/// Random walk of `length` steps from `start`. Requires every vertex to have an edge.
inline EdgePath random_walk(CWComplex const& c, std::size_t start, std::size_t length, std::mt19937_64& rng)
{
    auto const inc = incident_steps(c);
    EdgePath p{start, {}};
    std::size_t v = start;
    for (std::size_t k = 0; k < length; ++k)
    {
        auto const& opts = inc[v];
        Step const s = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)];
        p.steps.push_back(s);
        v = c.step_head(s);
    }
    return p;
}

/// Random walk from `start` closed up by the tree paths through `root`.
inline EdgePath random_loop(CWComplex const& c, prequant::SpanningTree const& tree, std::size_t length,
                            std::mt19937_64& rng)
{
    EdgePath walk = random_walk(c, tree.root, length, rng);
    return prequant::compose(c, walk, tree.path_to_root(c, prequant::end_vertex(c, walk)));
}

inline double max_abs(std::vector<std::complex<double>> const& a, std::vector<std::complex<double>> const& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace support

#endif
