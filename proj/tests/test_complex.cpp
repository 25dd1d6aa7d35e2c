#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "prequant/complex.hpp"
#include "prequant/error.hpp"
#include "support.hpp"

using namespace prequant;
using support::ring;
using support::wedge;

namespace
{

CWComplex disc()
{
    CWComplex c = ring(3);
    c.faces.push_back({{0, 1}, {1, 1}, {2, 1}});
    return c;
}

// Rank over the rationals by Gaussian elimination on small integer matrices.
std::size_t rational_rank(std::vector<std::vector<double>> m)
{
    std::size_t rank = 0;
    std::size_t const rows = m.size();
    std::size_t const cols = rows ? m[0].size() : 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col)
    {
        std::size_t best = rank;
        for (std::size_t r = rank; r < rows; ++r)
            if (std::abs(m[r][col]) > std::abs(m[best][col]))
                best = r;
        if (std::abs(m[best][col]) < 1e-9)
            continue;
        std::swap(m[best], m[rank]);
        for (std::size_t r = 0; r < rows; ++r)
        {
            if (r == rank)
                continue;
            double const f = m[r][col] / m[rank][col];
            for (std::size_t k = col; k < cols; ++k)
                m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

// Edge chains of the faces, built straight from the boundary words.
std::vector<std::vector<double>> face_chains(CWComplex const& c)
{
    std::vector<std::vector<double>> rows(c.faces.size(), std::vector<double>(c.edges.size(), 0.0));
    for (std::size_t f = 0; f < c.faces.size(); ++f)
        for (Step const& s : c.faces[f])
            rows[f][s.edge] += s.direction;
    return rows;
}

// Shortest path u -> v by a breadth-first search written for the tests.
std::vector<Step> bfs_path(CWComplex const& c, std::size_t u, std::size_t v)
{
    auto const inc = support::incident_steps(c);
    std::vector<std::optional<Step>> via(c.n_vertices);
    std::vector<bool> seen(c.n_vertices, false);
    std::deque<std::size_t> q{u};
    seen[u] = true;
    while (!q.empty())
    {
        std::size_t const x = q.front();
        q.pop_front();
        for (Step const& s : inc[x])
        {
            std::size_t const y = c.step_head(s);
            if (!seen[y])
            {
                seen[y] = true;
                via[y] = s;
                q.push_back(y);
            }
        }
    }
    std::vector<Step> steps;
    for (std::size_t x = v; x != u; x = c.step_tail(*via[x]))
        steps.push_back(*via[x]);
    std::reverse(steps.begin(), steps.end());
    return steps;
}

CWComplex random_complex(std::mt19937_64& rng)
{
    std::size_t const n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    CWComplex c;
    c.n_vertices = n;
    for (std::size_t v = 1; v < n; ++v)
    {
        std::size_t const parent = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
        if (rng() % 2)
            c.edges.push_back({parent, v});
        else
            c.edges.push_back({v, parent});
    }
    std::size_t const extra = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::uniform_int_distribution<std::size_t> vert(0, n - 1);
    for (std::size_t k = 0; k < extra; ++k)
        c.edges.push_back({vert(rng), vert(rng)});

    std::size_t const n_faces = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
    for (std::size_t f = 0; f < n_faces; ++f)
    {
        std::size_t const start = vert(rng);
        EdgePath walk = support::random_walk(c, start, 1 + rng() % 5, rng);
        std::vector<Step> back = bfs_path(c, end_vertex(c, walk), start);
        BoundaryWord w = walk.steps;
        w.insert(w.end(), back.begin(), back.end());
        // Sometimes wrap the same boundary twice to create torsion.
        if (rng() % 4 == 0)
        {
            BoundaryWord twice = w;
            twice.insert(twice.end(), w.begin(), w.end());
            w = twice;
        }
        c.faces.push_back(w);
    }
    return c;
}

} // namespace

TEST_CASE("validate_complex diagnostics")
{
    CWComplex point;
    point.n_vertices = 1;
    CHECK_FALSE(validate_complex(point).has_value());

    CWComplex bad;
    bad.n_vertices = 2;
    bad.edges = {{0, 5}};
    REQUIRE(validate_complex(bad).has_value());
    CHECK(validate_complex(bad)->code == "bad endpoint");

    CWComplex open = ring(3);
    open.faces.push_back({{0, 1}, {1, 1}});
    REQUIRE(validate_complex(open).has_value());
    CHECK(validate_complex(open)->code == "open face boundary");

    CWComplex bad_edge = ring(3);
    bad_edge.faces.push_back({{7, 1}});
    CHECK(validate_complex(bad_edge)->code == "bad face edge");

    CWComplex bad_dir = ring(3);
    bad_dir.faces.push_back({{0, 2}});
    CHECK(validate_complex(bad_dir)->code == "bad direction");

    CWComplex split;
    split.n_vertices = 3;
    split.edges = {{0, 1}};
    CHECK(validate_complex(split)->code == "disconnected complex");
    CHECK_THROWS_AS(require_valid(split), ConnectivityError);
    CHECK_THROWS_AS(require_valid(bad), ValidationError);

    CHECK(validate_complex(CWComplex{})->code == "no vertices");
}

TEST_CASE("spanning_tree")
{
    SECTION("triangle has two tree edges")
    {
        SpanningTree const t = spanning_tree(ring(3));
        CHECK(t.tree_edges().size() == 2);
        CHECK(t.generator_edges.size() == 1);
    }
    SECTION("single vertex with a loop edge")
    {
        SpanningTree const t = spanning_tree(wedge(1));
        CHECK(t.tree_edges().empty());
        CHECK(t.generator_edges == std::vector<std::size_t>{0});
    }
    SECTION("path graph keeps every edge")
    {
        CWComplex path;
        path.n_vertices = 4;
        path.edges = {{0, 1}, {2, 1}, {2, 3}};
        CHECK(spanning_tree(path).tree_edges() == std::vector<std::size_t>{0, 1, 2});
    }
    SECTION("breadth first from vertex 0 in edge order")
    {
        // BFS from 0 takes edges 0 (0-1) and 5 (5-0), then 1 and 4, then 2; edge 3 is left over.
        SpanningTree const t = spanning_tree(ring(6));
        CHECK(t.tree_edges() == std::vector<std::size_t>{0, 1, 2, 4, 5});
        CHECK(t.generator_edges == std::vector<std::size_t>{3});
    }
    SECTION("disconnected")
    {
        CWComplex split;
        split.n_vertices = 2;
        CHECK_THROWS_AS(spanning_tree(split), ConnectivityError);
    }
    SECTION("tree paths reach the root")
    {
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 30; ++trial)
        {
            CWComplex const c = random_complex(rng);
            SpanningTree const t = spanning_tree(c);
            CHECK(t.tree_edges().size() == c.n_vertices - 1);
            for (std::size_t v = 0; v < c.n_vertices; ++v)
            {
                EdgePath const p = t.path_to_root(c, v);
                CHECK(p.start == v);
                CHECK(end_vertex(c, p) == 0);
                for (Step const& s : p.steps)
                    CHECK(t.in_tree[s.edge]);
            }
        }
    }
}

TEST_CASE("fundamental_presentation examples")
{
    SECTION("circle")
    {
        FundamentalPresentation const fp = fundamental_presentation(wedge(1));
        CHECK(fp.presentation.n_generators() == 1);
        CHECK(fp.presentation.relators().empty());
        CHECK(first_homology(fp.presentation).betti() == 1);
    }
    SECTION("annulus rings have Betti number E - V + 1")
    {
        for (std::size_t n : {3, 4, 6, 9})
        {
            CWComplex const c = ring(n);
            FundamentalPresentation const fp = fundamental_presentation(c);
            CHECK(fp.presentation.n_generators() == 1);
            CHECK(fp.presentation.relators().empty());
            CHECK(first_homology(fp.presentation).betti() == c.edges.size() - c.n_vertices + 1);
        }
    }
    SECTION("disc")
    {
        FundamentalPresentation const fp = fundamental_presentation(disc());
        CHECK(fp.presentation.n_generators() == 1);
        REQUIRE(fp.presentation.relators().size() == 1);
        CHECK(fp.presentation.relators()[0].letters() == std::vector<Letter>{{0, 1}});
        FirstHomology const h = first_homology(fp.presentation);
        CHECK(h.betti() == 0);
        CHECK(h.torsion().empty());
    }
    SECTION("projective plane model gives Z/2")
    {
        // One vertex, one loop edge, a face wrapping it twice.
        CWComplex rp2 = wedge(1);
        rp2.faces.push_back({{0, 1}, {0, 1}});
        FirstHomology const h = analyze_space(rp2).homology;
        CHECK(h.betti() == 0);
        CHECK(h.torsion() == std::vector<std::int64_t>{2});
    }
    SECTION("torus grid")
    {
        FirstHomology const h = analyze_space(support::torus_grid(3)).homology;
        CHECK(h.betti() == 2);
        CHECK(h.torsion().empty());
    }
}

TEST_CASE("first homology agrees with a rational-rank oracle on random complexes")
{
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 150; ++trial)
    {
        CWComplex const c = random_complex(rng);
        REQUIRE_FALSE(validate_complex(c).has_value());
        SpaceHomology const s = analyze_space(c);

        auto const chains = face_chains(c);
        std::size_t const r2 = rational_rank(chains);
        std::size_t const cycle_rank = c.edges.size() - c.n_vertices + 1;
        INFO("trial " << trial);
        CHECK(s.homology.betti() == cycle_rank - r2);

        auto const basis = two_cycle_basis(c);
        CHECK(basis.size() == c.faces.size() - r2);
        for (ExponentVector const& z : basis)
        {
            // Lies in ker d2 exactly.
            std::vector<std::int64_t> sum(c.edges.size(), 0);
            for (std::size_t f = 0; f < c.faces.size(); ++f)
                for (Step const& st : c.faces[f])
                    sum[st.edge] += z[f] * st.direction;
            for (std::int64_t x : sum)
                CHECK(x == 0);
            auto const first = std::find_if(z.begin(), z.end(), [](std::int64_t x) { return x != 0; });
            REQUIRE(first != z.end());
            CHECK(*first > 0);
        }
        // The basis vectors are independent.
        std::vector<std::vector<double>> rows;
        for (ExponentVector const& z : basis)
            rows.emplace_back(z.begin(), z.end());
        CHECK(rational_rank(rows) == basis.size());
    }
}

TEST_CASE("homology_class examples")
{
    SECTION("tree loops are null")
    {
        CWComplex const c = ring(5);
        SpanningTree const t = spanning_tree(c);
        EdgePath const out_and_back{0, {{0, 1}, {1, 1}, {1, -1}, {0, -1}}};
        CHECK(homology_class(c, t, out_and_back) == ExponentVector{0});
    }
    SECTION("generator once forward")
    {
        CWComplex const w = wedge(2);
        SpanningTree const t = spanning_tree(w);
        CHECK(homology_class(w, t, EdgePath{0, {{0, 1}}}) == ExponentVector{1, 0});
        CHECK(homology_class(w, t, EdgePath{0, {{1, -1}}}) == ExponentVector{0, -1});
    }
    SECTION("commutator in the wedge of two circles")
    {
        // a b a^-1 b^-1: each generator is crossed +1 and -1.
        CWComplex const w = wedge(2);
        SpanningTree const t = spanning_tree(w);
        EdgePath const comm{0, {{0, 1}, {1, 1}, {0, -1}, {1, -1}}};
        CHECK(homology_class(w, t, comm) == ExponentVector{0, 0});
    }
    SECTION("whole ring crosses the generator once")
    {
        CWComplex const c = ring(6);
        SpanningTree const t = spanning_tree(c);
        EdgePath const around{0, {{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}};
        CHECK(homology_class(c, t, around) == ExponentVector{1});
        CHECK(homology_class(c, t, reverse(c, around)) == ExponentVector{-1});
    }
    SECTION("open path")
    {
        CWComplex const c = ring(4);
        CHECK_THROWS_AS(homology_class(c, spanning_tree(c), EdgePath{0, {{0, 1}}}), NotALoopError);
    }
}

TEST_CASE("compose and reverse")
{
    CWComplex const c = ring(4);
    SpanningTree const t = spanning_tree(c);
    EdgePath const p{0, {{0, 1}, {1, 1}}};
    EdgePath const loop = compose(c, p, reverse(c, p));
    CHECK(is_loop(c, loop));
    CHECK(homology_class(c, t, loop) == ExponentVector{0});

    EdgePath const empty_at_2{2, {}};
    CHECK(compose(c, p, empty_at_2) == p);
    CHECK(compose(c, EdgePath{0, {}}, p) == p);
    CHECK(reverse(c, reverse(c, p)) == p);
    CHECK_THROWS_AS(compose(c, p, p), CompositionError);
    CHECK(path_vertices(c, p) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("homology_class is additive and odd on random loops")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial)
    {
        CWComplex const c = random_complex(rng);
        SpanningTree const t = spanning_tree(c);
        for (int k = 0; k < 10; ++k)
        {
            EdgePath const a = support::random_loop(c, t, rng() % 7, rng);
            EdgePath const b = support::random_loop(c, t, rng() % 7, rng);
            ExponentVector const ca = homology_class(c, t, a);
            ExponentVector const cb = homology_class(c, t, b);
            ExponentVector const cab = homology_class(c, t, compose(c, a, b));
            ExponentVector const cr = homology_class(c, t, reverse(c, a));
            for (std::size_t g = 0; g < ca.size(); ++g)
            {
                CHECK(cab[g] == ca[g] + cb[g]);
                CHECK(cr[g] == -ca[g]);
            }
        }
    }
}

TEST_CASE("two_cycle_basis examples")
{
    SECTION("cube surface has one 2-cycle of all ones")
    {
        CWComplex const cube = io::parse_complex(support::load("cube_integral.json").at("complex"));
        std::vector<ExponentVector> const basis = two_cycle_basis(cube);
        REQUIRE(basis.size() == 1);
        CHECK(basis[0] == ExponentVector{1, 1, 1, 1, 1, 1});
        // Oracle: rank of the explicit d2 matrix is 5, so the kernel is one-dimensional.
        CHECK(rational_rank(face_chains(cube)) == 5);
    }
    SECTION("disc has none")
    {
        CHECK(two_cycle_basis(disc()).empty());
    }
    SECTION("two faces on different boundaries")
    {
        CWComplex c = ring(3);
        c.edges.push_back({0, 0});
        c.faces = {{{0, 1}, {1, 1}, {2, 1}}, {{3, 1}}};
        CHECK(two_cycle_basis(c).empty());
    }
    SECTION("face on a tree path backtrack is a 2-cycle by itself")
    {
        CWComplex c = ring(3);
        c.faces = {{{0, 1}, {0, -1}}};
        CHECK(two_cycle_basis(c) == std::vector<ExponentVector>{{1}});
    }
    SECTION("no faces")
    {
        CHECK(two_cycle_basis(ring(4)).empty());
    }
}

TEST_CASE("boundary matrices compose to zero")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial)
    {
        CWComplex const c = random_complex(rng);
        CHECK((boundary_matrix_1(c) * boundary_matrix_2(c)).is_zero());
    }
}
