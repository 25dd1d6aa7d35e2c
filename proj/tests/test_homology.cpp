#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "prequant/error.hpp"
#include "prequant/homology.hpp"

using namespace prequant;
using Catch::Approx;

namespace
{

constexpr double pi = std::numbers::pi;

// Independent oracle: invariant factors from determinantal divisors.
// Delta_k = gcd of all k x k minors, d_k = Delta_k / Delta_{k-1}.
std::int64_t minor_det(std::vector<std::vector<std::int64_t>> const& a, std::vector<std::size_t> const& rows,
                       std::vector<std::size_t> const& cols)
{
    if (rows.size() == 1)
        return a[rows[0]][cols[0]];
    std::int64_t det = 0;
    for (std::size_t j = 0; j < cols.size(); ++j)
    {
        std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
        std::vector<std::size_t> sub_cols;
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (k != j)
                sub_cols.push_back(cols[k]);
        std::int64_t const term = a[rows[0]][cols[j]] * minor_det(a, sub_rows, sub_cols);
        det += (j % 2 == 0) ? term : -term;
    }
    return det;
}

void subsets(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out)
{
    if (cur.size() == k)
    {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = from; i < n; ++i)
    {
        cur.push_back(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::int64_t> invariant_factors_oracle(std::vector<std::vector<std::int64_t>> const& a)
{
    std::size_t const m = a.size();
    std::size_t const n = m ? a[0].size() : 0;
    std::vector<std::int64_t> factors;
    std::int64_t prev = 1;
    for (std::size_t k = 1; k <= std::min(m, n); ++k)
    {
        std::vector<std::vector<std::size_t>> rs, cs;
        std::vector<std::size_t> cur;
        subsets(m, k, 0, cur, rs);
        subsets(n, k, 0, cur, cs);
        std::int64_t g = 0;
        for (auto const& r : rs)
            for (auto const& c : cs)
                g = std::gcd(g, minor_det(a, r, c));
        if (g == 0)
            break;
        factors.push_back(g / prev);
        prev = g;
    }
    factors.resize(std::min(m, n), 0);
    return factors;
}

std::vector<std::vector<std::int64_t>> random_matrix(std::size_t rows, std::size_t cols, int lo, int hi,
                                                     std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<std::vector<std::int64_t>> a(rows, std::vector<std::int64_t>(cols));
    for (auto& row : a)
        for (auto& x : row)
            x = d(rng);
    return a;
}

bool is_diagonal(IntegerMatrix const& d)
{
    for (std::size_t r = 0; r < d.rows(); ++r)
        for (std::size_t c = 0; c < d.cols(); ++c)
            if (r != c && d(r, c) != 0)
                return false;
    return true;
}

GroupWord random_word(std::size_t n_generators, std::size_t length, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> gen(0, n_generators - 1);
    std::uniform_int_distribution<int> exp(-3, 3);
    std::vector<Letter> letters;
    for (std::size_t i = 0; i < length; ++i)
    {
        int e = exp(rng);
        letters.push_back({gen(rng), e == 0 ? 1 : e});
    }
    return GroupWord(letters);
}

FinitePresentation cyclic(std::int64_t p)
{
    return FinitePresentation(1, {GroupWord({{0, p}})});
}

} // namespace

TEST_CASE("words are freely reduced on construction")
{
    CHECK(GroupWord({{0, 1}, {0, -1}}).empty());
    CHECK(GroupWord({{0, 2}, {0, 3}}).letters() == std::vector<Letter>{{0, 5}});
    CHECK(GroupWord({{0, 1}, {1, 2}, {1, -2}, {0, 1}}).letters() == std::vector<Letter>{{0, 2}});
    CHECK(GroupWord({{1, 0}, {2, 1}}).letters() == std::vector<Letter>{{2, 1}});

    GroupWord const w({{0, 1}, {1, -2}, {2, 3}});
    CHECK((w * w.inverse()).empty());
    CHECK(w.inverse().inverse() == w);
    CHECK(w.exponent_sums(3) == std::vector<std::int64_t>{1, -2, 3});
}

TEST_CASE("presentations reject unknown generators")
{
    CHECK_THROWS_AS(FinitePresentation(1, {GroupWord({{1, 1}})}), ValidationError);
    CHECK_NOTHROW(FinitePresentation(2, {GroupWord({{1, 1}})}));
}

TEST_CASE("abelianize builds the exponent-sum matrix")
{
    IntegerMatrix const none = abelianize(FinitePresentation(1, {}));
    CHECK(none.rows() == 0);
    CHECK(none.cols() == 1);

    CHECK(abelianize(cyclic(2)) == IntegerMatrix::from_rows({{2}}));

    GroupWord const commutator({{0, 1}, {1, 1}, {0, -1}, {1, -1}});
    CHECK(abelianize(FinitePresentation(2, {commutator})) == IntegerMatrix::from_rows({{0, 0}}));

    GroupWord const mixed({{0, 2}, {1, -1}, {0, 1}, {2, 4}});
    CHECK(abelianize(FinitePresentation(3, {mixed})) == IntegerMatrix::from_rows({{3, -1, 4}}));
}

TEST_CASE("smith normal form of small fixed matrices")
{
    SECTION("diag(2, 3) becomes diag(1, 6)")
    {
        auto const a = IntegerMatrix::from_rows({{2, 0}, {0, 3}});
        SmithDecomposition const s = smith_normal_form(a);
        CHECK(s.D == IntegerMatrix::from_rows({{1, 0}, {0, 6}}));
        CHECK(s.U * a * s.V == s.D);
        CHECK(invariant_factors_oracle({{2, 0}, {0, 3}}) == std::vector<std::int64_t>{1, 6});
    }
    SECTION("zero matrix")
    {
        IntegerMatrix const z(2, 3);
        SmithDecomposition const s = smith_normal_form(z);
        CHECK(s.D.is_zero());
        CHECK(s.U == IntegerMatrix::identity(2));
        CHECK(s.V == IntegerMatrix::identity(3));
        CHECK(s.rank() == 0);
    }
    SECTION("1x1 identity")
    {
        SmithDecomposition const s = smith_normal_form(IntegerMatrix::from_rows({{1}}));
        CHECK(s.D == IntegerMatrix::from_rows({{1}}));
    }
    SECTION("negative entries give nonnegative diagonal")
    {
        auto const a = IntegerMatrix::from_rows({{-4, 6}, {2, -8}});
        SmithDecomposition const s = smith_normal_form(a);
        CHECK(s.U * a * s.V == s.D);
        CHECK(s.diagonal() == std::vector<BigInt>{2, 10});
    }
    SECTION("empty matrix")
    {
        SmithDecomposition const s = smith_normal_form(IntegerMatrix(0, 3));
        CHECK(s.V == IntegerMatrix::identity(3));
        CHECK(s.rank() == 0);
    }
}

TEST_CASE("smith normal form is exact beyond 64 bits")
{
    // Entries near 2^62; intermediate products overflow int64.
    BigInt const big = BigInt(1) << 62;
    IntegerMatrix a(2, 2, {big + 1, big, big, big - 1});
    SmithDecomposition const s = smith_normal_form(a);
    CHECK(s.U * a * s.V == s.D);
    // det = (big+1)(big-1) - big^2 = -1, so the form is diag(1, 1).
    CHECK(s.diagonal() == std::vector<BigInt>{1, 1});
    CHECK(abs(determinant(s.U)) == 1);
    CHECK(abs(determinant(s.V)) == 1);
}

TEST_CASE("smith normal form properties on random matrices")
{
    std::mt19937_64 rng(20261014);
    auto const shapes = std::vector<std::pair<std::size_t, std::size_t>>{{4, 4}, {3, 5}, {5, 3}, {1, 4}, {4, 1}};
    for (auto const [rows, cols] : shapes)
    {
        for (int trial = 0; trial < 60; ++trial)
        {
            auto const raw = random_matrix(rows, cols, -5, 5, rng);
            IntegerMatrix const a = IntegerMatrix::from_rows(raw);
            SmithDecomposition const s = smith_normal_form(a);
            INFO("shape " << rows << "x" << cols << " trial " << trial);

            CHECK(s.U * a * s.V == s.D);
            CHECK(abs(determinant(s.U)) == 1);
            CHECK(abs(determinant(s.V)) == 1);
            CHECK(is_diagonal(s.D));

            auto const diag = s.diagonal();
            for (std::size_t i = 0; i + 1 < diag.size(); ++i)
            {
                CHECK(diag[i] >= 0);
                if (diag[i] == 0)
                    CHECK(diag[i + 1] == 0);
                else
                    CHECK(diag[i + 1] % diag[i] == 0);
            }

            auto const oracle = invariant_factors_oracle(raw);
            std::vector<BigInt> expected(oracle.begin(), oracle.end());
            CHECK(diag == expected);

            // Deterministic for a given input.
            CHECK(smith_normal_form(a).U == s.U);
            CHECK(smith_normal_form(a).V == s.V);
        }
    }
}

TEST_CASE("unimodular inverse")
{
    auto const m = IntegerMatrix::from_rows({{2, 1}, {1, 1}});
    CHECK(unimodular_inverse(m) * m == IntegerMatrix::identity(2));
    CHECK_THROWS_AS(unimodular_inverse(IntegerMatrix::from_rows({{2, 0}, {0, 1}})), ValidationError);
}

TEST_CASE("first homology of small presentations")
{
    SECTION("free cyclic group")
    {
        FirstHomology const h = first_homology(FinitePresentation(1, {}));
        CHECK(h.betti() == 1);
        CHECK(h.torsion().empty());
    }
    SECTION("Z/2")
    {
        FirstHomology const h = first_homology(cyclic(2));
        CHECK(h.betti() == 0);
        CHECK(h.torsion() == std::vector<std::int64_t>{2});
    }
    SECTION("Z/p")
    {
        for (std::int64_t p : {2, 3, 4, 5, 7, 12})
        {
            FirstHomology const h = first_homology(cyclic(p));
            CHECK(h.betti() == 0);
            CHECK(h.torsion() == std::vector<std::int64_t>{p});
        }
    }
    SECTION("Z/1 is trivial")
    {
        FirstHomology const h = first_homology(cyclic(1));
        CHECK(h.betti() == 0);
        CHECK(h.torsion().empty());
    }
    SECTION("torus group")
    {
        GroupWord const commutator({{0, 1}, {1, 1}, {0, -1}, {1, -1}});
        FirstHomology const h = first_homology(FinitePresentation(2, {commutator}));
        CHECK(h.betti() == 2);
        CHECK(h.torsion().empty());
    }
    SECTION("Z/2 + Z/6 + Z from mixed relators")
    {
        // a^2 = 1, b^6 = 1, c free, plus a redundant a^4 b^12.
        FinitePresentation const p(3, {GroupWord({{0, 2}}), GroupWord({{1, 6}}), GroupWord({{0, 4}, {1, 12}})});
        FirstHomology const h = first_homology(p);
        CHECK(h.betti() == 1);
        CHECK(h.torsion() == std::vector<std::int64_t>{2, 6});
    }
    SECTION("Klein bottle group abab^-1 has Z + Z/2")
    {
        FirstHomology const h = first_homology(FinitePresentation(2, {GroupWord({{0, 1}, {1, 1}, {0, 1}, {1, -1}})}));
        CHECK(h.betti() == 1);
        CHECK(h.torsion() == std::vector<std::int64_t>{2});
    }
}

TEST_CASE("homology coordinates round-trip through representatives")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial)
    {
        std::vector<GroupWord> rels;
        for (int r = 0; r < 3; ++r)
            rels.push_back(random_word(4, 5, rng));
        FinitePresentation const p(4, rels);
        FirstHomology const h = first_homology(p);

        // Torsion invariants form a divisibility chain of entries >= 2.
        for (std::size_t i = 0; i < h.torsion().size(); ++i)
        {
            CHECK(h.torsion()[i] >= 2);
            if (i + 1 < h.torsion().size())
                CHECK(h.torsion()[i + 1] % h.torsion()[i] == 0);
        }
        CHECK(h.basis_map() * h.basis_inverse() == IntegerMatrix::identity(4));

        for (int k = 0; k < 10; ++k)
        {
            GroupWord const g = random_word(4, 6, rng);
            HomologyCoordinates const c = h.coordinates(g);
            std::vector<BigInt> const rep = h.representative(c);
            std::vector<std::int64_t> rep64;
            for (BigInt const& x : rep)
                rep64.push_back(static_cast<std::int64_t>(x));
            CHECK(h.coordinates(rep64) == c);
        }
        // Relators are trivial in H1.
        for (GroupWord const& r : rels)
        {
            HomologyCoordinates const c = h.coordinates(r);
            for (BigInt const& x : c.free)
                CHECK(x == 0);
            for (std::int64_t t : c.torsion)
                CHECK(t == 0);
        }
    }
}

TEST_CASE("finite abelianization has zero Betti number")
{
    std::mt19937_64 rng(11);
    int finite_cases = 0;
    for (int trial = 0; trial < 200; ++trial)
    {
        std::size_t const n = 1 + trial % 3;
        std::vector<GroupWord> rels;
        for (std::size_t r = 0; r < n + 1; ++r)
            rels.push_back(random_word(n, 4, rng));
        FinitePresentation const p(n, rels);
        SmithDecomposition const s = smith_normal_form(abelianize(p));
        FirstHomology const h = first_homology(p);
        CHECK(h.betti() == n - s.rank());
        if (s.rank() == n)
        {
            ++finite_cases;
            CHECK(h.betti() == 0);
        }
    }
    CHECK(finite_cases > 20);
}

TEST_CASE("character group summary")
{
    SECTION("Z: one component of dimension one")
    {
        CharacterGroupSummary const g = character_group(first_homology(FinitePresentation(1, {})));
        CHECK(g.n_components == 1);
        CHECK(g.identity_component_dim == 1);
        REQUIRE(g.component_representatives.size() == 1);
        CHECK(g.component_representatives[0].free_angles() == std::vector<double>{0.0});
    }
    SECTION("Z/2: two components of dimension zero")
    {
        CharacterGroupSummary const g = character_group(first_homology(cyclic(2)));
        CHECK(g.n_components == 2);
        CHECK(g.identity_component_dim == 0);
        REQUIRE(g.component_representatives.size() == 2);
        CHECK(g.component_representatives[0].torsion_labels() == std::vector<std::int64_t>{0});
        CHECK(g.component_representatives[1].torsion_labels() == std::vector<std::int64_t>{1});
    }
    SECTION("trivial group")
    {
        CharacterGroupSummary const g = character_group(first_homology(FinitePresentation(0, {})));
        CHECK(g.n_components == 1);
        CHECK(g.identity_component_dim == 0);
        CHECK(g.component_representatives.size() == 1);
    }
    SECTION("Z/2 + Z/6 in lexicographic order")
    {
        FirstHomology const h = first_homology(FinitePresentation(2, {GroupWord({{0, 2}}), GroupWord({{1, 6}})}));
        CharacterGroupSummary const g = character_group(h);
        CHECK(g.n_components == 12);
        REQUIRE(g.component_representatives.size() == 12);
        CHECK(g.component_representatives[0].torsion_labels() == std::vector<std::int64_t>{0, 0});
        CHECK(g.component_representatives[1].torsion_labels() == std::vector<std::int64_t>{0, 1});
        CHECK(g.component_representatives[6].torsion_labels() == std::vector<std::int64_t>{1, 0});
        CHECK(g.component_representatives[11].torsion_labels() == std::vector<std::int64_t>{1, 5});
    }
    SECTION("n_components is the product of torsion invariants")
    {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 30; ++trial)
        {
            FirstHomology const h = first_homology(FinitePresentation(3, {random_word(3, 3, rng), random_word(3, 3, rng),
                                                                          random_word(3, 3, rng)}));
            BigInt product = 1;
            for (std::int64_t d : h.torsion())
                product *= d;
            CharacterGroupSummary const g = character_group(h);
            CHECK(g.n_components == product);
            CHECK(g.identity_component_dim == h.betti());
            for (std::int64_t k : g.component_representatives.at(0).torsion_labels())
                CHECK(k == 0);
        }
    }
}

TEST_CASE("evaluate_character examples")
{
    FirstHomology const z = first_homology(FinitePresentation(1, {}));
    FirstHomology const z2 = first_homology(cyclic(2));

    SECTION("identity character")
    {
        std::mt19937_64 rng(3);
        FirstHomology const h = first_homology(FinitePresentation(2, {GroupWord({{1, 4}})}));
        Character const id = identity_character(h);
        for (int k = 0; k < 20; ++k)
        {
            auto const v = evaluate_character(id, h, random_word(2, 5, rng));
            CHECK(std::abs(v - 1.0) < 1e-15);
        }
    }
    SECTION("winding n on Z gives exp(i n phi)")
    {
        double const phi = 0.7;
        Character const chi = make_character(z, {phi}, {});
        for (int n = -4; n <= 4; ++n)
        {
            auto const v = evaluate_character(chi, z, GroupWord({{0, n}}));
            CHECK(std::abs(v - std::polar(1.0, n * phi)) < 1e-12);
        }
    }
    SECTION("fermion character on the exchange is -1")
    {
        Character const fermion = make_character(z2, {}, {1});
        CHECK(std::abs(evaluate_character(fermion, z2, GroupWord({{0, 1}})) + 1.0) < 1e-15);
        CHECK(std::abs(evaluate_character(fermion, z2, GroupWord({{0, 2}})) - 1.0) < 1e-15);
    }
    SECTION("dimension mismatch")
    {
        CHECK_THROWS_AS(make_character(z, {}, {}), DimensionMismatch);
        CHECK_THROWS_AS(make_character(z2, {}, {2}), ValidationError);
        Character const wrong({0.1, 0.2}, {});
        CHECK_THROWS_AS(evaluate_character(wrong, z, GroupWord({{0, 1}})), DimensionMismatch);
    }
}

TEST_CASE("Z/p characters take every p-th root of unity on the generator")
{
    for (std::int64_t p : {2, 3, 4, 5, 6})
    {
        FirstHomology const h = first_homology(cyclic(p));
        std::vector<Character> const all = enumerate_characters(h, {});
        REQUIRE(all.size() == static_cast<std::size_t>(p));
        std::vector<bool> hit(static_cast<std::size_t>(p), false);
        for (Character const& chi : all)
        {
            auto const v = evaluate_character(chi, h, GroupWord({{0, 1}}));
            double const k = std::arg(v) / (2 * pi) * static_cast<double>(p);
            auto const idx = static_cast<std::int64_t>(std::llround(k));
            CHECK(std::abs(k - static_cast<double>(idx)) < 1e-9);
            hit[static_cast<std::size_t>(((idx % p) + p) % p)] = true;
        }
        for (bool b : hit)
            CHECK(b);
    }
}

TEST_CASE("characters are homomorphisms of modulus one")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    for (int trial = 0; trial < 25; ++trial)
    {
        std::vector<GroupWord> rels{random_word(3, 4, rng), random_word(3, 3, rng)};
        FinitePresentation const p(3, rels);
        FirstHomology const h = first_homology(p);
        std::vector<double> angles;
        for (std::size_t j = 0; j < h.betti(); ++j)
            angles.push_back(angle(rng));
        std::vector<std::int64_t> labels;
        for (std::int64_t d : h.torsion())
            labels.push_back(std::uniform_int_distribution<std::int64_t>(0, d - 1)(rng));
        Character const chi = make_character(h, angles, labels);

        for (GroupWord const& r : rels)
            CHECK(std::abs(evaluate_character(chi, h, r) - 1.0) < 1e-12);

        for (int k = 0; k < 20; ++k)
        {
            GroupWord const g = random_word(3, 6, rng);
            GroupWord const w = random_word(3, 6, rng);
            auto const vg = evaluate_character(chi, h, g);
            auto const vw = evaluate_character(chi, h, w);
            CHECK(std::abs(evaluate_character(chi, h, g * w) - vg * vw) < 1e-12);
            CHECK(std::abs(std::abs(vg) - 1.0) < 1e-12);
            CHECK(std::abs(evaluate_character(chi, h, g.inverse()) - std::conj(vg)) < 1e-12);
        }
    }
}

TEST_CASE("character components")
{
    FirstHomology const z = first_homology(FinitePresentation(1, {}));
    FirstHomology const z2 = first_homology(cyclic(2));
    CHECK(character_component(identity_character(z2)) == std::vector<std::int64_t>{0});
    CHECK(character_component(make_character(z2, {}, {1})) == std::vector<std::int64_t>{1});
    CHECK(character_component(make_character(z, {2.5}, {})).empty());
}

TEST_CASE("character equivalence")
{
    FirstHomology const z = first_homology(FinitePresentation(1, {}));
    FirstHomology const z2 = first_homology(cyclic(2));

    CHECK(characters_equivalent(make_character(z, {0.3}, {}), make_character(z, {0.3 + 2 * pi}, {})));
    CHECK(characters_equivalent(make_character(z, {0.3}, {}), make_character(z, {0.3 - 6 * pi}, {})));
    CHECK_FALSE(characters_equivalent(make_character(z, {0.3}, {}), make_character(z, {0.3 + pi}, {})));
    CHECK_FALSE(characters_equivalent(make_character(z2, {}, {0}), make_character(z2, {}, {1})));
    // Angles just either side of 0 = 2pi.
    CHECK(characters_equivalent(make_character(z, {1e-12}, {}), make_character(z, {-1e-12}, {})));
    CHECK_THROWS_AS(characters_equivalent(make_character(z, {0.3}, {}), make_character(z2, {}, {0})),
                    DimensionMismatch);

    SECTION("equivalence relation on random triples")
    {
        std::mt19937_64 rng(17);
        std::uniform_int_distribution<int> shift(-2, 2);
        std::uniform_int_distribution<int> pick(0, 3);
        std::vector<double> const base{0.0, 0.4, 1e-11, 2 * pi - 1e-11};
        for (int trial = 0; trial < 300; ++trial)
        {
            Character const a = make_character(z, {base[pick(rng)] + 2 * pi * shift(rng)}, {});
            Character const b = make_character(z, {base[pick(rng)] + 2 * pi * shift(rng)}, {});
            Character const c = make_character(z, {base[pick(rng)] + 2 * pi * shift(rng)}, {});
            CHECK(characters_equivalent(a, a));
            CHECK(characters_equivalent(a, b) == characters_equivalent(b, a));
            if (characters_equivalent(a, b) && characters_equivalent(b, c))
                CHECK(characters_equivalent(a, c));
        }
    }
}

TEST_CASE("free angles are normalized to [0, 2pi)")
{
    for (double x : {-7.0, -2 * pi, -1e-300, 0.0, 3.0, 2 * pi, 100.0})
    {
        double const a = normalize_angle(x);
        CHECK(a >= 0.0);
        CHECK(a < 2 * pi);
        CHECK(std::abs(std::polar(1.0, a) - std::polar(1.0, x)) < 1e-12);
    }
}

TEST_CASE("enumerate_characters")
{
    FirstHomology const z = first_homology(FinitePresentation(1, {}));
    FirstHomology const z2 = first_homology(cyclic(2));

    CHECK(enumerate_characters(z2, {}).size() == 2);
    CHECK(enumerate_characters(z, {{0.0, pi}}).size() == 2);
    CHECK(enumerate_characters(z, {}).empty());
    for (std::int64_t p : {3, 4, 5})
        CHECK(enumerate_characters(first_homology(cyclic(p)), {}).size() == static_cast<std::size_t>(p));
    CHECK_THROWS_AS(enumerate_characters(z, {{0.0}, {1.0}}), DimensionMismatch);

    SECTION("torsion labels vary slowest")
    {
        // Z + Z/3
        FirstHomology const h = first_homology(FinitePresentation(2, {GroupWord({{1, 3}})}));
        REQUIRE(h.betti() == 1);
        std::vector<Character> const all = enumerate_characters(h, {{0.0, 1.0}});
        REQUIRE(all.size() == 6);
        for (std::size_t i = 0; i < all.size(); ++i)
        {
            CHECK(all[i].torsion_labels() == std::vector<std::int64_t>{static_cast<std::int64_t>(i / 2)});
            CHECK(all[i].free_angles()[0] == Approx(i % 2 == 0 ? 0.0 : 1.0));
        }
    }
}
