#include "prequant/homology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "prequant/error.hpp"

namespace prequant
{

// ------------------------------------------------------------------------
// GroupWord / FinitePresentation
// ------------------------------------------------------------------------

GroupWord::GroupWord(std::vector<Letter> letters)
{
    for (Letter const& l : letters)
    {
        if (l.exponent == 0)
            continue;
        if (!letters_.empty() && letters_.back().generator == l.generator)
        {
            letters_.back().exponent += l.exponent;
            if (letters_.back().exponent == 0)
                letters_.pop_back();
        }
        else
        {
            letters_.push_back(l);
        }
    }
}

std::size_t GroupWord::generator_bound() const
{
    std::size_t bound = 0;
    for (Letter const& l : letters_)
        bound = std::max(bound, l.generator + 1);
    return bound;
}

GroupWord GroupWord::inverse() const
{
    std::vector<Letter> inv;
    inv.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
        inv.push_back({it->generator, -it->exponent});
    return GroupWord(std::move(inv));
}

std::vector<std::int64_t> GroupWord::exponent_sums(std::size_t n_generators) const
{
    if (generator_bound() > n_generators)
        throw DimensionMismatch("word references generator " + std::to_string(generator_bound() - 1)
                                + " but only " + std::to_string(n_generators) + " generators exist");
    std::vector<std::int64_t> sums(n_generators, 0);
    for (Letter const& l : letters_)
        sums[l.generator] += l.exponent;
    return sums;
}

GroupWord operator*(GroupWord const& a, GroupWord const& b)
{
    std::vector<Letter> joined = a.letters_;
    joined.insert(joined.end(), b.letters_.begin(), b.letters_.end());
    return GroupWord(std::move(joined));
}

FinitePresentation::FinitePresentation(std::size_t n_generators, std::vector<GroupWord> relators)
    : n_generators_(n_generators), relators_(std::move(relators))
{
    for (std::size_t r = 0; r < relators_.size(); ++r)
        if (relators_[r].generator_bound() > n_generators_)
            throw ValidationError("relator " + std::to_string(r) + " references generator "
                                  + std::to_string(relators_[r].generator_bound() - 1)
                                  + " outside 0.." + std::to_string(n_generators_));
}

// ------------------------------------------------------------------------
// IntegerMatrix
// ------------------------------------------------------------------------

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols)
{
}

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<BigInt> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries))
{
    if (entries_.size() != rows * cols)
        throw DimensionMismatch("IntegerMatrix: entry count " + std::to_string(entries_.size())
                                + " != " + std::to_string(rows) + "x" + std::to_string(cols));
}

IntegerMatrix IntegerMatrix::identity(std::size_t n)
{
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1;
    return m;
}

IntegerMatrix IntegerMatrix::from_rows(std::vector<std::vector<std::int64_t>> const& rows)
{
    std::size_t const cols = rows.empty() ? 0 : rows.front().size();
    IntegerMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
    {
        if (rows[r].size() != cols)
            throw DimensionMismatch("IntegerMatrix::from_rows: ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = rows[r][c];
    }
    return m;
}

bool IntegerMatrix::is_zero() const
{
    return std::all_of(entries_.begin(), entries_.end(), [](BigInt const& x) { return x == 0; });
}

IntegerMatrix IntegerMatrix::transpose() const
{
    IntegerMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

void IntegerMatrix::swap_rows(std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    for (std::size_t c = 0; c < cols_; ++c)
        std::swap((*this)(a, c), (*this)(b, c));
}

void IntegerMatrix::swap_cols(std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    for (std::size_t r = 0; r < rows_; ++r)
        std::swap((*this)(r, a), (*this)(r, b));
}

void IntegerMatrix::add_row_multiple(std::size_t dst, std::size_t src, BigInt const& factor)
{
    if (factor == 0)
        return;
    for (std::size_t c = 0; c < cols_; ++c)
        (*this)(dst, c) += factor * (*this)(src, c);
}

void IntegerMatrix::add_col_multiple(std::size_t dst, std::size_t src, BigInt const& factor)
{
    if (factor == 0)
        return;
    for (std::size_t r = 0; r < rows_; ++r)
        (*this)(r, dst) += factor * (*this)(r, src);
}

void IntegerMatrix::negate_row(std::size_t r)
{
    for (std::size_t c = 0; c < cols_; ++c)
        (*this)(r, c) = -(*this)(r, c);
}

IntegerMatrix operator*(IntegerMatrix const& a, IntegerMatrix const& b)
{
    if (a.cols_ != b.rows_)
        throw DimensionMismatch("IntegerMatrix product: " + std::to_string(a.rows_) + "x"
                                + std::to_string(a.cols_) + " times " + std::to_string(b.rows_)
                                + "x" + std::to_string(b.cols_));
    IntegerMatrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k)
        {
            BigInt const& aik = a(i, k);
            if (aik == 0)
                continue;
            for (std::size_t j = 0; j < b.cols_; ++j)
                p(i, j) += aik * b(k, j);
        }
    return p;
}

BigInt determinant(IntegerMatrix const& m)
{
    if (m.rows() != m.cols())
        throw DimensionMismatch("determinant of a non-square matrix");
    std::size_t const n = m.rows();
    if (n == 0)
        return 1;
    IntegerMatrix a = m;
    BigInt sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k)
    {
        if (a(k, k) == 0)
        {
            std::size_t swap_with = k + 1;
            while (swap_with < n && a(swap_with, k) == 0)
                ++swap_with;
            if (swap_with == n)
                return 0;
            a.swap_rows(k, swap_with);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

// ------------------------------------------------------------------------
// Smith normal form
// ------------------------------------------------------------------------

std::vector<BigInt> SmithDecomposition::diagonal() const
{
    std::vector<BigInt> diag;
    std::size_t const n = std::min(D.rows(), D.cols());
    diag.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        diag.push_back(D(i, i));
    return diag;
}

std::size_t SmithDecomposition::rank() const
{
    auto const diag = diagonal();
    return static_cast<std::size_t>(
        std::count_if(diag.begin(), diag.end(), [](BigInt const& d) { return d != 0; }));
}

namespace
{

struct Position
{
    std::size_t row;
    std::size_t col;
};

std::optional<Position> smallest_nonzero(IntegerMatrix const& d, std::size_t t)
{
    std::optional<Position> best;
    BigInt best_abs;
    for (std::size_t i = t; i < d.rows(); ++i)
        for (std::size_t j = t; j < d.cols(); ++j)
        {
            if (d(i, j) == 0)
                continue;
            BigInt const a = abs(d(i, j));
            if (!best || a < best_abs)
            {
                best = Position{i, j};
                best_abs = a;
            }
        }
    return best;
}

} // namespace

SmithDecomposition smith_normal_form(IntegerMatrix const& a)
{
    SmithDecomposition s{IntegerMatrix::identity(a.rows()), a, IntegerMatrix::identity(a.cols())};
    IntegerMatrix& D = s.D;
    std::size_t const steps = std::min(a.rows(), a.cols());

    for (std::size_t t = 0; t < steps; ++t)
    {
        if (!smallest_nonzero(D, t))
            break;

        for (;;)
        {
            Position const p = *smallest_nonzero(D, t);
            D.swap_rows(t, p.row);
            s.U.swap_rows(t, p.row);
            D.swap_cols(t, p.col);
            s.V.swap_cols(t, p.col);

            BigInt const pivot = D(t, t);
            bool remainder = false;
            for (std::size_t i = t + 1; i < D.rows(); ++i)
            {
                BigInt const q = D(i, t) / pivot;
                D.add_row_multiple(i, t, -q);
                s.U.add_row_multiple(i, t, -q);
                remainder = remainder || D(i, t) != 0;
            }
            for (std::size_t j = t + 1; j < D.cols(); ++j)
            {
                BigInt const q = D(t, j) / pivot;
                D.add_col_multiple(j, t, -q);
                s.V.add_col_multiple(j, t, -q);
                remainder = remainder || D(t, j) != 0;
            }
            if (remainder)
                continue;

            // Row and column are clear; enforce pivot | every remaining entry.
            std::optional<std::size_t> offending;
            for (std::size_t i = t + 1; i < D.rows() && !offending; ++i)
                for (std::size_t j = t + 1; j < D.cols(); ++j)
                    if (D(i, j) % pivot != 0)
                    {
                        offending = i;
                        break;
                    }
            if (!offending)
                break;
            D.add_row_multiple(t, *offending, 1);
            s.U.add_row_multiple(t, *offending, 1);
        }

        if (D(t, t) < 0)
        {
            D.negate_row(t);
            s.U.negate_row(t);
        }
    }
    return s;
}

IntegerMatrix unimodular_inverse(IntegerMatrix const& m)
{
    if (m.rows() != m.cols())
        throw DimensionMismatch("inverse of a non-square matrix");
    SmithDecomposition const s = smith_normal_form(m);
    // U m V = D = I  =>  m^{-1} = V U
    if (s.D != IntegerMatrix::identity(m.rows()))
        throw ValidationError("matrix is not unimodular");
    return s.V * s.U;
}

IntegerMatrix abelianize(FinitePresentation const& p)
{
    IntegerMatrix m(p.relators().size(), p.n_generators());
    for (std::size_t r = 0; r < p.relators().size(); ++r)
        for (Letter const& l : p.relators()[r].letters())
            m(r, l.generator) += l.exponent;
    return m;
}

// ------------------------------------------------------------------------
// FirstHomology
// ------------------------------------------------------------------------

FirstHomology first_homology(FinitePresentation const& p)
{
    SmithDecomposition const s = smith_normal_form(abelianize(p));
    std::vector<BigInt> const diag = s.diagonal();

    FirstHomology h;
    h.basis_map_ = s.V;
    h.basis_inverse_ = unimodular_inverse(s.V);
    for (std::size_t i = 0; i < p.n_generators(); ++i)
    {
        BigInt const d = i < diag.size() ? diag[i] : BigInt(0);
        if (d == 0)
        {
            h.free_columns_.push_back(i);
        }
        else if (d >= 2)
        {
            if (d > std::numeric_limits<std::int64_t>::max())
                throw SizeError("torsion invariant " + d.str() + " exceeds 64-bit range");
            h.torsion_columns_.push_back(i);
            h.torsion_.push_back(d.convert_to<std::int64_t>());
        }
    }
    return h;
}

HomologyCoordinates FirstHomology::coordinates(std::span<std::int64_t const> exponents) const
{
    if (exponents.size() != n_generators())
        throw DimensionMismatch("exponent vector has length " + std::to_string(exponents.size())
                                + ", homology has " + std::to_string(n_generators())
                                + " generators");
    auto coordinate = [&](std::size_t col) {
        BigInt y = 0;
        for (std::size_t k = 0; k < exponents.size(); ++k)
            if (exponents[k] != 0)
                y += BigInt(exponents[k]) * basis_map_(k, col);
        return y;
    };

    HomologyCoordinates c;
    c.free.reserve(free_columns_.size());
    for (std::size_t col : free_columns_)
        c.free.push_back(coordinate(col));
    c.torsion.reserve(torsion_columns_.size());
    for (std::size_t i = 0; i < torsion_columns_.size(); ++i)
    {
        BigInt r = coordinate(torsion_columns_[i]) % torsion_[i];
        if (r < 0)
            r += torsion_[i];
        c.torsion.push_back(r.convert_to<std::int64_t>());
    }
    return c;
}

HomologyCoordinates FirstHomology::coordinates(GroupWord const& word) const
{
    std::vector<std::int64_t> const x = word.exponent_sums(n_generators());
    return coordinates(x);
}

std::vector<BigInt> FirstHomology::representative(HomologyCoordinates const& coords) const
{
    if (coords.free.size() != free_columns_.size() || coords.torsion.size() != torsion_columns_.size())
        throw DimensionMismatch("coordinate shape does not match homology");
    std::vector<BigInt> y(n_generators(), 0);
    for (std::size_t j = 0; j < free_columns_.size(); ++j)
        y[free_columns_[j]] = coords.free[j];
    for (std::size_t i = 0; i < torsion_columns_.size(); ++i)
        y[torsion_columns_[i]] = coords.torsion[i];

    std::vector<BigInt> x(n_generators(), 0);
    for (std::size_t k = 0; k < n_generators(); ++k)
        for (std::size_t i = 0; i < n_generators(); ++i)
            if (y[i] != 0)
                x[k] += y[i] * basis_inverse_(i, k);
    return x;
}

// ------------------------------------------------------------------------
// Characters
// ------------------------------------------------------------------------

double normalize_angle(double angle)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(angle, two_pi);
    if (r < 0)
        r += two_pi;
    if (r >= two_pi)
        r = 0.0;
    return r;
}

Character::Character(std::vector<double> free_angles, std::vector<std::int64_t> torsion_labels)
    : free_angles_(std::move(free_angles)), torsion_labels_(std::move(torsion_labels))
{
    for (double& a : free_angles_)
    {
        if (!std::isfinite(a))
            throw ValidationError("character free angle is not finite");
        a = normalize_angle(a);
    }
}

bool Character::compatible_with(FirstHomology const& h) const
{
    if (free_angles_.size() != h.betti() || torsion_labels_.size() != h.torsion().size())
        return false;
    for (std::size_t i = 0; i < torsion_labels_.size(); ++i)
        if (torsion_labels_[i] < 0 || torsion_labels_[i] >= h.torsion()[i])
            return false;
    return true;
}

Character make_character(FirstHomology const& h,
                         std::vector<double> free_angles,
                         std::vector<std::int64_t> torsion_labels)
{
    Character chi(std::move(free_angles), std::move(torsion_labels));
    if (chi.free_angles().size() != h.betti() || chi.torsion_labels().size() != h.torsion().size())
        throw DimensionMismatch("character has " + std::to_string(chi.free_angles().size())
                                + " free angles and " + std::to_string(chi.torsion_labels().size())
                                + " torsion labels; homology has betti "
                                + std::to_string(h.betti()) + " and "
                                + std::to_string(h.torsion().size()) + " torsion invariants");
    if (!chi.compatible_with(h))
        throw ValidationError("torsion label out of range");
    return chi;
}

Character identity_character(FirstHomology const& h)
{
    return Character(std::vector<double>(h.betti(), 0.0),
                     std::vector<std::int64_t>(h.torsion().size(), 0));
}

std::complex<double> evaluate_character(Character const& chi, FirstHomology const& h,
                                        HomologyCoordinates const& coords)
{
    if (!chi.compatible_with(h))
        throw DimensionMismatch("character is not compatible with this homology");
    if (coords.free.size() != h.betti() || coords.torsion.size() != h.torsion().size())
        throw DimensionMismatch("coordinates are not compatible with this homology");

    double phase = 0.0;
    for (std::size_t j = 0; j < coords.free.size(); ++j)
        phase += chi.free_angles()[j] * coords.free[j].convert_to<double>();
    for (std::size_t i = 0; i < coords.torsion.size(); ++i)
    {
        std::int64_t const d = h.torsion()[i];
        BigInt const num = (BigInt(chi.torsion_labels()[i]) * coords.torsion[i]) % d;
        phase += 2.0 * std::numbers::pi * num.convert_to<double>() / static_cast<double>(d);
    }
    return std::polar(1.0, phase);
}

std::complex<double> evaluate_character(Character const& chi, FirstHomology const& h,
                                        GroupWord const& g)
{
    return evaluate_character(chi, h, h.coordinates(g));
}

std::complex<double> evaluate_character(Character const& chi, FirstHomology const& h,
                                        std::span<std::int64_t const> exponents)
{
    return evaluate_character(chi, h, h.coordinates(exponents));
}

std::vector<std::int64_t> character_component(Character const& chi)
{
    return chi.torsion_labels();
}

bool characters_equivalent(Character const& a, Character const& b, double tol)
{
    if (a.free_angles().size() != b.free_angles().size()
        || a.torsion_labels().size() != b.torsion_labels().size())
        throw DimensionMismatch("characters belong to different homology groups");
    if (a.torsion_labels() != b.torsion_labels())
        return false;
    for (std::size_t j = 0; j < a.free_angles().size(); ++j)
    {
        double const diff = std::remainder(a.free_angles()[j] - b.free_angles()[j],
                                           2.0 * std::numbers::pi);
        if (std::abs(diff) > tol)
            return false;
    }
    return true;
}

namespace
{

// All torsion label tuples, lexicographic (last index fastest).
std::vector<std::vector<std::int64_t>> torsion_labelings(FirstHomology const& h)
{
    BigInt count = 1;
    for (std::int64_t d : h.torsion())
        count *= d;
    if (count > max_enumerated_characters)
        throw SizeError("character group has " + count.str() + " components; enumeration cap is "
                        + std::to_string(max_enumerated_characters));

    std::vector<std::vector<std::int64_t>> out;
    out.reserve(count.convert_to<std::size_t>());
    std::vector<std::int64_t> labels(h.torsion().size(), 0);
    for (;;)
    {
        out.push_back(labels);
        std::size_t i = labels.size();
        while (i > 0)
        {
            --i;
            if (++labels[i] < h.torsion()[i])
                break;
            labels[i] = 0;
            if (i == 0)
                return out;
        }
        if (labels.empty())
            return out;
    }
}

} // namespace

CharacterGroupSummary character_group(FirstHomology const& h)
{
    CharacterGroupSummary s;
    s.n_components = 1;
    for (std::int64_t d : h.torsion())
        s.n_components *= d;
    s.identity_component_dim = h.betti();
    for (auto& labels : torsion_labelings(h))
        s.component_representatives.emplace_back(std::vector<double>(h.betti(), 0.0),
                                                 std::move(labels));
    return s;
}

std::vector<Character> enumerate_characters(FirstHomology const& h,
                                            std::vector<std::vector<double>> const& free_angle_grid)
{
    if (free_angle_grid.size() != h.betti())
    {
        if (free_angle_grid.empty())
            return {};
        throw DimensionMismatch("free-angle grid has " + std::to_string(free_angle_grid.size())
                                + " axes, homology has betti " + std::to_string(h.betti()));
    }
    for (auto const& axis : free_angle_grid)
    {
        if (axis.empty())
            return {};
        for (double a : axis)
            if (!std::isfinite(a))
                throw ValidationError("free-angle grid value is not finite");
    }

    std::vector<Character> out;
    std::vector<std::size_t> idx(free_angle_grid.size(), 0);
    for (auto const& labels : torsion_labelings(h))
    {
        std::fill(idx.begin(), idx.end(), 0);
        for (;;)
        {
            std::vector<double> angles(idx.size());
            for (std::size_t j = 0; j < idx.size(); ++j)
                angles[j] = free_angle_grid[j][idx[j]];
            out.emplace_back(std::move(angles), labels);

            std::size_t j = idx.size();
            bool wrapped = true;
            while (j > 0)
            {
                --j;
                if (++idx[j] < free_angle_grid[j].size())
                {
                    wrapped = false;
                    break;
                }
                idx[j] = 0;
            }
            if (wrapped)
                break;
        }
        if (out.size() > max_enumerated_characters)
            throw SizeError("character enumeration exceeds cap of "
                            + std::to_string(max_enumerated_characters));
    }
    return out;
}

} // namespace prequant
