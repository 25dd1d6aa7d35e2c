#ifndef PREQUANT_HOMOLOGY_HPP
#define PREQUANT_HOMOLOGY_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace prequant
{

using BigInt = boost::multiprecision::cpp_int;

// ------------------------------------------------------------------------
// Words and presentations
// ------------------------------------------------------------------------

struct Letter
{
    std::size_t generator;
    std::int64_t exponent;

    friend bool operator==(Letter const&, Letter const&) = default;
};

/**
 * Element of a free group, stored freely reduced: no zero exponents and no
 * two adjacent letters on the same generator.
 */
class GroupWord
{
public:
    GroupWord() = default;
    explicit GroupWord(std::vector<Letter> letters);

    std::vector<Letter> const& letters() const { return letters_; }
    bool empty() const { return letters_.empty(); }

    /// Largest generator index + 1, or 0 for the empty word.
    std::size_t generator_bound() const;

    GroupWord inverse() const;

    /// Total exponent of each generator; `n_generators` must exceed every index.
    std::vector<std::int64_t> exponent_sums(std::size_t n_generators) const;

    friend GroupWord operator*(GroupWord const& a, GroupWord const& b);
    friend bool operator==(GroupWord const&, GroupWord const&) = default;

private:
    std::vector<Letter> letters_;
};

class FinitePresentation
{
public:
    /// Throws ValidationError if a relator mentions a generator >= n_generators.
    FinitePresentation(std::size_t n_generators, std::vector<GroupWord> relators);

    std::size_t n_generators() const { return n_generators_; }
    std::vector<GroupWord> const& relators() const { return relators_; }

private:
    std::size_t n_generators_;
    std::vector<GroupWord> relators_;
};

// ------------------------------------------------------------------------
// Exact integer matrices and the Smith normal form
// ------------------------------------------------------------------------

class IntegerMatrix
{
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols);
    IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<BigInt> entries);

    static IntegerMatrix identity(std::size_t n);
    static IntegerMatrix from_rows(std::vector<std::vector<std::int64_t>> const& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    BigInt& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    BigInt const& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    bool is_zero() const;
    IntegerMatrix transpose() const;

    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    /// row[dst] += factor * row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, BigInt const& factor);
    /// col[dst] += factor * col[src]
    void add_col_multiple(std::size_t dst, std::size_t src, BigInt const& factor);
    void negate_row(std::size_t r);

    friend IntegerMatrix operator*(IntegerMatrix const& a, IntegerMatrix const& b);
    friend bool operator==(IntegerMatrix const&, IntegerMatrix const&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> entries_;
};

/// Exact determinant (fraction-free Bareiss elimination). Square matrices only.
BigInt determinant(IntegerMatrix const& m);

/// Inverse of a unimodular matrix; throws ValidationError if |det| != 1.
IntegerMatrix unimodular_inverse(IntegerMatrix const& m);

/// U * A * V = D, with U and V unimodular and D in Smith normal form.
struct SmithDecomposition
{
    IntegerMatrix U;
    IntegerMatrix D;
    IntegerMatrix V;

    /// Diagonal of D, length min(rows, cols).
    std::vector<BigInt> diagonal() const;
    std::size_t rank() const;
};

/**
 * Smith normal form by unimodular row and column operations.
 *
 * Pivots are chosen as the nonzero entry of least absolute value in the
 * remaining block, ties broken by lowest row and then lowest column, so the
 * decomposition of a given matrix is reproducible.
 */
SmithDecomposition smith_normal_form(IntegerMatrix const& a);

/// Relator exponent-sum matrix: row r, column g = total exponent of g in relator r.
IntegerMatrix abelianize(FinitePresentation const& p);

// ------------------------------------------------------------------------
// First homology and characters
// ------------------------------------------------------------------------

/// Coordinates of an element of H1 in the invariant-factor basis.
struct HomologyCoordinates
{
    std::vector<BigInt> free;          ///< one integer per free summand
    std::vector<std::int64_t> torsion; ///< residue t_i in [0, d_i)

    friend bool operator==(HomologyCoordinates const&, HomologyCoordinates const&) = default;
};

/**
 * H1 = Z^betti + Z/d_1 + ... + Z/d_k with d_i | d_{i+1}.
 *
 * A generator exponent vector x (row vector) has invariant-factor
 * coordinates y = x * basis_map; coordinate i is free when the i-th Smith
 * diagonal entry is zero, torsion when it is >= 2, and trivial when it is 1.
 */
class FirstHomology
{
public:
    std::size_t n_generators() const { return basis_map_.rows(); }
    std::size_t betti() const { return free_columns_.size(); }
    std::vector<std::int64_t> const& torsion() const { return torsion_; }

    IntegerMatrix const& basis_map() const { return basis_map_; }
    IntegerMatrix const& basis_inverse() const { return basis_inverse_; }
    std::vector<std::size_t> const& free_columns() const { return free_columns_; }
    std::vector<std::size_t> const& torsion_columns() const { return torsion_columns_; }

    HomologyCoordinates coordinates(std::span<std::int64_t const> exponents) const;
    HomologyCoordinates coordinates(GroupWord const& word) const;

    /// A generator exponent vector representing the given coordinates.
    std::vector<BigInt> representative(HomologyCoordinates const& coords) const;

    friend FirstHomology first_homology(FinitePresentation const& p);

private:
    std::vector<std::int64_t> torsion_;
    IntegerMatrix basis_map_;
    IntegerMatrix basis_inverse_;
    std::vector<std::size_t> free_columns_;
    std::vector<std::size_t> torsion_columns_;
};

/// Throws SizeError if a torsion invariant does not fit in 64 bits.
FirstHomology first_homology(FinitePresentation const& p);

/**
 * A homomorphism H1 -> U(1). Free angles are dimensionless (flux / hbar) and
 * kept normalized to [0, 2pi); torsion labels are exact.
 */
class Character
{
public:
    Character() = default;
    Character(std::vector<double> free_angles, std::vector<std::int64_t> torsion_labels);

    std::vector<double> const& free_angles() const { return free_angles_; }
    std::vector<std::int64_t> const& torsion_labels() const { return torsion_labels_; }

    bool compatible_with(FirstHomology const& h) const;

private:
    std::vector<double> free_angles_;
    std::vector<std::int64_t> torsion_labels_;
};

/// Builds a character after checking shapes and 0 <= k_i < d_i.
Character make_character(FirstHomology const& h,
                         std::vector<double> free_angles,
                         std::vector<std::int64_t> torsion_labels);

Character identity_character(FirstHomology const& h);

/// Maps an angle to [0, 2pi).
double normalize_angle(double angle);

std::complex<double> evaluate_character(Character const& chi, FirstHomology const& h,
                                        HomologyCoordinates const& coords);
std::complex<double> evaluate_character(Character const& chi, FirstHomology const& h,
                                        GroupWord const& g);
std::complex<double> evaluate_character(Character const& chi, FirstHomology const& h,
                                        std::span<std::int64_t const> exponents);

/// Component of the character group: equal outputs iff topologically equivalent bundles.
std::vector<std::int64_t> character_component(Character const& chi);

inline constexpr double default_angle_tolerance = 1e-9;

/// Same component and free angles congruent mod 2pi within `tol`.
bool characters_equivalent(Character const& a, Character const& b,
                           double tol = default_angle_tolerance);

struct CharacterGroupSummary
{
    BigInt n_components;
    std::size_t identity_component_dim = 0;
    /// Zero free angles, one per torsion class, lexicographic label order.
    std::vector<Character> component_representatives;
};

/// Enumeration cap for component representatives.
inline constexpr std::size_t max_enumerated_characters = std::size_t{1} << 20;

CharacterGroupSummary character_group(FirstHomology const& h);

/**
 * Cartesian product of the free-angle grid with every torsion label.
 *
 * `free_angle_grid[j]` lists the angles for free summand j. Torsion labels
 * vary slowest, so characters of one component are contiguous. If betti > 0
 * and the grid is empty the result is empty.
 */
std::vector<Character> enumerate_characters(FirstHomology const& h,
                                            std::vector<std::vector<double>> const& free_angle_grid);

} // namespace prequant

#endif
