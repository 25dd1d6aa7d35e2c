#ifndef PREQUANT_BUNDLE_HPP
#define PREQUANT_BUNDLE_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prequant/complex.hpp"
#include "prequant/homology.hpp"

namespace prequant
{

inline constexpr double default_flatness_tolerance = 1e-9;
inline constexpr double default_weil_tolerance = 1e-9;

/// Edge cochain in action units (same units as hbar).
struct DiscreteOneForm
{
    std::vector<double> values;
};

/// Face cochain in action units; any coupling constant is already folded in.
struct DiscreteTwoForm
{
    std::vector<double> values;
};

/// (d beta)(f) = signed sum of beta over the boundary of f.
DiscreteTwoForm exterior_derivative(CWComplex const& c, DiscreteOneForm const& beta);

/// Signed sum of the form along the path.
double line_integral(CWComplex const& c, DiscreteOneForm const& form, EdgePath const& path);

// ------------------------------------------------------------------------
// Weil integrality
// ------------------------------------------------------------------------

struct CycleFlux
{
    ExponentVector cycle;     ///< face coefficients of the basis 2-cycle
    double value = 0.0;       ///< (1 / 2 pi hbar) * integral of sigma over the cycle
    double nearest_integer = 0.0;
    bool integral = false;
};

struct WeilReport
{
    bool accepted = true;
    std::vector<CycleFlux> cycles;
};

/// Accepts iff sigma / (2 pi hbar) has integer periods on every basis 2-cycle.
WeilReport weil_check(CWComplex const& c, DiscreteTwoForm const& sigma, double hbar,
                      double tol = default_weil_tolerance);

// ------------------------------------------------------------------------
// Charts and transition functions
// ------------------------------------------------------------------------

struct Chart
{
    std::vector<std::size_t> vertices;
    /// Local potential on every edge of the induced subcomplex, keyed by edge index.
    std::map<std::size_t, double> potential;
};

/// Transition angle phi_jk(v) for each vertex v of the overlap U_j & U_k.
using TransitionTable = std::map<std::size_t, double>;

/**
 * Local potentials theta_j on charts U_j together with transition angles
 * phi_jk, related on overlaps by theta_j - theta_k = hbar * d phi_jk.
 *
 * Construction checks the structure (valid indices, vertex cover, one
 * potential value per induced edge, connected charts). Numerical
 * compatibility is checked separately by atlas_consistency.
 */
class ChartAtlas
{
public:
    ChartAtlas(CWComplex const& c, std::vector<Chart> charts,
               std::map<std::pair<std::size_t, std::size_t>, TransitionTable> transitions);

    std::size_t size() const { return charts_.size(); }
    Chart const& chart(std::size_t j) const { return charts_.at(j); }
    std::map<std::pair<std::size_t, std::size_t>, TransitionTable> const& transitions() const
    {
        return transitions_;
    }

    bool contains_vertex(std::size_t j, std::size_t v) const;
    bool contains_edge(std::size_t j, std::size_t e) const;
    /// theta_j(e); throws ChartEscapeError if e is not inside chart j.
    double potential(std::size_t j, std::size_t e) const;

    /// phi_jk(v), read from (j,k) or as -phi_kj(v); zero when j == k.
    std::optional<double> transition(std::size_t j, std::size_t k, std::size_t v) const;

    /// Lowest-index chart containing the whole edge, if any.
    std::optional<std::size_t> first_chart_with_edge(std::size_t e) const;
    std::optional<std::size_t> first_chart_with_vertex(std::size_t v) const;

private:
    std::vector<Chart> charts_;
    std::map<std::pair<std::size_t, std::size_t>, TransitionTable> transitions_;
    std::vector<std::vector<bool>> vertex_in_;
    std::vector<std::vector<bool>> edge_in_;
};

/// Build a single-chart atlas from a global one-form.
ChartAtlas single_chart_atlas(CWComplex const& c, DiscreteOneForm const& theta);

struct AtlasViolation
{
    std::string kind; ///< "compatibility", "cocycle" or "missing transition"
    std::vector<std::size_t> charts;
    std::optional<std::size_t> vertex;
    std::optional<std::size_t> edge;
    double residual = 0.0; ///< radians, reduced mod 2 pi
};

/// Empty result means consistent within tol (radians).
std::vector<AtlasViolation> atlas_consistency(CWComplex const& c, ChartAtlas const& atlas,
                                              double hbar, double tol = default_flatness_tolerance);

// ------------------------------------------------------------------------
// Horizontal lift and Feynman factors
// ------------------------------------------------------------------------

struct LiftedPath
{
    EdgePath base;
    std::vector<double> fiber_angles; ///< one per visited vertex
};

/// Parallel transport of the fiber angle: f[m+1] = f[m] - theta_j(step m) / hbar.
LiftedPath horizontal_lift(CWComplex const& c, EdgePath const& path, std::size_t chart,
                           ChartAtlas const& atlas, double hbar, double initial_angle = 0.0);

/// exp[(i / hbar) * integral of theta_j along path]; the path must stay in chart j.
std::complex<double> feynman_factor_chart(CWComplex const& c, EdgePath const& path,
                                          std::size_t chart, ChartAtlas const& atlas, double hbar);

struct GluingOptions
{
    /// Chart per step; defaults to the greedy schedule.
    std::optional<std::vector<std::size_t>> schedule;
    /// Trivialization used at the initial / final vertex; default is the
    /// chart of the first / last step.
    std::optional<std::size_t> start_chart;
    std::optional<std::size_t> end_chart;
    double tol = default_flatness_tolerance;
};

struct GluedFactor
{
    std::complex<double> value;
    std::size_t first_chart = 0;
    std::size_t last_chart = 0;
    std::vector<std::size_t> schedule;
};

/**
 * Stay in the current chart while it contains the next edge, otherwise
 * switch to the lowest-index chart that does. Throws AtlasCoverageError.
 */
std::vector<std::size_t> greedy_schedule(CWComplex const& c, EdgePath const& path,
                                         ChartAtlas const& atlas,
                                         std::optional<std::size_t> start_chart = std::nullopt);

/**
 * Feynman factor of an arbitrary path, lifted chart by chart.
 *
 * Each switch a -> b at vertex v contributes exp(-i phi_ab(v)), including a
 * switch from start_chart into the first step's chart and from the last
 * step's chart into end_chart. The value is independent of the interior
 * schedule, and F_j = C_jk * F_k with C_jk = endpoint_transition_ratio.
 */
GluedFactor feynman_factor_glued(CWComplex const& c, EdgePath const& path, ChartAtlas const& atlas,
                                 double hbar, GluingOptions const& options = {});

/// exp(i (phi_jk(x') - phi_jk(x))) = Z_jk(x') / Z_jk(x).
std::complex<double> endpoint_transition_ratio(ChartAtlas const& atlas, std::size_t j,
                                               std::size_t k, std::size_t x, std::size_t x_end);

// ------------------------------------------------------------------------
// Flat connections and classification
// ------------------------------------------------------------------------

/// exp[(i / hbar) * signed edge sum around the loop]. Throws NotALoopError.
std::complex<double> holonomy(CWComplex const& c, EdgePath const& loop,
                              DiscreteOneForm const& conn, double hbar);

struct Curvature
{
    std::size_t worst_face = 0;
    double worst_value = 0.0; ///< signed face sum in action units
};

/// Largest |face sum|; std::nullopt if the complex has no faces.
std::optional<Curvature> max_curvature(CWComplex const& c, DiscreteOneForm const& conn);

/**
 * Character of a flat connection: free angles from the holonomy on generator
 * loops, torsion label as supplied.
 *
 * With a zero label, evaluate_character on homology_class(loop) reproduces
 * holonomy(loop). Throws CurvatureError if some |face sum| > tol * hbar.
 */
Character classify_connection(CWComplex const& c, SpaceHomology const& space,
                              DiscreteOneForm const& conn, std::vector<std::int64_t> torsion_label,
                              double hbar, double tol = default_flatness_tolerance);
Character classify_connection(CWComplex const& c, DiscreteOneForm const& conn,
                              std::vector<std::int64_t> torsion_label, double hbar,
                              double tol = default_flatness_tolerance);

struct Prequantization
{
    DiscreteOneForm connection;
    Character character;
    double hbar = 1.0;
};

struct PrequantizationComparison
{
    bool same_bundle = false;
    bool same_connection = false;
};

/// Same bundle iff equal torsion labels; same connection iff also congruent free angles.
PrequantizationComparison prequantizations_equivalent(Prequantization const& a,
                                                      Prequantization const& b,
                                                      double tol = default_angle_tolerance);

} // namespace prequant

#endif
