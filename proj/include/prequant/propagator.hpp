#ifndef PREQUANT_PROPAGATOR_HPP
#define PREQUANT_PROPAGATOR_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "prequant/bundle.hpp"
#include "prequant/complex.hpp"
#include "prequant/homology.hpp"

namespace prequant
{

using Amplitude = std::complex<double>;

/// One time step: hop along an edge (either direction) or stay put.
struct StepRule
{
    std::vector<Amplitude> edge_amplitudes; ///< per edge, used in both directions
    std::vector<Amplitude> stay_amplitudes; ///< per vertex
};

inline constexpr double default_hopping = 0.1;

/// Edge amplitude i*lambda, stay amplitude 1 - degree * i*lambda.
StepRule default_step_rule(CWComplex const& c, double lambda = default_hopping);

void validate_rule(CWComplex const& c, StepRule const& rule);

/// T(v', v) = amplitude of one step v -> v'.
Eigen::MatrixXcd transfer_matrix(CWComplex const& c, StepRule const& rule);

/// T^n.
Eigen::MatrixXcd plain_propagator(CWComplex const& c, StepRule const& rule, std::size_t n_steps);

using SectorKey = ExponentVector;

/**
 * Propagator split by the homology class of the closed-up path.
 *
 * sectors[m](x', x) sums the amplitudes of the n-step paths x -> x' whose
 * closure (reference path in, the path, reference path out) has class m.
 * Every stored sector holds at least one path.
 */
struct SectorPropagator
{
    std::map<SectorKey, Eigen::MatrixXcd> sectors;
    std::map<SectorKey, Eigen::MatrixXd> path_counts;
    std::size_t n_steps = 0;
    std::string basepath_convention;

    std::size_t n_vertices() const;
    Eigen::MatrixXcd total() const;
};

enum class SectorEngine
{
    cover_transfer, ///< transfer matrix on the truncated maximal abelian cover
    enumeration     ///< exhaustive walk enumeration
};

struct SectorOptions
{
    SectorEngine engine = SectorEngine::cover_transfer;
    std::size_t basepoint = 0;
    /// Per-vertex path from the vertex to the basepoint; default is the tree geodesic.
    std::optional<std::vector<EdgePath>> reference_paths;
    std::size_t max_paths = 10'000'000;       ///< enumeration guard
    std::size_t max_cover_entries = 50'000'000; ///< sectors * vertices^2 guard
};

SectorPropagator sector_propagators(CWComplex const& c, StepRule const& rule, std::size_t n_steps,
                                    SectorOptions const& options = {});

/// K_chi = sum_m chi(m) K_m.
Eigen::MatrixXcd weighted_propagator(SectorPropagator const& sp, Character const& chi,
                                     FirstHomology const& h);

// ------------------------------------------------------------------------
// Aharonov-Bohm scan
// ------------------------------------------------------------------------

struct ScanRow
{
    double flux = 0.0;
    double intensity = 0.0;
    Amplitude amplitude;
};

/// `count` evenly spaced values from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, std::size_t count);

/// Intensity |K_Phi(detector, source)|^2 for each flux; throws TopologyError unless betti = 1.
std::vector<ScanRow> ab_interference_scan(CWComplex const& annulus, StepRule const& rule,
                                          std::size_t n_steps, std::size_t source,
                                          std::size_t detector, std::vector<double> const& flux_grid,
                                          double hbar = 1.0,
                                          SectorEngine engine = SectorEngine::cover_transfer);

/// Header `flux,intensity,re_amplitude,im_amplitude`, 17 significant digits.
void write_scan_csv(std::ostream& out, std::vector<ScanRow> const& rows);

// ------------------------------------------------------------------------
// Two identical particles
// ------------------------------------------------------------------------

/**
 * Ordered pairs of distinct base vertices, with one particle hopping per
 * step, and its quotient by the exchange (u, v) -> (v, u).
 */
struct TwoParticleSpace
{
    CWComplex ordered;
    std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs;
    std::vector<std::size_t> swap;          ///< ordered index -> index of exchanged pair
    std::vector<std::size_t> base_edge_of;  ///< ordered edge -> base edge moved along
    CWComplex unordered;
    std::vector<std::pair<std::size_t, std::size_t>> unordered_pairs; ///< (min, max)
    std::vector<std::size_t> lift;          ///< unordered index -> ordered (min, max) index
    std::vector<std::size_t> projection;    ///< ordered index -> unordered index
};

TwoParticleSpace two_particle_space(CWComplex const& base);

/// Hop amplitude of the moved particle; stay(u, v) = stay(u) + stay(v) - 1.
StepRule two_particle_rule(TwoParticleSpace const& space, StepRule const& base_rule);

struct ExchangeReport
{
    TwoParticleSpace space;
    FirstHomology exchange_homology;   ///< of <z | z^2>
    Character boson;
    Character fermion;
    SectorPropagator sectors;          ///< over unordered pairs; keys {0} direct, {1} exchange
    Eigen::MatrixXcd direct;           ///< ordered pairs, K(x', x)
    Eigen::MatrixXcd exchange;         ///< ordered pairs, K(swap x', x)
    Eigen::MatrixXcd boson_kernel;     ///< ordered pairs
    Eigen::MatrixXcd fermion_kernel;   ///< ordered pairs
    double boson_symmetry_residual = 0.0;     ///< max |K_b(swap x', x) - K_b(x', x)|
    double fermion_antisymmetry_residual = 0.0; ///< max |K_f(swap x', x) + K_f(x', x)|
    double sum_rule_residual = 0.0;            ///< max |K_b + K_f - 2 K_direct|
};

/// Throws ValidationError if the base graph has fewer than 2 vertices.
ExchangeReport exchange_statistics_demo(CWComplex const& base, std::size_t n_steps,
                                        StepRule const& base_rule);

// ------------------------------------------------------------------------
// Lifts and wave functions
// ------------------------------------------------------------------------

/**
 * exp[(i / hbar) * integral of omega] * Z / Z' along a non-horizontal lift.
 *
 * `fiber_angles[m]` is the fiber angle over vertex m written in the chart of
 * step m (the last step's chart for the final vertex). The factor does not
 * depend on the angles and equals the glued Feynman factor.
 */
Amplitude lifted_path_factor(CWComplex const& c, EdgePath const& path, ChartAtlas const& atlas,
                             double hbar, std::vector<std::size_t> const& schedule,
                             std::vector<double> const& fiber_angles);

struct LiftInvarianceReport
{
    Amplitude reference;          ///< glued Feynman factor
    std::vector<Amplitude> values; ///< one per random lift
    double max_deviation = 0.0;   ///< over all pairs, reference included
};

LiftInvarianceReport lift_invariance_check(CWComplex const& c, EdgePath const& path,
                                           ChartAtlas const& atlas, double hbar,
                                           std::size_t n_random_lifts, std::uint64_t seed = 0);

/// Chart-local representative psi_j of an equivariant wave function.
struct WaveFunction
{
    std::size_t chart = 0;
    std::map<std::size_t, Amplitude> values; ///< vertex -> amplitude
};

/// psi_k(v) = exp(-i phi_jk(v)) psi_j(v). Throws ChartEscapeError outside the overlap.
WaveFunction regauge_wavefunction(WaveFunction const& psi, std::size_t to_chart,
                                  ChartAtlas const& atlas);

} // namespace prequant

#endif
