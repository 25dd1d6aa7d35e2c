#include "prequant/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "prequant/error.hpp"

namespace prequant
{

namespace
{

std::string str(std::size_t n)
{
    return std::to_string(n);
}

bool finite(Amplitude a)
{
    return std::isfinite(a.real()) && std::isfinite(a.imag());
}

SectorKey add(SectorKey a, SectorKey const& b, int sign)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += sign * b[i];
    return a;
}

void drop_empty_sectors(SectorPropagator& sp)
{
    for (auto it = sp.path_counts.begin(); it != sp.path_counts.end();)
    {
        if ((it->second.array() == 0.0).all())
        {
            sp.sectors.erase(it->first);
            it = sp.path_counts.erase(it);
        }
        else
        {
            ++it;
        }
    }
}

} // namespace

StepRule default_step_rule(CWComplex const& c, double lambda)
{
    Amplitude const hop{0.0, lambda};
    StepRule rule;
    rule.edge_amplitudes.assign(c.edges.size(), hop);
    std::vector<double> degree(c.n_vertices, 0.0);
    for (Edge const& e : c.edges)
    {
        degree[e.tail] += 1.0;
        degree[e.head] += 1.0;
    }
    rule.stay_amplitudes.reserve(c.n_vertices);
    for (double d : degree)
        rule.stay_amplitudes.push_back(1.0 - d * hop);
    return rule;
}

void validate_rule(CWComplex const& c, StepRule const& rule)
{
    if (rule.edge_amplitudes.size() != c.edges.size())
        throw DimensionMismatch("step rule has " + str(rule.edge_amplitudes.size())
                                + " edge amplitudes for " + str(c.edges.size()) + " edges");
    if (rule.stay_amplitudes.size() != c.n_vertices)
        throw DimensionMismatch("step rule has " + str(rule.stay_amplitudes.size())
                                + " stay amplitudes for " + str(c.n_vertices) + " vertices");
    if (!std::all_of(rule.edge_amplitudes.begin(), rule.edge_amplitudes.end(), finite)
        || !std::all_of(rule.stay_amplitudes.begin(), rule.stay_amplitudes.end(), finite))
        throw ValidationError("step rule amplitudes must be finite");
}

Eigen::MatrixXcd transfer_matrix(CWComplex const& c, StepRule const& rule)
{
    validate_rule(c, rule);
    auto const n = static_cast<Eigen::Index>(c.n_vertices);
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t v = 0; v < c.n_vertices; ++v)
        t(v, v) += rule.stay_amplitudes[v];
    for (std::size_t e = 0; e < c.edges.size(); ++e)
    {
        t(c.edges[e].head, c.edges[e].tail) += rule.edge_amplitudes[e];
        t(c.edges[e].tail, c.edges[e].head) += rule.edge_amplitudes[e];
    }
    return t;
}

Eigen::MatrixXcd plain_propagator(CWComplex const& c, StepRule const& rule, std::size_t n_steps)
{
    Eigen::MatrixXcd const t = transfer_matrix(c, rule);
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(t.rows(), t.cols());
    for (std::size_t s = 0; s < n_steps; ++s)
        k = t * k;
    return k;
}

std::size_t SectorPropagator::n_vertices() const
{
    return sectors.empty() ? 0 : static_cast<std::size_t>(sectors.begin()->second.rows());
}

Eigen::MatrixXcd SectorPropagator::total() const
{
    auto const n = static_cast<Eigen::Index>(n_vertices());
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (auto const& [key, k] : sectors)
        sum += k;
    return sum;
}

// ------------------------------------------------------------------------
// Sector engines
// ------------------------------------------------------------------------

namespace
{

struct ReferenceFrame
{
    SpanningTree tree;
    std::vector<EdgePath> to_base; ///< per vertex
    std::vector<SectorKey> offset; ///< class of each reference path
    bool default_paths = true;
};

ReferenceFrame reference_frame(CWComplex const& c, SectorOptions const& options)
{
    ReferenceFrame f{spanning_tree(c, options.basepoint), {}, {}, true};
    if (options.reference_paths)
    {
        auto const& refs = *options.reference_paths;
        if (refs.size() != c.n_vertices)
            throw DimensionMismatch("need one reference path per vertex, got " + str(refs.size()));
        for (std::size_t v = 0; v < c.n_vertices; ++v)
        {
            if (refs[v].start != v || end_vertex(c, refs[v]) != options.basepoint)
                throw ValidationError("reference path " + str(v) + " must run from vertex " + str(v)
                                      + " to the basepoint " + str(options.basepoint));
        }
        f.to_base = refs;
        f.default_paths = false;
    }
    else
    {
        for (std::size_t v = 0; v < c.n_vertices; ++v)
            f.to_base.push_back(f.tree.path_to_root(c, v));
    }
    for (EdgePath const& p : f.to_base)
        f.offset.push_back(path_class(f.tree, p));
    return f;
}

std::string convention(ReferenceFrame const& f, std::size_t basepoint)
{
    return (f.default_paths ? "spanning-tree geodesics to basepoint " : "user reference paths to basepoint ")
           + str(basepoint);
}

double total_walks(CWComplex const& c, std::size_t n_steps)
{
    // Move counts: one stay plus one per incidence of each edge.
    auto const n = static_cast<Eigen::Index>(c.n_vertices);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (Edge const& e : c.edges)
    {
        m(e.head, e.tail) += 1.0;
        m(e.tail, e.head) += 1.0;
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t s = 0; s < n_steps; ++s)
        k = m * k;
    return k.sum();
}

SectorPropagator enumerate_sectors(CWComplex const& c, StepRule const& rule, std::size_t n_steps,
                                   SectorOptions const& options)
{
    double const walks = total_walks(c, n_steps);
    if (walks > static_cast<double>(options.max_paths))
        throw SizeError("exhaustive enumeration would visit " + std::to_string(walks)
                        + " paths; cap is " + str(options.max_paths));

    ReferenceFrame const frame = reference_frame(c, options);
    auto const n = static_cast<Eigen::Index>(c.n_vertices);
    SectorPropagator sp;
    sp.n_steps = n_steps;
    sp.basepath_convention = convention(frame, options.basepoint);

    std::vector<std::vector<Step>> moves(c.n_vertices);
    for (std::size_t e = 0; e < c.edges.size(); ++e)
    {
        moves[c.edges[e].tail].push_back({e, 1});
        moves[c.edges[e].head].push_back({e, -1});
    }

    // Neumaier-compensated sums: sectors can collect ~10^5 partly cancelling terms per entry.
    std::map<SectorKey, Eigen::MatrixXcd> carry;
    auto accumulate = [](double& sum, double& lost, double x) {
        double const t = sum + x;
        lost += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    };

    EdgePath walk;
    std::function<void(std::size_t, std::size_t, Amplitude)> extend;
    extend = [&](std::size_t at, std::size_t remaining, Amplitude amp) {
        if (remaining == 0)
        {
            // Close the walk into a loop at the basepoint and classify it.
            EdgePath loop = reverse(c, frame.to_base[walk.start]);
            loop = compose(c, loop, walk);
            loop = compose(c, loop, frame.to_base[at]);
            SectorKey const key = homology_class(c, frame.tree, loop);
            auto [it, fresh] = sp.sectors.try_emplace(key, Eigen::MatrixXcd::Zero(n, n));
            auto [ct, fresh_count] = sp.path_counts.try_emplace(key, Eigen::MatrixXd::Zero(n, n));
            auto [lt, fresh_carry] = carry.try_emplace(key, Eigen::MatrixXcd::Zero(n, n));
            Amplitude& sum = it->second(at, walk.start);
            Amplitude& lost = lt->second(at, walk.start);
            double re = sum.real(), im = sum.imag(), lost_re = lost.real(), lost_im = lost.imag();
            accumulate(re, lost_re, amp.real());
            accumulate(im, lost_im, amp.imag());
            sum = {re, im};
            lost = {lost_re, lost_im};
            ct->second(at, walk.start) += 1.0;
            return;
        }
        extend(at, remaining - 1, amp * rule.stay_amplitudes[at]);
        for (Step const& s : moves[at])
        {
            walk.steps.push_back(s);
            extend(c.step_head(s), remaining - 1, amp * rule.edge_amplitudes[s.edge]);
            walk.steps.pop_back();
        }
    };

    for (std::size_t x = 0; x < c.n_vertices; ++x)
    {
        walk = EdgePath{x, {}};
        extend(x, n_steps, Amplitude{1.0, 0.0});
    }
    for (auto& [key, m] : sp.sectors)
        m += carry.at(key);
    return sp;
}

SectorPropagator cover_transfer_sectors(CWComplex const& c, StepRule const& rule,
                                        std::size_t n_steps, SectorOptions const& options)
{
    ReferenceFrame const frame = reference_frame(c, options);
    std::size_t const g = frame.tree.n_generators();
    auto const n = static_cast<Eigen::Index>(c.n_vertices);

    std::map<SectorKey, Eigen::MatrixXcd> amp{{SectorKey(g, 0), Eigen::MatrixXcd::Identity(n, n)}};
    std::map<SectorKey, Eigen::MatrixXd> cnt{{SectorKey(g, 0), Eigen::MatrixXd::Identity(n, n)}};

    Eigen::VectorXcd stay(n);
    for (Eigen::Index v = 0; v < n; ++v)
        stay(v) = rule.stay_amplitudes[v];

    for (std::size_t step = 0; step < n_steps; ++step)
    {
        std::map<SectorKey, Eigen::MatrixXcd> next_amp;
        std::map<SectorKey, Eigen::MatrixXd> next_cnt;
        auto slot = [&](SectorKey const& key) -> std::pair<Eigen::MatrixXcd&, Eigen::MatrixXd&> {
            auto a = next_amp.try_emplace(key, Eigen::MatrixXcd::Zero(n, n)).first;
            auto k = next_cnt.try_emplace(key, Eigen::MatrixXd::Zero(n, n)).first;
            return {a->second, k->second};
        };

        for (auto const& [key, a] : amp)
        {
            Eigen::MatrixXd const& k = cnt.at(key);
            {
                auto [na, nk] = slot(key);
                na += stay.asDiagonal() * a;
                nk += k;
            }
            for (std::size_t e = 0; e < c.edges.size(); ++e)
            {
                auto const t = static_cast<Eigen::Index>(c.edges[e].tail);
                auto const h = static_cast<Eigen::Index>(c.edges[e].head);
                Amplitude const w = rule.edge_amplitudes[e];
                auto const gen = frame.tree.generator_of[e];
                for (int dir : {1, -1})
                {
                    Eigen::Index const from = dir > 0 ? t : h;
                    Eigen::Index const to = dir > 0 ? h : t;
                    if ((k.row(from).array() == 0.0).all())
                        continue;
                    SectorKey shifted = key;
                    if (gen)
                        shifted[*gen] += dir;
                    auto [na, nk] = slot(shifted);
                    na.row(to) += w * a.row(from);
                    nk.row(to) += k.row(from);
                }
            }
        }
        amp = std::move(next_amp);
        cnt = std::move(next_cnt);
        if (amp.size() * static_cast<std::size_t>(n * n) > options.max_cover_entries)
            throw SizeError("cover evolution holds " + str(amp.size()) + " sectors of "
                            + str(static_cast<std::size_t>(n)) + " vertices; guard is "
                            + str(options.max_cover_entries) + " entries");
    }

    SectorPropagator sp;
    sp.n_steps = n_steps;
    sp.basepath_convention = convention(frame, options.basepoint);
    if (frame.default_paths)
    {
        sp.sectors = std::move(amp);
        sp.path_counts = std::move(cnt);
    }
    else
    {
        // Closure class = offset(x') + walk class - offset(x).
        for (auto const& [key, a] : amp)
        {
            Eigen::MatrixXd const& k = cnt.at(key);
            for (Eigen::Index x = 0; x < n; ++x)
                for (Eigen::Index y = 0; y < n; ++y)
                {
                    if (k(y, x) == 0.0)
                        continue;
                    SectorKey const shifted = add(add(key, frame.offset[y], 1), frame.offset[x], -1);
                    auto ai = sp.sectors.try_emplace(shifted, Eigen::MatrixXcd::Zero(n, n)).first;
                    auto ki = sp.path_counts.try_emplace(shifted, Eigen::MatrixXd::Zero(n, n)).first;
                    ai->second(y, x) += a(y, x);
                    ki->second(y, x) += k(y, x);
                }
        }
    }
    drop_empty_sectors(sp);
    return sp;
}

} // namespace

SectorPropagator sector_propagators(CWComplex const& c, StepRule const& rule, std::size_t n_steps,
                                    SectorOptions const& options)
{
    require_valid(c);
    validate_rule(c, rule);
    if (options.engine == SectorEngine::enumeration)
        return enumerate_sectors(c, rule, n_steps, options);
    return cover_transfer_sectors(c, rule, n_steps, options);
}

Eigen::MatrixXcd weighted_propagator(SectorPropagator const& sp, Character const& chi,
                                     FirstHomology const& h)
{
    auto const n = static_cast<Eigen::Index>(sp.n_vertices());
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
    for (auto const& [key, km] : sp.sectors)
    {
        if (key.size() != h.n_generators())
            throw DimensionMismatch("sector key has " + str(key.size())
                                    + " coordinates, homology has " + str(h.n_generators())
                                    + " generators");
        k += evaluate_character(chi, h, key) * km;
    }
    return k;
}

// ------------------------------------------------------------------------
// Aharonov-Bohm scan
// ------------------------------------------------------------------------

std::vector<double> linear_grid(double start, double stop, std::size_t count)
{
    std::vector<double> grid;
    grid.reserve(count);
    if (count == 1)
        grid.push_back(start);
    for (std::size_t i = 0; count > 1 && i < count; ++i)
        grid.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
    return grid;
}

std::vector<ScanRow> ab_interference_scan(CWComplex const& annulus, StepRule const& rule,
                                          std::size_t n_steps, std::size_t source,
                                          std::size_t detector, std::vector<double> const& flux_grid,
                                          double hbar, SectorEngine engine)
{
    if (!(hbar > 0.0))
        throw ValidationError("hbar must be positive");
    SpaceHomology const space = analyze_space(annulus);
    if (space.homology.betti() != 1)
        throw TopologyError("interference scan needs first Betti number 1, got "
                            + str(space.homology.betti()));
    if (source >= annulus.n_vertices || detector >= annulus.n_vertices)
        throw ValidationError("source or detector is not a vertex");

    SectorOptions options;
    options.engine = engine;
    SectorPropagator const sp = sector_propagators(annulus, rule, n_steps, options);

    std::vector<ScanRow> rows;
    rows.reserve(flux_grid.size());
    for (double flux : flux_grid)
    {
        Character const chi = make_character(space.homology, {flux / hbar},
                                             std::vector<std::int64_t>(space.homology.torsion().size(), 0));
        Amplitude amp{0.0, 0.0};
        for (auto const& [key, k] : sp.sectors)
            amp += evaluate_character(chi, space.homology, key)
                   * k(static_cast<Eigen::Index>(detector), static_cast<Eigen::Index>(source));
        rows.push_back({flux, std::norm(amp), amp});
    }
    return rows;
}

void write_scan_csv(std::ostream& out, std::vector<ScanRow> const& rows)
{
    out << "flux,intensity,re_amplitude,im_amplitude\n";
    char buf[128];
    for (ScanRow const& r : rows)
    {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.flux, r.intensity,
                      r.amplitude.real(), r.amplitude.imag());
        out << buf;
    }
}

// ------------------------------------------------------------------------
// Two identical particles
// ------------------------------------------------------------------------

TwoParticleSpace two_particle_space(CWComplex const& base)
{
    if (base.n_vertices < 2)
        throw ValidationError("two-particle space needs a base graph with at least 2 vertices");
    for (Edge const& e : base.edges)
        if (e.tail >= base.n_vertices || e.head >= base.n_vertices)
            throw ValidationError("base graph edge has an endpoint outside the graph");

    std::size_t const n = base.n_vertices;
    TwoParticleSpace s;
    std::vector<std::vector<std::size_t>> ordered_index(n, std::vector<std::size_t>(n, 0));
    std::vector<std::vector<std::size_t>> unordered_index(n, std::vector<std::size_t>(n, 0));
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
        {
            if (u == v)
                continue;
            ordered_index[u][v] = s.ordered_pairs.size();
            s.ordered_pairs.emplace_back(u, v);
            if (u < v)
            {
                unordered_index[u][v] = unordered_index[v][u] = s.unordered_pairs.size();
                s.unordered_pairs.emplace_back(u, v);
            }
        }

    s.ordered.n_vertices = s.ordered_pairs.size();
    s.unordered.n_vertices = s.unordered_pairs.size();
    for (auto const& [u, v] : s.ordered_pairs)
    {
        s.swap.push_back(ordered_index[v][u]);
        s.projection.push_back(unordered_index[u][v]);
    }
    for (auto const& [u, v] : s.unordered_pairs)
        s.lift.push_back(ordered_index[u][v]);

    // Particle 1 moves for pairs in order, then particle 2; collisions excluded.
    for (std::size_t p = 0; p < s.ordered_pairs.size(); ++p)
    {
        auto const [u, v] = s.ordered_pairs[p];
        for (std::size_t e = 0; e < base.edges.size(); ++e)
        {
            Edge const& be = base.edges[e];
            if (be.tail == be.head)
                continue;
            if (be.tail == u && be.head != v)
            {
                s.ordered.edges.push_back({p, ordered_index[be.head][v]});
                s.base_edge_of.push_back(e);
            }
            if (be.tail == v && be.head != u)
            {
                s.ordered.edges.push_back({p, ordered_index[u][be.head]});
                s.base_edge_of.push_back(e);
            }
        }
    }
    // One quotient edge per swap orbit: keep the member whose tail is (min, max).
    for (Edge const& e : s.ordered.edges)
    {
        auto const [u, v] = s.ordered_pairs[e.tail];
        if (u < v)
            s.unordered.edges.push_back({s.projection[e.tail], s.projection[e.head]});
    }
    return s;
}

StepRule two_particle_rule(TwoParticleSpace const& space, StepRule const& base_rule)
{
    StepRule rule;
    rule.edge_amplitudes.reserve(space.ordered.edges.size());
    for (std::size_t e : space.base_edge_of)
        rule.edge_amplitudes.push_back(base_rule.edge_amplitudes.at(e));
    rule.stay_amplitudes.reserve(space.ordered_pairs.size());
    for (auto const& [u, v] : space.ordered_pairs)
        rule.stay_amplitudes.push_back(base_rule.stay_amplitudes.at(u)
                                       + base_rule.stay_amplitudes.at(v) - 1.0);
    return rule;
}

ExchangeReport exchange_statistics_demo(CWComplex const& base, std::size_t n_steps,
                                        StepRule const& base_rule)
{
    validate_rule(base, base_rule);
    ExchangeReport r{two_particle_space(base),
                     first_homology(FinitePresentation(1, {GroupWord({{0, 2}})})),
                     {}, {}, {}, {}, {}, {}, {}, 0.0, 0.0, 0.0};
    r.boson = make_character(r.exchange_homology, {}, {0});
    r.fermion = make_character(r.exchange_homology, {}, {1});

    TwoParticleSpace const& s = r.space;
    Eigen::MatrixXcd const cover = plain_propagator(s.ordered, two_particle_rule(s, base_rule), n_steps);
    auto const n = cover.rows();

    // Deck group {1, z} acting on the final point of the cover propagator.
    r.direct = cover;
    r.exchange.resize(n, n);
    for (Eigen::Index y = 0; y < n; ++y)
        r.exchange.row(y) = cover.row(static_cast<Eigen::Index>(s.swap[y]));

    auto const m = static_cast<Eigen::Index>(s.unordered_pairs.size());
    Eigen::MatrixXcd k0(m, m), k1(m, m);
    for (Eigen::Index y = 0; y < m; ++y)
        for (Eigen::Index x = 0; x < m; ++x)
        {
            auto const ly = static_cast<Eigen::Index>(s.lift[y]);
            auto const lx = static_cast<Eigen::Index>(s.lift[x]);
            k0(y, x) = r.direct(ly, lx);
            k1(y, x) = r.exchange(ly, lx);
        }
    r.sectors.n_steps = n_steps;
    r.sectors.basepath_convention = "deck transformation of the ordered-pair cover, lifts (min, max)";
    r.sectors.sectors = {{SectorKey{0}, k0}, {SectorKey{1}, k1}};
    StepRule counting;
    counting.edge_amplitudes.assign(s.ordered.edges.size(), Amplitude{1.0, 0.0});
    counting.stay_amplitudes.assign(s.ordered.n_vertices, Amplitude{1.0, 0.0});
    Eigen::MatrixXd const walks = plain_propagator(s.ordered, counting, n_steps).real();
    Eigen::MatrixXd c0(m, m), c1(m, m);
    for (Eigen::Index y = 0; y < m; ++y)
        for (Eigen::Index x = 0; x < m; ++x)
        {
            auto const ly = static_cast<Eigen::Index>(s.lift[y]);
            auto const lx = static_cast<Eigen::Index>(s.lift[x]);
            c0(y, x) = walks(ly, lx);
            c1(y, x) = walks(static_cast<Eigen::Index>(s.swap[ly]), lx);
        }
    r.sectors.path_counts = {{SectorKey{0}, c0}, {SectorKey{1}, c1}};
    drop_empty_sectors(r.sectors);

    auto lifted = [&](Character const& chi) {
        return Eigen::MatrixXcd(evaluate_character(chi, r.exchange_homology, SectorKey{0}) * r.direct
                                + evaluate_character(chi, r.exchange_homology, SectorKey{1}) * r.exchange);
    };
    r.boson_kernel = lifted(r.boson);
    r.fermion_kernel = lifted(r.fermion);

    for (Eigen::Index y = 0; y < n; ++y)
    {
        auto const sy = static_cast<Eigen::Index>(s.swap[y]);
        for (Eigen::Index x = 0; x < n; ++x)
        {
            r.boson_symmetry_residual = std::max(
                r.boson_symmetry_residual, std::abs(r.boson_kernel(sy, x) - r.boson_kernel(y, x)));
            r.fermion_antisymmetry_residual =
                std::max(r.fermion_antisymmetry_residual,
                         std::abs(r.fermion_kernel(sy, x) + r.fermion_kernel(y, x)));
            r.sum_rule_residual =
                std::max(r.sum_rule_residual,
                         std::abs(r.boson_kernel(y, x) + r.fermion_kernel(y, x) - 2.0 * r.direct(y, x)));
        }
    }
    return r;
}

// ------------------------------------------------------------------------
// Lifts and wave functions
// ------------------------------------------------------------------------

Amplitude lifted_path_factor(CWComplex const& c, EdgePath const& path, ChartAtlas const& atlas,
                             double hbar, std::vector<std::size_t> const& schedule,
                             std::vector<double> const& fiber_angles)
{
    std::vector<std::size_t> const vs = path_vertices(c, path);
    std::size_t const n = path.steps.size();
    if (schedule.size() != n || fiber_angles.size() != n + 1)
        throw DimensionMismatch("lift needs one chart per step and one fiber angle per vertex");
    if (n == 0)
        return {1.0, 0.0};

    auto home = [&](std::size_t m) { return m < n ? schedule[m] : schedule[n - 1]; };
    // Fiber angle over vertex m, rewritten in chart j: f^k = f^j + phi_jk.
    auto angle_in = [&](std::size_t m, std::size_t j) {
        auto const phi = atlas.transition(home(m), j, vs[m]);
        if (!phi)
            throw AtlasConsistencyError("no transition (" + str(home(m)) + "," + str(j)
                                        + ") at vertex " + str(vs[m]));
        return fiber_angles[m] + *phi;
    };

    double omega = 0.0; // (1 / hbar) * integral of theta + hbar dz / iz
    for (std::size_t m = 0; m < n; ++m)
    {
        std::size_t const j = schedule[m];
        Step const s = path.steps[m];
        omega += s.direction * atlas.potential(j, s.edge) / hbar;
        omega += angle_in(m + 1, j) - angle_in(m, j);
    }
    double const drift = fiber_angles[n] - fiber_angles[0];
    return std::polar(1.0, omega - drift);
}

LiftInvarianceReport lift_invariance_check(CWComplex const& c, EdgePath const& path,
                                           ChartAtlas const& atlas, double hbar,
                                           std::size_t n_random_lifts, std::uint64_t seed)
{
    GluedFactor const glued = feynman_factor_glued(c, path, atlas, hbar);
    LiftInvarianceReport report{glued.value, {}, 0.0};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::size_t const n_vertices = path.steps.size() + 1;
    for (std::size_t i = 0; i < n_random_lifts; ++i)
    {
        std::vector<double> fiber(n_vertices);
        for (double& f : fiber)
            f = angle(rng);
        report.values.push_back(lifted_path_factor(c, path, atlas, hbar, glued.schedule, fiber));
    }

    std::vector<Amplitude> all = report.values;
    all.push_back(report.reference);
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            report.max_deviation = std::max(report.max_deviation, std::abs(all[a] - all[b]));
    return report;
}

WaveFunction regauge_wavefunction(WaveFunction const& psi, std::size_t to_chart,
                                  ChartAtlas const& atlas)
{
    WaveFunction out{to_chart, {}};
    for (auto const& [v, value] : psi.values)
    {
        auto const phi = atlas.transition(psi.chart, to_chart, v);
        if (!phi)
            throw ChartEscapeError("vertex " + str(v) + " is outside the overlap of charts "
                                   + str(psi.chart) + " and " + str(to_chart));
        out.values[v] = std::polar(1.0, -*phi) * value;
    }
    return out;
}

} // namespace prequant
