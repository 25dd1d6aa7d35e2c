#include "prequant/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "prequant/error.hpp"

namespace prequant
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string str(std::size_t n)
{
    return std::to_string(n);
}

void require_positive_hbar(double hbar)
{
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw ValidationError("hbar must be a positive finite number");
}

void require_one_form(CWComplex const& c, DiscreteOneForm const& form)
{
    if (form.values.size() != c.edges.size())
        throw DimensionMismatch("one-form has " + str(form.values.size()) + " values for "
                                + str(c.edges.size()) + " edges");
}

double wrapped(double angle)
{
    return std::remainder(angle, two_pi);
}

} // namespace

DiscreteTwoForm exterior_derivative(CWComplex const& c, DiscreteOneForm const& beta)
{
    require_one_form(c, beta);
    DiscreteTwoForm d{std::vector<double>(c.faces.size(), 0.0)};
    for (std::size_t f = 0; f < c.faces.size(); ++f)
        for (Step const& s : c.faces[f])
            d.values[f] += s.direction * beta.values[s.edge];
    return d;
}

double line_integral(CWComplex const& c, DiscreteOneForm const& form, EdgePath const& path)
{
    require_one_form(c, form);
    validate_path(c, path);
    double sum = 0.0;
    for (Step const& s : path.steps)
        sum += s.direction * form.values[s.edge];
    return sum;
}

// ------------------------------------------------------------------------
// Weil integrality
// ------------------------------------------------------------------------

WeilReport weil_check(CWComplex const& c, DiscreteTwoForm const& sigma, double hbar, double tol)
{
    require_positive_hbar(hbar);
    if (sigma.values.size() != c.faces.size())
        throw DimensionMismatch("two-form has " + str(sigma.values.size()) + " values for "
                                + str(c.faces.size()) + " faces");
    WeilReport report;
    for (ExponentVector& cycle : two_cycle_basis(c))
    {
        double flux = 0.0;
        for (std::size_t f = 0; f < cycle.size(); ++f)
            flux += static_cast<double>(cycle[f]) * sigma.values[f];
        CycleFlux cf;
        cf.cycle = std::move(cycle);
        cf.value = flux / (two_pi * hbar);
        cf.nearest_integer = std::round(cf.value);
        cf.integral = std::abs(cf.value - cf.nearest_integer) <= tol;
        report.accepted = report.accepted && cf.integral;
        report.cycles.push_back(std::move(cf));
    }
    return report;
}

// ------------------------------------------------------------------------
// ChartAtlas
// ------------------------------------------------------------------------

ChartAtlas::ChartAtlas(CWComplex const& c, std::vector<Chart> charts,
                       std::map<std::pair<std::size_t, std::size_t>, TransitionTable> transitions)
    : charts_(std::move(charts)), transitions_(std::move(transitions))
{
    if (charts_.empty())
        throw ValidationError("atlas has no charts");

    std::vector<bool> covered(c.n_vertices, false);
    for (std::size_t j = 0; j < charts_.size(); ++j)
    {
        Chart& chart = charts_[j];
        std::sort(chart.vertices.begin(), chart.vertices.end());
        chart.vertices.erase(std::unique(chart.vertices.begin(), chart.vertices.end()),
                             chart.vertices.end());
        if (chart.vertices.empty())
            throw ValidationError("chart " + str(j) + " is empty");

        std::vector<bool> in(c.n_vertices, false);
        for (std::size_t v : chart.vertices)
        {
            if (v >= c.n_vertices)
                throw ValidationError("chart " + str(j) + " lists vertex " + str(v)
                                      + " outside the complex");
            in[v] = covered[v] = true;
        }

        std::vector<bool> edge_in(c.edges.size(), false);
        for (std::size_t e = 0; e < c.edges.size(); ++e)
        {
            edge_in[e] = in[c.edges[e].tail] && in[c.edges[e].head];
            if (edge_in[e] && !chart.potential.contains(e))
                throw ValidationError("chart " + str(j) + " has no potential on its edge " + str(e));
        }
        for (auto const& [e, value] : chart.potential)
        {
            if (e >= c.edges.size() || !edge_in[e])
                throw ValidationError("chart " + str(j) + " gives a potential on edge " + str(e)
                                      + " which is not inside the chart");
            if (!std::isfinite(value))
                throw ValidationError("chart " + str(j) + " potential on edge " + str(e)
                                      + " is not finite");
        }

        // The induced subcomplex must be connected.
        std::vector<bool> seen(c.n_vertices, false);
        std::deque<std::size_t> queue{chart.vertices.front()};
        seen[chart.vertices.front()] = true;
        std::size_t reached = 1;
        while (!queue.empty())
        {
            std::size_t const u = queue.front();
            queue.pop_front();
            for (std::size_t e = 0; e < c.edges.size(); ++e)
            {
                if (!edge_in[e])
                    continue;
                std::size_t w;
                if (c.edges[e].tail == u)
                    w = c.edges[e].head;
                else if (c.edges[e].head == u)
                    w = c.edges[e].tail;
                else
                    continue;
                if (!seen[w])
                {
                    seen[w] = true;
                    ++reached;
                    queue.push_back(w);
                }
            }
        }
        if (reached != chart.vertices.size())
            throw ValidationError("chart " + str(j) + " does not induce a connected subcomplex");

        vertex_in_.push_back(std::move(in));
        edge_in_.push_back(std::move(edge_in));
    }
    for (std::size_t v = 0; v < c.n_vertices; ++v)
        if (!covered[v])
            throw ValidationError("vertex " + str(v) + " is not covered by any chart");

    for (auto const& [key, table] : transitions_)
    {
        auto const [j, k] = key;
        if (j >= charts_.size() || k >= charts_.size() || j == k)
            throw ValidationError("transition (" + str(j) + "," + str(k)
                                  + ") does not name two distinct charts");
        for (auto const& [v, angle] : table)
        {
            if (v >= c.n_vertices || !vertex_in_[j][v] || !vertex_in_[k][v])
                throw ValidationError("transition (" + str(j) + "," + str(k) + ") at vertex "
                                      + str(v) + " lies outside the overlap");
            if (!std::isfinite(angle))
                throw ValidationError("transition angle is not finite");
        }
    }
}

bool ChartAtlas::contains_vertex(std::size_t j, std::size_t v) const
{
    return j < vertex_in_.size() && v < vertex_in_[j].size() && vertex_in_[j][v];
}

bool ChartAtlas::contains_edge(std::size_t j, std::size_t e) const
{
    return j < edge_in_.size() && e < edge_in_[j].size() && edge_in_[j][e];
}

double ChartAtlas::potential(std::size_t j, std::size_t e) const
{
    if (!contains_edge(j, e))
        throw ChartEscapeError("edge " + str(e) + " is not inside chart " + str(j));
    return charts_[j].potential.at(e);
}

std::optional<double> ChartAtlas::transition(std::size_t j, std::size_t k, std::size_t v) const
{
    if (!contains_vertex(j, v) || !contains_vertex(k, v))
        return std::nullopt;
    if (j == k)
        return 0.0;
    if (auto it = transitions_.find({j, k}); it != transitions_.end())
        if (auto vt = it->second.find(v); vt != it->second.end())
            return vt->second;
    if (auto it = transitions_.find({k, j}); it != transitions_.end())
        if (auto vt = it->second.find(v); vt != it->second.end())
            return -vt->second;
    return std::nullopt;
}

std::optional<std::size_t> ChartAtlas::first_chart_with_edge(std::size_t e) const
{
    for (std::size_t j = 0; j < charts_.size(); ++j)
        if (contains_edge(j, e))
            return j;
    return std::nullopt;
}

std::optional<std::size_t> ChartAtlas::first_chart_with_vertex(std::size_t v) const
{
    for (std::size_t j = 0; j < charts_.size(); ++j)
        if (contains_vertex(j, v))
            return j;
    return std::nullopt;
}

ChartAtlas single_chart_atlas(CWComplex const& c, DiscreteOneForm const& theta)
{
    require_one_form(c, theta);
    Chart chart;
    for (std::size_t v = 0; v < c.n_vertices; ++v)
        chart.vertices.push_back(v);
    for (std::size_t e = 0; e < c.edges.size(); ++e)
        chart.potential[e] = theta.values[e];
    return ChartAtlas(c, {std::move(chart)}, {});
}

std::vector<AtlasViolation> atlas_consistency(CWComplex const& c, ChartAtlas const& atlas,
                                              double hbar, double tol)
{
    require_positive_hbar(hbar);
    std::vector<AtlasViolation> out;
    std::size_t const n = atlas.size();

    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
        {
            for (std::size_t v = 0; v < c.n_vertices; ++v)
            {
                if (!atlas.contains_vertex(j, v) || !atlas.contains_vertex(k, v))
                    continue;
                if (!atlas.transition(j, k, v))
                {
                    out.push_back({"missing transition", {j, k}, v, std::nullopt, 0.0});
                    continue;
                }
                // Both orientations given: they must be inverse to each other.
                auto const& tr = atlas.transitions();
                auto fwd = tr.find({j, k});
                auto bwd = tr.find({k, j});
                if (fwd != tr.end() && bwd != tr.end() && fwd->second.contains(v)
                    && bwd->second.contains(v))
                {
                    double const r = wrapped(fwd->second.at(v) + bwd->second.at(v));
                    if (std::abs(r) > tol)
                        out.push_back({"cocycle", {j, k, j}, v, std::nullopt, r});
                }
            }
            for (std::size_t e = 0; e < c.edges.size(); ++e)
            {
                if (!atlas.contains_edge(j, e) || !atlas.contains_edge(k, e))
                    continue;
                auto const a = atlas.transition(j, k, c.edges[e].tail);
                auto const b = atlas.transition(j, k, c.edges[e].head);
                if (!a || !b)
                    continue;
                double const r = wrapped((atlas.potential(j, e) - atlas.potential(k, e)) / hbar
                                         - (*b - *a));
                if (std::abs(r) > tol)
                    out.push_back({"compatibility", {j, k}, std::nullopt, e, r});
            }
        }

    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            for (std::size_t l = k + 1; l < n; ++l)
                for (std::size_t v = 0; v < c.n_vertices; ++v)
                {
                    auto const jk = atlas.transition(j, k, v);
                    auto const kl = atlas.transition(k, l, v);
                    auto const jl = atlas.transition(j, l, v);
                    if (!jk || !kl || !jl)
                        continue;
                    double const r = wrapped(*jk + *kl - *jl);
                    if (std::abs(r) > tol)
                        out.push_back({"cocycle", {j, k, l}, v, std::nullopt, r});
                }
    return out;
}

// ------------------------------------------------------------------------
// Lifts and Feynman factors
// ------------------------------------------------------------------------

LiftedPath horizontal_lift(CWComplex const& c, EdgePath const& path, std::size_t chart,
                           ChartAtlas const& atlas, double hbar, double initial_angle)
{
    require_positive_hbar(hbar);
    validate_path(c, path);
    if (!atlas.contains_vertex(chart, path.start))
        throw ChartEscapeError("path starts at vertex " + str(path.start) + " outside chart "
                               + str(chart));
    LiftedPath lift{path, {initial_angle}};
    lift.fiber_angles.reserve(path.steps.size() + 1);
    for (Step const& s : path.steps)
        lift.fiber_angles.push_back(lift.fiber_angles.back()
                                    - s.direction * atlas.potential(chart, s.edge) / hbar);
    return lift;
}

std::complex<double> feynman_factor_chart(CWComplex const& c, EdgePath const& path,
                                          std::size_t chart, ChartAtlas const& atlas, double hbar)
{
    require_positive_hbar(hbar);
    validate_path(c, path);
    if (!atlas.contains_vertex(chart, path.start))
        throw ChartEscapeError("path starts at vertex " + str(path.start) + " outside chart "
                               + str(chart));
    double action = 0.0;
    for (Step const& s : path.steps)
        action += s.direction * atlas.potential(chart, s.edge);
    return std::polar(1.0, action / hbar);
}

std::vector<std::size_t> greedy_schedule(CWComplex const& c, EdgePath const& path,
                                         ChartAtlas const& atlas,
                                         std::optional<std::size_t> start_chart)
{
    validate_path(c, path);
    std::vector<std::size_t> schedule;
    schedule.reserve(path.steps.size());
    std::optional<std::size_t> current = start_chart;
    for (std::size_t m = 0; m < path.steps.size(); ++m)
    {
        std::size_t const e = path.steps[m].edge;
        if (!current || !atlas.contains_edge(*current, e))
        {
            current = atlas.first_chart_with_edge(e);
            if (!current)
                throw AtlasCoverageError("edge " + str(e) + " (step " + str(m)
                                         + ") lies in no chart");
        }
        schedule.push_back(*current);
    }
    return schedule;
}

namespace
{

double switch_phase(ChartAtlas const& atlas, std::size_t from, std::size_t to, std::size_t v)
{
    auto const phi = atlas.transition(from, to, v);
    if (!phi)
        throw AtlasConsistencyError("no transition (" + str(from) + "," + str(to)
                                    + ") at switch vertex " + str(v));
    return -*phi;
}

} // namespace

GluedFactor feynman_factor_glued(CWComplex const& c, EdgePath const& path, ChartAtlas const& atlas,
                                 double hbar, GluingOptions const& options)
{
    require_positive_hbar(hbar);
    std::vector<std::size_t> const vertices = path_vertices(c, path);
    if (auto violations = atlas_consistency(c, atlas, hbar, options.tol); !violations.empty())
        throw AtlasConsistencyError("atlas is inconsistent: first violation is "
                                    + violations.front().kind);

    if (options.start_chart && !atlas.contains_vertex(*options.start_chart, path.start))
        throw ChartEscapeError("start chart " + str(*options.start_chart)
                               + " does not contain vertex " + str(path.start));
    if (options.end_chart && !atlas.contains_vertex(*options.end_chart, vertices.back()))
        throw ChartEscapeError("end chart " + str(*options.end_chart) + " does not contain vertex "
                               + str(vertices.back()));

    GluedFactor out;
    if (options.schedule)
    {
        if (options.schedule->size() != path.steps.size())
            throw DimensionMismatch("chart schedule has " + str(options.schedule->size())
                                    + " entries for " + str(path.steps.size()) + " steps");
        for (std::size_t m = 0; m < path.steps.size(); ++m)
            if (!atlas.contains_edge((*options.schedule)[m], path.steps[m].edge))
                throw ChartEscapeError("step " + str(m) + " is not inside scheduled chart "
                                       + str((*options.schedule)[m]));
        out.schedule = *options.schedule;
    }
    else
    {
        out.schedule = greedy_schedule(c, path, atlas, options.start_chart);
    }

    if (options.start_chart)
        out.first_chart = *options.start_chart;
    else if (!out.schedule.empty())
        out.first_chart = out.schedule.front();
    else
        out.first_chart = *atlas.first_chart_with_vertex(path.start);

    double phase = 0.0;
    std::size_t current = out.first_chart;
    for (std::size_t m = 0; m < path.steps.size(); ++m)
    {
        std::size_t const next = out.schedule[m];
        if (next != current)
        {
            phase += switch_phase(atlas, current, next, vertices[m]);
            current = next;
        }
        phase += path.steps[m].direction * atlas.potential(current, path.steps[m].edge) / hbar;
    }
    out.last_chart = options.end_chart.value_or(current);
    if (out.last_chart != current)
        phase += switch_phase(atlas, current, out.last_chart, vertices.back());

    out.value = std::polar(1.0, phase);
    return out;
}

std::complex<double> endpoint_transition_ratio(ChartAtlas const& atlas, std::size_t j,
                                               std::size_t k, std::size_t x, std::size_t x_end)
{
    auto const a = atlas.transition(j, k, x);
    auto const b = atlas.transition(j, k, x_end);
    if (!a || !b)
        throw ChartEscapeError("endpoints must lie in the overlap of charts " + str(j) + " and "
                               + str(k));
    return std::polar(1.0, *b - *a);
}

// ------------------------------------------------------------------------
// Holonomy and classification
// ------------------------------------------------------------------------

std::complex<double> holonomy(CWComplex const& c, EdgePath const& loop,
                              DiscreteOneForm const& conn, double hbar)
{
    require_positive_hbar(hbar);
    if (!is_loop(c, loop))
        throw NotALoopError("holonomy needs a closed path; path from " + str(loop.start)
                            + " ends at " + str(end_vertex(c, loop)));
    return std::polar(1.0, line_integral(c, conn, loop) / hbar);
}

std::optional<Curvature> max_curvature(CWComplex const& c, DiscreteOneForm const& conn)
{
    DiscreteTwoForm const d = exterior_derivative(c, conn);
    std::optional<Curvature> worst;
    for (std::size_t f = 0; f < d.values.size(); ++f)
        if (!worst || std::abs(d.values[f]) > std::abs(worst->worst_value))
            worst = Curvature{f, d.values[f]};
    return worst;
}

Character classify_connection(CWComplex const& c, SpaceHomology const& space,
                              DiscreteOneForm const& conn, std::vector<std::int64_t> torsion_label,
                              double hbar, double tol)
{
    require_positive_hbar(hbar);
    require_one_form(c, conn);
    if (auto k = max_curvature(c, conn); k && std::abs(k->worst_value) > tol * hbar)
        throw CurvatureError("connection is not flat: face " + str(k->worst_face)
                             + " has boundary sum " + std::to_string(k->worst_value));

    SpanningTree const& tree = space.fundamental.tree;
    FirstHomology const& h = space.homology;
    std::vector<double> generator_angle(tree.n_generators());
    for (std::size_t g = 0; g < tree.n_generators(); ++g)
        generator_angle[g] = line_integral(c, conn, tree.generator_loop(c, g)) / hbar;

    // Free summand j is represented by row free_columns[j] of the inverse basis map.
    std::vector<double> free_angles;
    free_angles.reserve(h.betti());
    for (std::size_t col : h.free_columns())
    {
        double angle = 0.0;
        for (std::size_t g = 0; g < tree.n_generators(); ++g)
        {
            BigInt const& coeff = h.basis_inverse()(col, g);
            if (coeff != 0)
                angle += coeff.convert_to<double>() * generator_angle[g];
        }
        free_angles.push_back(angle);
    }
    return make_character(h, std::move(free_angles), std::move(torsion_label));
}

Character classify_connection(CWComplex const& c, DiscreteOneForm const& conn,
                              std::vector<std::int64_t> torsion_label, double hbar, double tol)
{
    return classify_connection(c, analyze_space(c), conn, std::move(torsion_label), hbar, tol);
}

PrequantizationComparison prequantizations_equivalent(Prequantization const& a,
                                                      Prequantization const& b, double tol)
{
    Character const& x = a.character;
    Character const& y = b.character;
    if (x.free_angles().size() != y.free_angles().size()
        || x.torsion_labels().size() != y.torsion_labels().size())
        throw DimensionMismatch("prequantizations live over different homology groups");
    PrequantizationComparison r;
    r.same_bundle = character_component(x) == character_component(y);
    r.same_connection = r.same_bundle && characters_equivalent(x, y, tol);
    return r;
}

} // namespace prequant
