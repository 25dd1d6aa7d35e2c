#include "prequant/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "prequant/bundle.hpp"
#include "prequant/complex.hpp"
#include "prequant/homology.hpp"
#include "prequant/io.hpp"
#include "prequant/propagator.hpp"

namespace prequant::cli
{

namespace
{

using io::json;

std::vector<std::string> const commands = {"classify",      "check-weil",    "holonomy",
                                           "propagate",     "demo-ab",       "demo-exchange",
                                           "check-atlas"};

struct RunConfig
{
    std::string command;
    std::string input;
    std::optional<double> hbar;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    std::optional<std::size_t> steps;
    std::optional<std::string> flux_grid;
    std::string output;
    std::optional<std::string> format;
    std::string engine = "cover";
};

/// Bad command-line values share the parse-error exit code.
struct UsageError : Error
{
    using Error::Error;
};

std::string real(double x, int digits = 12)
{
    if (x == 0.0)
        x = 0.0; // prints -0 as 0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string complex_str(Amplitude z, int digits = 10)
{
    // Round-off residue below 1e-14 reads as noise in a report.
    double const re = std::abs(z.real()) < 1e-14 ? 0.0 : z.real();
    double const im = std::abs(z.imag()) < 1e-14 ? 0.0 : z.imag();
    std::string s = real(re, digits);
    s += std::signbit(im) ? "-" : "+";
    s += real(std::abs(im), digits) + "i";
    return s;
}

template <class T>
std::string list_str(std::vector<T> const& v)
{
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            os << ", ";
        if constexpr (std::is_floating_point_v<T>)
            os << real(v[i]);
        else
            os << v[i];
    }
    os << "]";
    return os.str();
}

json complex_json(Amplitude z)
{
    return json::array({z.real(), z.imag()});
}

json matrix_json(Eigen::MatrixXcd const& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

void print_matrix(std::ostream& os, Eigen::MatrixXcd const& m, std::string const& indent = "  ")
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
        os << indent;
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << (c ? "  " : "") << complex_str(m(r, c), 8);
        os << "\n";
    }
}

/// "4pi" means 4 * pi * hbar; plain numbers are flux in action units.
double flux_value(std::string token, double hbar)
{
    double scale = 1.0;
    if (token.size() >= 2 && token.compare(token.size() - 2, 2, "pi") == 0)
    {
        token.resize(token.size() - 2);
        scale = std::numbers::pi * hbar;
        if (token.empty() || token == "+")
            token = "1";
        else if (token == "-")
            token = "-1";
        else if (token.back() == '*')
            token.pop_back();
    }
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(token, &used);
    }
    catch (std::exception const&)
    {
        used = 0;
    }
    if (used == 0 || used != token.size() || !std::isfinite(v))
        throw UsageError("bad flux value \"" + token + "\" in --flux-grid");
    return v * scale;
}

std::vector<double> parse_flux_grid(std::string const& text, double hbar)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');)
        parts.push_back(part);
    if (parts.size() != 3)
        throw UsageError("--flux-grid expects start:stop:count");
    std::size_t used = 0;
    long count = 0;
    try
    {
        count = std::stol(parts[2], &used);
    }
    catch (std::exception const&)
    {
        used = 0;
    }
    if (used == 0 || used != parts[2].size() || count < 1)
        throw UsageError("--flux-grid count must be a positive integer");
    return linear_grid(flux_value(parts[0], hbar), flux_value(parts[1], hbar),
                       static_cast<std::size_t>(count));
}

json const* find(json const& doc, char const* key)
{
    if (!doc.is_object())
        return nullptr;
    auto it = doc.find(key);
    return it == doc.end() ? nullptr : &*it;
}

json const& require(json const& doc, char const* key)
{
    json const* j = find(doc, key);
    if (!j)
        throw io::ParseError(std::string("input is missing \"") + key + "\"");
    return *j;
}

double resolve_hbar(RunConfig const& cfg, json const& doc)
{
    if (cfg.hbar)
        return *cfg.hbar;
    return io::read_hbar(doc).value_or(1.0);
}

std::size_t resolve_steps(RunConfig const& cfg, json const& doc, std::size_t fallback)
{
    if (cfg.steps)
        return *cfg.steps;
    if (json const* s = find(doc, "steps"))
    {
        if (!s->is_number_unsigned())
            throw io::ParseError("\"steps\" must be a nonnegative integer");
        return s->get<std::size_t>();
    }
    return fallback;
}

std::size_t vertex_field(json const& doc, char const* key, std::size_t fallback)
{
    json const* v = find(doc, key);
    if (!v)
        return fallback;
    if (!v->is_number_unsigned())
        throw io::ParseError(std::string("\"") + key + "\" must be a vertex index");
    return v->get<std::size_t>();
}

CWComplex load_complex(json const& doc, char const* key = "complex")
{
    CWComplex c = io::parse_complex(require(doc, key));
    require_valid(c);
    return c;
}

StepRule load_rule(json const& doc, CWComplex const& c)
{
    json const* r = find(doc, "rule");
    StepRule rule = r ? io::parse_step_rule(*r, c) : default_step_rule(c);
    validate_rule(c, rule);
    return rule;
}

SectorEngine parse_engine(std::string const& name)
{
    if (name == "cover")
        return SectorEngine::cover_transfer;
    if (name == "enumerate")
        return SectorEngine::enumeration;
    throw UsageError("--engine must be cover or enumerate");
}

CWComplex ring(std::size_t n)
{
    CWComplex c;
    c.n_vertices = n;
    for (std::size_t v = 0; v < n; ++v)
        c.edges.push_back({v, (v + 1) % n});
    return c;
}

std::string count(std::size_t n, std::string const& one, std::string many = {})
{
    if (many.empty())
        many = one + "s";
    return std::to_string(n) + " " + (n == 1 ? one : many);
}

// ------------------------------------------------------------------------
// classify
// ------------------------------------------------------------------------

std::string summary_line(CharacterGroupSummary const& g)
{
    std::size_t const dim = g.identity_component_dim;
    if (g.n_components == 1 && dim == 0)
        return "unique prequantization";
    std::string s = g.n_components.str() + (g.n_components == 1 ? " bundle class, " : " bundle classes, ");
    s += std::to_string(dim) + "-dimensional connection moduli";
    if (dim > 0)
        s += " (flux mod 2πħ)";
    return s;
}

int cmd_classify(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    std::optional<FirstHomology> h;
    std::string source;
    json const* pres = find(doc, "presentation");
    json const* cplx = find(doc, "complex");
    if (!pres && !cplx)
    {
        if (find(doc, "generators"))
            pres = &doc;
        else if (find(doc, "vertices"))
            cplx = &doc;
        else
            throw io::ParseError("classify expects a presentation or a complex");
    }
    if (pres)
    {
        FinitePresentation const p = io::parse_presentation(*pres);
        h = first_homology(p);
        source = "presentation with " + count(p.n_generators(), "generator") + ", "
                 + count(p.relators().size(), "relator");
    }
    else
    {
        CWComplex const c = io::parse_complex(*cplx);
        require_valid(c);
        SpaceHomology space = analyze_space(c);
        h = space.homology;
        source = "complex with " + count(c.n_vertices, "vertex", "vertices") + ", "
                 + count(c.edges.size(), "edge") + ", " + count(c.faces.size(), "face");
    }
    log.info("classify: {}", source);

    double const hbar = resolve_hbar(cfg, doc);
    CharacterGroupSummary const g = character_group(*h);
    std::vector<std::vector<double>> grid;
    if (cfg.flux_grid)
    {
        std::vector<double> angles;
        for (double flux : parse_flux_grid(*cfg.flux_grid, hbar))
            angles.push_back(flux / hbar);
        grid.assign(h->betti(), angles);
    }
    std::vector<Character> const listed =
        h->betti() == 0 || cfg.flux_grid ? enumerate_characters(*h, grid) : g.component_representatives;

    // Characters form a finite set only without free part.
    std::optional<BigInt> n_characters;
    if (h->betti() == 0)
        n_characters = g.n_components;

    if (cfg.format == "json")
    {
        json r;
        r["source"] = source;
        r["betti"] = h->betti();
        r["torsion"] = h->torsion();
        r["bundle_classes"] = g.n_components.str();
        r["connection_moduli_dimension"] = g.identity_component_dim;
        r["characters"] = n_characters ? json(n_characters->str()) : json("infinite");
        r["summary"] = summary_line(g);
        json reps = json::array();
        for (Character const& chi : listed)
            reps.push_back(io::to_json(chi));
        r[cfg.flux_grid || h->betti() == 0 ? "characters_listed" : "component_representatives"] = reps;
        out << r.dump(2) << "\n";
        return exit_ok;
    }

    out << "source: " << source << "\n";
    out << "first homology: betti " << h->betti() << ", torsion " << list_str(h->torsion()) << "\n";
    out << "bundle classes: " << g.n_components.str() << "\n";
    out << "connection moduli dimension: " << g.identity_component_dim << "\n";
    if (n_characters)
        out << "characters: " << n_characters->str() << "\n";
    else
        out << "characters: infinite (" << h->betti() << " free flux angle"
            << (h->betti() == 1 ? "" : "s") << ")\n";
    out << "summary: " << summary_line(g) << "\n";
    out << (cfg.flux_grid || h->betti() == 0 ? "characters listed:" : "component representatives:")
        << " " << listed.size() << "\n";
    for (std::size_t i = 0; i < listed.size(); ++i)
        out << "  chi[" << i << "] free_angles " << list_str(listed[i].free_angles())
            << " torsion_labels " << list_str(listed[i].torsion_labels()) << "\n";
    return exit_ok;
}

// ------------------------------------------------------------------------
// check-weil
// ------------------------------------------------------------------------

int cmd_check_weil(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    CWComplex const c = load_complex(doc);
    double const hbar = resolve_hbar(cfg, doc);
    json const& form = require(doc, "two_form");
    DiscreteTwoForm const sigma = io::parse_two_form(form, c, io::read_hbar(form).value_or(hbar));
    WeilReport const rep = weil_check(c, sigma, hbar, cfg.tol);
    log.info("check-weil: {} basis 2-cycles", rep.cycles.size());

    if (cfg.format == "json")
    {
        json cycles = json::array();
        for (CycleFlux const& f : rep.cycles)
            cycles.push_back({{"cycle", f.cycle}, {"value", f.value}, {"integral", f.integral}});
        out << json{{"accepted", rep.accepted}, {"hbar", hbar}, {"cycles", cycles}}.dump(2) << "\n";
    }
    else
    {
        out << "basis 2-cycles: " << rep.cycles.size() << "\n";
        for (std::size_t i = 0; i < rep.cycles.size(); ++i)
        {
            CycleFlux const& f = rep.cycles[i];
            out << "  cycle " << i << " " << list_str(f.cycle) << ": (1/2πħ)∫σ = " << real(f.value)
                << (f.integral ? " integral" : " NOT integral") << "\n";
        }
        out << (rep.accepted ? "accept" : "reject") << "\n";
    }
    return rep.accepted ? exit_ok : exit_reject;
}

// ------------------------------------------------------------------------
// holonomy
// ------------------------------------------------------------------------

int cmd_holonomy(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    CWComplex const c = load_complex(doc);
    double const hbar = resolve_hbar(cfg, doc);
    json const& form = require(doc, "connection");
    DiscreteOneForm const conn = io::parse_one_form(form, c, io::read_hbar(form).value_or(hbar));
    SpaceHomology const space = analyze_space(c);
    FirstHomology const& h = space.homology;

    std::vector<EdgePath> loops;
    if (json const* ls = find(doc, "loops"))
    {
        if (!ls->is_array())
            throw io::ParseError("\"loops\" must be an array of paths");
        for (json const& l : *ls)
            loops.push_back(io::parse_path(l));
    }
    else
    {
        for (std::size_t g = 0; g < space.fundamental.tree.n_generators(); ++g)
            loops.push_back(space.fundamental.tree.generator_loop(c, g));
    }
    for (EdgePath const& l : loops)
    {
        validate_path(c, l);
        if (!is_loop(c, l))
            throw NotALoopError("path starting at vertex " + std::to_string(l.start) + " is not closed");
    }

    std::vector<std::int64_t> label(h.torsion().size(), 0);
    if (json const* t = find(doc, "torsion_label"))
    {
        if (!t->is_array() || t->size() != label.size())
            throw io::ParseError("\"torsion_label\" must list one integer per torsion invariant");
        for (std::size_t i = 0; i < label.size(); ++i)
        {
            if (!(*t)[i].is_number_integer())
                throw io::ParseError("\"torsion_label\" entries must be integers");
            label[i] = (*t)[i].get<std::int64_t>();
        }
    }

    std::optional<Character> chi;
    std::string curvature_note;
    try
    {
        chi = classify_connection(c, space, conn, label, hbar, cfg.tol);
    }
    catch (CurvatureError const& e)
    {
        curvature_note = e.what();
    }
    log.info("holonomy: {} loops, connection {}", loops.size(), chi ? "flat" : "curved");

    std::vector<ExponentVector> classes;
    std::vector<Amplitude> hol, predicted;
    for (EdgePath const& l : loops)
    {
        ExponentVector m = path_class(space.fundamental.tree, l);
        hol.push_back(holonomy(c, l, conn, hbar));
        predicted.push_back(chi ? evaluate_character(*chi, h, m) : Amplitude{});
        classes.push_back(std::move(m));
    }

    if (cfg.format == "json")
    {
        json r;
        r["betti"] = h.betti();
        r["torsion"] = h.torsion();
        r["flat"] = chi.has_value();
        if (chi)
            r["character"] = io::to_json(*chi);
        else
            r["curvature"] = curvature_note;
        json rows = json::array();
        for (std::size_t i = 0; i < loops.size(); ++i)
        {
            json row{{"class", classes[i]}, {"holonomy", complex_json(hol[i])}};
            if (chi)
                row["character_value"] = complex_json(predicted[i]);
            rows.push_back(std::move(row));
        }
        r["loops"] = rows;
        out << r.dump(2) << "\n";
    }
    else
    {
        out << "first homology: betti " << h.betti() << ", torsion " << list_str(h.torsion()) << "\n";
        if (chi)
            out << "character: free_angles " << list_str(chi->free_angles()) << " torsion_labels "
                << list_str(chi->torsion_labels()) << "\n";
        else
            out << "connection is not flat: " << curvature_note << "\n";
        for (std::size_t i = 0; i < loops.size(); ++i)
        {
            out << "  loop " << i << " class " << list_str(classes[i]) << " holonomy "
                << complex_str(hol[i]);
            if (chi)
                out << " character " << complex_str(predicted[i]);
            out << "\n";
        }
    }
    return chi ? exit_ok : exit_reject;
}

// ------------------------------------------------------------------------
// propagate
// ------------------------------------------------------------------------

int cmd_propagate(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    CWComplex const c = load_complex(doc);
    StepRule const rule = load_rule(doc, c);
    std::size_t const n = resolve_steps(cfg, doc, 1);
    SectorOptions options;
    options.engine = parse_engine(cfg.engine);
    SectorPropagator const sp = sector_propagators(c, rule, n, options);
    double const residual = (sp.total() - plain_propagator(c, rule, n)).cwiseAbs().maxCoeff();
    log.info("propagate: {} steps, {} sectors", n, sp.sectors.size());

    std::optional<Character> chi;
    std::optional<Eigen::MatrixXcd> weighted;
    if (json const* cj = find(doc, "character"))
    {
        FirstHomology const h = analyze_space(c).homology;
        Character const raw = io::character_from_json(*cj);
        chi = make_character(h, raw.free_angles(), raw.torsion_labels());
        weighted = weighted_propagator(sp, *chi, h);
    }

    if (cfg.format == "json")
    {
        json r;
        r["steps"] = n;
        r["convention"] = sp.basepath_convention;
        r["completeness_residual"] = residual;
        json sectors = json::array();
        for (auto const& [key, m] : sp.sectors)
            sectors.push_back({{"class", key}, {"matrix", matrix_json(m)}});
        r["sectors"] = sectors;
        if (weighted)
        {
            r["character"] = io::to_json(*chi);
            r["weighted"] = matrix_json(*weighted);
        }
        out << r.dump(2) << "\n";
        return exit_ok;
    }

    out << "steps: " << n << "\n";
    out << "reference paths: " << sp.basepath_convention << "\n";
    out << "sectors: " << sp.sectors.size() << "\n";
    for (auto const& [key, m] : sp.sectors)
    {
        out << "sector " << list_str(key) << ":\n";
        print_matrix(out, m);
    }
    out << "max |sum of sectors - plain propagator| = " << real(residual, 3) << "\n";
    if (weighted)
    {
        out << "character-weighted propagator (free_angles " << list_str(chi->free_angles())
            << ", torsion_labels " << list_str(chi->torsion_labels()) << "):\n";
        print_matrix(out, *weighted);
    }
    return exit_ok;
}

// ------------------------------------------------------------------------
// demo-ab
// ------------------------------------------------------------------------

int cmd_demo_ab(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    CWComplex const c = find(doc, "complex") ? load_complex(doc) : ring(6);
    StepRule const rule = load_rule(doc, c);
    std::size_t const n = resolve_steps(cfg, doc, 6);
    std::size_t const source = vertex_field(doc, "source", 0);
    std::size_t const detector = vertex_field(doc, "detector", c.n_vertices / 2);
    double const hbar = resolve_hbar(cfg, doc);
    std::vector<double> const grid = parse_flux_grid(cfg.flux_grid.value_or("0:4pi:25"), hbar);
    std::vector<ScanRow> const rows =
        ab_interference_scan(c, rule, n, source, detector, grid, hbar, parse_engine(cfg.engine));
    log.info("demo-ab: {} flux points, {} steps, {} -> {}", rows.size(), n, source, detector);

    std::string const format = cfg.format.value_or("csv");
    if (format == "json")
    {
        json r = json::array();
        for (ScanRow const& row : rows)
            r.push_back({{"flux", row.flux},
                         {"intensity", row.intensity},
                         {"amplitude", complex_json(row.amplitude)}});
        out << r.dump(2) << "\n";
    }
    else if (format == "csv")
    {
        write_scan_csv(out, rows);
    }
    else
    {
        auto const [lo, hi] = std::minmax_element(rows.begin(), rows.end(), [](auto const& a, auto const& b) {
            return a.intensity < b.intensity;
        });
        out << "Aharonov-Bohm scan, " << n << " steps, source " << source << ", detector " << detector
            << ", hbar " << real(hbar) << "\n";
        for (ScanRow const& row : rows)
            out << "  flux " << real(row.flux, 10) << "  intensity " << real(row.intensity, 10) << "\n";
        out << "visibility (max - min intensity): " << real(hi->intensity - lo->intensity, 10) << "\n";
    }
    return exit_ok;
}

// ------------------------------------------------------------------------
// demo-exchange
// ------------------------------------------------------------------------

int cmd_demo_exchange(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    char const* key = find(doc, "base") ? "base" : "complex";
    CWComplex const base = find(doc, key) ? load_complex(doc, key) : ring(4);
    StepRule const rule = load_rule(doc, base);
    std::size_t const n = resolve_steps(cfg, doc, 4);
    ExchangeReport const r = exchange_statistics_demo(base, n, rule);
    log.info("demo-exchange: {} ordered pairs, {} steps", r.space.ordered_pairs.size(), n);
    bool const ok = r.boson_symmetry_residual <= cfg.tol && r.fermion_antisymmetry_residual <= cfg.tol
                    && r.sum_rule_residual <= cfg.tol;

    if (cfg.format == "json")
    {
        json pairs = json::array();
        for (auto const& [u, v] : r.space.ordered_pairs)
            pairs.push_back({u, v});
        json j;
        j["steps"] = n;
        j["ordered_pairs"] = pairs;
        j["exchange_homology"] = {{"betti", r.exchange_homology.betti()},
                                  {"torsion", r.exchange_homology.torsion()}};
        j["boson"] = io::to_json(r.boson);
        j["fermion"] = io::to_json(r.fermion);
        j["direct"] = matrix_json(r.direct);
        j["exchange"] = matrix_json(r.exchange);
        j["boson_kernel"] = matrix_json(r.boson_kernel);
        j["fermion_kernel"] = matrix_json(r.fermion_kernel);
        j["boson_symmetry_residual"] = r.boson_symmetry_residual;
        j["fermion_antisymmetry_residual"] = r.fermion_antisymmetry_residual;
        j["sum_rule_residual"] = r.sum_rule_residual;
        out << j.dump(2) << "\n";
        return ok ? exit_ok : exit_reject;
    }

    out << "two particles on a " << base.n_vertices << "-vertex graph, " << n << " steps\n";
    out << "exchange group: betti " << r.exchange_homology.betti() << ", torsion "
        << list_str(r.exchange_homology.torsion()) << "\n";
    out << "ordered pairs:";
    for (std::size_t i = 0; i < r.space.ordered_pairs.size(); ++i)
        out << " " << i << "=(" << r.space.ordered_pairs[i].first << "," << r.space.ordered_pairs[i].second
            << ")";
    out << "\n";
    out << "boson kernel K_b = K_direct + K_exchange:\n";
    print_matrix(out, r.boson_kernel);
    out << "fermion kernel K_f = K_direct - K_exchange:\n";
    print_matrix(out, r.fermion_kernel);
    out << "max |K_b(swap x', x) - K_b(x', x)| = " << real(r.boson_symmetry_residual, 3) << "\n";
    out << "max |K_f(swap x', x) + K_f(x', x)| = " << real(r.fermion_antisymmetry_residual, 3) << "\n";
    out << "max |K_b + K_f - 2 K_direct| = " << real(r.sum_rule_residual, 3) << "\n";
    out << (ok ? "symmetry checks pass" : "symmetry checks FAIL") << "\n";
    return ok ? exit_ok : exit_reject;
}

// ------------------------------------------------------------------------
// check-atlas
// ------------------------------------------------------------------------

std::string violation_str(AtlasViolation const& v)
{
    std::string s = v.kind + " charts " + list_str(v.charts);
    if (v.edge)
        s += " edge " + std::to_string(*v.edge);
    if (v.vertex)
        s += " vertex " + std::to_string(*v.vertex);
    s += " residual " + real(v.residual, 6);
    return s;
}

int cmd_check_atlas(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    CWComplex const c = load_complex(doc);
    double const hbar = resolve_hbar(cfg, doc);
    json const& aj = require(doc, "atlas");
    ChartAtlas const atlas = io::parse_atlas(aj, c, io::read_hbar(aj).value_or(hbar));
    std::vector<AtlasViolation> const violations = atlas_consistency(c, atlas, hbar, cfg.tol);
    log.info("check-atlas: {} charts, {} violations", atlas.size(), violations.size());

    std::vector<EdgePath> paths;
    if (json const* ps = find(doc, "paths"))
    {
        if (!ps->is_array())
            throw io::ParseError("\"paths\" must be an array of paths");
        for (json const& p : *ps)
        {
            paths.push_back(io::parse_path(p));
            validate_path(c, paths.back());
        }
    }

    struct PathResult
    {
        GluedFactor glued;
        double lift_deviation;
    };
    std::vector<PathResult> results;
    constexpr std::size_t n_lifts = 10;
    if (violations.empty())
        for (std::size_t i = 0; i < paths.size(); ++i)
        {
            GluedFactor g = feynman_factor_glued(c, paths[i], atlas, hbar);
            LiftInvarianceReport const lift =
                lift_invariance_check(c, paths[i], atlas, hbar, n_lifts, cfg.seed + i);
            results.push_back({std::move(g), lift.max_deviation});
        }

    if (cfg.format == "json")
    {
        json vs = json::array();
        for (AtlasViolation const& v : violations)
        {
            json jv{{"kind", v.kind}, {"charts", v.charts}, {"residual", v.residual}};
            if (v.edge)
                jv["edge"] = *v.edge;
            if (v.vertex)
                jv["vertex"] = *v.vertex;
            vs.push_back(std::move(jv));
        }
        json ps = json::array();
        for (PathResult const& p : results)
            ps.push_back({{"factor", complex_json(p.glued.value)},
                          {"first_chart", p.glued.first_chart},
                          {"last_chart", p.glued.last_chart},
                          {"schedule", p.glued.schedule},
                          {"lift_deviation", p.lift_deviation}});
        out << json{{"consistent", violations.empty()}, {"violations", vs}, {"paths", ps}}.dump(2) << "\n";
    }
    else
    {
        out << "charts: " << atlas.size() << "\n";
        out << "violations: " << violations.size() << "\n";
        for (AtlasViolation const& v : violations)
            out << "  " << violation_str(v) << "\n";
        for (std::size_t i = 0; i < results.size(); ++i)
            out << "  path " << i << " glued factor " << complex_str(results[i].glued.value) << " charts "
                << results[i].glued.first_chart << "->" << results[i].glued.last_chart << " schedule "
                << list_str(results[i].glued.schedule) << " lift deviation "
                << real(results[i].lift_deviation, 3) << "\n";
        out << (violations.empty() ? "consistent" : "inconsistent") << "\n";
    }
    return violations.empty() ? exit_ok : exit_reject;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err)
{
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto log = std::make_shared<spdlog::logger>("prequant", sink);
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::warn);
    if (char const* lvl = std::getenv("PREQUANT_LOG"))
        log->set_level(spdlog::level::from_str(lvl));
    return log;
}

int dispatch(RunConfig const& cfg, json const& doc, std::ostream& out, spdlog::logger& log)
{
    if (cfg.command == "classify")
        return cmd_classify(cfg, doc, out, log);
    if (cfg.command == "check-weil")
        return cmd_check_weil(cfg, doc, out, log);
    if (cfg.command == "holonomy")
        return cmd_holonomy(cfg, doc, out, log);
    if (cfg.command == "propagate")
        return cmd_propagate(cfg, doc, out, log);
    if (cfg.command == "demo-ab")
        return cmd_demo_ab(cfg, doc, out, log);
    if (cfg.command == "demo-exchange")
        return cmd_demo_exchange(cfg, doc, out, log);
    return cmd_check_atlas(cfg, doc, out, log);
}

} // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Prequantizations of multiply connected spaces: classification, holonomy and sector "
                 "propagators",
                 "prequant"};
    app.add_option("command", cfg.command, "One of: classify, check-weil, holonomy, propagate, demo-ab, "
                                           "demo-exchange, check-atlas")
        ->required()
        ->check(CLI::IsMember(commands));
    app.add_option("--input,-i", cfg.input, "Input JSON file");
    app.add_option("--hbar", cfg.hbar, "Planck constant (overrides the file; default 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--tol", cfg.tol, "Tolerance for integrality, flatness and angle checks")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "Seed for random lifts");
    app.add_option("--steps", cfg.steps, "Number of time steps");
    app.add_option("--flux-grid", cfg.flux_grid,
                   "start:stop:count, flux in action units; a 'pi' suffix means pi*hbar (e.g. 0:4pi:25)");
    app.add_option("--output,-o", cfg.output, "Write the report to this file instead of stdout");
    app.add_option("--format", cfg.format, "text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--engine", cfg.engine, "Sector engine: cover or enumerate")
        ->check(CLI::IsMember({"cover", "enumerate"}));

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (CLI::ParseError const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_parse_error;
    }

    auto log = make_logger(err);
    try
    {
        if (cfg.format == "csv" && cfg.command != "demo-ab")
            throw UsageError("--format csv is only available for demo-ab");
        bool const builtin = cfg.command == "demo-ab" || cfg.command == "demo-exchange";
        if (cfg.input.empty() && !builtin)
            throw UsageError("--input is required for " + cfg.command);
        json const doc = cfg.input.empty() ? json::object() : io::load_file(cfg.input);
        log->debug("loaded {}", cfg.input.empty() ? std::string("built-in fixture") : cfg.input);

        std::ostringstream report;
        int const code = dispatch(cfg, doc, report, *log);
        if (cfg.output.empty())
        {
            out << report.str();
        }
        else
        {
            std::ofstream file(cfg.output, std::ios::binary);
            if (!(file << report.str()))
            {
                err << "error: cannot write " << cfg.output << "\n";
                return exit_invalid_input;
            }
        }
        return code;
    }
    catch (UsageError const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_parse_error;
    }
    catch (io::ParseError const& e)
    {
        err << "parse error: " << e.what() << "\n";
        return exit_parse_error;
    }
    catch (Error const& e)
    {
        err << "invalid input: " << e.what() << "\n";
        return exit_invalid_input;
    }
}

} // namespace prequant::cli
