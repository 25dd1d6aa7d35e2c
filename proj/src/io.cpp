#include "prequant/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace prequant::io
{

namespace
{

std::string where(std::size_t line, std::size_t column)
{
    if (line == 0)
        return {};
    return " at line " + std::to_string(line) + ", column " + std::to_string(column);
}

[[noreturn]] void schema(std::string const& context, std::string const& what)
{
    throw ParseError(context + ": " + what);
}

std::size_t as_index(json const& j, std::string const& context)
{
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
        schema(context, "expected a nonnegative integer, got " + j.dump());
    return j.get<std::size_t>();
}

std::int64_t as_integer(json const& j, std::string const& context)
{
    if (!j.is_number_integer())
        schema(context, "expected an integer, got " + j.dump());
    return j.get<std::int64_t>();
}

double as_real(json const& j, std::string const& context)
{
    if (!j.is_number())
        schema(context, "expected a number, got " + j.dump());
    return j.get<double>();
}

json const& member(json const& j, char const* key, std::string const& context)
{
    if (!j.is_object())
        schema(context, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        schema(context, std::string("missing field \"") + key + "\"");
    return *it;
}

json const& array_member(json const& j, char const* key, std::string const& context)
{
    json const& a = member(j, key, context);
    if (!a.is_array())
        schema(context + "." + key, "expected an array");
    return a;
}

std::size_t key_index(std::string const& key, std::string const& context)
{
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos)
        schema(context, "key \"" + key + "\" is not a nonnegative integer");
    return std::stoul(key);
}

Step parse_step(json const& j, std::string const& context)
{
    if (!j.is_array() || j.size() != 2)
        schema(context, "expected [edge, direction]");
    std::int64_t const dir = as_integer(j[1], context);
    if (dir != 1 && dir != -1)
        schema(context, "direction must be 1 or -1");
    return {as_index(j[0], context), static_cast<int>(dir)};
}

double unit_scale(json const& j, double hbar, std::string const& context)
{
    if (!j.contains("units"))
        return 1.0;
    std::string const u = j.at("units").is_string() ? j.at("units").get<std::string>() : "";
    if (u == "action")
        return 1.0;
    if (u == "2pi_hbar")
        return 2.0 * std::numbers::pi * hbar;
    schema(context, "units must be \"action\" or \"2pi_hbar\"");
}

std::vector<double> cochain(json const& j, char const* key, std::size_t size, double scale,
                            std::string const& context)
{
    std::vector<double> values(size, 0.0);
    if (!j.is_object() || !j.contains(key))
        return values;
    json const& m = j.at(key);
    std::string const ctx = context + "." + key;
    if (m.is_array())
    {
        if (m.size() != size)
            schema(ctx, "array has " + std::to_string(m.size()) + " values, expected "
                            + std::to_string(size));
        for (std::size_t i = 0; i < size; ++i)
            values[i] = scale * as_real(m[i], ctx);
        return values;
    }
    if (!m.is_object())
        schema(ctx, "expected an object keyed by index or an array");
    for (auto const& [k, v] : m.items())
    {
        std::size_t const i = key_index(k, ctx);
        if (i >= size)
            schema(ctx, "index " + k + " out of range (" + std::to_string(size) + ")");
        values[i] = scale * as_real(v, ctx);
    }
    return values;
}

Amplitude parse_amplitude(json const& j, std::string const& context)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2)
        return {as_real(j[0], context), as_real(j[1], context)};
    schema(context, "amplitude must be a number or [re, im]");
}

} // namespace

ParseError::ParseError(std::string const& message, std::size_t line, std::size_t column)
    : Error(message + where(line, column)), line_(line), column_(column)
{
}

json parse_text(std::string const& text)
{
    try
    {
        return json::parse(text);
    }
    catch (json::parse_error const& e)
    {
        // e.byte is the 1-based offset of the offending character.
        std::size_t const offset = e.byte == 0 ? 0 : e.byte - 1;
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                column = 1;
            }
            else
            {
                ++column;
            }
        }
        throw ParseError("malformed JSON", line, column);
    }
}

json load_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open input file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try
    {
        return parse_text(ss.str());
    }
    catch (ParseError const& e)
    {
        throw ParseError(path + ": malformed JSON", e.line(), e.column());
    }
}

FinitePresentation parse_presentation(json const& j)
{
    std::string const ctx = "presentation";
    std::size_t const n = as_index(member(j, "generators", ctx), ctx + ".generators");
    std::vector<GroupWord> relators;
    if (j.contains("relators"))
    {
        json const& rs = array_member(j, "relators", ctx);
        for (std::size_t r = 0; r < rs.size(); ++r)
        {
            std::string const rctx = ctx + ".relators[" + std::to_string(r) + "]";
            if (!rs[r].is_array())
                schema(rctx, "expected a list of [generator, exponent]");
            std::vector<Letter> letters;
            for (json const& l : rs[r])
            {
                if (!l.is_array() || l.size() != 2)
                    schema(rctx, "expected [generator, exponent]");
                letters.push_back({as_index(l[0], rctx), as_integer(l[1], rctx)});
            }
            relators.emplace_back(std::move(letters));
        }
    }
    try
    {
        return FinitePresentation(n, std::move(relators));
    }
    catch (ValidationError const& e)
    {
        throw ParseError(ctx + ": " + e.what());
    }
}

CWComplex parse_complex(json const& j)
{
    std::string const ctx = "complex";
    CWComplex c;
    c.n_vertices = as_index(member(j, "vertices", ctx), ctx + ".vertices");
    if (j.contains("edges"))
    {
        json const& es = array_member(j, "edges", ctx);
        for (std::size_t i = 0; i < es.size(); ++i)
        {
            std::string const ectx = ctx + ".edges[" + std::to_string(i) + "]";
            if (!es[i].is_array() || es[i].size() != 2)
                schema(ectx, "expected [tail, head]");
            c.edges.push_back({as_index(es[i][0], ectx), as_index(es[i][1], ectx)});
        }
    }
    if (j.contains("faces"))
    {
        json const& fs = array_member(j, "faces", ctx);
        for (std::size_t f = 0; f < fs.size(); ++f)
        {
            std::string const fctx = ctx + ".faces[" + std::to_string(f) + "]";
            if (!fs[f].is_array())
                schema(fctx, "expected a list of [edge, direction]");
            BoundaryWord w;
            for (json const& s : fs[f])
                w.push_back(parse_step(s, fctx));
            c.faces.push_back(std::move(w));
        }
    }
    return c;
}

EdgePath parse_path(json const& j)
{
    std::string const ctx = "path";
    EdgePath p;
    p.start = as_index(member(j, "start", ctx), ctx + ".start");
    if (j.contains("steps"))
        for (json const& s : array_member(j, "steps", ctx))
            p.steps.push_back(parse_step(s, ctx + ".steps"));
    return p;
}

std::optional<double> read_hbar(json const& j)
{
    if (!j.is_object() || !j.contains("hbar"))
        return std::nullopt;
    double const h = as_real(j.at("hbar"), "hbar");
    if (!(h > 0.0) || !std::isfinite(h))
        schema("hbar", "must be positive");
    return h;
}

DiscreteOneForm parse_one_form(json const& j, CWComplex const& c, double hbar)
{
    double const scale = unit_scale(j, hbar, "one_form");
    return {cochain(j, "edges", c.edges.size(), scale, "one_form")};
}

DiscreteTwoForm parse_two_form(json const& j, CWComplex const& c, double hbar)
{
    double const scale = unit_scale(j, hbar, "two_form");
    return {cochain(j, "faces", c.faces.size(), scale, "two_form")};
}

ChartAtlas parse_atlas(json const& j, CWComplex const& c, double hbar)
{
    std::string const ctx = "atlas";
    double const scale = unit_scale(j, hbar, ctx);
    std::vector<Chart> charts;
    json const& cs = array_member(j, "charts", ctx);
    for (std::size_t k = 0; k < cs.size(); ++k)
    {
        std::string const cctx = ctx + ".charts[" + std::to_string(k) + "]";
        Chart chart;
        for (json const& v : array_member(cs[k], "vertices", cctx))
            chart.vertices.push_back(as_index(v, cctx + ".vertices"));
        if (cs[k].contains("potential"))
        {
            json const& pot = cs[k].at("potential");
            if (!pot.is_object())
                schema(cctx + ".potential", "expected an object keyed by edge index");
            for (auto const& [e, value] : pot.items())
                chart.potential[key_index(e, cctx + ".potential")] =
                    scale * as_real(value, cctx + ".potential");
        }
        charts.push_back(std::move(chart));
    }

    std::map<std::pair<std::size_t, std::size_t>, TransitionTable> transitions;
    if (j.contains("transitions"))
    {
        json const& ts = array_member(j, "transitions", ctx);
        for (std::size_t t = 0; t < ts.size(); ++t)
        {
            std::string const tctx = ctx + ".transitions[" + std::to_string(t) + "]";
            json const& pair = array_member(ts[t], "charts", tctx);
            if (pair.size() != 2)
                schema(tctx, "charts must be [j, k]");
            auto const key = std::make_pair(as_index(pair[0], tctx), as_index(pair[1], tctx));
            json const& angles = member(ts[t], "angles", tctx);
            if (!angles.is_object())
                schema(tctx + ".angles", "expected an object keyed by vertex index");
            for (auto const& [v, value] : angles.items())
                transitions[key][key_index(v, tctx + ".angles")] = as_real(value, tctx + ".angles");
        }
    }
    return ChartAtlas(c, std::move(charts), std::move(transitions));
}

StepRule parse_step_rule(json const& j, CWComplex const& c)
{
    std::string const ctx = "rule";
    if (!j.is_object())
        schema(ctx, "expected an object");
    if (j.contains("lambda"))
        return default_step_rule(c, as_real(j.at("lambda"), ctx + ".lambda"));

    StepRule rule = default_step_rule(c);
    if (j.contains("edge_amplitudes"))
    {
        json const& a = array_member(j, "edge_amplitudes", ctx);
        if (a.size() != c.edges.size())
            schema(ctx + ".edge_amplitudes", "need one amplitude per edge");
        for (std::size_t e = 0; e < a.size(); ++e)
            rule.edge_amplitudes[e] = parse_amplitude(a[e], ctx + ".edge_amplitudes");
    }
    if (j.contains("stay_amplitudes"))
    {
        json const& a = array_member(j, "stay_amplitudes", ctx);
        if (a.size() != c.n_vertices)
            schema(ctx + ".stay_amplitudes", "need one amplitude per vertex");
        for (std::size_t v = 0; v < a.size(); ++v)
            rule.stay_amplitudes[v] = parse_amplitude(a[v], ctx + ".stay_amplitudes");
    }
    return rule;
}

json to_json(Character const& chi)
{
    return json{{"free_angles", chi.free_angles()}, {"torsion_labels", chi.torsion_labels()}};
}

Character character_from_json(json const& j)
{
    std::string const ctx = "character";
    std::vector<double> angles;
    std::vector<std::int64_t> labels;
    if (j.contains("free_angles"))
        for (json const& a : array_member(j, "free_angles", ctx))
            angles.push_back(as_real(a, ctx + ".free_angles"));
    if (j.contains("torsion_labels"))
        for (json const& k : array_member(j, "torsion_labels", ctx))
            labels.push_back(as_integer(k, ctx + ".torsion_labels"));
    return Character(std::move(angles), std::move(labels));
}

json to_json(GroupWord const& w)
{
    json out = json::array();
    for (Letter const& l : w.letters())
        out.push_back({l.generator, l.exponent});
    return out;
}

} // namespace prequant::io
