#ifndef PREQUANT_IO_HPP
#define PREQUANT_IO_HPP

#include <cstddef>
#include <optional>
#include <string>

#include "json.hpp"

#include "prequant/bundle.hpp"
#include "prequant/complex.hpp"
#include "prequant/error.hpp"
#include "prequant/homology.hpp"
#include "prequant/propagator.hpp"

namespace prequant::io
{

using nlohmann::json;

/// Malformed text or a document that does not match the expected schema.
class ParseError : public Error
{
public:
    ParseError(std::string const& message, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parse text, reporting syntax errors with 1-based line and column.
json parse_text(std::string const& text);
json load_file(std::string const& path);

// Schemas:
//   presentation  {"generators": n, "relators": [[[gen, exp], ...], ...]}
//   complex       {"vertices": n, "edges": [[tail, head], ...], "faces": [[[edge, dir], ...], ...]}
//   path          {"start": v, "steps": [[edge, dir], ...]}
//   forms         {"hbar": h, "units": "action" | "2pi_hbar", "edges": {i: x}, "faces": {i: x}}
//   atlas         {"hbar": h, "units": ..., "charts": [{"vertices": [...], "potential": {e: x}}],
//                  "transitions": [{"charts": [j, k], "angles": {v: phi}}]}
//   rule          {"lambda": x} or {"edge_amplitudes": [a, ...], "stay_amplitudes": [a, ...]}
//                 where a is a number or [re, im]
//   character     {"free_angles": [...], "torsion_labels": [...]}

FinitePresentation parse_presentation(json const& j);
CWComplex parse_complex(json const& j);
EdgePath parse_path(json const& j);

/// Missing entries default to zero; "units": "2pi_hbar" scales values by 2 pi hbar.
DiscreteOneForm parse_one_form(json const& j, CWComplex const& c, double hbar);
DiscreteTwoForm parse_two_form(json const& j, CWComplex const& c, double hbar);
ChartAtlas parse_atlas(json const& j, CWComplex const& c, double hbar);
StepRule parse_step_rule(json const& j, CWComplex const& c);

/// The "hbar" field of an object, if present; must be positive.
std::optional<double> read_hbar(json const& j);

json to_json(Character const& chi);
Character character_from_json(json const& j);
json to_json(GroupWord const& w);

} // namespace prequant::io

#endif
