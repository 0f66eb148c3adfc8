#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "harnack/graph.hpp"

namespace harnack {

/// Line format: header `n m`, then m lines `x y w`, then optionally n lines `mu`.
/// Edge lengths and coordinates are not part of the text form.
std::string write_graph_text(const WeightedGraph& g, bool include_measure = true);
WeightedGraph read_graph_text(std::istream& in);

/// JSON form `{vertices, edges:[[x,y,w],...], measure:[...]}` plus optional
/// `lengths` and `coords`/`coord_dim`. Numbers are written with round-trip precision.
std::string write_graph_json(const WeightedGraph& g);
WeightedGraph read_graph_json(std::string_view text);

}  // namespace harnack
