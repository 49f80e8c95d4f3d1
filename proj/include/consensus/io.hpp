#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "consensus/engine.hpp"
#include "consensus/graph.hpp"
#include "consensus/weights.hpp"

namespace consensus::io {

// Graph text: "n m", then m lines "u v" (arc u->v, 0-based). Self-arcs are
// implicit and never written.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

// Sequence text: "n B P", then P graph blocks separated by lines "---".
GraphSequence read_sequence(std::istream& in);
void write_sequence(std::ostream& out, const GraphSequence& seq);

// Matrix text: "n", then n rows of n whitespace-separated decimals.
WeightMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const WeightMatrix& a);

/// Whitespace-separated decimals; '#' starts a comment.
std::vector<double> read_vector(std::istream& in);

/// Columns t,max_dev,V,sum and, with full_state, x0..x{n-1}.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace, bool full_state);

Graph load_graph(const std::string& path);
void save_graph(const std::string& path, const Graph& g);
GraphSequence load_sequence(const std::string& path);
void save_sequence(const std::string& path, const GraphSequence& seq);
WeightMatrix load_matrix(const std::string& path);
std::vector<double> load_vector(const std::string& path);

/// Shortest decimal that round-trips a double.
std::string format_double(double v);

}  // namespace consensus::io
