#include "consensus/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "consensus/error.hpp"

namespace consensus::io {

namespace {

// Reads the next non-empty, non-comment line; false at end of input.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

template <class... T>
void parse_fields(const std::string& line, const char* what, T&... fields) {
  std::istringstream ss(line);
  if (!(ss >> ... >> fields)) throw Error(Errc::parse, std::string("malformed ") + what + ": '" + line + "'");
  std::string extra;
  if (ss >> extra) throw Error(Errc::parse, std::string("trailing data in ") + what + ": '" + line + "'");
}

Graph read_graph_body(std::istream& in, const std::string& header) {
  std::size_t n = 0, m = 0;
  parse_fields(header, "graph header", n, m);
  std::vector<Arc> arcs;
  arcs.reserve(m);
  std::string line;
  for (std::size_t k = 0; k < m; ++k) {
    if (!next_line(in, line)) throw Error(Errc::parse, "graph ended after " + std::to_string(k) + " of " +
                                                           std::to_string(m) + " arcs");
    Arc a{};
    parse_fields(line, "arc", a.from, a.to);
    if (a.from >= n || a.to >= n) throw Error(Errc::parse, "arc out of range: '" + line + "'");
    if (a.from != a.to) arcs.push_back(a);
  }
  return Graph(n, arcs);
}

template <class F>
auto with_input(const std::string& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path + "' for reading");
  return f(in);
}

template <class F>
void with_output(const std::string& path, F&& f) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot open '" + path + "' for writing");
  f(out);
  if (!out) throw Error(Errc::io, "write to '" + path + "' failed");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Graph read_graph(std::istream& in) {
  std::string header;
  if (!next_line(in, header)) throw Error(Errc::parse, "empty graph input");
  return read_graph_body(in, header);
}

void write_graph(std::ostream& out, const Graph& g) {
  const auto arcs = g.non_self_arcs();
  out << g.size() << ' ' << arcs.size() << '\n';
  for (const Arc& a : arcs) out << a.from << ' ' << a.to << '\n';
}

GraphSequence read_sequence(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw Error(Errc::parse, "empty sequence input");
  std::size_t n = 0, window = 0, period = 0;
  parse_fields(line, "sequence header", n, window, period);
  if (period == 0) throw Error(Errc::parse, "sequence period must be positive");
  std::vector<Graph> graphs;
  for (std::size_t p = 0; p < period; ++p) {
    if (p > 0) {
      if (!next_line(in, line) || line.find("---") == std::string::npos)
        throw Error(Errc::parse, "expected '---' separator before graph block " + std::to_string(p));
    }
    if (!next_line(in, line)) throw Error(Errc::parse, "missing graph block " + std::to_string(p));
    Graph g = read_graph_body(in, line);
    if (g.size() != n) throw Error(Errc::parse, "graph block " + std::to_string(p) + " has wrong node count");
    graphs.push_back(std::move(g));
  }
  return GraphSequence::periodic(std::move(graphs), window);
}

void write_sequence(std::ostream& out, const GraphSequence& seq) {
  if (seq.period().empty()) throw Error(Errc::invalid_argument, "only periodic sequences can be written");
  out << seq.size() << ' ' << seq.window() << ' ' << seq.period().size() << '\n';
  bool first = true;
  for (const Graph& g : seq.period()) {
    if (!first) out << "---\n";
    first = false;
    write_graph(out, g);
  }
}

WeightMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw Error(Errc::parse, "empty matrix input");
  std::size_t n = 0;
  parse_fields(line, "matrix header", n);
  if (n == 0) throw Error(Errc::parse, "matrix size must be positive");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line(in, line)) throw Error(Errc::parse, "matrix ended at row " + std::to_string(i));
    std::istringstream ss(line);
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (!(ss >> v)) throw Error(Errc::parse, "matrix row " + std::to_string(i) + " has fewer than n entries");
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
    std::string extra;
    if (ss >> extra) throw Error(Errc::parse, "matrix row " + std::to_string(i) + " has more than n entries");
  }
  return WeightMatrix::from_dense(std::move(a));
}

void write_matrix(std::ostream& out, const WeightMatrix& a) {
  out << a.size() << '\n';
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) out << (j ? " " : "") << format_double(a(i, j));
    out << '\n';
  }
}

std::vector<double> read_vector(std::istream& in) {
  std::vector<double> v;
  std::string line;
  while (next_line(in, line)) {
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) {
      double x = 0.0;
      auto res = std::from_chars(token.data(), token.data() + token.size(), x);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw Error(Errc::parse, "bad number '" + token + "' in vector input");
      v.push_back(x);
    }
  }
  return v;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace, bool full_state) {
  const bool with_state = full_state && trace.states.size() == trace.records.size();
  out << "t,max_dev,V,sum";
  const std::size_t n = with_state && !trace.states.empty() ? trace.states.front().size() : 0;
  for (std::size_t i = 0; i < n; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const TraceRecord& r = trace.records[k];
    out << r.t << ',' << format_double(r.max_dev) << ',' << format_double(r.lyapunov) << ','
        << format_double(r.sum);
    if (with_state)
      for (double v : trace.states[k]) out << ',' << format_double(v);
    out << '\n';
  }
}

Graph load_graph(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_graph(in); });
}

void save_graph(const std::string& path, const Graph& g) {
  with_output(path, [&](std::ostream& out) { write_graph(out, g); });
}

GraphSequence load_sequence(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_sequence(in); });
}

void save_sequence(const std::string& path, const GraphSequence& seq) {
  with_output(path, [&](std::ostream& out) { write_sequence(out, seq); });
}

WeightMatrix load_matrix(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_matrix(in); });
}

std::vector<double> load_vector(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_vector(in); });
}

}  // namespace consensus::io
