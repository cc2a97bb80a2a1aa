#include "gmatch/dataset_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gmatch/error.hpp"

namespace gmatch {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += ' ';
  out += buf;
}

void append_tensor(std::string& out, const Tensor& t) {
  for (std::int64_t i = 0; i < t.numel(); ++i) append_double(out, t.data()[i]);
}

class TokenReader {
 public:
  TokenReader(const std::string& line, int record) : record_(record) {
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) tokens_.push_back(tok);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError("dataset record " + std::to_string(record_) + ": " + what);
  }

  const std::string& next(const char* what) {
    if (pos_ >= tokens_.size()) fail(std::string("unexpected end of record, expected ") + what);
    return tokens_[pos_++];
  }

  void expect(const char* literal) {
    const std::string& tok = next(literal);
    if (tok != literal) fail("expected '" + std::string(literal) + "', got '" + tok + "'");
  }

  int next_int(const char* what) {
    const std::string& tok = next(what);
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') fail("malformed integer '" + tok + "' for " + what);
    return static_cast<int>(v);
  }

  double next_double(const char* what) {
    const std::string& tok = next(what);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail("malformed number '" + tok + "' for " + what);
    return v;
  }

  bool at_section_end() const { return pos_ >= tokens_.size() || tokens_[pos_] == "|"; }
  bool done() const { return pos_ >= tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  int record_;
};

void read_tensor(TokenReader& r, Tensor& t, const char* what) {
  for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = r.next_double(what);
}

void read_edges(TokenReader& r, int n, std::vector<std::pair<int, int>>& edges, const char* what) {
  while (!r.at_section_end()) {
    const int i = r.next_int(what);
    const int j = r.next_int(what);
    if (i < 0 || j < 0 || i >= n || j >= n || i >= j) {
      r.fail(std::string(what) + ": bad edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    edges.emplace_back(i, j);
  }
}

}  // namespace

std::string encode_pair(const MatchingPair& pair) {
  validate_pair(pair);
  const int n = pair.n();
  const int dn = pair.g1.feature_dim();
  const int de = pair.g1.edge_features.dim();
  std::string out = "pair " + std::to_string(n) + " " + std::to_string(dn) + " " + std::to_string(de);

  const auto graph_sections = [&](const KeypointGraph& g, std::string& s) {
    s += " |";
    append_tensor(s, g.coords);
  };
  graph_sections(pair.g1, out);
  graph_sections(pair.g2, out);
  out += " |";
  append_tensor(out, pair.g1.node_features);
  out += " |";
  append_tensor(out, pair.g2.node_features);
  for (const KeypointGraph* g : {&pair.g1, &pair.g2}) {
    out += " |";
    for (auto [i, j] : g->edge_list()) out += " " + std::to_string(i) + " " + std::to_string(j);
  }
  for (const KeypointGraph* g : {&pair.g1, &pair.g2}) {
    out += " |";
    for (int e = 0; e < g->edge_features.count(); ++e) {
      out += " " + std::to_string(g->edge_features.edges[e].first) + " " +
             std::to_string(g->edge_features.edges[e].second);
      for (int d = 0; d < de; ++d) append_double(out, g->edge_features.features.at(e, d));
    }
  }
  out += " |";
  for (int i = 0; i < n; ++i) out += " " + std::to_string(pair.gt(i));
  return out;
}

MatchingPair decode_pair(const std::string& line, int record_index) {
  TokenReader r(line, record_index);
  r.expect("pair");
  const int n = r.next_int("n");
  const int dn = r.next_int("node feature dim");
  const int de = r.next_int("edge feature dim");
  if (n < 1 || dn < 0 || de < 0) r.fail("bad header sizes");

  MatchingPair pair;
  pair.g1.n = n;
  pair.g2.n = n;
  for (KeypointGraph* g : {&pair.g1, &pair.g2}) {
    r.expect("|");
    g->coords = Tensor(Shape{n, 2});
    read_tensor(r, g->coords, "coords");
  }
  for (KeypointGraph* g : {&pair.g1, &pair.g2}) {
    r.expect("|");
    g->node_features = Tensor(Shape{n, dn});
    read_tensor(r, g->node_features, "node features");
  }
  for (KeypointGraph* g : {&pair.g1, &pair.g2}) {
    r.expect("|");
    std::vector<std::pair<int, int>> edges;
    read_edges(r, n, edges, "adjacency");
    g->adjacency = adjacency_from_edges(n, edges);
  }
  for (KeypointGraph* g : {&pair.g1, &pair.g2}) {
    r.expect("|");
    std::vector<std::pair<int, int>> edges;
    std::vector<double> feats;
    while (!r.at_section_end()) {
      const int i = r.next_int("edge feature key");
      const int j = r.next_int("edge feature key");
      edges.emplace_back(i, j);
      for (int d = 0; d < de; ++d) feats.push_back(r.next_double("edge feature"));
    }
    g->edge_features.edges = std::move(edges);
    g->edge_features.features = Tensor(Shape{static_cast<int>(g->edge_features.edges.size()), de},
                                       std::move(feats));
  }
  r.expect("|");
  std::vector<int> gt;
  gt.reserve(n);
  while (!r.done()) gt.push_back(r.next_int("ground truth index"));
  if (static_cast<int>(gt.size()) != n) {
    r.fail("ground-truth permutation has " + std::to_string(gt.size()) + " entries for n=" +
           std::to_string(n));
  }
  try {
    pair.gt = PermutationMatrix::from_indices(std::move(gt));
    validate_pair(pair);
  } catch (const NumericError& e) {
    r.fail(e.what());
  }
  return pair;
}

void save_pairs(const std::string& path, const std::vector<MatchingPair>& pairs) {
  std::ofstream os(path);
  if (!os) throw IoError("save_pairs: cannot open '" + path + "' for writing");
  for (const MatchingPair& p : pairs) os << encode_pair(p) << '\n';
  os.flush();
  if (!os) throw IoError("save_pairs: write to '" + path + "' failed");
}

std::vector<MatchingPair> load_pairs(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("load_pairs: cannot open '" + path + "'");
  std::vector<MatchingPair> pairs;
  std::string line;
  int record = 0;
  while (std::getline(is, line)) {
    ++record;
    if (line.empty() || line[0] == '#') continue;
    pairs.push_back(decode_pair(line, record));
  }
  return pairs;
}

}  // namespace gmatch
