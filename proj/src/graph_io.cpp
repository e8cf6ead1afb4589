#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tam/errors.hpp"
#include "tam/graph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tam {
namespace {

void build_right_from_left(BipartiteRegularGraph& g) {
  g.right_adj.assign(static_cast<size_t>(g.n) * g.d, 0);
  std::vector<int> fill(g.n, 0);
  for (int i = 0; i < g.n; ++i)
    for (int l = 0; l < g.d; ++l) {
      const int32_t j = g.left_adj[static_cast<size_t>(i) * g.d + l];
      if (j < 0 || j >= g.n) throw InconsistencyError("graph: neighbor index out of range");
      if (fill[j] >= g.d) throw InconsistencyError("graph: right vertex degree exceeds d");
      g.right_adj[static_cast<size_t>(j) * g.d + fill[j]++] = i;
    }
  for (int j = 0; j < g.n; ++j)
    if (fill[j] != g.d) throw InconsistencyError("graph: right vertex degree below d");
}

std::string slot_name(const char* prefix, int t, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02d.%s", prefix, t, ext);
  return buf;
}

}  // namespace

void write_graph(const BipartiteRegularGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << g.n << ' ' << g.d << '\n';
  for (int i = 0; i < g.n; ++i) {
    for (int l = 0; l < g.d; ++l)
      out << g.left_neighbors(i)[l] << (l + 1 < g.d ? ' ' : '\n');
  }
}

BipartiteRegularGraph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path);
  BipartiteRegularGraph g;
  if (!(in >> g.n >> g.d) || g.n < 1 || g.d < 1 || g.d > g.n)
    throw InconsistencyError("graph header invalid: " + path);
  g.left_adj.resize(static_cast<size_t>(g.n) * g.d);
  for (size_t e = 0; e < g.left_adj.size(); ++e)
    if (!(in >> g.left_adj[e])) throw InconsistencyError("graph truncated: " + path);
  for (int i = 0; i < g.n; ++i) {
    const int32_t* blk = g.left_neighbors(i);
    for (int l = 1; l < g.d; ++l)
      if (blk[l] <= blk[l - 1])
        throw InconsistencyError("graph adjacency not sorted/simple: " + path);
  }
  build_right_from_left(g);
  return g;
}

void write_edge_values(const BipartiteRegularGraph& g, const EdgeValues& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  char buf[40];
  for (int i = 0; i < g.n; ++i)
    for (int l = 0; l < g.d; ++l) {
      std::snprintf(buf, sizeof buf, "%.17g", v.by_left[static_cast<size_t>(i) * g.d + l]);
      out << i << ',' << g.left_neighbors(i)[l] << ',' << buf << '\n';
    }
}

EdgeValues read_edge_values(const BipartiteRegularGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path);
  std::map<std::pair<int, int>, double> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!std::isdigit(static_cast<unsigned char>(line[0]))) continue;  // tolerate a header
    std::stringstream ss(line);
    std::string cell;
    int fields[2];
    for (int f = 0; f < 2; ++f) {
      if (!std::getline(ss, cell, ',')) throw InconsistencyError("bad triplet row: " + path);
      fields[f] = std::stoi(cell);
    }
    if (!std::getline(ss, cell)) throw InconsistencyError("bad triplet row: " + path);
    if (!entries.emplace(std::make_pair(fields[0], fields[1]), std::stod(cell)).second)
      throw InconsistencyError("duplicate triplet: " + path);
  }
  if (entries.size() != g.left_adj.size())
    throw InconsistencyError("triplet count does not match edge count: " + path);
  EdgeValues v;
  v.by_left.resize(g.left_adj.size());
  v.by_right.resize(g.right_adj.size());
  for (int i = 0; i < g.n; ++i)
    for (int l = 0; l < g.d; ++l) {
      auto it = entries.find({i, g.left_neighbors(i)[l]});
      if (it == entries.end())
        throw InconsistencyError("value keyed outside the edge set: " + path);
      v.by_left[static_cast<size_t>(i) * g.d + l] = it->second;
    }
  for (int j = 0; j < g.n; ++j)
    for (int l = 0; l < g.d; ++l)
      v.by_right[static_cast<size_t>(j) * g.d + l] = entries.at({g.right_neighbors(j)[l], j});
  return v;
}

void write_schedule(const SampleSchedule& s, const std::string& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["n"] = s.n;
  manifest["d"] = s.d;
  manifest["N"] = s.N;
  manifest["seed"] = s.seed;
  json graph_files = json::array(), value_files = json::array();
  for (size_t t = 0; t < s.graphs.size(); ++t) {
    const std::string gname = slot_name("graph", static_cast<int>(t), "txt");
    const std::string vname = slot_name("values", static_cast<int>(t), "csv");
    write_graph(s.graphs[t], (fs::path(dir) / gname).string());
    write_edge_values(s.graphs[t], s.values[t], (fs::path(dir) / vname).string());
    graph_files.push_back(gname);
    value_files.push_back(vname);
  }
  manifest["graphs"] = graph_files;
  manifest["values"] = value_files;
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << '\n';
}

SampleSchedule read_schedule(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error("cannot open: " + manifest_path);
  json manifest = json::parse(in);
  SampleSchedule s;
  s.n = manifest.at("n").get<int>();
  s.d = manifest.at("d").get<int>();
  s.N = manifest.at("N").get<int>();
  s.seed = manifest.value("seed", uint64_t{0});
  const auto& gfiles = manifest.at("graphs");
  const auto& vfiles = manifest.at("values");
  if (gfiles.size() != vfiles.size() || static_cast<int>(gfiles.size()) != 2 * s.N + 1)
    throw InconsistencyError("manifest must list 2N+1 graph/value pairs");
  const fs::path base = fs::path(manifest_path).parent_path();
  for (size_t t = 0; t < gfiles.size(); ++t) {
    BipartiteRegularGraph g = read_graph((base / gfiles[t].get<std::string>()).string());
    if (g.n != s.n || g.d != s.d)
      throw InconsistencyError("graph shape disagrees with manifest");
    s.values.push_back(read_edge_values(g, (base / vfiles[t].get<std::string>()).string()));
    s.graphs.push_back(std::move(g));
  }
  return s;
}

}  // namespace tam
