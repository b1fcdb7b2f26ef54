#include "vins/interactions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace vins {

namespace {

std::uint64_t edge_key(std::int64_t u, std::int64_t i) {
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(i);
}

}  // namespace

InteractionGraph InteractionGraph::from_edges(std::int64_t n_users, std::int64_t n_items,
                                              const std::vector<TimedEdge>& edges) {
  if (n_users <= 0 || n_items <= 0) throw std::invalid_argument("graph needs at least one user and item");
  InteractionGraph g;
  g.n_users_ = n_users;
  g.n_items_ = n_items;
  g.items_by_user_.resize(n_users);
  g.times_by_user_.resize(n_users);
  g.item_degree_.assign(n_items, 0);
  g.edge_keys_.reserve(edges.size() * 2);

  // Collect per user in input order, then stable-sort by timestamp so the
  // input order breaks ties.
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> per_user(n_users);
  for (const TimedEdge& e : edges) {
    if (e.user < 0 || e.user >= n_users || e.item < 0 || e.item >= n_items)
      throw std::invalid_argument("edge index out of range");
    if (!g.edge_keys_.insert(edge_key(e.user, e.item)).second)
      throw std::invalid_argument("duplicate edge in graph construction");
    per_user[e.user].emplace_back(e.item, e.timestamp);
    g.item_degree_[e.item] += 1;
    g.edge_count_ += 1;
  }
  for (std::int64_t u = 0; u < n_users; ++u) {
    auto& lst = per_user[u];
    std::stable_sort(lst.begin(), lst.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    g.items_by_user_[u].reserve(lst.size());
    g.times_by_user_[u].reserve(lst.size());
    for (const auto& [item, ts] : lst) {
      g.items_by_user_[u].push_back(item);
      g.times_by_user_[u].push_back(ts);
    }
  }
  return g;
}

bool InteractionGraph::contains_edge(std::int64_t u, std::int64_t i) const {
  if (u < 0 || u >= n_users_ || i < 0 || i >= n_items_)
    throw std::domain_error("contains_edge: index out of range");
  return edge_keys_.count(edge_key(u, i)) != 0;
}

bool contains_edge(const InteractionGraph& graph, std::int64_t u, std::int64_t i) {
  return graph.contains_edge(u, i);
}

std::vector<RawInteraction> parse_interactions(std::istream& in, const std::string& source) {
  std::vector<RawInteraction> out;
  std::string line;
  std::int64_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      fail("expected `user<TAB>item<TAB>timestamp`");
    RawInteraction r;
    r.user_key = line.substr(0, t1);
    r.item_key = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string ts_text = line.substr(t2 + 1);
    if (r.user_key.empty() || r.item_key.empty()) fail("empty user or item key");
    const char* first = ts_text.data();
    const char* last = ts_text.data() + ts_text.size();
    auto [ptr, ec] = std::from_chars(first, last, r.timestamp);
    if (ec != std::errc{} || ptr != last) fail("bad timestamp `" + ts_text + "`");
    if (r.timestamp < 0) fail("negative timestamp");
    out.push_back(std::move(r));
  }
  return out;
}

IndexedGraph build_filtered(const std::vector<RawInteraction>& raw, std::int64_t min_degree) {
  if (min_degree < 0) throw std::domain_error("min_degree must be >= 0");

  // Dedup (user, item), keeping the first occurrence and its timestamp.
  struct Edge {
    std::string user, item;
    std::int64_t timestamp;
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  std::unordered_map<std::string, bool> seen;
  seen.reserve(raw.size() * 2);
  for (const RawInteraction& r : raw) {
    std::string key = r.user_key + '\t' + r.item_key;
    if (seen.emplace(std::move(key), true).second)
      edges.push_back({r.user_key, r.item_key, r.timestamp});
  }

  // Iterated degree pruning: removing a vertex can drop its neighbors below
  // the threshold, so repeat until a fixpoint.
  std::vector<bool> alive(edges.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, std::int64_t> user_deg, item_deg;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!alive[k]) continue;
      user_deg[edges[k].user] += 1;
      item_deg[edges[k].item] += 1;
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!alive[k]) continue;
      if (user_deg[edges[k].user] < min_degree || item_deg[edges[k].item] < min_degree) {
        alive[k] = false;
        changed = true;
      }
    }
  }

  IndexedGraph out;
  std::unordered_map<std::string, std::int64_t> user_index, item_index;
  std::vector<TimedEdge> indexed;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!alive[k]) continue;
    auto [uit, unew] = user_index.emplace(edges[k].user, static_cast<std::int64_t>(out.user_keys.size()));
    if (unew) out.user_keys.push_back(edges[k].user);
    auto [iit, inew] = item_index.emplace(edges[k].item, static_cast<std::int64_t>(out.item_keys.size()));
    if (inew) out.item_keys.push_back(edges[k].item);
    indexed.push_back({uit->second, iit->second, edges[k].timestamp});
  }
  if (indexed.empty()) throw std::domain_error("no interactions survive degree filtering");
  out.graph = InteractionGraph::from_edges(static_cast<std::int64_t>(out.user_keys.size()),
                                           static_cast<std::int64_t>(out.item_keys.size()), indexed);
  return out;
}

IndexedGraph load_interactions(const std::string& path, std::int64_t min_degree) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return build_filtered(parse_interactions(in, path), min_degree);
}

std::pair<InteractionGraph, InteractionGraph> chronological_split(const InteractionGraph& graph,
                                                                  double holdout_fraction) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw std::domain_error("holdout_fraction must lie in (0,1)");
  std::vector<TimedEdge> train_edges, test_edges;
  for (std::int64_t u = 0; u < graph.n_users(); ++u) {
    const auto& items = graph.items_of(u);
    const auto& times = graph.times_of(u);
    const std::int64_t n = static_cast<std::int64_t>(items.size());
    if (n < 2) throw std::domain_error("chronological_split: user " + std::to_string(u) +
                                       " has fewer than 2 interactions");
    // floor with a hair of slack so exact multiples of 1/n land on the
    // intended integer; raised to 1 so every user stays evaluable.
    std::int64_t holdout = static_cast<std::int64_t>(std::floor(holdout_fraction * static_cast<double>(n) + 1e-9));
    holdout = std::max<std::int64_t>(1, holdout);
    const std::int64_t cut = n - holdout;
    for (std::int64_t k = 0; k < n; ++k)
      (k < cut ? train_edges : test_edges).push_back({u, items[k], times[k]});
  }
  return {InteractionGraph::from_edges(graph.n_users(), graph.n_items(), train_edges),
          InteractionGraph::from_edges(graph.n_users(), graph.n_items(), test_edges)};
}

void save_key_index(const std::string& path, const std::vector<std::string>& keys) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t k = 0; k < keys.size(); ++k) out << keys[k] << '\t' << k << '\n';
}

std::vector<std::string> load_key_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> keys;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected `key<TAB>index`");
    const std::string key = line.substr(0, tab);
    std::int64_t idx = -1;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, idx);
    if (ec != std::errc{} || ptr != last || idx != static_cast<std::int64_t>(keys.size()))
      throw ParseError(path + ":" + std::to_string(line_no) + ": indices must be dense and in order");
    keys.push_back(key);
  }
  return keys;
}

void write_interactions(const std::string& path, const InteractionGraph& graph,
                        const std::vector<std::string>& user_keys,
                        const std::vector<std::string>& item_keys) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (std::int64_t u = 0; u < graph.n_users(); ++u) {
    const auto& items = graph.items_of(u);
    const auto& times = graph.times_of(u);
    for (std::size_t k = 0; k < items.size(); ++k)
      out << user_keys[u] << '\t' << item_keys[items[k]] << '\t' << times[k] << '\n';
  }
}

InteractionGraph load_with_index(const std::string& path,
                                 const std::vector<std::string>& user_keys,
                                 const std::vector<std::string>& item_keys) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::unordered_map<std::string, std::int64_t> user_index, item_index;
  for (std::size_t k = 0; k < user_keys.size(); ++k) user_index[user_keys[k]] = static_cast<std::int64_t>(k);
  for (std::size_t k = 0; k < item_keys.size(); ++k) item_index[item_keys[k]] = static_cast<std::int64_t>(k);
  std::vector<TimedEdge> edges;
  for (const RawInteraction& r : parse_interactions(in, path)) {
    const auto uit = user_index.find(r.user_key);
    const auto iit = item_index.find(r.item_key);
    if (uit == user_index.end()) throw ParseError(path + ": unknown user key `" + r.user_key + "`");
    if (iit == item_index.end()) throw ParseError(path + ": unknown item key `" + r.item_key + "`");
    edges.push_back({uit->second, iit->second, r.timestamp});
  }
  return InteractionGraph::from_edges(static_cast<std::int64_t>(user_keys.size()),
                                      static_cast<std::int64_t>(item_keys.size()), edges);
}

}  // namespace vins
