#ifndef RDSNET_INGEST_HPP
#define RDSNET_INGEST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rdsnet/errors.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/rng.hpp"

namespace rdsnet {

// Raw directed pairs with external ids, as parsed; duplicates, loops and
// reciprocal pairs still present.
struct RawEdgeList {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::int64_t comment_lines = 0;
};

// Whitespace-separated "from to" integer pairs, '#' lines skipped.
inline RawEdgeList read_snap_edgelist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  RawEdgeList raw;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      ++raw.comment_lines;
      continue;
    }
    std::istringstream ss(line);
    std::int64_t from, to;
    std::string extra;
    if (!(ss >> from >> to) || (ss >> extra) || from < 0 || to < 0)
      throw DataError("malformed edge at line " + std::to_string(lineno) +
                      ": " + line);
    raw.pairs.emplace_back(from, to);
  }
  return raw;
}

struct CanonicalizeReport {
  std::int64_t nodes = 0;
  std::int64_t self_loops_dropped = 0;
  std::int64_t duplicates_dropped = 0;
  std::int64_t reciprocal_converted = 0;  // (i,j)+(j,i) pairs merged
};

struct CanonicalizeResult {
  PartiallyDirectedNetwork net;                // statuses all zero
  std::vector<std::int64_t> external_ids;      // internal id -> external id
  CanonicalizeReport report;
};

// External ids map to 0..n-1 in ascending external-id order; duplicate
// directed pairs collapse, reciprocal pairs become one undirected edge,
// self-loops drop.
inline CanonicalizeResult canonicalize(const RawEdgeList& raw) {
  CanonicalizeResult res;
  std::set<std::int64_t> ids;
  for (const auto& [a, b] : raw.pairs) {
    ids.insert(a);
    ids.insert(b);
  }
  res.external_ids.assign(ids.begin(), ids.end());
  std::map<std::int64_t, NodeId> to_internal;
  for (std::size_t i = 0; i < res.external_ids.size(); ++i)
    to_internal[res.external_ids[i]] = static_cast<NodeId>(i);

  const NodeId n = static_cast<NodeId>(res.external_ids.size());
  std::set<Edge> dir;
  for (const auto& [a, b] : raw.pairs) {
    if (a == b) {
      ++res.report.self_loops_dropped;
      continue;
    }
    if (!dir.insert({to_internal[a], to_internal[b]}).second)
      ++res.report.duplicates_dropped;
  }

  std::vector<Edge> directed, undirected;
  for (const Edge& e : dir) {
    const Edge rev{e.second, e.first};
    if (dir.count(rev)) {
      if (e.first < e.second) {  // emit the pair once
        undirected.push_back(e);
        ++res.report.reciprocal_converted;
      }
    } else {
      directed.push_back(e);
    }
  }

  res.report.nodes = n;
  res.net = make_network(n, std::vector<Status>(static_cast<std::size_t>(n), 0),
                         std::move(directed), std::move(undirected));
  return res;
}

// Status vector marking the k nodes with the smallest external ids infected;
// internal ids are in ascending external-id order, so that is the prefix.
inline std::vector<Status> assign_status_prefix(const PartiallyDirectedNetwork& net,
                                                NodeId k) {
  if (k <= 0 || k >= net.n) throw UsageError("need 0 < k < n");
  std::vector<Status> z(static_cast<std::size_t>(net.n), 0);
  for (NodeId i = 0; i < k; ++i) z[static_cast<std::size_t>(i)] = 1;
  return z;
}

inline PartiallyDirectedNetwork with_status(PartiallyDirectedNetwork net,
                                            std::vector<Status> z) {
  if (static_cast<NodeId>(z.size()) != net.n)
    throw UsageError("status vector length does not match n");
  net.status = std::move(z);
  validate_network(net);
  return net;
}

struct ThinSpec {
  int block_k = 1;   // status of the row node i in entry y_ij
  int block_l = 1;   // status of the column node j
  bool upper = true; // i < j (upper triangle) vs i > j (lower)
  double fraction = 0;
};

// "k,l,upper|lower,fraction", e.g. "1,1,upper,0.9".
inline ThinSpec parse_thin_spec(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw UsageError("thin spec must be k,l,upper|lower,fraction: " + s);
  ThinSpec t;
  try {
    t.block_k = std::stoi(parts[0]);
    t.block_l = std::stoi(parts[1]);
    t.fraction = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw UsageError("thin spec must be k,l,upper|lower,fraction: " + s);
  }
  if (parts[2] == "upper")
    t.upper = true;
  else if (parts[2] == "lower")
    t.upper = false;
  else
    throw UsageError("triangle must be 'upper' or 'lower': " + s);
  if (t.block_k != 0 && t.block_k != 1) throw UsageError("block status must be 0 or 1");
  if (t.block_l != 0 && t.block_l != 1) throw UsageError("block status must be 0 or 1");
  if (!(t.fraction >= 0 && t.fraction <= 1))
    throw UsageError("thin fraction must be in [0, 1]");
  return t;
}

// Removes round(fraction * count) adjacency entries, uniformly at random,
// among the entries y_ij with (z_i, z_j) = (k, l) on the requested triangle
// of the adjacency matrix. An undirected edge contributes one oriented entry
// per triangle; removing it demotes the edge to directed in the surviving
// orientation. The result is canonical again.
inline PartiallyDirectedNetwork thin_block_triangle(
    const PartiallyDirectedNetwork& net, const ThinSpec& spec, Rng& rng) {
  if (!(spec.fraction >= 0 && spec.fraction <= 1))
    throw UsageError("thin fraction must be in [0, 1]");
  detail::check_status_value(spec.block_k);
  detail::check_status_value(spec.block_l);

  auto in_scope = [&](NodeId i, NodeId j) {
    if ((net.status[static_cast<std::size_t>(i)] ? 1 : 0) != spec.block_k) return false;
    if ((net.status[static_cast<std::size_t>(j)] ? 1 : 0) != spec.block_l) return false;
    return spec.upper ? i < j : i > j;
  };

  // Oriented candidate entries; second member: index into the edge vectors,
  // negative-offset encoding for undirected.
  struct Entry {
    NodeId i, j;
    bool from_undirected;
    std::size_t edge_idx;
  };
  std::vector<Entry> cand;
  for (std::size_t e = 0; e < net.directed.size(); ++e) {
    const auto& [i, j] = net.directed[e];
    if (in_scope(i, j)) cand.push_back({i, j, false, e});
  }
  for (std::size_t e = 0; e < net.undirected.size(); ++e) {
    const auto& [a, b] = net.undirected[e];
    if (in_scope(a, b)) cand.push_back({a, b, true, e});
    if (in_scope(b, a)) cand.push_back({b, a, true, e});
  }

  const auto remove_n = static_cast<std::size_t>(
      std::llround(spec.fraction * static_cast<double>(cand.size())));
  std::vector<char> drop_dir(net.directed.size(), 0);
  // 0 keep, 1 drop (i,j) orientation, 2 drop (j,i) orientation of (lo,hi)
  std::vector<char> und_action(net.undirected.size(), 0);
  for (std::size_t i = 0; i < remove_n; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform_below(cand.size() - i));
    std::swap(cand[i], cand[j]);
    const Entry& pick = cand[i];
    if (!pick.from_undirected) {
      drop_dir[pick.edge_idx] = 1;
    } else {
      const bool is_lo_hi = pick.i < pick.j;
      und_action[pick.edge_idx] =
          static_cast<char>(und_action[pick.edge_idx] | (is_lo_hi ? 1 : 2));
    }
  }

  std::vector<Edge> directed, undirected;
  for (std::size_t e = 0; e < net.directed.size(); ++e)
    if (!drop_dir[e]) directed.push_back(net.directed[e]);
  for (std::size_t e = 0; e < net.undirected.size(); ++e) {
    const auto& [lo, hi] = net.undirected[e];
    switch (und_action[e]) {
      case 0: undirected.emplace_back(lo, hi); break;
      case 1: directed.emplace_back(hi, lo); break;  // (lo,hi) entry removed
      case 2: directed.emplace_back(lo, hi); break;  // (hi,lo) entry removed
      default: break;                                // both gone
    }
  }
  return make_network(net.n, net.status, std::move(directed), std::move(undirected));
}

}  // namespace rdsnet

#endif  // RDSNET_INGEST_HPP
