#ifndef RDSNET_NETWORK_IO_HPP
#define RDSNET_NETWORK_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "rdsnet/errors.hpp"
#include "rdsnet/network.hpp"

namespace rdsnet {

// File format: {"n":int,"status":[0|1 x n],"directed":[[i,j],...],
// "undirected":[[i,j] with i<j,...]} with both edge arrays sorted
// lexicographically. Canonical storage already sorts them, so a
// write/read round trip is byte-stable.
inline nlohmann::ordered_json network_to_json(const PartiallyDirectedNetwork& net) {
  nlohmann::ordered_json j;
  j["n"] = net.n;
  j["status"] = nlohmann::json::array();
  for (Status z : net.status) j["status"].push_back(static_cast<int>(z));
  j["directed"] = nlohmann::json::array();
  for (const Edge& e : net.directed)
    j["directed"].push_back({e.first, e.second});
  j["undirected"] = nlohmann::json::array();
  for (const Edge& e : net.undirected)
    j["undirected"].push_back({e.first, e.second});
  return j;
}

inline PartiallyDirectedNetwork network_from_json(const nlohmann::json& j) {
  PartiallyDirectedNetwork net;
  try {
    net.n = j.at("n").get<NodeId>();
    for (const auto& z : j.at("status"))
      net.status.push_back(static_cast<Status>(z.get<int>()));
    for (const auto& e : j.at("directed"))
      net.directed.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    for (const auto& e : j.at("undirected"))
      net.undirected.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed network JSON: ") + ex.what());
  }
  validate_network(net);
  return net;
}

inline void write_network(const std::string& path,
                          const PartiallyDirectedNetwork& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << network_to_json(net).dump() << '\n';
  if (!out) throw DataError("write failed: " + path);
}

inline PartiallyDirectedNetwork read_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError("cannot parse " + path + ": " + ex.what());
  }
  return network_from_json(j);
}

}  // namespace rdsnet

#endif  // RDSNET_NETWORK_IO_HPP
