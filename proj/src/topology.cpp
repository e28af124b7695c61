#include "edgesim/topology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "edgesim/errors.hpp"
#include "json.hpp"

namespace edgesim {

Topology::Topology(std::vector<Region> regions, std::vector<BaseStation> stations)
    : regions_(std::move(regions)), stations_(std::move(stations)) {
  for (int m = 0; m < num_regions(); ++m) {
    if (regions_[m].id != m + 1) throw std::invalid_argument("region ids must be dense 1..M");
  }
  for (int n = 0; n < num_stations(); ++n) {
    const BaseStation& bs = stations_[n];
    if (bs.id != n + 1) throw std::invalid_argument("station ids must be dense 1..N");
    if (bs.coverage_radius <= 0.0) throw std::invalid_argument("coverage_radius must be positive");
    if (bs.service_rate <= 0.0) throw std::invalid_argument("service_rate must be positive");
    if (bs.power_cap <= 0.0) throw std::invalid_argument("power_cap must be positive");
  }
  build_coverage();
}

void Topology::build_coverage() {
  const int n_regions = num_regions();
  const int n_stations = num_stations();
  distances_.resize(static_cast<std::size_t>(n_stations) * n_regions);
  coverers_.assign(n_regions, {});
  covered_.assign(n_stations, {});
  for (int n = 0; n < n_stations; ++n) {
    for (int m = 0; m < n_regions; ++m) {
      const double dx = stations_[n].x - regions_[m].x;
      const double dy = stations_[n].y - regions_[m].y;
      const double d = std::hypot(dx, dy);
      distances_[static_cast<std::size_t>(n) * n_regions + m] = d;
      if (d <= stations_[n].coverage_radius) {
        coverers_[m].push_back(n);
        covered_[n].push_back(m);
      }
    }
  }
  for (int m = 0; m < n_regions; ++m) {
    if (coverers_[m].empty()) {
      throw CoverageError(m + 1, "region " + std::to_string(m + 1) +
                                     " has no station within coverage range");
    }
  }
}

Topology build_grid_topology(int rows, int cols, double coverage_radius,
                             double service_rate, double power_cap) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs at least 2x2 regions");
  if (coverage_radius <= 0.0) throw std::invalid_argument("coverage_radius must be positive");

  std::vector<Region> regions;
  regions.reserve(static_cast<std::size_t>(rows) * cols);
  int id = 1;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      regions.push_back({id++, r + 0.5, c + 0.5});
    }
  }

  std::vector<BaseStation> stations;
  stations.reserve(static_cast<std::size_t>(rows - 1) * (cols - 1));
  id = 1;
  for (int r = 1; r < rows; ++r) {
    for (int c = 1; c < cols; ++c) {
      stations.push_back({id++, static_cast<double>(r), static_cast<double>(c),
                          coverage_radius, service_rate, power_cap});
    }
  }
  return Topology(std::move(regions), std::move(stations));
}

bool coverage_feasible(const Topology& topo, const std::vector<std::uint8_t>& activation) {
  if (static_cast<int>(activation.size()) != topo.num_stations()) {
    throw std::invalid_argument("activation size does not match station count");
  }
  for (int m = 0; m < topo.num_regions(); ++m) {
    bool covered = false;
    for (int n : topo.coverers(m)) {
      if (activation[n]) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

int minimum_cover_size(const Topology& topo) {
  const int n = topo.num_stations();
  if (n > 25) throw UnsupportedSizeError("minimum_cover_size enumerates up to 25 stations");

  std::vector<std::uint32_t> region_masks(topo.num_regions(), 0);
  for (int m = 0; m < topo.num_regions(); ++m) {
    for (int s : topo.coverers(m)) region_masks[m] |= (1u << s);
  }
  int best = n;
  const std::uint32_t all = (1u << n) - 1u;
  for (std::uint32_t mask = 0; mask <= all; ++mask) {
    const int size = std::popcount(mask);
    if (size >= best) continue;
    bool ok = true;
    for (std::uint32_t rm : region_masks) {
      if ((rm & mask) == 0) {
        ok = false;
        break;
      }
    }
    if (ok) best = size;
  }
  return best;
}

std::string topology_to_json(const Topology& topo) {
  nlohmann::ordered_json doc;
  doc["regions"] = nlohmann::ordered_json::array();
  for (const Region& r : topo.regions()) {
    doc["regions"].push_back({{"id", r.id}, {"centroid", {r.x, r.y}}});
  }
  doc["stations"] = nlohmann::ordered_json::array();
  for (const BaseStation& s : topo.stations()) {
    doc["stations"].push_back({{"id", s.id},
                               {"position", {s.x, s.y}},
                               {"coverage_radius", s.coverage_radius},
                               {"service_rate", s.service_rate},
                               {"power_cap", s.power_cap}});
  }
  doc["coverage"] = nlohmann::ordered_json::array();
  for (int m = 0; m < topo.num_regions(); ++m) {
    std::vector<int> ids;
    for (int n : topo.coverers(m)) ids.push_back(n + 1);
    doc["coverage"].push_back(ids);
  }
  return doc.dump(2);
}

Topology topology_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("topology JSON: ") + e.what());
  }
  try {
    std::vector<Region> regions;
    for (const auto& r : doc.at("regions")) {
      regions.push_back({r.at("id").get<int>(), r.at("centroid").at(0).get<double>(),
                         r.at("centroid").at(1).get<double>()});
    }
    std::vector<BaseStation> stations;
    for (const auto& s : doc.at("stations")) {
      stations.push_back({s.at("id").get<int>(), s.at("position").at(0).get<double>(),
                          s.at("position").at(1).get<double>(),
                          s.at("coverage_radius").get<double>(),
                          s.at("service_rate").get<double>(), s.at("power_cap").get<double>()});
    }
    Topology topo(std::move(regions), std::move(stations));
    if (doc.contains("coverage")) {
      const auto& cov = doc.at("coverage");
      if (static_cast<int>(cov.size()) != topo.num_regions()) {
        throw std::invalid_argument("coverage list count does not match regions");
      }
      for (int m = 0; m < topo.num_regions(); ++m) {
        std::vector<int> ids = cov.at(m).get<std::vector<int>>();
        std::sort(ids.begin(), ids.end());
        std::vector<int> expected;
        for (int n : topo.coverers(m)) expected.push_back(n + 1);
        if (ids != expected) {
          throw std::invalid_argument("coverage list for region " + std::to_string(m + 1) +
                                      " disagrees with positions and radii");
        }
      }
    }
    return topo;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("topology JSON: ") + e.what());
  }
}

}  // namespace edgesim
