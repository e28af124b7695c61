#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edgesim {

struct Region {
  int id = 0;  // dense, 1-based
  double x = 0.0;
  double y = 0.0;
};

struct BaseStation {
  int id = 0;  // dense, 1-based
  double x = 0.0;
  double y = 0.0;
  double coverage_radius = 0.0;
  double service_rate = 0.0;  // computation service capacity per slot
  double power_cap = 0.0;     // per-slot power limit
};

// Service area: regions, stations, and which stations can serve which region.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Region> regions, std::vector<BaseStation> stations);

  int num_regions() const { return static_cast<int>(regions_.size()); }
  int num_stations() const { return static_cast<int>(stations_.size()); }

  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<BaseStation>& stations() const { return stations_; }

  // 0-based station indices covering region m (0-based), ascending.
  const std::vector<int>& coverers(int region) const { return coverers_[region]; }
  // 0-based region indices covered by station n (0-based), ascending.
  const std::vector<int>& covered_regions(int station) const { return covered_[station]; }

  double distance(int station, int region) const {
    return distances_[static_cast<std::size_t>(station) * regions_.size() + region];
  }

  bool covers(int station, int region) const {
    return distance(station, region) <= stations_[station].coverage_radius;
  }

 private:
  void build_coverage();

  std::vector<Region> regions_;
  std::vector<BaseStation> stations_;
  std::vector<std::vector<int>> coverers_;
  std::vector<std::vector<int>> covered_;
  std::vector<double> distances_;  // station-major N x M
};

// Unit-square region grid with stations on the interior grid intersections.
// rows x cols regions, (rows-1)*(cols-1) stations.
Topology build_grid_topology(int rows, int cols, double coverage_radius,
                             double service_rate, double power_cap);

// True iff every region has at least one active coverer.
bool coverage_feasible(const Topology& topo, const std::vector<std::uint8_t>& activation);

// Size of the smallest activation set that covers every region.
// Exhaustive over 2^N, so stations are capped at 25.
int minimum_cover_size(const Topology& topo);

std::string topology_to_json(const Topology& topo);
Topology topology_from_json(const std::string& text);

}  // namespace edgesim
