#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsmpc/linalg.hpp"

namespace tsmpc::sfm {

using linalg::Matrix;
using linalg::Vector;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

struct Link {
  std::string id;
  double capacity = 0.0;         // vehicles the link can hold
  double saturation = 0.0;       // veh/s discharged per second of green
  double demand = 0.0;           // veh/s entering mid-link, known to the model
  double exit = 0.0;             // veh/s leaving mid-link
  std::optional<double> x_min;   // state bounds enforced by the controller
  std::optional<double> x_max;
  std::size_t downstream_junction = npos;  // junction whose phases discharge this link
  std::size_t upstream_junction = npos;    // junction feeding it, npos at sources
};

struct Phase {
  std::vector<std::size_t> links;  // links receiving green during this phase
};

struct Junction {
  std::string id;
  double lost_time = 0.0;  // all-red span per cycle
  std::vector<Phase> phases;
};

// Store-and-forward network. Per cycle of length C (= the discrete step), a
// link discharges saturation*green vehicles and receives the turn-rate share
// of its feeders' discharges. Immutable once built.
class TrafficNetwork {
 public:
  TrafficNetwork(std::string name, double cycle_time, std::vector<Link> links,
                 std::vector<Junction> junctions,
                 std::vector<std::vector<double>> turn_rates,
                 std::vector<double> source_share);

  const std::string& name() const { return name_; }
  double cycle_time() const { return cycle_time_; }

  std::size_t n_links() const { return links_.size(); }
  std::size_t n_junctions() const { return junctions_.size(); }
  std::size_t n_inputs() const { return n_inputs_; }

  const Link& link(std::size_t z) const { return links_[z]; }
  const std::vector<Link>& links() const { return links_; }
  const Junction& junction(std::size_t j) const { return junctions_[j]; }
  const std::vector<Junction>& junctions() const { return junctions_; }

  double turn_rate(std::size_t from, std::size_t to) const { return turn_rates_[from][to]; }
  const std::vector<std::size_t>& upstream_of(std::size_t z) const { return upstream_[z]; }

  // flat input vector position of (junction, phase)
  std::size_t input_index(std::size_t junction, std::size_t phase) const {
    return input_offset_[junction] + phase;
  }

  std::size_t link_index(const std::string& id) const;  // throws unknown_link
  std::optional<std::size_t> find_link(const std::string& id) const;

  // scenario inflow multiplier per link (veh/s of demand per veh/s of source rate)
  const std::vector<double>& source_share() const { return source_share_; }

 private:
  std::string name_;
  double cycle_time_;
  std::vector<Link> links_;
  std::vector<Junction> junctions_;
  std::vector<std::vector<double>> turn_rates_;     // [from][to]
  std::vector<std::vector<std::size_t>> upstream_;  // feeders per link
  std::vector<double> source_share_;
  std::vector<std::size_t> input_offset_;
  std::size_t n_inputs_ = 0;
};

TrafficNetwork parse_network(std::istream& in, const std::string& origin);
TrafficNetwork load_network(const std::filesystem::path& path);

// Green seconds link z receives from junction j under plan u (flat layout).
double green_time_of_link(const TrafficNetwork& net, std::size_t junction, std::size_t link,
                          const Vector& u);

// Vehicles link z discharges in one step of length cycle_time given its green.
double outflow(const Link& link, double green, double cycle_time);

// Per-link vehicle change over one cycle under plan u. extra_demand (veh/s,
// may be empty) is plant-side demand the model does not see.
Vector flow_delta(const TrafficNetwork& net, const Vector& u, const Vector& extra_demand = {});

// One plant step: x + flow_delta, clamped to [0, capacity] per link.
// Validates u >= 0 and the per-junction cycle budget.
Vector step_dynamics(const TrafficNetwork& net, const Vector& x, const Vector& u,
                     const Vector& extra_demand = {});

struct StateSpace {
  Matrix a;  // identity for the store-and-forward model
  Matrix b;
  Vector e;  // per-cycle offset from known demand/exit flows
};

StateSpace linearize(const TrafficNetwork& net);

}  // namespace tsmpc::sfm
