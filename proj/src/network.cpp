#include "tsmpc/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tsmpc/error.hpp"
#include "tsmpc/textcfg.hpp"

namespace tsmpc::sfm {

TrafficNetwork::TrafficNetwork(std::string name, double cycle_time, std::vector<Link> links,
                               std::vector<Junction> junctions,
                               std::vector<std::vector<double>> turn_rates,
                               std::vector<double> source_share)
    : name_(std::move(name)), cycle_time_(cycle_time), links_(std::move(links)),
      junctions_(std::move(junctions)), turn_rates_(std::move(turn_rates)),
      source_share_(std::move(source_share)) {
  const std::size_t n = links_.size();
  require(cycle_time_ > 0, Errc::constraint_violation, "cycle time must be positive");
  require(!links_.empty(), Errc::constraint_violation, "network needs at least one link");
  require(turn_rates_.size() == n, Errc::dimension_mismatch, "turn rate table shape");
  for (const auto& row : turn_rates_)
    require(row.size() == n, Errc::dimension_mismatch, "turn rate table shape");
  if (source_share_.empty()) source_share_.assign(n, 0.0);
  require(source_share_.size() == n, Errc::dimension_mismatch, "source share length");

  for (const auto& link : links_) {
    require(link.capacity > 0, Errc::constraint_violation, "link " + link.id + ": capacity must be positive");
    require(link.saturation > 0, Errc::constraint_violation,
            "link " + link.id + ": saturation flow must be positive");
  }
  for (const auto& junction : junctions_) {
    require(!junction.phases.empty(), Errc::constraint_violation,
            "junction " + junction.id + " has no phases");
    require(junction.lost_time >= 0 && junction.lost_time < cycle_time_,
            Errc::constraint_violation,
            "junction " + junction.id + ": lost time outside [0, cycle)");
  }

  // turn-rate row sums and upstream sets
  upstream_.assign(n, {});
  for (std::size_t w = 0; w < n; ++w) {
    double total = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      const double rate = turn_rates_[w][z];
      require(rate >= 0.0 && rate <= 1.0, Errc::constraint_violation,
              "turn rate out of [0,1] for " + links_[w].id);
      total += rate;
      if (rate > 0.0) upstream_[z].push_back(w);
    }
    require(total <= 1.0 + 1e-9, Errc::constraint_violation,
            "turn rates leaving " + links_[w].id + " exceed 1");
  }

  // every link must be discharged by exactly one junction
  input_offset_.assign(junctions_.size(), 0);
  n_inputs_ = 0;
  for (std::size_t j = 0; j < junctions_.size(); ++j) {
    input_offset_[j] = n_inputs_;
    n_inputs_ += junctions_[j].phases.size();
    for (const auto& phase : junctions_[j].phases)
      for (std::size_t z : phase.links) {
        require(z < n, Errc::unknown_link, "phase references unknown link");
        require(links_[z].downstream_junction == npos || links_[z].downstream_junction == j,
                Errc::constraint_violation,
                "link " + links_[z].id + " served by more than one junction");
        links_[z].downstream_junction = j;
      }
  }
  for (const auto& link : links_)
    require(link.downstream_junction != npos, Errc::constraint_violation,
            "link " + link.id + " is not served by any phase");

  // upstream junction = common discharge junction of the feeders
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t w : upstream_[z]) {
      const std::size_t j = links_[w].downstream_junction;
      require(links_[z].upstream_junction == npos || links_[z].upstream_junction == j,
              Errc::constraint_violation,
              "link " + links_[z].id + " is fed through more than one junction");
      links_[z].upstream_junction = j;
    }
  }

  for (double share : source_share_)
    require(share >= 0.0, Errc::constraint_violation, "source share must be non-negative");
}

std::size_t TrafficNetwork::link_index(const std::string& id) const {
  const auto found = find_link(id);
  require(found.has_value(), Errc::unknown_link, "no link named '" + id + "'");
  return *found;
}

std::optional<std::size_t> TrafficNetwork::find_link(const std::string& id) const {
  for (std::size_t z = 0; z < links_.size(); ++z)
    if (links_[z].id == id) return z;
  return std::nullopt;
}

namespace {

using textcfg::parse_double;
using textcfg::Row;
using textcfg::Section;
using textcfg::split_kv;

constexpr double kVehPerHour = 1.0 / 3600.0;

struct LinkDraft {
  Link link;
};

std::size_t need_link(const std::map<std::string, std::size_t>& ids, const std::string& id,
                      const std::string& where) {
  const auto it = ids.find(id);
  require(it != ids.end(), Errc::unknown_link, where + ": unknown link '" + id + "'");
  return it->second;
}

}  // namespace

TrafficNetwork parse_network(std::istream& in, const std::string& origin) {
  const auto sections = textcfg::parse(in, origin);

  std::string name = origin;
  double cycle_time = 0.0;
  std::vector<Link> links;
  std::map<std::string, std::size_t> link_ids;
  std::vector<Junction> junctions;
  std::vector<std::tuple<std::string, std::string, double>> turns;
  std::vector<std::pair<std::string, double>> sources;

  for (const auto& section : sections) {
    const std::string where = origin + " [" + section.name + "]";
    if (section.name == "meta") {
      for (const auto& row : section.rows) {
        std::string key, value;
        for (const auto& tok : row.tokens) {
          if (!split_kv(tok, key, value)) continue;
          if (key == "cycle_time") cycle_time = parse_double(value, where);
          else if (key == "name") name = value;
          // unknown meta keys (including format) tolerated
        }
      }
    } else if (section.name == "links") {
      for (const auto& row : section.rows) {
        require(!row.tokens.empty(), Errc::parse_error, where + ": empty link row");
        Link link;
        link.id = row.tokens[0];
        require(!link_ids.count(link.id), Errc::parse_error,
                where + ": duplicate link '" + link.id + "'");
        for (std::size_t t = 1; t < row.tokens.size(); ++t) {
          std::string key, value;
          require(split_kv(row.tokens[t], key, value), Errc::parse_error,
                  where + ": expected key=value, got '" + row.tokens[t] + "'");
          if (key == "capacity") link.capacity = parse_double(value, where);
          else if (key == "saturation") link.saturation = parse_double(value, where) * kVehPerHour;
          else if (key == "demand") link.demand = parse_double(value, where) * kVehPerHour;
          else if (key == "exit") link.exit = parse_double(value, where) * kVehPerHour;
          else if (key == "x_min") link.x_min = parse_double(value, where);
          else if (key == "x_max") link.x_max = parse_double(value, where);
          // unknown keys tolerated
        }
        link_ids[link.id] = links.size();
        links.push_back(std::move(link));
      }
    } else if (section.name == "junctions") {
      for (const auto& row : section.rows) {
        require(!row.tokens.empty(), Errc::parse_error, where + ": empty junction row");
        Junction junction;
        junction.id = row.tokens[0];
        for (std::size_t t = 1; t < row.tokens.size(); ++t) {
          std::string key, value;
          if (split_kv(row.tokens[t], key, value)) {
            if (key == "lost") junction.lost_time = parse_double(value, where);
            continue;
          }
          Phase phase;
          for (const auto& id : textcfg::split_list(row.tokens[t], '+'))
            phase.links.push_back(need_link(link_ids, id, where));
          junction.phases.push_back(std::move(phase));
        }
        junctions.push_back(std::move(junction));
      }
    } else if (section.name == "turns") {
      for (const auto& row : section.rows) {
        require(row.tokens.size() == 3, Errc::parse_error,
                where + ": expected 'from to rate'");
        turns.emplace_back(row.tokens[0], row.tokens[1], parse_double(row.tokens[2], where));
      }
    } else if (section.name == "sources") {
      for (const auto& row : section.rows) {
        require(row.tokens.size() == 2, Errc::parse_error, where + ": expected 'link share'");
        sources.emplace_back(row.tokens[0], parse_double(row.tokens[1], where));
      }
    }
    // unknown sections tolerated
  }

  require(cycle_time > 0, Errc::parse_error, origin + ": [meta] cycle_time missing");

  const std::size_t n = links.size();
  std::vector<std::vector<double>> rates(n, std::vector<double>(n, 0.0));
  for (const auto& [from, to, rate] : turns)
    rates[need_link(link_ids, from, "[turns]")][need_link(link_ids, to, "[turns]")] = rate;

  std::vector<double> share(n, 0.0);
  for (const auto& [id, s] : sources) share[need_link(link_ids, id, "[sources]")] = s;

  return TrafficNetwork(std::move(name), cycle_time, std::move(links), std::move(junctions),
                        std::move(rates), std::move(share));
}

TrafficNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io_error, "cannot open network file '" + path.string() + "'");
  return parse_network(in, path.string());
}

double green_time_of_link(const TrafficNetwork& net, std::size_t junction, std::size_t link,
                          const Vector& u) {
  require(link < net.n_links(), Errc::unknown_link, "green_time_of_link: link out of range");
  require(junction < net.n_junctions(), Errc::unknown_link,
          "green_time_of_link: junction out of range");
  require(u.size() == net.n_inputs(), Errc::dimension_mismatch,
          "green_time_of_link: plan length");
  const auto& phases = net.junction(junction).phases;
  double green = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i)
    if (std::find(phases[i].links.begin(), phases[i].links.end(), link) !=
        phases[i].links.end())
      green += u[net.input_index(junction, i)];
  return green;
}

double outflow(const Link& link, double green, double cycle_time) {
  require(green >= 0.0 && green <= cycle_time + 1e-9, Errc::constraint_violation,
          "outflow: green time outside [0, cycle]");
  return link.saturation * green;
}

Vector flow_delta(const TrafficNetwork& net, const Vector& u, const Vector& extra_demand) {
  const std::size_t n = net.n_links();
  require(u.size() == net.n_inputs(), Errc::dimension_mismatch, "flow_delta: plan length");
  require(extra_demand.empty() || extra_demand.size() == n, Errc::dimension_mismatch,
          "flow_delta: demand length");
  const double c = net.cycle_time();

  Vector discharge(n);  // vehicles leaving each link this cycle
  for (std::size_t z = 0; z < n; ++z) {
    const Link& link = net.link(z);
    discharge[z] = outflow(link, green_time_of_link(net, link.downstream_junction, z, u), c);
  }

  Vector delta(n);
  for (std::size_t z = 0; z < n; ++z) {
    const Link& link = net.link(z);
    double inflow = 0.0;
    for (std::size_t w : net.upstream_of(z)) inflow += net.turn_rate(w, z) * discharge[w];
    const double demand = link.demand + (extra_demand.empty() ? 0.0 : extra_demand[z]);
    delta[z] = inflow - discharge[z] + c * (demand - link.exit);
  }
  return delta;
}

Vector step_dynamics(const TrafficNetwork& net, const Vector& x, const Vector& u,
                     const Vector& extra_demand) {
  const std::size_t n = net.n_links();
  require(x.size() == n, Errc::dimension_mismatch, "step_dynamics: state length");
  for (double g : u)
    require(g >= -1e-9, Errc::constraint_violation, "step_dynamics: negative green time");
  for (std::size_t j = 0; j < net.n_junctions(); ++j) {
    const auto& junction = net.junction(j);
    double total = junction.lost_time;
    for (std::size_t i = 0; i < junction.phases.size(); ++i) total += u[net.input_index(j, i)];
    require(total <= net.cycle_time() + 1e-6, Errc::constraint_violation,
            "step_dynamics: junction " + junction.id + " plan exceeds the cycle");
  }

  Vector next = flow_delta(net, u, extra_demand);
  for (std::size_t z = 0; z < n; ++z)
    next[z] = std::clamp(next[z] + x[z], 0.0, net.link(z).capacity);
  return next;
}

StateSpace linearize(const TrafficNetwork& net) {
  const std::size_t n = net.n_links();
  const std::size_t p = net.n_inputs();
  StateSpace ss;
  ss.a = Matrix::identity(n);
  ss.b = Matrix(n, p);
  ss.e = Vector(n);
  for (std::size_t z = 0; z < n; ++z) {
    const Link& link = net.link(z);
    const std::size_t j = link.downstream_junction;
    const auto& phases = net.junction(j).phases;
    for (std::size_t i = 0; i < phases.size(); ++i)
      if (std::find(phases[i].links.begin(), phases[i].links.end(), z) != phases[i].links.end())
        ss.b(z, net.input_index(j, i)) -= link.saturation;
    for (std::size_t w : net.upstream_of(z)) {
      const Link& feeder = net.link(w);
      const std::size_t ju = feeder.downstream_junction;
      const auto& up_phases = net.junction(ju).phases;
      const double gain = net.turn_rate(w, z) * feeder.saturation;
      for (std::size_t i = 0; i < up_phases.size(); ++i)
        if (std::find(up_phases[i].links.begin(), up_phases[i].links.end(), w) !=
            up_phases[i].links.end())
          ss.b(z, net.input_index(ju, i)) += gain;
    }
    ss.e[z] = net.cycle_time() * (link.demand - link.exit);
  }
  return ss;
}

}  // namespace tsmpc::sfm
