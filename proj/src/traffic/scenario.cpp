#include "fasa/traffic/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fasa::traffic {

using nlohmann::json;

void ScenarioConfig::validate() const {
  if (n_switches < 1 || hosts_per_switch < 1) {
    throw std::invalid_argument("scenario: fabric must have at least one switch and one host");
  }
  const int n_hosts = n_switches * hosts_per_switch;
  auto check_host = [&](int h, const char* what) {
    if (h < 1 || h > n_hosts) {
      throw std::invalid_argument(std::string("scenario: ") + what + " id " + std::to_string(h) +
                                  " outside 1.." + std::to_string(n_hosts));
    }
  };
  check_host(server_host, "server host");
  check_host(attacker_host, "attacker host");
  if (server_host == attacker_host) {
    throw std::invalid_argument("scenario: server and attacker must be distinct hosts");
  }
  if (monitored_switch < -1 || monitored_switch >= n_switches) {
    throw std::invalid_argument("scenario: monitored switch out of range");
  }
  if (link_latency <= 0.0) throw std::invalid_argument("scenario: link latency must be positive");
  if (duration <= 0.0) throw std::invalid_argument("scenario: duration must be positive");
  if (attack_enabled && (attack_start < 0.0 || attack_start >= duration)) {
    throw std::invalid_argument("scenario: attack start must fall inside the run");
  }
  if (persistent_flows < 0 || short_flow_packets < 1) {
    throw std::invalid_argument("scenario: benign flow counts out of range");
  }
  if (persistent_rate <= 0.0 || short_flow_rate < 0.0 || short_packet_rate <= 0.0) {
    throw std::invalid_argument("scenario: benign rates out of range");
  }
  if (collection_interval <= 0.0) {
    throw std::invalid_argument("scenario: collection interval must be positive");
  }
  if (attack_rate <= 0.0) throw std::invalid_argument("scenario: attack rate must be positive");
  if (spoof_pool < 1 || spoof_pool > 65536) {
    throw std::invalid_argument("scenario: spoof pool must be 1..65536");
  }
  if (half_open_capacity < 1 || half_open_timeout <= 0.0) {
    throw std::invalid_argument("scenario: half-open capacity and timeout must be positive");
  }
  if (syn_retries < 0 || retry_interval <= 0.0) {
    throw std::invalid_argument("scenario: retry settings out of range");
  }
  // The fabric needs at least one host that is neither server nor attacker.
  if (n_hosts < 3) throw std::invalid_argument("scenario: need at least three hosts");
}

std::string to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["n_switches"] = c.n_switches;
  j["hosts_per_switch"] = c.hosts_per_switch;
  j["link_latency"] = c.link_latency;
  j["server_host"] = c.server_host;
  j["attacker_host"] = c.attacker_host;
  j["monitored_switch"] = c.monitored_switch;
  j["persistent_flows"] = c.persistent_flows;
  j["persistent_rate"] = c.persistent_rate;
  j["data_bytes"] = c.data_bytes;
  j["short_flow_rate"] = c.short_flow_rate;
  j["short_flow_packets"] = c.short_flow_packets;
  j["short_packet_rate"] = c.short_packet_rate;
  j["short_data_bytes"] = c.short_data_bytes;
  j["attack_enabled"] = c.attack_enabled;
  j["attack_start"] = c.attack_start;
  j["attack_rate"] = c.attack_rate;
  j["spoof_pool"] = c.spoof_pool;
  j["half_open_capacity"] = c.half_open_capacity;
  j["half_open_timeout"] = c.half_open_timeout;
  j["syn_retries"] = c.syn_retries;
  j["retry_interval"] = c.retry_interval;
  j["collection_interval"] = c.collection_interval;
  j["bandwidth_reference_mbps"] = c.bandwidth_reference_mbps;
  j["duration"] = c.duration;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("scenario: top level must be an object");
  ScenarioConfig c;
  try {
    // Every field is optional; absent keys keep their defaults.
    c.n_switches = j.value("n_switches", c.n_switches);
    c.hosts_per_switch = j.value("hosts_per_switch", c.hosts_per_switch);
    c.link_latency = j.value("link_latency", c.link_latency);
    c.server_host = j.value("server_host", c.server_host);
    c.attacker_host = j.value("attacker_host", c.attacker_host);
    c.monitored_switch = j.value("monitored_switch", c.monitored_switch);
    c.persistent_flows = j.value("persistent_flows", c.persistent_flows);
    c.persistent_rate = j.value("persistent_rate", c.persistent_rate);
    c.data_bytes = j.value("data_bytes", c.data_bytes);
    c.short_flow_rate = j.value("short_flow_rate", c.short_flow_rate);
    c.short_flow_packets = j.value("short_flow_packets", c.short_flow_packets);
    c.short_packet_rate = j.value("short_packet_rate", c.short_packet_rate);
    c.short_data_bytes = j.value("short_data_bytes", c.short_data_bytes);
    c.attack_enabled = j.value("attack_enabled", c.attack_enabled);
    c.attack_start = j.value("attack_start", c.attack_start);
    c.attack_rate = j.value("attack_rate", c.attack_rate);
    c.spoof_pool = j.value("spoof_pool", c.spoof_pool);
    c.half_open_capacity = j.value("half_open_capacity", c.half_open_capacity);
    c.half_open_timeout = j.value("half_open_timeout", c.half_open_timeout);
    c.syn_retries = j.value("syn_retries", c.syn_retries);
    c.retry_interval = j.value("retry_interval", c.retry_interval);
    c.collection_interval = j.value("collection_interval", c.collection_interval);
    c.bandwidth_reference_mbps = j.value("bandwidth_reference_mbps", c.bandwidth_reference_mbps);
    c.duration = j.value("duration", c.duration);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: bad field type: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace fasa::traffic
