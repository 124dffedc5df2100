#include "disped/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace disped {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& file, const std::string& where,
                       const std::string& what) {
  throw std::runtime_error(file.string() + ": " + where + ": " + what);
}

json load_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte offset; keep it and add the file name.
    throw std::runtime_error(file.string() + ": " + e.what());
  }
}

AlgorithmParams parse_params(const std::filesystem::path& file, const json& j) {
  AlgorithmParams p;
  try {
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.nu1 = j.at("nu1").get<double>();
    p.nu2 = j.at("nu2").get<double>();
    p.epsilon = j.at("epsilon").get<double>();
    p.r = j.value("r", 1);
    const std::string mode = j.value("load_mode", std::string("single_bus"));
    if (mode == "single_bus")
      p.load_mode = LoadMode::SingleBus;
    else if (mode == "distributed_bus")
      p.load_mode = LoadMode::DistributedBus;
    else
      fail(file, "$.params.load_mode", "expected 'single_bus' or 'distributed_bus'");
  } catch (const json::exception& e) {
    fail(file, "$.params", e.what());
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    fail(file, "$.params", e.what());
  }
  return p;
}

EventSchedule parse_events(const std::filesystem::path& file, const json& j) {
  EventSchedule sched;
  int k = 0;
  for (const auto& e : j) {
    const std::string where = "$.events[" + std::to_string(k++) + "]";
    Event ev;
    try {
      ev.t = e.at("t").get<double>();
      ev.unit = e.at("unit").get<int>();
      const std::string kind = e.at("kind").get<std::string>();
      if (kind == "remove")
        ev.kind = Event::Kind::Remove;
      else if (kind == "add")
        ev.kind = Event::Kind::Add;
      else
        fail(file, where + ".kind", "expected 'remove' or 'add'");
      if (e.contains("p_init")) ev.p_init = e.at("p_init").get<double>();
      if (e.contains("edges"))
        for (const auto& ed : e.at("edges"))
          ev.edges.push_back({ed[0].get<int>(), ed[1].get<int>(), ed[2].get<double>()});
      if (e.contains("edges_from"))
        ev.edges_from = table1_from_name(e.at("edges_from").get<std::string>());
      if (ev.kind == Event::Kind::Add && ev.edges.empty() && !ev.edges_from)
        fail(file, where, "add event needs 'edges' or 'edges_from'");
    } catch (const json::exception& err) {
      fail(file, where, err.what());
    }
    sched.events.push_back(std::move(ev));
  }
  try {
    sched.validate();
  } catch (const std::exception& e) {
    fail(file, "$.events", e.what());
  }
  return sched;
}

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  const json j = load_json_file(file);
  ScenarioConfig cfg;

  const int version = j.value("schema_version", 0);
  if (version != 1)
    fail(file, "$.schema_version", "expected 1, got " + std::to_string(version));
  cfg.schema_version = version;
  cfg.name = j.value("name", file.stem().string());

  // Graph: benchmark name or inline object.
  try {
    const json& jg = j.at("graph");
    if (jg.is_string()) {
      cfg.graph_name = jg.get<std::string>();
      cfg.graph = table1_graph(table1_from_name(cfg.graph_name));
    } else {
      cfg.graph = graph_from_json(jg);
    }
  } catch (const std::exception& e) {
    fail(file, "$.graph", e.what());
  }

  // Fleet: path (relative to the config file) or inline.
  try {
    const json& jf = j.at("fleet");
    if (jf.is_string()) {
      cfg.fleet_ref = jf.get<std::string>();
      std::filesystem::path fp = cfg.fleet_ref;
      if (fp.is_relative()) fp = file.parent_path() / fp;
      cfg.fleet = fleet_from_json(load_json_file(fp));
    } else {
      cfg.fleet = fleet_from_json(jf);
    }
  } catch (const std::exception& e) {
    fail(file, "$.fleet", e.what());
  }

  try {
    cfg.load = load_signal_from_json(j.at("load"));
  } catch (const std::exception& e) {
    fail(file, "$.load", e.what());
  }

  if (j.contains("events")) cfg.events = parse_events(file, j.at("events"));
  cfg.params = parse_params(file, j.at("params"));

  try {
    const json& js = j.at("sim");
    cfg.sim.dt = js.value("dt", 1e-3);
    cfg.sim.T = js.at("T").get<double>();
    cfg.sim.record_every = js.value("record_every", 100);
    const std::string mode = js.value("mode", std::string("distributed"));
    if (mode == "distributed")
      cfg.sim.mode = SimMode::Distributed;
    else if (mode == "centralized")
      cfg.sim.mode = SimMode::Centralized;
    else
      fail(file, "$.sim.mode", "expected 'distributed' or 'centralized'");
    if (js.contains("load_shares"))
      cfg.sim.load_shares = js.at("load_shares").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(file, "$.sim", e.what());
  }

  if (j.contains("init")) {
    try {
      const json& ji = j.at("init");
      SimState s;
      s.active = cfg.graph.ids;
      s.P = ji.at("P").get<std::vector<double>>();
      s.z = ji.value("z", std::vector<double>(s.P.size(), 0.0));
      s.v = ji.value("v", std::vector<double>(s.P.size(), 0.0));
      cfg.init = std::move(s);
    } catch (const json::exception& e) {
      fail(file, "$.init", e.what());
    }
  }

  const json jo = j.value("outputs", json::object());
  cfg.outputs.csv = jo.value("csv", cfg.name + ".csv");
  cfg.outputs.meta = jo.value("meta", cfg.name + ".meta.json");
  return cfg;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());

  const int n = static_cast<int>(traj.master_ids.size());
  out << "t,mismatch,total_cost";
  for (int k = 0; k < n; ++k) out << ",P_" << traj.master_ids[k];
  for (int k = 0; k < n; ++k) out << ",z_" << traj.master_ids[k];
  for (int k = 0; k < n; ++k) out << ",v_" << traj.master_ids[k];
  out << "\n";

  char buf[32];
  auto cell = [&](double x) {
    if (std::isnan(x)) return;  // inactive unit: empty cell
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    out.write(buf, ptr - buf);
  };
  for (size_t r = 0; r < traj.t.size(); ++r) {
    cell(traj.t[r]);
    out << ',';
    cell(traj.mismatch[r]);
    out << ',';
    cell(traj.total_cost[r]);
    for (int k = 0; k < n; ++k) {
      out << ',';
      cell(traj.P[r][k]);
    }
    for (int k = 0; k < n; ++k) {
      out << ',';
      cell(traj.z[r][k]);
    }
    for (int k = 0; k < n; ++k) {
      out << ',';
      cell(traj.v[r][k]);
    }
    out << "\n";
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw std::runtime_error(path.string() + ": missing csv header");

  auto split = [](const std::string& s, auto&& emit) {
    size_t start = 0;
    while (true) {
      const size_t comma = s.find(',', start);
      emit(s.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  };

  split(line, [&](std::string field) { table.header.push_back(std::move(field)); });
  table.columns.resize(table.header.size());

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t col = 0;
    split(line, [&](std::string field) {
      if (col >= table.columns.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": more cells than header columns");
      double x = std::numeric_limits<double>::quiet_NaN();
      if (!field.empty()) {
        const auto res = std::from_chars(field.data(), field.data() + field.size(), x);
        if (res.ec != std::errc{})
          throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                   ": bad number '" + field + "'");
      }
      table.columns[col++].push_back(x);
    });
    if (col != table.columns.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": fewer cells than header columns");
    ++table.rows;
  }
  return table;
}

}  // namespace disped
