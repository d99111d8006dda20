#include "csv.hpp"

#include <fstream>
#include <sstream>

#include "wdsemu/error.hpp"

namespace wdsemu::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& text, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError(path + ":" + std::to_string(line) + ": '" + text + "' is not a number");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.precision(17);
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError("CSV column '" + name + "' is missing");
}

CsvTable read_csv(const std::string& path, std::span<const std::string> required) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DataError(path + ":" + std::to_string(no) + ": expected " + std::to_string(t.header.size()) + " fields");
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(no);
  }
  for (const auto& name : required) {
    try {
      (void)t.column(name);
    } catch (const DataError&) {
      throw DataError(path + ": missing column '" + name + "'");
    }
  }
  return t;
}

std::vector<double> read_demands(const std::string& path, const WaterNetwork& net, std::vector<double> fallback) {
  const std::vector<std::string> req{"node_id", "demand"};
  const CsvTable t = read_csv(path, req);
  const auto id_col = t.column("node_id");
  const auto d_col = t.column("demand");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const NodeIndex v = net.find_node(t.rows[i][id_col]);
    if (v < 0) throw DataError(path + ":" + std::to_string(t.lines[i]) + ": unknown node '" + t.rows[i][id_col] + "'");
    fallback[static_cast<std::size_t>(v)] = net.is_reservoir(v) ? 0.0 : to_double(t.rows[i][d_col], path, t.lines[i]);
  }
  return fallback;
}

std::vector<double> read_edge_flows(const std::string& path, const WaterNetwork& net) {
  const std::vector<std::string> req{"edge_id", "from", "to", "flow"};
  const CsvTable t = read_csv(path, req);
  const auto from_col = t.column("from");
  const auto to_col = t.column("to");
  const auto q_col = t.column("flow");
  std::vector<double> flows(net.num_edges(), 0.0);
  std::vector<bool> seen(net.num_edges(), false);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const NodeIndex a = net.find_node(t.rows[i][from_col]);
    const NodeIndex b = net.find_node(t.rows[i][to_col]);
    bool found = false;
    if (a >= 0 && b >= 0) {
      for (EdgeIndex e : net.out_edges(a)) {
        if (net.target(e) == b && !seen[static_cast<std::size_t>(e)]) {
          flows[static_cast<std::size_t>(e)] = to_double(t.rows[i][q_col], path, t.lines[i]);
          seen[static_cast<std::size_t>(e)] = true;
          found = true;
          break;
        }
      }
    }
    if (!found) throw DataError(path + ":" + std::to_string(t.lines[i]) + ": no free edge from '" + t.rows[i][from_col] + "' to '" + t.rows[i][to_col] + "'");
  }
  for (std::size_t e = 0; e < seen.size(); ++e) {
    if (!seen[e]) throw DataError(path + ": no flow given for edge " + edge_label(net, static_cast<EdgeIndex>(e)));
  }
  return flows;
}

std::string edge_label(const WaterNetwork& net, EdgeIndex e) {
  const std::string& id = net.pipe_of(e).id;
  return e % 2 == 0 ? id : id + "~r";
}

void write_node_csv(const std::string& path, const WaterNetwork& net, std::span<const double> heads,
                    std::span<const double> demands) {
  auto out = open_out(path);
  out << "node_id,head_m,demand\n";
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    out << net.node(static_cast<NodeIndex>(v)).id << ',' << heads[v] << ',' << demands[v] << '\n';
  }
}

void write_edge_csv(const std::string& path, const WaterNetwork& net, std::span<const double> flows) {
  auto out = open_out(path);
  out << "edge_id,from,to,flow\n";
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    out << edge_label(net, ei) << ',' << net.node(net.source(ei)).id << ',' << net.node(net.target(ei)).id << ','
        << flows[e] << '\n';
  }
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError(path + ":" + std::to_string(no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    for (auto& c : key) {
      if (c == '_') c = '-';
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace wdsemu::cli
