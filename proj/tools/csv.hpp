#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "wdsemu/network.hpp"

namespace wdsemu::cli {

/// Rows of a headed CSV file; the header must contain `required` columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path, std::span<const std::string> required);

/// node_id,demand rows; nodes absent from the file keep `fallback`.
std::vector<double> read_demands(const std::string& path, const WaterNetwork& net, std::vector<double> fallback);

/// edge_id,from,to,flow rows for every directed edge.
std::vector<double> read_edge_flows(const std::string& path, const WaterNetwork& net);

void write_node_csv(const std::string& path, const WaterNetwork& net, std::span<const double> heads,
                    std::span<const double> demands);
void write_edge_csv(const std::string& path, const WaterNetwork& net, std::span<const double> flows);

/// Directed edge label: pipe id for the from->to direction, pipe id plus
/// "~r" for the reverse one.
std::string edge_label(const WaterNetwork& net, EdgeIndex e);

/// Flat key=value file; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path);

}  // namespace wdsemu::cli
