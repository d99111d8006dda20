#include "wdsemu/inp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace wdsemu {

namespace {

constexpr std::string_view kKnownSections[] = {"TITLE",    "JUNCTIONS", "RESERVOIRS",  "PIPES",
                                               "DEMANDS",  "PATTERNS",  "COORDINATES", "OPTIONS"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_known(std::string_view name) {
  return std::find(std::begin(kKnownSections), std::end(kKnownSections), name) != std::end(kKnownSections);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

InpRecord tokenize(std::string_view line, std::size_t line_no) {
  InpRecord rec;
  rec.line = line_no;
  const auto comment = line.find(';');
  if (comment != std::string_view::npos) line = line.substr(0, comment);
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    rec.fields.emplace_back(line.substr(start, i - start));
    rec.columns.push_back(start + 1);
  }
  return rec;
}

double number(const InpRecord& rec, std::size_t k, const char* what) {
  if (k >= rec.fields.size()) {
    throw InpError(rec.line, rec.columns.empty() ? 1 : rec.columns.back(), std::string("missing ") + what);
  }
  const auto& f = rec.fields[k];
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw InpError(rec.line, rec.columns[k], std::string("non-numeric ") + what + " '" + f + "'");
  }
  return value;
}

struct UnitSystem {
  double flow = 1.0;      // -> m^3/s
  double length = 1.0;    // -> m
  double diameter = 1e-3; // -> m
};

UnitSystem unit_system(std::string_view flow_units) {
  const std::string u = upper(flow_units);
  UnitSystem s;
  s.flow = flow_unit_to_si(u);
  const bool us = u == "CFS" || u == "GPM" || u == "MGD" || u == "IMGD" || u == "AFD";
  if (us) {
    s.length = 0.3048;
    s.diameter = 0.0254;
  }
  return s;
}

}  // namespace

InpError::InpError(std::size_t line, std::size_t column, const std::string& message)
    : DataError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

double flow_unit_to_si(std::string_view units) {
  static const std::unordered_map<std::string, double> table = {
      {"CFS", 0.028316846592},     {"GPM", 6.30901964e-5},   {"MGD", 0.0438126364},
      {"IMGD", 0.0526167896},      {"AFD", 0.0142764102},    {"LPS", 1e-3},
      {"LPM", 1e-3 / 60.0},        {"MLD", 1e3 / 86400.0},   {"CMH", 1.0 / 3600.0},
      {"CMD", 1.0 / 86400.0},      {"CMS", 1.0}};
  const auto it = table.find(upper(units));
  if (it == table.end()) throw DataError("unknown flow units '" + std::string(units) + "'");
  return it->second;
}

const InpSection* InpDocument::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::string> InpDocument::unknown_sections() const {
  std::vector<std::string> out;
  for (const auto& s : sections) {
    if (!s.known) out.push_back(s.name);
  }
  return out;
}

InpDocument parse_inp_document(std::string_view text) {
  InpDocument doc;
  InpSection* current = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool ended = false;
  while (pos <= text.size() && !ended) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    ++line_no;

    const auto stripped = trim(line);
    if (!stripped.empty() && stripped.front() == '[') {
      const auto close = stripped.find(']');
      if (close == std::string_view::npos) {
        throw InpError(line_no, static_cast<std::size_t>(stripped.data() - line.data()) + 1,
                       "unterminated section header");
      }
      const std::string name = upper(trim(stripped.substr(1, close - 1)));
      if (name == "END") {
        ended = true;
        break;
      }
      doc.sections.push_back(InpSection{name, is_known(name), {}, {}});
      current = &doc.sections.back();
      continue;
    }
    if (current == nullptr) {
      if (tokenize(line, line_no).fields.empty()) continue;
      throw InpError(line_no, 1, "data before the first section header");
    }
    if (!current->known || current->name == "TITLE") {
      if (!stripped.empty()) current->raw_lines.emplace_back(line);
      continue;
    }
    auto rec = tokenize(line, line_no);
    if (!rec.fields.empty()) current->records.push_back(std::move(rec));
  }
  return doc;
}

ParsedInp build_network(InpDocument document) {
  const auto* junctions = document.find("JUNCTIONS");
  const auto* pipes = document.find("PIPES");
  if (junctions == nullptr) throw InpError(1, 1, "missing mandatory section [JUNCTIONS]");
  if (pipes == nullptr) throw InpError(1, 1, "missing mandatory section [PIPES]");

  std::string flow_units = "GPM";
  std::string default_pattern;
  std::string headloss = "H-W";
  double multiplier = 1.0;
  if (const auto* opts = document.find("OPTIONS")) {
    for (const auto& rec : opts->records) {
      const std::string key = upper(rec.fields[0]);
      if (key == "UNITS" && rec.fields.size() > 1) flow_units = upper(rec.fields[1]);
      if (key == "HEADLOSS" && rec.fields.size() > 1) headloss = upper(rec.fields[1]);
      if (key == "PATTERN" && rec.fields.size() > 1) default_pattern = rec.fields[1];
      if (key == "DEMAND" && rec.fields.size() > 2 && upper(rec.fields[1]) == "MULTIPLIER") {
        multiplier = number(rec, 2, "demand multiplier");
      }
    }
  }
  if (headloss != "H-W") throw DataError("only Hazen-Williams head loss (H-W) is supported, got " + headloss);
  UnitSystem units;
  try {
    units = unit_system(flow_units);
  } catch (const DataError& err) {
    throw InpError(1, 1, err.what());
  }

  PatternTable patterns;
  if (const auto* pats = document.find("PATTERNS")) {
    for (const auto& rec : pats->records) {
      auto& mult = patterns[rec.fields[0]];
      for (std::size_t k = 1; k < rec.fields.size(); ++k) mult.push_back(number(rec, k, "pattern multiplier"));
    }
  }
  if (default_pattern.empty() && patterns.count("1")) default_pattern = "1";

  std::vector<Node> nodes;
  std::unordered_map<std::string, NodeIndex> index;
  auto add_node = [&](const InpRecord& rec, Node node) {
    if (!index.emplace(node.id, static_cast<NodeIndex>(nodes.size())).second) {
      throw InpError(rec.line, rec.columns[0], "duplicate node id '" + node.id + "'");
    }
    nodes.push_back(std::move(node));
  };
  for (const auto& rec : junctions->records) {
    Node node;
    node.id = rec.fields[0];
    node.kind = NodeKind::Consumer;
    node.elevation = rec.fields.size() > 1 ? number(rec, 1, "elevation") * units.length : 0.0;
    node.head = node.elevation;
    node.base_demand = rec.fields.size() > 2 ? number(rec, 2, "demand") * units.flow * multiplier : 0.0;
    node.pattern = rec.fields.size() > 3 ? rec.fields[3] : default_pattern;
    add_node(rec, std::move(node));
  }
  if (const auto* res = document.find("RESERVOIRS")) {
    for (const auto& rec : res->records) {
      Node node;
      node.id = rec.fields[0];
      node.kind = NodeKind::Reservoir;
      node.head = number(rec, 1, "reservoir head") * units.length;
      node.elevation = node.head;
      add_node(rec, std::move(node));
    }
  }
  if (const auto* dem = document.find("DEMANDS")) {
    std::unordered_map<std::string, bool> replaced;
    for (const auto& rec : dem->records) {
      const auto it = index.find(rec.fields[0]);
      if (it == index.end()) {
        throw InpError(rec.line, rec.columns[0], "demand for unknown junction '" + rec.fields[0] + "'");
      }
      auto& node = nodes[static_cast<std::size_t>(it->second)];
      if (node.kind != NodeKind::Consumer) {
        throw InpError(rec.line, rec.columns[0], "demand assigned to reservoir '" + rec.fields[0] + "'");
      }
      const double d = number(rec, 1, "demand") * units.flow * multiplier;
      if (!replaced[node.id]) {
        replaced[node.id] = true;
        node.base_demand = d;
        if (rec.fields.size() > 2) node.pattern = rec.fields[2];
      } else {
        node.base_demand += d;
      }
    }
  }
  for (const auto& node : nodes) {
    if (!node.pattern.empty() && !patterns.count(node.pattern)) {
      throw DataError("junction '" + node.id + "' references unknown pattern '" + node.pattern + "'");
    }
  }

  std::vector<Pipe> pipe_list;
  std::unordered_map<std::string, bool> pipe_ids;
  for (const auto& rec : pipes->records) {
    if (rec.fields.size() < 6) {
      throw InpError(rec.line, rec.columns.back(), "pipe record needs id, two nodes, length, diameter, roughness");
    }
    if (!pipe_ids.emplace(rec.fields[0], true).second) {
      throw InpError(rec.line, rec.columns[0], "duplicate pipe id '" + rec.fields[0] + "'");
    }
    Pipe pipe;
    pipe.id = rec.fields[0];
    for (int end = 1; end <= 2; ++end) {
      const auto it = index.find(rec.fields[static_cast<std::size_t>(end)]);
      if (it == index.end()) {
        throw InpError(rec.line, rec.columns[static_cast<std::size_t>(end)],
                       "pipe '" + pipe.id + "' references unknown node '" + rec.fields[static_cast<std::size_t>(end)] + "'");
      }
      (end == 1 ? pipe.from : pipe.to) = it->second;
    }
    if (pipe.from == pipe.to) throw InpError(rec.line, rec.columns[2], "pipe '" + pipe.id + "' is a self loop");
    pipe.attr.length = number(rec, 3, "length") * units.length;
    pipe.attr.diameter = number(rec, 4, "diameter") * units.diameter;
    pipe.attr.roughness = number(rec, 5, "roughness");
    for (std::size_t k = 3; k <= 5; ++k) {
      if (!(number(rec, k, "pipe attribute") > 0.0)) {
        throw InpError(rec.line, rec.columns[k], "pipe '" + pipe.id + "' attribute must be positive");
      }
    }
    if (rec.fields.size() > 7) {
      const std::string status = upper(rec.fields[7]);
      if (status != "OPEN") {
        throw InpError(rec.line, rec.columns[7], "pipe status '" + rec.fields[7] + "' is not supported");
      }
    }
    pipe_list.push_back(std::move(pipe));
  }

  ParsedInp out{std::move(document), WaterNetwork(std::move(nodes), std::move(pipe_list)), std::move(patterns),
                flow_units, 1.0};
  return out;
}

ParsedInp parse_inp(std::string_view text) { return build_network(parse_inp_document(text)); }

ParsedInp load_inp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_inp(buf.str());
}

std::string render_inp(const InpDocument& document) {
  std::ostringstream out;
  for (const auto& section : document.sections) {
    out << '[' << section.name << "]\n";
    for (const auto& line : section.raw_lines) out << line << '\n';
    for (const auto& rec : section.records) {
      for (std::size_t k = 0; k < rec.fields.size(); ++k) out << (k ? "\t" : " ") << rec.fields[k];
      out << '\n';
    }
    out << '\n';
  }
  out << "[END]\n";
  return out.str();
}

}  // namespace wdsemu
