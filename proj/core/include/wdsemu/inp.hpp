#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wdsemu/error.hpp"
#include "wdsemu/network.hpp"

namespace wdsemu {

/// Parse failure with a 1-based source location.
class InpError : public DataError {
 public:
  InpError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct InpRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
  std::vector<std::size_t> columns;  // 1-based column of each field

  bool operator==(const InpRecord& other) const { return fields == other.fields; }
};

struct InpSection {
  std::string name;  // upper case, without brackets
  bool known = false;
  std::vector<InpRecord> records;     // known sections except TITLE
  std::vector<std::string> raw_lines; // TITLE and unknown sections, verbatim

  bool operator==(const InpSection& other) const {
    return name == other.name && known == other.known && records == other.records &&
           raw_lines == other.raw_lines;
  }
};

/// Ordered section list of an EPANET input file subset. Supported sections
/// are TITLE, JUNCTIONS, RESERVOIRS, PIPES, DEMANDS, PATTERNS, COORDINATES
/// and OPTIONS; anything else is kept verbatim.
struct InpDocument {
  std::vector<InpSection> sections;

  const InpSection* find(std::string_view name) const;
  std::vector<std::string> unknown_sections() const;
  bool operator==(const InpDocument& other) const { return sections == other.sections; }
};

using PatternTable = std::map<std::string, std::vector<double>>;

struct ParsedInp {
  InpDocument document;
  WaterNetwork network;
  PatternTable patterns;
  std::string flow_units;            // as written in OPTIONS, default "GPM"
  double pattern_step_hours = 1.0;
};

/// Tokenizes text into sections and records. Throws InpError.
InpDocument parse_inp_document(std::string_view text);

/// Builds the network (SI units, m^3/s demands) from a parsed document.
ParsedInp build_network(InpDocument document);

/// parse_inp_document followed by build_network.
ParsedInp parse_inp(std::string_view text);

ParsedInp load_inp(const std::string& path);

/// Serializes a document; parse_inp_document(render_inp(d)) == d.
std::string render_inp(const InpDocument& document);

/// Conversion factor from the named EPANET flow unit to m^3/s.
double flow_unit_to_si(std::string_view units);

}  // namespace wdsemu
