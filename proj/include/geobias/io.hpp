#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geobias/core.hpp"

namespace geobias {

// Column mapping for point CSVs: names of the coordinate columns, the
// attribute columns to ingest, and an optional group-label column.
struct CsvSchema {
    std::string x = "x";
    std::string y = "y";
    std::vector<std::string> attrs;
    std::optional<std::string> group;
};

// Parses a UTF-8 CSV with a header row. Decimal point '.', comma separator,
// double-quoted fields with "" escaping. Row order is preserved.
PointDataset load_points_csv(std::istream& in, const CsvSchema& schema);

// Writes x,y,<attrs...>[,group] with full round-trip precision.
void write_points_csv(const PointDataset& d, std::ostream& out, const std::string& x_name = "x",
                      const std::string& y_name = "y", const std::string& group_name = "group");

// GeoJSON Point FeatureCollection reader; `attrs` names the numeric
// properties to ingest, `group_prop` an optional string property.
PointDataset load_points_geojson(std::istream& in, const std::vector<std::string>& attrs,
                                 const std::optional<std::string>& group_prop = std::nullopt);

// Shared low-level helpers (also used by the accessibility CSV loaders).
namespace csv {
std::vector<std::string> split_line(const std::string& line);
double parse_number(const std::string& cell, std::size_t line_no, const std::string& column);
}  // namespace csv

}  // namespace geobias
