#include "geobias/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace geobias {

namespace csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ParseError("row " + std::to_string(line_no) + ": non-numeric value '" + cell +
                         "' in column '" + column + "'");
    return value;
}

}  // namespace csv

namespace {

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw SchemaError("missing column '" + name + "' in CSV header");
}

}  // namespace

PointDataset load_points_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInputError("CSV input is empty");
    const auto header = csv::split_line(line);

    const std::size_t xi = find_column(header, schema.x);
    const std::size_t yi = find_column(header, schema.y);
    std::vector<std::size_t> attr_idx;
    for (const auto& a : schema.attrs) attr_idx.push_back(find_column(header, a));
    std::optional<std::size_t> group_idx;
    if (schema.group) group_idx = find_column(header, *schema.group);

    PointDataset d(schema.attrs, schema.group.has_value());
    std::vector<double> attrs(schema.attrs.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = csv::split_line(line);
        if (cells.size() != header.size())
            throw ParseError("row " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        const double x = csv::parse_number(cells[xi], line_no, schema.x);
        const double y = csv::parse_number(cells[yi], line_no, schema.y);
        for (std::size_t a = 0; a < attr_idx.size(); ++a)
            attrs[a] = csv::parse_number(cells[attr_idx[a]], line_no, schema.attrs[a]);
        std::string group;
        if (group_idx) {
            group = cells[*group_idx];
            if (group.empty())
                throw ParseError("row " + std::to_string(line_no) + ": empty group label");
        }
        d.add(x, y, attrs, group);
    }
    if (d.empty()) throw EmptyInputError("CSV has a header but no data rows");
    return d;
}

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string escape_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

void write_points_csv(const PointDataset& d, std::ostream& out, const std::string& x_name,
                      const std::string& y_name, const std::string& group_name) {
    out << escape_cell(x_name) << ',' << escape_cell(y_name);
    for (const auto& a : d.attr_names()) out << ',' << escape_cell(a);
    if (d.has_groups()) out << ',' << escape_cell(group_name);
    out << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << format_value(d.x(i)) << ',' << format_value(d.y(i));
        for (const auto& a : d.attr_names()) out << ',' << format_value(d.attr(a)[i]);
        if (d.has_groups()) out << ',' << escape_cell(d.group(i));
        out << '\n';
    }
    if (!out) throw IoError("failed writing CSV stream");
}

PointDataset load_points_geojson(std::istream& in, const std::vector<std::string>& attrs,
                                 const std::optional<std::string>& group_prop) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
        throw SchemaError("GeoJSON root must be a FeatureCollection");
    const auto features = doc.find("features");
    if (features == doc.end() || !features->is_array())
        throw SchemaError("FeatureCollection has no features array");

    PointDataset d(attrs, group_prop.has_value());
    std::vector<double> values(attrs.size());
    std::size_t index = 0;
    for (const auto& f : *features) {
        ++index;
        const std::string where = "feature " + std::to_string(index);
        if (!f.is_object() || f.value("type", "") != "Feature")
            throw SchemaError(where + " is not a Feature");
        const auto& geom = f.at("geometry");
        if (!geom.is_object() || geom.value("type", "") != "Point")
            throw SchemaError(where + ": only Point geometries are supported");
        const auto& coords = geom.at("coordinates");
        if (!coords.is_array() || coords.size() < 2)
            throw ParseError(where + ": Point needs [x, y] coordinates");
        const auto props = f.find("properties");
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            if (props == f.end() || !props->is_object() || !props->contains(attrs[a]))
                throw SchemaError(where + ": missing property '" + attrs[a] + "'");
            const auto& v = (*props)[attrs[a]];
            if (!v.is_number()) throw ParseError(where + ": property '" + attrs[a] + "' is not numeric");
            values[a] = v.get<double>();
        }
        std::string group;
        if (group_prop) {
            if (props == f.end() || !props->contains(*group_prop))
                throw SchemaError(where + ": missing group property '" + *group_prop + "'");
            const auto& g = (*props)[*group_prop];
            group = g.is_string() ? g.get<std::string>() : g.dump();
        }
        d.add(coords[0].get<double>(), coords[1].get<double>(), values, group);
    }
    if (d.empty()) throw EmptyInputError("FeatureCollection has no features");
    return d;
}

}  // namespace geobias
