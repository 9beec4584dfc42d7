#include "velo/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace velo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

namespace {

std::string trim(const std::string &s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string &cell, const ParameterSpec &p, const DesignSchema &schema,
                  std::size_t param_index, std::size_t row) {
  const std::string v = trim(cell);
  auto fail = [&](const std::string &why) -> double {
    throw IoError("design row " + std::to_string(row) + ", column '" + p.name + "': " + why);
  };
  switch (p.kind) {
  case ParamKind::boolean:
    if (v == "true" || v == "True" || v == "TRUE" || v == "1") return 1.0;
    if (v == "false" || v == "False" || v == "FALSE" || v == "0") return 0.0;
    return fail("expected true/false, got '" + v + "'");
  case ParamKind::categorical:
    try {
      return static_cast<double>(schema.category_index(param_index, v));
    } catch (const SchemaError &) {
      return fail("unknown category '" + v + "'");
    }
  case ParamKind::integer:
  case ParamKind::continuous: {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      return fail("cannot parse number '" + v + "'");
    if (p.kind == ParamKind::integer) out = std::round(out);
    return out;
  }
  }
  return 0.0;
}

} // namespace

std::string designs_to_csv(const std::vector<Design> &designs, const DesignSchema &schema) {
  std::ostringstream out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) out << ',';
    out << schema.param(i).name;
  }
  out << '\n';
  for (const Design &d : designs) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (i) out << ',';
      const ParameterSpec &p = schema.param(i);
      switch (p.kind) {
      case ParamKind::boolean:
        out << (d.boolean(i) ? "true" : "false");
        break;
      case ParamKind::categorical:
        out << p.categories[d.category(i)];
        break;
      case ParamKind::integer:
        out << d.integer(i);
        break;
      case ParamKind::continuous:
        out << format_double(d.real(i));
        break;
      }
    }
    out << '\n';
  }
  return out.str();
}

void write_designs_csv(const std::string &path, const std::vector<Design> &designs,
                       const DesignSchema &schema) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << designs_to_csv(designs, schema);
}

std::vector<Design> designs_from_csv(const std::string &text, const DesignSchema &schema) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("design CSV is empty");
  const std::vector<std::string> header = split_csv_line(line);
  std::vector<std::size_t> column_to_param;
  column_to_param.reserve(header.size());
  std::vector<bool> seen(schema.size(), false);
  for (const std::string &raw : header) {
    const std::string name = trim(raw);
    auto idx = schema.find(name);
    if (!idx) throw IoError("design CSV header has unknown column '" + name + "'");
    if (seen[*idx]) throw IoError("design CSV header repeats column '" + name + "'");
    seen[*idx] = true;
    column_to_param.push_back(*idx);
  }
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (!seen[i]) throw IoError("design CSV header is missing column '" + schema.param(i).name + "'");

  std::vector<Design> designs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != column_to_param.size())
      throw IoError("design row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                    " fields, expected " + std::to_string(column_to_param.size()));
    Design d(schema.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::size_t pi = column_to_param[c];
      d.set_raw(pi, parse_cell(cells[c], schema.param(pi), schema, pi, row));
    }
    designs.push_back(std::move(d));
  }
  return designs;
}

std::vector<Design> read_designs_csv(const std::string &path, const DesignSchema &schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open design CSV '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return designs_from_csv(buf.str(), schema);
}

} // namespace velo
