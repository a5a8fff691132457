#include "clsel/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "clsel/errors.hpp"
#include "clsel/io.hpp"

namespace clsel {

void Dataset::validate(bool ordinal) const {
  if (n() < 2)
    throw ParameterError("dataset needs at least 2 observations (n >= 2)");
  if (d() < 1) throw ParameterError("dataset needs at least one variable");
  if (!observations.allFinite())
    throw ParameterError("dataset contains missing or non-finite entries");
  if (ordinal) {
    if (!group.has_value())
      throw ParameterError("ordinal data requires a group column");
    if (group->size() != n())
      throw ParameterError("group column length does not match n");
    for (int i = 0; i < n(); ++i) {
      const int g = (*group)(i);
      if (g != 0 && g != 1)
        throw ParameterError("group labels must be 0 or 1");
      for (int j = 0; j < d(); ++j) {
        const double v = observations(i, j);
        if (v != 0.0 && v != 1.0 && v != 2.0)
          throw ParameterError("ordinal entries must be in {0,1,2}");
      }
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, int row, int col) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    std::ostringstream msg;
    msg << "cannot parse numeric value '" << s << "' at row " << row
        << ", column " << (col + 1);
    throw ParameterError(msg.str());
  }
  return v;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line))
    throw ParameterError("empty CSV file: " + path);
  auto header = split_csv_line(line);
  if (header.empty()) throw ParameterError("CSV header is empty: " + path);

  const bool has_group = header.back() == "group";
  const int d = static_cast<int>(header.size()) - (has_group ? 1 : 0);
  if (d < 1) throw ParameterError("CSV has no data columns: " + path);

  std::vector<std::vector<double>> rows;
  std::vector<int> groups;
  int row_index = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != static_cast<int>(header.size())) {
      std::ostringstream msg;
      msg << "row " << row_index << " has " << fields.size()
          << " fields, expected " << header.size();
      throw ParameterError(msg.str());
    }
    std::vector<double> row(d);
    for (int j = 0; j < d; ++j) row[j] = parse_double(fields[j], row_index, j);
    rows.push_back(std::move(row));
    if (has_group) {
      const double g = parse_double(fields[d], row_index, d);
      if (g != 0.0 && g != 1.0)
        throw ParameterError("group labels must be 0 or 1");
      groups.push_back(static_cast<int>(g));
    }
    ++row_index;
  }

  Dataset data;
  data.observations.resize(static_cast<int>(rows.size()), d);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    for (int j = 0; j < d; ++j) data.observations(i, j) = rows[i][j];
  if (has_group) {
    Eigen::VectorXi g(static_cast<int>(groups.size()));
    for (int i = 0; i < g.size(); ++i) g(i) = groups[i];
    data.group = g;
  }
  data.column_names.assign(header.begin(), header.begin() + d);
  data.validate(false);
  return data;
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream out;
  for (int j = 0; j < data.d(); ++j) {
    if (j > 0) out << ',';
    if (j < static_cast<int>(data.column_names.size())) {
      out << data.column_names[j];
    } else {
      out << 'x' << (j + 1);
    }
  }
  if (data.group.has_value()) out << ",group";
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j) {
      if (j > 0) out << ',';
      out << format_double(data.observations(i, j));
    }
    if (data.group.has_value()) out << ',' << (*data.group)(i);
    out << '\n';
  }
  return out.str();
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  write_file_atomic(path, dataset_to_csv(data));
}

}  // namespace clsel
