#include "gridscope/embedding_io.hpp"

#include "csv.hpp"
#include "gridscope/error.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gridscope::embed {

namespace {

constexpr const char* kModule = "embedding";

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(kModule, "cannot open '" + path.string() + "'");
  return in;
}

// Rows are numbered as file lines, header included.
std::string row_label(std::size_t line_no) { return "row " + std::to_string(line_no); }

double parse_number(std::string_view field, std::size_t line_no, const std::string& what) {
  auto v = csv::parse_double(field);
  if (!v) throw InputError(kModule, row_label(line_no) + ": cannot parse " + what + " '" + std::string(field) + "'");
  if (!std::isfinite(*v)) throw InputError(kModule, row_label(line_no) + ": non-finite " + what);
  return *v;
}

PointCloud read_embedding_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("malformed embedding JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array()) {
    throw InputError(kModule, "embedding JSON needs a \"points\" array");
  }
  const auto& points = doc["points"];
  std::size_t dims = 0;
  if (doc.contains("dims")) {
    if (!doc["dims"].is_number_integer() || doc["dims"].get<int>() < 1 || doc["dims"].get<int>() > 3) {
      throw InputError(kModule, "\"dims\" must be 1, 2 or 3");
    }
    dims = doc["dims"].get<std::size_t>();
  } else if (!points.empty() && points[0].contains("coords") && points[0]["coords"].is_array()) {
    dims = points[0]["coords"].size();
  }
  std::vector<Point> pts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const std::string where = "point " + std::to_string(i);
    if (!p.is_object() || !p.contains("id") || !p.contains("coords") || !p["coords"].is_array()) {
      throw InputError(kModule, where + ": expected {\"id\":..., \"coords\":[...]}");
    }
    std::string id = p["id"].is_string() ? p["id"].get<std::string>() : p["id"].dump();
    std::vector<double> coords;
    for (const auto& c : p["coords"]) {
      if (!c.is_number()) throw InputError(kModule, where + " ('" + id + "'): non-numeric coordinate");
      coords.push_back(c.get<double>());
      if (!std::isfinite(coords.back())) throw InputError(kModule, where + " ('" + id + "'): non-finite coordinate");
    }
    if (coords.size() != dims) {
      throw InputError(kModule, where + " ('" + id + "'): has " + std::to_string(coords.size()) +
                                    " coordinates, expected " + std::to_string(dims));
    }
    pts.push_back({std::move(id), std::move(coords)});
  }
  if (dims == 0) throw InputError(kModule, "embedding JSON has no dims and no points");
  return PointCloud(dims, std::move(pts));
}

PointCloud read_embedding_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no)) throw InputError(kModule, "embedding CSV is empty");
  const auto header = csv::split_line(line);
  static const char* const kAxes[] = {"x", "y", "z"};
  if (header.size() < 2 || header.size() > 4 || header[0] != "id") {
    throw InputError(kModule, "embedding CSV header must be id,x[,y[,z]]");
  }
  for (std::size_t a = 1; a < header.size(); ++a) {
    if (header[a] != kAxes[a - 1]) throw InputError(kModule, "embedding CSV header must be id,x[,y[,z]]");
  }
  const std::size_t dims = header.size() - 1;

  std::vector<Point> pts;
  std::map<std::string, std::size_t> seen;
  while (csv::next_record(in, line, line_no)) {
    auto fields = csv::split_line(line);
    if (fields.size() != header.size()) {
      throw InputError(kModule, row_label(line_no) + ": expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw InputError(kModule, row_label(line_no) + ": empty id");
    if (auto [it, fresh] = seen.emplace(fields[0], line_no); !fresh) {
      throw InputError(kModule, row_label(line_no) + ": duplicate id '" + fields[0] + "' (first seen on " +
                                    row_label(it->second) + ")");
    }
    std::vector<double> coords(dims);
    for (std::size_t a = 0; a < dims; ++a) coords[a] = parse_number(fields[a + 1], line_no, "coordinate");
    pts.push_back({std::move(fields[0]), std::move(coords)});
  }
  return PointCloud(dims, std::move(pts));
}

bool looks_like_json(std::istream& in) {
  in >> std::ws;
  return in.peek() == '{';
}

}  // namespace

PointCloud read_embedding(std::istream& in) {
  return looks_like_json(in) ? read_embedding_json(in) : read_embedding_csv(in);
}

PointCloud import_embedding(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_embedding(in);
}

void write_embedding_csv(std::ostream& out, const PointCloud& cloud) {
  static const char* const kAxes[] = {"x", "y", "z"};
  out << "id";
  for (std::size_t a = 0; a < cloud.dims(); ++a) out << ',' << (a < 3 ? kAxes[a] : "w");
  out << '\n';
  for (const auto& p : cloud.points()) {
    out << csv::quote_if_needed(p.id);
    for (double c : p.coords) out << ',' << csv::format_double(c);
    out << '\n';
  }
}

std::string embedding_json(const PointCloud& cloud) {
  nlohmann::ordered_json doc;
  doc["dims"] = cloud.dims();
  doc["points"] = nlohmann::ordered_json::array();
  for (const auto& p : cloud.points()) doc["points"].push_back({{"id", p.id}, {"coords", p.coords}});
  return doc.dump(2) + "\n";
}

DistanceMatrix read_distance_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no)) throw InputError(kModule, "distance matrix CSV is empty");
  auto header = csv::split_line(line);
  if (header.size() < 2) throw InputError(kModule, "distance matrix header needs at least one id");
  std::vector<std::string> ids(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd values(n, n);
  Eigen::Index row = 0;
  while (csv::next_record(in, line, line_no)) {
    auto fields = csv::split_line(line);
    if (row >= n) throw InputError(kModule, row_label(line_no) + ": more rows than ids in the header");
    if (fields.size() != header.size()) {
      throw InputError(kModule, row_label(line_no) + ": expected " + std::to_string(header.size()) + " fields");
    }
    if (fields[0] != ids[static_cast<std::size_t>(row)]) {
      throw InputError(kModule, row_label(line_no) + ": row id '" + fields[0] + "' does not match column id '" +
                                    ids[static_cast<std::size_t>(row)] + "'");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      values(row, j) = parse_number(fields[static_cast<std::size_t>(j) + 1], line_no, "distance");
    }
    ++row;
  }
  if (row != n) throw InputError(kModule, "distance matrix has " + std::to_string(row) + " rows for " +
                                              std::to_string(n) + " ids");
  return DistanceMatrix(std::move(ids), std::move(values));
}

DistanceMatrix import_distance_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_distance_matrix(in);
}

void write_distance_matrix_csv(std::ostream& out, const DistanceMatrix& d) {
  out << "id";
  for (const auto& id : d.ids()) out << ',' << csv::quote_if_needed(id);
  out << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << csv::quote_if_needed(d.ids()[i]);
    for (std::size_t j = 0; j < d.size(); ++j) out << ',' << csv::format_double(d(i, j));
    out << '\n';
  }
}

HighDimVectors read_vectors(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_record(in, line, line_no)) throw InputError(kModule, "vectors CSV is empty");
  const auto header = csv::split_line(line);
  if (header.size() < 2 || header[0] != "id") throw InputError(kModule, "vectors CSV header must start with id");
  HighDimVectors v;
  while (csv::next_record(in, line, line_no)) {
    auto fields = csv::split_line(line);
    if (fields.size() != header.size()) {
      throw InputError(kModule, row_label(line_no) + ": expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) vec.push_back(parse_number(fields[k], line_no, "value"));
    v.ids.push_back(std::move(fields[0]));
    v.vectors.push_back(std::move(vec));
  }
  v.validate();
  return v;
}

HighDimVectors import_vectors(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_vectors(in);
}

void write_vectors_csv(std::ostream& out, const HighDimVectors& v) {
  out << "id";
  const std::size_t dim = v.vectors.empty() ? 0 : v.vectors.front().size();
  for (std::size_t k = 0; k < dim; ++k) out << ",f" << k;
  out << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << csv::quote_if_needed(v.ids[i]);
    for (double x : v.vectors[i]) out << ',' << csv::format_double(x);
    out << '\n';
  }
}

}  // namespace gridscope::embed
