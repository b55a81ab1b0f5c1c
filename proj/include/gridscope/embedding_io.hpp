#pragma once

// File formats for point clouds, distance matrices and high-dimensional
// vectors.
//
//   embedding CSV   header "id,x", "id,x,y" or "id,x,y,z"
//   embedding JSON  {"dims":2,"points":[{"id":"t1","coords":[0.5,0.5]}]}
//   distance CSV    first row "id,<id1>,<id2>,..."; each row "<id>,<d...>"
//   vectors CSV     header "id,<f1>,<f2>,..." (any feature names)

#include "gridscope/embedding.hpp"
#include "gridscope/point_cloud.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace gridscope::embed {

// Detects JSON by a leading '{', CSV otherwise.
PointCloud read_embedding(std::istream& in);
PointCloud import_embedding(const std::filesystem::path& path);

void write_embedding_csv(std::ostream& out, const PointCloud& cloud);
std::string embedding_json(const PointCloud& cloud);

DistanceMatrix read_distance_matrix(std::istream& in);
DistanceMatrix import_distance_matrix(const std::filesystem::path& path);
void write_distance_matrix_csv(std::ostream& out, const DistanceMatrix& d);

HighDimVectors read_vectors(std::istream& in);
HighDimVectors import_vectors(const std::filesystem::path& path);
void write_vectors_csv(std::ostream& out, const HighDimVectors& v);

}  // namespace gridscope::embed
