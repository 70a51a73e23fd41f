#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "slab/linalg.hpp"

namespace slab {

inline constexpr double kGramTolerance = 1e-10;

// d x d orthogonal matrix with determinant +1.
class Rotation {
 public:
  explicit Rotation(Mat matrix);
  static Rotation identity(int d);

  const Mat& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  Vec apply(const Vec& v) const { return matrix_ * v; }

 private:
  Mat matrix_;
};

// The vertex set {0, v1, ..., vk} of a non-degenerate k-simplex, stored in
// ambient dimension d with |v1| = 1.
class Simplex {
 public:
  int k() const { return static_cast<int>(vertices_.size()); }
  int dim() const { return dim_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const Vec& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  double gram_determinant() const { return gram_det_; }
  double max_vertex_norm() const;

  nlohmann::json to_json() const;
  static Simplex from_json(const nlohmann::json& j);

 private:
  friend Simplex normalize_simplex(const std::vector<Vec>&, int);
  Simplex(int dim, std::vector<Vec> vertices, double gram_det)
      : dim_(dim), vertices_(std::move(vertices)), gram_det_(gram_det) {}

  int dim_;
  std::vector<Vec> vertices_;
  double gram_det_;
};

// Scales the raw vertices by 1/|v1|. Vertices given in fewer than `dim`
// coordinates are zero-padded; dim <= 0 means "use the vertex length".
// Throws DimensionError when k >= d and DegenerateSimplex when the Gram
// determinant of the scaled vertices is <= 1e-10.
Simplex normalize_simplex(const std::vector<Vec>& raw_vertices, int dim = 0);

// G[i][i'] = v_i . v_i'.
Mat gram_matrix(const Simplex& s);
Mat gram_matrix(const std::vector<Vec>& vectors);

// {lambda U v_1, ..., lambda U v_k}.
std::vector<Vec> apply_rotation_scale(const Simplex& s, const Rotation& u,
                                      double lambda);

// Frame y_1..y_{j-1} whose Gram matrix matches that of v_1..v_{j-1}.
struct Frame {
  std::vector<Vec> vectors;

  int size() const { return static_cast<int>(vectors.size()); }
  Mat gram() const { return gram_matrix(vectors); }
  // max |y_i . y_i' - v_i . v_i'| over the leading block of the simplex.
  double gram_mismatch(const Simplex& s) const;
};

// Lower-triangular frame: y_i lies in span{e_1..e_i}, built from the Cholesky
// factor of the leading (count x count) Gram block.
Frame canonical_frame(const Simplex& s, int count);

Frame rotate_frame(const Frame& f, const Rotation& u);

}  // namespace slab
