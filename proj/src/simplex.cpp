#include "slab/simplex.hpp"

#include <cmath>
#include <string>

#include "slab/errors.hpp"

namespace slab {

Rotation::Rotation(Mat matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols())
    throw DimensionError("rotation matrix must be square");
  const auto d = matrix_.rows();
  const double orth = (matrix_.transpose() * matrix_ - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (orth > 1e-10 || std::abs(matrix_.determinant() - 1.0) > 1e-10)
    throw PreconditionError("matrix is not in SO(d)");
}

Rotation Rotation::identity(int d) { return Rotation(Mat::Identity(d, d)); }

double Simplex::max_vertex_norm() const {
  double m = 0.0;
  for (const auto& v : vertices_) m = std::max(m, v.norm());
  return m;
}

nlohmann::json Simplex::to_json() const {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : vertices_) {
    std::vector<double> row(v.data(), v.data() + v.size());
    verts.push_back(row);
  }
  return {{"d", dim_}, {"vertices", verts}};
}

Simplex Simplex::from_json(const nlohmann::json& j) {
  if (!j.contains("d") || !j.contains("vertices"))
    throw ParamError("simplex JSON needs keys \"d\" and \"vertices\"");
  const int d = j.at("d").get<int>();
  std::vector<Vec> raw;
  for (const auto& row : j.at("vertices")) {
    const auto coords = row.get<std::vector<double>>();
    if (static_cast<int>(coords.size()) > d || coords.size() > static_cast<std::size_t>(kMaxDim))
      throw DimensionError("simplex vertex has more coordinates than d");
    Vec v(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) v[static_cast<Eigen::Index>(i)] = coords[i];
    raw.push_back(v);
  }
  return normalize_simplex(raw, d);
}

Mat gram_matrix(const std::vector<Vec>& vectors) {
  const auto k = static_cast<Eigen::Index>(vectors.size());
  Mat g(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      g(i, j) = vectors[static_cast<std::size_t>(i)].dot(vectors[static_cast<std::size_t>(j)]);
  return g;
}

Mat gram_matrix(const Simplex& s) { return gram_matrix(s.vertices()); }

Simplex normalize_simplex(const std::vector<Vec>& raw_vertices, int dim) {
  if (raw_vertices.empty()) throw DimensionError("simplex needs at least one vertex");
  int d = dim;
  for (const auto& v : raw_vertices) {
    if (dim <= 0) d = std::max(d, static_cast<int>(v.size()));
    else if (v.size() > dim) throw DimensionError("vertex longer than ambient dimension");
  }
  if (d > kMaxDim) throw DimensionError("ambient dimension above " + std::to_string(kMaxDim));
  const int k = static_cast<int>(raw_vertices.size());
  if (k >= d)
    throw DimensionError("simplex with k = " + std::to_string(k) +
                         " needs ambient dimension d > k, got d = " + std::to_string(d));

  std::vector<Vec> verts;
  verts.reserve(raw_vertices.size());
  for (const auto& v : raw_vertices) {
    Vec p = Vec::Zero(d);
    p.head(v.size()) = v;
    verts.push_back(p);
  }
  const double n1 = verts.front().norm();
  if (!(n1 > 0.0)) throw DegenerateSimplex("first vertex is zero");
  for (auto& v : verts) v /= n1;

  const double det = gram_matrix(verts).determinant();
  if (!(det > kGramTolerance))
    throw DegenerateSimplex("Gram determinant " + std::to_string(det) + " <= 1e-10");
  return Simplex(d, std::move(verts), det);
}

std::vector<Vec> apply_rotation_scale(const Simplex& s, const Rotation& u, double lambda) {
  if (u.dim() != s.dim()) throw DimensionError("rotation and simplex dimensions differ");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(s.k()));
  for (const auto& v : s.vertices()) out.push_back(lambda * (u.matrix() * v));
  return out;
}

double Frame::gram_mismatch(const Simplex& s) const {
  double worst = 0.0;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) {
      const double want = s.vertex(i).dot(s.vertex(j));
      const double got = vectors[static_cast<std::size_t>(i)].dot(vectors[static_cast<std::size_t>(j)]);
      worst = std::max(worst, std::abs(want - got));
    }
  return worst;
}

Frame canonical_frame(const Simplex& s, int count) {
  if (count < 0 || count > s.k()) throw DimensionError("frame size out of range");
  Frame f;
  if (count == 0) return f;
  const Mat g = gram_matrix(s).topLeftCorner(count, count);
  const Eigen::LLT<Mat> llt(g);
  const Mat l = llt.matrixL();
  for (int i = 0; i < count; ++i) {
    Vec y = Vec::Zero(s.dim());
    for (int c = 0; c <= i; ++c) y[c] = l(i, c);
    f.vectors.push_back(y);
  }
  return f;
}

Frame rotate_frame(const Frame& f, const Rotation& u) {
  Frame out;
  for (const auto& y : f.vectors) out.vectors.push_back(u.apply(y));
  return out;
}

}  // namespace slab
