#ifndef PCDAG_DATASET_HPP
#define PCDAG_DATASET_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "pcdag/graph.hpp"

namespace pcdag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Known generating truth attached to simulated data.
struct GroundTruth {
  std::optional<Matrix> sigma;
  std::optional<Matrix> omega;
  std::optional<Dag> dag;
};

// n x p observation matrix, rows are observations. Variable naming and
// any ground truth live here; the estimation modules only ever see
// matrices and zero-based column indices.
struct Dataset {
  Matrix x;
  std::optional<GroundTruth> truth;

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }

  Vector column_means() const { return x.colwise().mean(); }

  // Rows shifted by the given per-column offsets (usually a training
  // mean, so held-out data is centered consistently).
  Dataset centered_by(const Vector& means) const;
  Dataset centered() const { return centered_by(column_means()); }
};

// Headerless CSV, one observation per row, full-precision decimal
// (17 significant digits). Ragged rows raise InputError.
Dataset read_csv(const std::string& path);
void write_csv(const std::string& path, const Matrix& x);
std::string matrix_to_csv(const Matrix& x);
Matrix matrix_from_csv(const std::string& text);

}  // namespace pcdag

#endif
