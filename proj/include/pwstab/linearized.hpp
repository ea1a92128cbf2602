#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

#include "pwstab/waves.hpp"

namespace pwstab {

/// Dense circulant matrix of the even multiplier with values symbol[k],
/// k = 0..N/2, i.e. F^{-1} diag(m) F on N grid points.
Eigen::MatrixXd multiplier_matrix(std::span<const double> symbol, int n);

/// Dense 2N x 2N collocation matrix of L = M + c Id - Hess R(phi).
/// Rows 0..N-1 belong to the first component, rows N..2N-1 to the second.
struct LinearizedOperator {
  Eigen::MatrixXd matrix;
  WaveProfile wave;
  double symmetry_defect = 0.0;  // ||L - L^T||_F / ||L||_F

  int grid_size() const noexcept { return wave.size(); }
};

/// Throws ConsistencyError when the wave was built for another system and
/// DomainError when a log-KdV profile is not strictly positive.
LinearizedOperator assemble_operator(const WaveProfile& wave, const SystemSpec& system);
LinearizedOperator assemble_operator(const WaveProfile& wave);

/// Scalar blocks P L P^T = blockdiag(L1, L2) of a proportional wave.
struct OperatorBlocks {
  Matrix2 conjugator{};  // P
  Eigen::MatrixXd l1;
  Eigen::MatrixXd l2;
  double offdiag_residual = 0.0;  // ||(P L P^T)_12||_F / ||L||_F
};

/// The conjugator is O^T from eigen_coupling for kdv and mkdv and the fixed
/// rotation [[1, 1], [-1, 1]] / sqrt 2 for logkdv and lkk. Throws
/// UnsupportedError when the wave is not proportional.
OperatorBlocks diagonalize_operator(const LinearizedOperator& op,
                                    const CouplingReduction& reduction);
OperatorBlocks diagonalize_operator(const LinearizedOperator& op);

/// Reduced lkk operator G = (M11 + M12)_W + omega - phi on N grid points.
Eigen::MatrixXd reduced_lkk_operator(const WaveProfile& wave);

/// Applies a dense 2N operator to a pair of grid functions.
Field2 apply_operator(const Eigen::MatrixXd& matrix, const Field2& u);

/// Row-major dumps. The CSV starts with "# N=<n> L=<length> system=<tag>";
/// the binary file holds the header line followed by 2N*2N little-endian
/// doubles.
void write_operator_csv(const LinearizedOperator& op, const std::string& path);
void write_operator_binary(const LinearizedOperator& op, const std::string& path);

}  // namespace pwstab
