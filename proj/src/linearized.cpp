#include "pwstab/linearized.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "pwstab/errors.hpp"

namespace pwstab {
namespace {

const Matrix2 kRotation = {{{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2},
                            {-1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2}}};

bool is_proportional(const WaveProfile& wave, double ratio) {
  const double scale = max_abs(wave.values[0]) * std::max(1.0, std::abs(ratio));
  for (int j = 0; j < wave.size(); ++j) {
    if (std::abs(wave.values[1][j] - ratio * wave.values[0][j]) > 1e-12 * scale) return false;
  }
  return true;
}

OperatorBlocks conjugate(const LinearizedOperator& op, const Matrix2& p) {
  const int n = op.grid_size();
  const auto& m = op.matrix;
  auto block = [&](int a, int b) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double w = p[a][i] * p[b][j];
        if (w != 0.0) out += w * m.block(i * n, j * n, n, n);
      }
    }
    return out;
  };
  OperatorBlocks b;
  b.conjugator = p;
  b.l1 = block(0, 0);
  b.l2 = block(1, 1);
  b.offdiag_residual = block(0, 1).norm() / m.norm();
  return b;
}

std::string header(const LinearizedOperator& op) {
  std::ostringstream os;
  os << std::setprecision(17) << "# N=" << op.grid_size() << " L=" << op.wave.length
     << " system=" << to_string(op.wave.system.kind());
  return os.str();
}

}  // namespace

Eigen::MatrixXd multiplier_matrix(std::span<const double> symbol, int n) {
  if (static_cast<int>(symbol.size()) != n / 2 + 1) throw ShapeError("symbol length must be N/2 + 1");
  ComplexVector scaled(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) scaled[k] = symbol[k] / static_cast<double>(n);
  const RealVector column = inverse_fft(scaled, n);
  Eigen::MatrixXd c(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) c(j, l) = column[((j - l) % n + n) % n];
  }
  return c;
}

LinearizedOperator assemble_operator(const WaveProfile& wave, const SystemSpec& system) {
  if (!(wave.system == system)) throw ConsistencyError("wave was built for a different system");
  const int n = wave.size();
  const auto symbol = system.dispersion(wave.length);
  RealVector m11(n / 2 + 1), m12(n / 2 + 1), m22(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    const Sym2 s = symbol.evaluate(k, n);
    m11[k] = s.a11;
    m12[k] = s.a12;
    m22[k] = s.a22;
  }
  LinearizedOperator op{Eigen::MatrixXd::Zero(2 * n, 2 * n), wave};
  op.matrix.block(0, 0, n, n) = multiplier_matrix(m11, n);
  op.matrix.block(n, n, n, n) = multiplier_matrix(m22, n);
  if (symbol.kind() == SymbolKind::lkk) {
    const Eigen::MatrixXd off = multiplier_matrix(m12, n);
    op.matrix.block(0, n, n, n) = off;
    op.matrix.block(n, 0, n, n) = off;
  }
  for (int j = 0; j < n; ++j) {
    const Sym2 h = system.hessian(wave.values[0][j], wave.values[1][j]);
    op.matrix(j, j) += wave.speed - h.a11;
    op.matrix(n + j, n + j) += wave.speed - h.a22;
    op.matrix(j, n + j) -= h.a12;
    op.matrix(n + j, j) -= h.a12;
  }
  // The circulant is symmetric in exact arithmetic; symmetrize the rounding.
  const Eigen::MatrixXd skew = op.matrix - op.matrix.transpose();
  op.symmetry_defect = skew.norm() / op.matrix.norm();
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

LinearizedOperator assemble_operator(const WaveProfile& wave) {
  return assemble_operator(wave, wave.system);
}

OperatorBlocks diagonalize_operator(const LinearizedOperator& op,
                                    const CouplingReduction& reduction) {
  if (!is_proportional(op.wave, reduction.mu)) {
    throw UnsupportedError("block diagonalization needs a proportional wave (phi, mu phi)");
  }
  const auto e = eigen_coupling(reduction);
  const Matrix2 p = {{{e.o[0][0], e.o[1][0]}, {e.o[0][1], e.o[1][1]}}};
  return conjugate(op, p);
}

OperatorBlocks diagonalize_operator(const LinearizedOperator& op) {
  const auto kind = op.wave.system.kind();
  if (kind == SystemKind::kdv || kind == SystemKind::mkdv) {
    return diagonalize_operator(op, build_coupling_reduction(op.wave.system, op.wave.mu));
  }
  if (!is_proportional(op.wave, 1.0)) {
    throw UnsupportedError("block diagonalization needs equal components (phi, phi)");
  }
  return conjugate(op, kRotation);
}

Eigen::MatrixXd reduced_lkk_operator(const WaveProfile& wave) {
  if (wave.system.kind() != SystemKind::lkk) throw ConsistencyError("reduced operator is lkk only");
  const int n = wave.size();
  const auto symbol = SymbolMatrix::theta(wave.system.depth_inverse(), wave.length);
  Eigen::MatrixXd g = multiplier_matrix(scalar_symbol_values(symbol, n), n);
  for (int j = 0; j < n; ++j) g(j, j) += wave.speed - wave.values[0][j];
  return 0.5 * (g + g.transpose());
}

Field2 apply_operator(const Eigen::MatrixXd& matrix, const Field2& u) {
  const int n = static_cast<int>(u[0].size());
  if (matrix.rows() != 2 * n || u[1].size() != u[0].size()) throw ShapeError("operator size mismatch");
  Eigen::VectorXd v(2 * n);
  for (int j = 0; j < n; ++j) {
    v(j) = u[0][j];
    v(n + j) = u[1][j];
  }
  const Eigen::VectorXd r = matrix * v;
  Field2 out{RealVector(n), RealVector(n)};
  for (int j = 0; j < n; ++j) {
    out[0][j] = r(j);
    out[1][j] = r(n + j);
  }
  return out;
}

void write_operator_csv(const LinearizedOperator& op, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open " + path + " for writing");
  out << header(op) << '\n' << std::setprecision(17);
  const auto& m = op.matrix;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

void write_operator_binary(const LinearizedOperator& op, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open " + path + " for writing");
  out << header(op) << '\n';
  const auto& m = op.matrix;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
}

}  // namespace pwstab
