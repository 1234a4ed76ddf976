#ifndef WEAKMINTY_CORE_HPP
#define WEAKMINTY_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakminty {

template <typename Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VecT<double>;
using Mat = MatT<double>;
using Index = Eigen::Index;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

/// Eigenvalues (ascending) of a symmetric matrix. Throws when the input is not
/// symmetric to within `tol` in the max-abs sense.
template <typename Scalar>
VecT<Scalar> symmetric_eigenvalues(const MatT<Scalar>& m, Scalar tol = Scalar(1e-12)) {
  if (m.rows() != m.cols()) throw DimensionError("symmetric_eigenvalues: matrix is not square");
  if (m.size() == 0) return VecT<Scalar>();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("symmetric_eigenvalues: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatT<Scalar>> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Block-diagonal symmetric positive definite matrix, e.g. a stepsize matrix
/// blockdiag(Γ₁, Γ₂). The scalar case γ·I is a single block.
template <typename Scalar = double>
class BlockDiagMatrix {
 public:
  using Vector = VecT<Scalar>;
  using Matrix = MatT<Scalar>;

  BlockDiagMatrix() = default;

  explicit BlockDiagMatrix(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
    offsets_.reserve(blocks_.size() + 1);
    offsets_.push_back(0);
    min_eig_ = std::numeric_limits<Scalar>::infinity();
    max_eig_ = Scalar(0);
    for (const auto& b : blocks_) {
      if (b.rows() == 0 || b.rows() != b.cols()) {
        throw DimensionError("BlockDiagMatrix: blocks must be square and non-empty");
      }
      const Vector eig = symmetric_eigenvalues<Scalar>(b);
      if (!(eig(0) > Scalar(0))) {
        throw std::invalid_argument("BlockDiagMatrix: block is not positive definite");
      }
      min_eig_ = std::min(min_eig_, eig(0));
      max_eig_ = std::max(max_eig_, eig(eig.size() - 1));
      offsets_.push_back(offsets_.back() + b.rows());
    }
    diagonal_ = true;
    for (const auto& b : blocks_) {
      if (b.rows() > 1 && !(b - Matrix(b.diagonal().asDiagonal())).isZero(Scalar(0))) diagonal_ = false;
    }
  }

  static BlockDiagMatrix scaled_identity(Index n, Scalar gamma) {
    return BlockDiagMatrix({Matrix::Identity(n, n) * gamma});
  }

  static BlockDiagMatrix diagonal(const Vector& d) {
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(d.size()));
    for (Index i = 0; i < d.size(); ++i) blocks.push_back(Matrix::Constant(1, 1, d(i)));
    return BlockDiagMatrix(std::move(blocks));
  }

  Index dim() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t num_blocks() const { return blocks_.size(); }
  const Matrix& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const std::vector<Index>& offsets() const { return offsets_; }
  Scalar smallest_eigenvalue() const { return min_eig_; }
  Scalar largest_eigenvalue() const { return max_eig_; }

  /// W v
  Vector apply(const Vector& v) const {
    require_same_dim(v.size(), dim(), "BlockDiagMatrix::apply");
    Vector out(v.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Index o = offsets_[i];
      const Index n = blocks_[i].rows();
      if (n == 1) {
        out(o) = blocks_[i](0, 0) * v(o);
      } else {
        out.segment(o, n).noalias() = blocks_[i] * v.segment(o, n);
      }
    }
    return out;
  }

  /// W⁻¹ v
  Vector solve(const Vector& v) const {
    require_same_dim(v.size(), dim(), "BlockDiagMatrix::solve");
    Vector out(v.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Index o = offsets_[i];
      const Index n = blocks_[i].rows();
      out.segment(o, n) = blocks_[i].llt().solve(v.segment(o, n));
    }
    return out;
  }

  /// Diagonal sub-range [first, first+count) as a new block-diagonal matrix;
  /// the range must align with block boundaries.
  BlockDiagMatrix sub(Index first, Index count) const {
    std::vector<Matrix> picked;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Index o = offsets_[i];
      if (o >= first && o + blocks_[i].rows() <= first + count) picked.push_back(blocks_[i]);
      else if (o < first + count && o + blocks_[i].rows() > first) {
        throw DimensionError("BlockDiagMatrix::sub: range splits a block");
      }
    }
    BlockDiagMatrix out(std::move(picked));
    require_same_dim(out.dim(), count, "BlockDiagMatrix::sub");
    return out;
  }

  Matrix dense() const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      m.block(offsets_[i], offsets_[i], blocks_[i].rows(), blocks_[i].cols()) = blocks_[i];
    }
    return m;
  }

  bool is_diagonal() const { return diagonal_; }

 private:
  std::vector<Matrix> blocks_;
  std::vector<Index> offsets_;
  Scalar min_eig_{};
  Scalar max_eig_{};
  bool diagonal_ = true;
};

/// ⟨a, W b⟩
template <typename Scalar>
Scalar weighted_dot(const VecT<Scalar>& a, const VecT<Scalar>& b, const BlockDiagMatrix<Scalar>& w) {
  require_same_dim(a.size(), b.size(), "weighted_dot");
  require_same_dim(a.size(), w.dim(), "weighted_dot");
  return a.dot(w.apply(b));
}

/// ‖a‖²_W = ⟨a, W a⟩
template <typename Scalar>
Scalar weighted_norm_sq(const VecT<Scalar>& a, const BlockDiagMatrix<Scalar>& w) {
  require_same_dim(a.size(), w.dim(), "weighted_norm_sq");
  Scalar s(0);
  const auto& blocks = w.blocks();
  const auto& off = w.offsets();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto seg = a.segment(off[i], blocks[i].rows());
    s += seg.dot(blocks[i] * seg);
  }
  return s;
}

template <typename Scalar>
Scalar smallest_eigenvalue(const BlockDiagMatrix<Scalar>& w) {
  return w.smallest_eigenvalue();
}

}  // namespace weakminty

#endif  // WEAKMINTY_CORE_HPP
