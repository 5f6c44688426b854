#include "minkvox/tensor.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace minkvox {

namespace {

constexpr int kSlot[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

}  // namespace

SymTensor3 SymTensor3::outer(const Vec3& v) {
  return {v[0] * v[0], v[1] * v[1], v[2] * v[2], v[0] * v[1], v[0] * v[2], v[1] * v[2]};
}

SymTensor3 SymTensor3::from_matrix(const Eigen::Matrix3d& m) {
  return {m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)),
          0.5 * (m(1, 2) + m(2, 1))};
}

double SymTensor3::operator()(int i, int j) const { return c_[kSlot[i][j]]; }

Eigen::Matrix3d SymTensor3::matrix() const {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double SymTensor3::frobenius() const {
  return std::sqrt(c_[0] * c_[0] + c_[1] * c_[1] + c_[2] * c_[2] +
                   2.0 * (c_[3] * c_[3] + c_[4] * c_[4] + c_[5] * c_[5]));
}

SymTensor3 SymTensor3::conjugated(const Eigen::Matrix3d& rotation) const {
  return from_matrix(rotation * matrix() * rotation.transpose());
}

SymTensor3& SymTensor3::operator+=(const SymTensor3& o) {
  for (int i = 0; i < 6; ++i) c_[i] += o.c_[i];
  return *this;
}

SymTensor3& SymTensor3::operator-=(const SymTensor3& o) {
  for (int i = 0; i < 6; ++i) c_[i] -= o.c_[i];
  return *this;
}

SymTensor3& SymTensor3::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Eigensystem eigen(const SymTensor3& t) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t.matrix());
  Eigensystem out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = solver.eigenvalues()[2 - k];
    Vec3 v = solver.eigenvectors().col(2 - k);
    Eigen::Index largest = 0;
    v.cwiseAbs().maxCoeff(&largest);
    if (v[largest] < 0.0) v = -v;
    out.vectors.col(k) = v;
  }
  return out;
}

// ---------------------------------------------------------------------------

int SymTensor4::slot(int i, int j, int k, int l) {
  std::array<int, 4> idx{i, j, k, l};
  std::sort(idx.begin(), idx.end());
  // Count the multisets that precede idx in lexicographic order.
  int n0 = 0, n1 = 0;
  for (int v : idx) {
    n0 += v == 0;
    n1 += v == 1;
  }
  const int rest = 4 - n0;  // indices that are 1 or 2
  // Multisets with more zeros come first; within a fixed zero count, those
  // with more ones come first.
  int before = 0;
  for (int zeros = 4; zeros > n0; --zeros) before += 4 - zeros + 1;
  before += rest - n1;
  return before;
}

SymTensor4 SymTensor4::outer(const Vec3& p) {
  SymTensor4 t;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      for (int k = j; k < 3; ++k)
        for (int l = k; l < 3; ++l) t.c_[slot(i, j, k, l)] = p[i] * p[j] * p[k] * p[l];
  return t;
}

SymTensor3 SymTensor4::contract() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m(i, j) += (*this)(i, j, k, k);
  return SymTensor3::from_matrix(m);
}

SymTensor4& SymTensor4::operator+=(const SymTensor4& o) {
  for (int i = 0; i < 15; ++i) c_[i] += o.c_[i];
  return *this;
}

SymTensor4& SymTensor4::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

}  // namespace minkvox
