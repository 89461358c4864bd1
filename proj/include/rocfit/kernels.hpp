#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace rocfit::kernels {

/// Quadrature grid carrying everything the covariance kernel needs at each node.
struct KernelGrid {
  std::vector<double> nodes;    // p values in (0,1)
  std::vector<double> weights;
  std::vector<double> roc;      // R(p)
  std::vector<double> slope;    // R'(p)
  Eigen::MatrixXd gradient;     // nodes x k, dR/dtheta at each node
  double lambda = 1.0;
};

/// lambda (min(Rs,Rt) - Rs Rt) + R's R't (min(s,t) - s t)
inline double kernel_value(const KernelGrid& g, std::size_t s, std::size_t t) {
  const double rs = g.roc[s];
  const double rt = g.roc[t];
  const double ps = g.nodes[s];
  const double pt = g.nodes[t];
  return g.lambda * ((rs < rt ? rs : rt) - rs * rt) + g.slope[s] * g.slope[t] * ((ps < pt ? ps : pt) - ps * pt);
}

// Reference implementations.
namespace serial {

/// Calls task(i) for i in [0, count) in index order.
void run_indexed(std::size_t count, const std::function<void(std::size_t)>& task);

/// A = sum_s sum_t w_s w_t K(s,t) g(s) g(t)'.
Eigen::MatrixXd kernel_quadratic_form(const KernelGrid& grid);

}  // namespace serial

// Same results as serial; per-index outputs are reduced in index order.
namespace omp {

void run_indexed(std::size_t count, const std::function<void(std::size_t)>& task);
Eigen::MatrixXd kernel_quadratic_form(const KernelGrid& grid);

}  // namespace omp

/// OpenMP when built with it, serial otherwise.
void run_indexed(std::size_t count, const std::function<void(std::size_t)>& task);
Eigen::MatrixXd kernel_quadratic_form(const KernelGrid& grid);

/// Worker threads available to the OpenMP kernels (1 without OpenMP).
int max_threads();

}  // namespace rocfit::kernels
