#include "rocfit/kernels.hpp"

#include <exception>
#include <mutex>

#ifdef ROCFIT_HAVE_OPENMP
#include <omp.h>
#endif

namespace rocfit::kernels {

namespace {

Eigen::VectorXd row_contribution(const KernelGrid& grid, std::size_t s) {
  const auto n = grid.nodes.size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.gradient.cols());
  for (std::size_t t = 0; t < n; ++t) {
    acc += (grid.weights[t] * kernel_value(grid, s, t)) * grid.gradient.row(static_cast<Eigen::Index>(t)).transpose();
  }
  return acc;
}

Eigen::MatrixXd reduce_rows(const KernelGrid& grid, const std::vector<Eigen::VectorXd>& rows) {
  const auto k = grid.gradient.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    a += grid.weights[s] * grid.gradient.row(static_cast<Eigen::Index>(s)).transpose() * rows[s].transpose();
  }
  return 0.5 * (a + a.transpose());
}

}  // namespace

namespace serial {

void run_indexed(std::size_t count, const std::function<void(std::size_t)>& task) {
  for (std::size_t i = 0; i < count; ++i) task(i);
}

Eigen::MatrixXd kernel_quadratic_form(const KernelGrid& grid) {
  std::vector<Eigen::VectorXd> rows(grid.nodes.size());
  for (std::size_t s = 0; s < rows.size(); ++s) rows[s] = row_contribution(grid, s);
  return reduce_rows(grid, rows);
}

}  // namespace serial

namespace omp {

void run_indexed(std::size_t count, const std::function<void(std::size_t)>& task) {
#ifdef ROCFIT_HAVE_OPENMP
  // Exceptions cannot cross the parallel region; keep the one from the lowest index.
  std::exception_ptr error;
  std::size_t error_index = count;
  std::mutex guard;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      task(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (static_cast<std::size_t>(i) < error_index) {
        error_index = static_cast<std::size_t>(i);
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
#else
  serial::run_indexed(count, task);
#endif
}

Eigen::MatrixXd kernel_quadratic_form(const KernelGrid& grid) {
  std::vector<Eigen::VectorXd> rows(grid.nodes.size());
  run_indexed(rows.size(), [&](std::size_t s) { rows[s] = row_contribution(grid, s); });
  return reduce_rows(grid, rows);
}

}  // namespace omp

void run_indexed(std::size_t count, const std::function<void(std::size_t)>& task) {
#ifdef ROCFIT_HAVE_OPENMP
  omp::run_indexed(count, task);
#else
  serial::run_indexed(count, task);
#endif
}

Eigen::MatrixXd kernel_quadratic_form(const KernelGrid& grid) {
#ifdef ROCFIT_HAVE_OPENMP
  return omp::kernel_quadratic_form(grid);
#else
  return serial::kernel_quadratic_form(grid);
#endif
}

int max_threads() {
#ifdef ROCFIT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace rocfit::kernels
