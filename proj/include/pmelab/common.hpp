#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pme {

// Thrown when an input violates a documented precondition.
class domain_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an iterative method fails to converge.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

// Compensated (Kahan) summation.
class KahanSum {
public:
  void add(double x) noexcept {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const noexcept { return s_; }

private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// Global worker count for parallel_for. Affects wall time only; results are
// identical for any setting because partial results are combined in chunk
// order with a chunk size that does not depend on the thread count.
void set_thread_count(int n);
int thread_count();

// body(chunk_index, begin, end). Chunks have a fixed size of 1024 iterations.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

// Deterministic reduction: sums chunk results in chunk order.
double parallel_reduce(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum);

// FNV-1a 64-bit, used to fingerprint configs in emitted artifacts.
std::uint64_t fnv1a64(std::span<const char> bytes);
std::string hex64(std::uint64_t v);

}  // namespace pme
