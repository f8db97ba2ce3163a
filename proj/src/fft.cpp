#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace stochafd::detail {
namespace {

// The FFTW planner is not reentrant; execution on distinct plans is.
std::mutex planner_mutex;

class Plan {
 public:
  Plan(std::size_t n, int sign) : n_(n) {
    std::lock_guard lock(planner_mutex);
    buf_ = fftw_alloc_complex(n);
    if (buf_ == nullptr) throw std::bad_alloc();
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_,
                             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    if (plan_ == nullptr) {
      fftw_free(buf_);
      throw std::runtime_error("fftw: plan creation failed");
    }
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void run(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    auto* data = reinterpret_cast<std::complex<double>*>(buf_);
    std::copy(in.begin(), in.end(), data);
    fftw_execute(plan_);
    std::copy(data, data + n_, out.begin());
  }

 private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

Plan& plan_for(std::size_t n, int sign) {
  thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<Plan>> cache;
  auto& slot = cache[{n, sign}];
  if (!slot) slot = std::make_unique<Plan>(n, sign);
  return *slot;
}

}  // namespace

void dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size()) throw std::invalid_argument("dft: size mismatch");
  if (in.empty()) return;
  plan_for(in.size(), sign < 0 ? -1 : 1).run(in, out);
}

}  // namespace stochafd::detail
