#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "subwalk/error.hpp"

namespace subwalk::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void dft_inplace(std::vector<std::complex<double>>& data, std::span<const int> extents, int sign) {
  std::size_t total = 1;
  for (int e : extents) total *= static_cast<std::size_t>(e);
  if (total != data.size()) fail(ErrorKind::domain, "dft_inplace: extents do not match data");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    // Planner calls are not thread-safe; execution is.
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(extents.size()), extents.data(), ptr, ptr,
                         sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) fail(ErrorKind::numeric, "FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace subwalk::detail
