#include "mourrekit/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numeric>

#include "mourrekit/errors.hpp"

namespace mk::fft {
namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
struct PlanCache {
  std::mutex mu;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<int>& dims, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dims, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                              [](std::size_t a, int b) { return a * b; });
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw NumericFailure("fftw planning failed");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void transform(std::vector<cplx>& data, std::span<const int> dims, int sign) {
  std::vector<int> d(dims.begin(), dims.end());
  std::size_t total = 1;
  for (int r : d) {
    if (r <= 0) throw InvalidArgument("fft dimension must be positive");
    total *= static_cast<std::size_t>(r);
  }
  if (total != data.size()) throw InvalidArgument("fft data size does not match dimensions");
  fftw_plan p = cache().get(d, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace mk::fft
