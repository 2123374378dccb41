#include "dsmsim/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace dsmsim {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  explicit PlanPair(std::size_t n) {
    // Plans are created on a scratch buffer and executed with the new-array
    // interface, which is thread-safe.
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    forward = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inverse = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
  }
  ~PlanPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

const PlanPair& plans_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<PlanPair>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<PlanPair>(n)).first;
  }
  return *it->second;
}

fftw_complex* as_fftw(std::span<cdouble> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

void fft_forward(std::span<cdouble> data) {
  if (data.size() < 2) return;
  fftw_execute_dft(plans_for(data.size()).forward, as_fftw(data), as_fftw(data));
}

void fft_inverse(std::span<cdouble> data) {
  if (data.size() < 2) return;
  fftw_execute_dft(plans_for(data.size()).inverse, as_fftw(data), as_fftw(data));
}

std::size_t good_fft_size(std::size_t n) {
  if (n <= 1) return 1;
  std::size_t best = 1;
  while (best < n) best <<= 1;
  for (std::size_t p5 = 1; p5 < best; p5 *= 5) {
    for (std::size_t p35 = p5; p35 < best; p35 *= 3) {
      std::size_t v = p35;
      while (v < n) v <<= 1;
      best = std::min(best, v);
    }
  }
  return best;
}

namespace {

template <typename Tap>
std::vector<cdouble> convolve_impl(std::span<const cdouble> x, std::span<const Tap> h) {
  if (x.empty() || h.empty()) return {};
  const std::size_t out_len = x.size() + h.size() - 1;

  // Overlap-add with blocks a few times the kernel length.
  const std::size_t nfft = good_fft_size(std::max<std::size_t>(4 * h.size(), 1024));
  const std::size_t block = nfft - h.size() + 1;

  std::vector<cdouble> kernel(nfft, 0.0);
  std::copy(h.begin(), h.end(), kernel.begin());
  fft_forward(kernel);

  std::vector<cdouble> y(out_len, 0.0);
  std::vector<cdouble> buf(nfft);
  const double scale = 1.0 / static_cast<double>(nfft);
  for (std::size_t start = 0; start < x.size(); start += block) {
    const std::size_t n = std::min(block, x.size() - start);
    std::fill(buf.begin(), buf.end(), cdouble{});
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), n, buf.begin());
    fft_forward(buf);
    for (std::size_t k = 0; k < nfft; ++k) buf[k] *= kernel[k];
    fft_inverse(buf);
    const std::size_t valid = std::min(nfft, out_len - start);
    for (std::size_t k = 0; k < valid; ++k) y[start + k] += buf[k] * scale;
  }
  return y;
}

}  // namespace

std::vector<cdouble> fft_convolve(std::span<const cdouble> x, std::span<const cdouble> h) {
  return convolve_impl<cdouble>(x, h);
}

std::vector<cdouble> fft_convolve(std::span<const cdouble> x, std::span<const double> h) {
  return convolve_impl<double>(x, h);
}

}  // namespace dsmsim
