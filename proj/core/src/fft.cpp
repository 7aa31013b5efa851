#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>

#include "czx/error.hpp"

namespace czx::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using Buffer = std::unique_ptr<T[], FftwFree>;

template <class T>
Buffer<T> allocate(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return Buffer<T>(p);
}

class Plan {
 public:
  explicit Plan(const std::function<fftw_plan()>& make) {
    std::lock_guard lock(planner_mutex());
    plan_ = make();
    if (plan_ == nullptr) throw Error(Errc::invalid_input, "FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

std::vector<int> int_dims(std::span<const std::size_t> dims) {
  std::vector<int> out(dims.begin(), dims.end());
  return out;
}

std::size_t total(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t half_total(std::span<const std::size_t> dims) {
  return total(dims) / dims.back() * (dims.back() / 2 + 1);
}

std::vector<std::complex<double>> to_complex(const fftw_complex* data, std::size_t count) {
  std::vector<std::complex<double>> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = {data[i][0], data[i][1]};
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward_half(std::span<const double> values,
                                               std::span<const std::size_t> dims) {
  const std::size_t n = total(dims);
  const std::size_t m = half_total(dims);
  auto in = allocate<double>(n);
  auto out = allocate<fftw_complex>(m);
  const auto d = int_dims(dims);
  Plan plan([&] {
    return fftw_plan_dft_r2c(static_cast<int>(d.size()), d.data(), in.get(), out.get(), FFTW_ESTIMATE);
  });
  std::copy(values.begin(), values.end(), in.get());
  plan.execute();
  return to_complex(out.get(), m);
}

std::vector<double> inverse_half(std::vector<std::complex<double>> spectrum,
                                 std::span<const std::size_t> dims) {
  const std::size_t n = total(dims);
  const std::size_t m = half_total(dims);
  auto in = allocate<fftw_complex>(m);
  auto out = allocate<double>(n);
  const auto d = int_dims(dims);
  // c2r destroys its input; the plan is made before the data is copied in.
  Plan plan([&] {
    return fftw_plan_dft_c2r(static_cast<int>(d.size()), d.data(), in.get(), out.get(), FFTW_ESTIMATE);
  });
  for (std::size_t i = 0; i < m; ++i) {
    in[i][0] = spectrum[i].real();
    in[i][1] = spectrum[i].imag();
  }
  plan.execute();
  return std::vector<double>(out.get(), out.get() + n);
}

std::vector<std::complex<double>> forward_full(std::span<const double> values,
                                               std::span<const std::size_t> dims) {
  const std::size_t n = total(dims);
  auto buf = allocate<fftw_complex>(n);
  const auto d = int_dims(dims);
  Plan plan([&] {
    return fftw_plan_dft(static_cast<int>(d.size()), d.data(), buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  });
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = values[i];
    buf[i][1] = 0.0;
  }
  plan.execute();
  return to_complex(buf.get(), n);
}

std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b,
                                      std::span<const std::size_t> dims) {
  auto fa = forward_half(a, dims);
  const auto fb = forward_half(b, dims);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  auto out = inverse_half(std::move(fa), dims);
  const double scale = 1.0 / static_cast<double>(total(dims));
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace czx::detail
