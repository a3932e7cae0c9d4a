#include "mfir/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <new>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "mfir/error.hpp"

namespace mfir {

namespace {

// Maps any integer coordinate into [0, n) by mirror reflection about the
// first and last samples (d c b | a b c d | c b a).
std::size_t reflect_index(long i, std::size_t n) {
  if (n == 1) {
    return 0;
  }
  const long period = 2 * (static_cast<long>(n) - 1);
  long k = i % period;
  if (k < 0) {
    k += period;
  }
  if (k >= static_cast<long>(n)) {
    k = period - k;
  }
  return static_cast<std::size_t>(k);
}

// padded[py][px] = I(px - r, py - r) under reflection.
std::vector<double> reflect_pad(const GrayImage& image, std::size_t r) {
  const std::size_t w = image.width;
  const std::size_t h = image.height;
  const std::size_t pw = w + 2 * r;
  const std::size_t ph = h + 2 * r;
  std::vector<double> padded(pw * ph);
  for (std::size_t py = 0; py < ph; ++py) {
    const std::size_t sy = reflect_index(static_cast<long>(py) - static_cast<long>(r), h);
    for (std::size_t px = 0; px < pw; ++px) {
      const std::size_t sx = reflect_index(static_cast<long>(px) - static_cast<long>(r), w);
      padded[py * pw + px] = image.values[sy * w + sx];
    }
  }
  return padded;
}

TextureStats magnitude_stats(std::span<const Complex> values) {
  const std::size_t n = values.size();
  std::vector<double> mags(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mags[i] = std::abs(values[i]);
    sum += mags[i];
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const double v : mags) {
    sq += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(sq / static_cast<double>(n))};
}

}  // namespace

void GaborBankParams::validate() const {
  if (scales < 2) {
    throw Error(ErrorKind::InvalidParams, "scales must be >= 2");
  }
  if (orientations < 1) {
    throw Error(ErrorKind::InvalidParams, "orientations must be >= 1");
  }
  if (!(u_low > 0.0 && u_low < u_high && u_high < 0.5)) {
    throw Error(ErrorKind::InvalidParams, "require 0 < u_low < u_high < 0.5");
  }
  if (kernel_radius < 1) {
    throw Error(ErrorKind::InvalidParams, "kernel_radius must be >= 1");
  }
}

std::vector<GaborKernel> build_filter_bank(const GaborBankParams& params) {
  params.validate();
  using std::numbers::pi;

  const auto M = static_cast<double>(params.scales);
  const auto N = static_cast<double>(params.orientations);
  const double a = std::pow(params.u_high / params.u_low, 1.0 / (M - 1.0));
  const double ln2 = std::numbers::ln2;
  const double uh = params.u_high;

  // Frequency-domain spreads of the mother wavelet.
  const double sigma_u = ((a - 1.0) * uh) / ((a + 1.0) * std::sqrt(2.0 * ln2));
  // N = 1 would put the half-angle at pi/2, where tan blows up and the
  // kernel collapses to a line; it gets the N = 2 angular width instead.
  const double half_angle = std::min(pi / (2.0 * N), pi / 4.0);
  const double sigma_v = std::tan(half_angle) * (uh - 2.0 * ln2 * sigma_u * sigma_u / uh) /
                         std::sqrt(2.0 * ln2 - (2.0 * ln2) * (2.0 * ln2) * sigma_u * sigma_u / (uh * uh));
  const double sigma_x = 1.0 / (2.0 * pi * sigma_u);
  const double sigma_y = 1.0 / (2.0 * pi * sigma_v);

  const auto r = static_cast<long>(params.kernel_radius);
  const std::size_t side = 2 * params.kernel_radius + 1;

  std::vector<GaborKernel> bank;
  bank.reserve(params.filter_count());
  for (std::size_t m = 0; m < params.scales; ++m) {
    const double shrink = std::pow(a, -(M - 1.0 - static_cast<double>(m)));
    for (std::size_t n = 0; n < params.orientations; ++n) {
      GaborKernel k;
      k.scale = m;
      k.orientation = n;
      k.radius = params.kernel_radius;
      k.center_frequency = params.u_low * std::pow(a, static_cast<double>(m));
      k.angle = static_cast<double>(n) * pi / N;
      k.taps.resize(side * side);

      const double c = std::cos(k.angle);
      const double s = std::sin(k.angle);
      Complex sum{0.0, 0.0};
      for (long dy = -r; dy <= r; ++dy) {
        for (long dx = -r; dx <= r; ++dx) {
          const double xr = shrink * (static_cast<double>(dx) * c + static_cast<double>(dy) * s);
          const double yr = shrink * (-static_cast<double>(dx) * s + static_cast<double>(dy) * c);
          const double envelope = std::exp(-0.5 * (xr * xr / (sigma_x * sigma_x) + yr * yr / (sigma_y * sigma_y))) /
                                  (2.0 * pi * sigma_x * sigma_y);
          const Complex v = shrink * envelope * std::polar(1.0, 2.0 * pi * uh * xr);
          k.taps[static_cast<std::size_t>((dy + r) * static_cast<long>(side) + dx + r)] = v;
          sum += v;
        }
      }
      const Complex dc = sum / static_cast<double>(k.taps.size());
      for (auto& t : k.taps) {
        t -= dc;
      }
      bank.push_back(std::move(k));
    }
  }
  return bank;
}

ResponseMap convolve_response(const GrayImage& image, const GaborKernel& kernel) {
  if (image.width == 0 || image.height == 0 || image.values.size() != image.width * image.height) {
    throw Error(ErrorKind::InvalidParams, "convolve_response: malformed image");
  }
  if (kernel.taps.size() != kernel.side() * kernel.side()) {
    throw Error(ErrorKind::InvalidParams, "convolve_response: malformed kernel");
  }

  const std::size_t w = image.width;
  const std::size_t h = image.height;
  const std::size_t r = kernel.radius;
  const std::size_t pw = w + 2 * r;
  const std::vector<double> padded = reflect_pad(image, r);

  std::vector<double> re(w * h, 0.0);
  std::vector<double> im(w * h, 0.0);
  const auto ri = static_cast<long>(r);
  for (long dy = -ri; dy <= ri; ++dy) {
    for (long dx = -ri; dx <= ri; ++dx) {
      const Complex g = std::conj(kernel.tap(dx, dy));
      const double gr = g.real();
      const double gi = g.imag();
      // I(x - dx, y - dy) lives at padded[(y - dy + r) * pw + (x - dx + r)].
      const auto x_off = static_cast<std::size_t>(ri - dx);
      const auto y_off = static_cast<std::size_t>(ri - dy);
      for (std::size_t y = 0; y < h; ++y) {
        const double* src = padded.data() + (y + y_off) * pw + x_off;
        double* out_re = re.data() + y * w;
        double* out_im = im.data() + y * w;
        for (std::size_t x = 0; x < w; ++x) {
          out_re[x] += gr * src[x];
          out_im[x] += gi * src[x];
        }
      }
    }
  }

  ResponseMap out;
  out.width = w;
  out.height = h;
  out.values.resize(w * h);
  for (std::size_t i = 0; i < w * h; ++i) {
    out.values[i] = {re[i], im[i]};
  }
  return out;
}

TextureStats texture_stats(const ResponseMap& response) {
  const std::size_t n = response.values.size();
  if (n == 0) {
    throw Error(ErrorKind::InvalidParams, "texture_stats: empty response");
  }
  return magnitude_stats(response.values);
}

TextureVector extract_texture_vector(const GrayImage& image, std::span<const GaborKernel> bank) {
  if (bank.empty()) {
    throw Error(ErrorKind::InvalidParams, "extract_texture_vector: empty filter bank");
  }
  TextureVector out;
  out.reserve(2 * bank.size());
  for (const auto& kernel : bank) {
    const TextureStats s = texture_stats(convolve_response(image, kernel));
    out.push_back(s.mean);
    out.push_back(s.stddev);
  }
  return out;
}

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDestroy>;

FftwBuffer fftw_buffer(std::size_t n) {
  FftwBuffer buf(fftw_alloc_complex(n));
  if (!buf) {
    throw std::bad_alloc();
  }
  return buf;
}

}  // namespace

struct SpectralFilterBank::Impl {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t radius = 0;
  std::size_t pw = 0;
  std::size_t ph = 0;
  FftwPlan forward;
  FftwPlan inverse;
  std::vector<FftwBuffer> spectra;  // one per kernel, pw x ph
};

SpectralFilterBank::SpectralFilterBank(std::span<const GaborKernel> bank, std::size_t width, std::size_t height)
    : impl_(std::make_unique<Impl>()) {
  if (bank.empty() || width == 0 || height == 0) {
    throw Error(ErrorKind::InvalidParams, "SpectralFilterBank: empty bank or image size");
  }
  Impl& s = *impl_;
  s.width = width;
  s.height = height;
  s.radius = bank.front().radius;
  for (const auto& k : bank) {
    if (k.radius != s.radius || k.taps.size() != k.side() * k.side()) {
      throw Error(ErrorKind::InvalidParams, "SpectralFilterBank: kernels must share one radius");
    }
  }
  s.pw = width + 2 * s.radius;
  s.ph = height + 2 * s.radius;
  const std::size_t n = s.pw * s.ph;

  FftwBuffer in = fftw_buffer(n);
  FftwBuffer out = fftw_buffer(n);
  // Planner calls are not thread-safe; they only happen here.
  static std::mutex planner_mutex;
  {
    std::lock_guard lock(planner_mutex);
    s.forward.reset(fftw_plan_dft_2d(static_cast<int>(s.ph), static_cast<int>(s.pw), in.get(), out.get(),
                                     FFTW_FORWARD, FFTW_ESTIMATE));
    s.inverse.reset(fftw_plan_dft_2d(static_cast<int>(s.ph), static_cast<int>(s.pw), in.get(), out.get(),
                                     FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  if (!s.forward || !s.inverse) {
    throw Error(ErrorKind::InvalidParams, "SpectralFilterBank: FFT planning failed");
  }

  // Kc[j][i] = conj(g(i - r, j - r)), zero-padded to the transform size.
  const auto r = static_cast<long>(s.radius);
  for (const auto& k : bank) {
    std::fill_n(&in[0][0], 2 * n, 0.0);
    for (long j = 0; j <= 2 * r; ++j) {
      for (long i = 0; i <= 2 * r; ++i) {
        const Complex c = std::conj(k.tap(i - r, j - r));
        const auto idx = static_cast<std::size_t>(j) * s.pw + static_cast<std::size_t>(i);
        in[idx][0] = c.real();
        in[idx][1] = c.imag();
      }
    }
    FftwBuffer spectrum = fftw_buffer(n);
    fftw_execute_dft(s.forward.get(), in.get(), spectrum.get());
    s.spectra.push_back(std::move(spectrum));
  }
}

SpectralFilterBank::~SpectralFilterBank() = default;
SpectralFilterBank::SpectralFilterBank(SpectralFilterBank&&) noexcept = default;
SpectralFilterBank& SpectralFilterBank::operator=(SpectralFilterBank&&) noexcept = default;

std::size_t SpectralFilterBank::width() const noexcept { return impl_->width; }
std::size_t SpectralFilterBank::height() const noexcept { return impl_->height; }
std::size_t SpectralFilterBank::size() const noexcept { return impl_->spectra.size(); }

std::vector<ResponseMap> SpectralFilterBank::responses(const GrayImage& image) const {
  const Impl& s = *impl_;
  if (image.width != s.width || image.height != s.height || image.values.size() != s.width * s.height) {
    throw Error(ErrorKind::InvalidParams, "SpectralFilterBank: image size does not match the bank");
  }
  const std::size_t n = s.pw * s.ph;
  const std::vector<double> padded = reflect_pad(image, s.radius);

  FftwBuffer buf = fftw_buffer(n);
  FftwBuffer image_spectrum = fftw_buffer(n);
  FftwBuffer product = fftw_buffer(n);
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = padded[i];
    buf[i][1] = 0.0;
  }
  fftw_execute_dft(s.forward.get(), buf.get(), image_spectrum.get());

  const double scale = 1.0 / static_cast<double>(n);
  const std::size_t offset = 2 * s.radius;
  std::vector<ResponseMap> out;
  out.reserve(s.spectra.size());
  for (const auto& spectrum : s.spectra) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ar = image_spectrum[i][0];
      const double ai = image_spectrum[i][1];
      const double br = spectrum[i][0];
      const double bi = spectrum[i][1];
      product[i][0] = ar * br - ai * bi;
      product[i][1] = ar * bi + ai * br;
    }
    fftw_execute_dft(s.inverse.get(), product.get(), buf.get());

    // Circular result at (y + 2r, x + 2r) is the linear response at (x, y).
    ResponseMap map;
    map.width = s.width;
    map.height = s.height;
    map.values.resize(s.width * s.height);
    for (std::size_t y = 0; y < s.height; ++y) {
      for (std::size_t x = 0; x < s.width; ++x) {
        const std::size_t idx = (y + offset) * s.pw + (x + offset);
        map.values[y * s.width + x] = {buf[idx][0] * scale, buf[idx][1] * scale};
      }
    }
    out.push_back(std::move(map));
  }
  return out;
}

TextureVector SpectralFilterBank::texture_vector(const GrayImage& image) const {
  TextureVector out;
  out.reserve(2 * size());
  for (const auto& response : responses(image)) {
    const TextureStats s = texture_stats(response);
    out.push_back(s.mean);
    out.push_back(s.stddev);
  }
  return out;
}

}  // namespace mfir
