#include "dsmsim/equalizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsmsim {

namespace {

// Impulse response (fine_grid taps, index fine_grid/2 is zero delay) of the
// interpolation hat centered on bin `bin`.
std::vector<cdouble> basis_response(std::size_t bin, std::size_t bins, std::size_t fine) {
  const double width = static_cast<double>(fine) / static_cast<double>(bins);
  std::vector<cdouble> spectrum(fine);
  const double center = static_cast<double>(bin) * width;
  for (std::size_t i = 0; i < fine; ++i) {
    double d = std::abs(static_cast<double>(i) - center);
    d = std::min(d, static_cast<double>(fine) - d);
    spectrum[i] = std::max(0.0, 1.0 - d / width);
  }
  fft_inverse(spectrum);
  std::vector<cdouble> h(fine);
  const std::size_t half = fine / 2;
  for (std::size_t m = 0; m < fine; ++m) {
    // Tap index m holds delay m - half.
    h[m] = spectrum[(m + fine - half) % fine] / static_cast<double>(fine);
  }
  return h;
}

// Centered ("same") convolution: y[n] = sum_m h[m] x[n + half - m].
std::vector<cdouble> centered_filter(std::span<const cdouble> x, std::span<const cdouble> h) {
  const auto full = fft_convolve(x, h);
  const std::size_t half = h.size() / 2;
  std::vector<cdouble> y(x.size());
  std::copy_n(full.begin() + static_cast<std::ptrdiff_t>(half), x.size(), y.begin());
  return y;
}

}  // namespace

EqualizerResult equalize(std::span<const cdouble> received, std::span<const cdouble> training,
                         const EqualizerOptions& opts) {
  const std::size_t bins = opts.bins;
  const std::size_t fine = opts.fine_grid;
  if (bins < 1 || fine < bins || fine % bins != 0) {
    throw std::invalid_argument("equalize: fine_grid must be a positive multiple of bins");
  }
  if (training.size() < 4 * bins) throw std::invalid_argument("equalize: training shorter than 4x bins");
  if (training.size() > received.size()) throw std::invalid_argument("equalize: training longer than received");

  // Fit rows need the full filter context inside the record.
  const std::size_t half = fine / 2;
  const std::size_t row_begin = std::max(opts.guard, half);
  const std::size_t row_end = std::min(training.size(), received.size() > half ? received.size() - half : 0);
  if (row_end <= row_begin || row_end - row_begin < 4 * bins) {
    throw std::invalid_argument("equalize: not enough training rows after guards");
  }
  const std::size_t rows = row_end - row_begin;

  // Regressors: the received sequence filtered by each bin's basis response,
  // all from one transform of the record.
  const std::size_t ctx_end = std::min(received.size(), row_end + half);
  const std::size_t nfft = good_fft_size(ctx_end + fine);
  std::vector<cdouble> spec(nfft, cdouble{});
  std::copy_n(received.begin(), ctx_end, spec.begin());
  fft_forward(spec);
  std::vector<std::vector<cdouble>> basis(bins);
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(bins));
  std::vector<cdouble> work(nfft);
  for (std::size_t j = 0; j < bins; ++j) {
    basis[j] = basis_response(j, bins, fine);
    std::fill(work.begin(), work.end(), cdouble{});
    std::copy(basis[j].begin(), basis[j].end(), work.begin());
    fft_forward(work);
    for (std::size_t k = 0; k < nfft; ++k) work[k] *= spec[k] / static_cast<double>(nfft);
    fft_inverse(work);
    // Linear convolution index n + half is the centered output n.
    for (std::size_t r = 0; r < rows; ++r) {
      u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = work[row_begin + r + half];
    }
  }
  Eigen::VectorXcd t(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) t(static_cast<Eigen::Index>(r)) = training[row_begin + r];

  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(u.cols(), u.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(u.adjoint());
  gram = gram.selfadjointView<Eigen::Lower>();
  const Eigen::VectorXcd rhs = u.adjoint() * t;

  double max_diag = 0.0;
  for (Eigen::Index j = 0; j < gram.rows(); ++j) max_diag = std::max(max_diag, gram(j, j).real());
  std::vector<Eigen::Index> active;
  EqualizerResult res;
  for (Eigen::Index j = 0; j < gram.rows(); ++j) {
    if (gram(j, j).real() > 1e-10 * max_diag && max_diag > 0.0) {
      active.push_back(j);
    } else {
      ++res.singular_bins;
    }
  }
  res.flagged = static_cast<double>(res.singular_bins) > 0.1 * static_cast<double>(bins);

  res.coefficients.assign(bins, cdouble{});
  if (!active.empty()) {
    const auto na = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXcd g(na, na);
    Eigen::VectorXcd b(na);
    for (Eigen::Index a = 0; a < na; ++a) {
      b(a) = rhs(active[static_cast<std::size_t>(a)]);
      for (Eigen::Index c = 0; c < na; ++c) g(a, c) = gram(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(c)]);
    }
    const Eigen::VectorXcd sol = g.ldlt().solve(b);
    for (Eigen::Index a = 0; a < na; ++a) res.coefficients[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])] = sol(a);
  }

  // Applied filter: sum of the weighted basis responses.
  std::vector<cdouble> w(fine, cdouble{});
  for (std::size_t j = 0; j < bins; ++j) {
    if (res.coefficients[j] == cdouble{}) continue;
    for (std::size_t m = 0; m < fine; ++m) w[m] += res.coefficients[j] * basis[j][m];
  }
  res.output = centered_filter(received, w);

  // Training-set diagnostics: equalized error vs the best single complex tap.
  cdouble xt{};
  double xx = 0.0;
  double tt = 0.0;
  for (std::size_t n = row_begin; n < row_end; ++n) {
    xt += std::conj(received[n]) * training[n];
    xx += std::norm(received[n]);
    tt += std::norm(training[n]);
  }
  const cdouble c0 = xx > 0.0 ? xt / xx : cdouble{};
  for (std::size_t n = row_begin; n < row_end; ++n) {
    res.unequalized_error += std::norm(training[n] - c0 * received[n]);
    res.training_error += std::norm(training[n] - res.output[n]);
  }
  res.unequalized_error /= static_cast<double>(rows);
  res.training_error /= static_cast<double>(rows);
  // Absolute floor keeps round-off on an exact fit from counting as worse.
  const double floor = 1e-20 * tt / static_cast<double>(rows);
  res.degenerate = res.training_error > res.unequalized_error * (1.0 + 1e-9) + floor;
  return res;
}

double estimate_snr(std::span<const cdouble> estimates, std::span<const cdouble> reference) {
  if (estimates.size() != reference.size()) throw std::invalid_argument("estimate_snr: length mismatch");
  if (reference.empty()) throw std::invalid_argument("estimate_snr: empty input");
  double ref_energy = 0.0;
  cdouble cross{};
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_energy += std::norm(reference[i]);
    cross += std::conj(reference[i]) * estimates[i];
  }
  if (!(ref_energy > 0.0)) throw std::invalid_argument("estimate_snr: zero reference energy");
  const cdouble c = cross / ref_energy;
  double err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) err += std::norm(estimates[i] - c * reference[i]);
  const double signal = std::norm(c) * ref_energy;
  if (!(err > 0.0)) return kSnrCapDb;
  if (!(signal > 0.0)) return -kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / err));
}

}  // namespace dsmsim
