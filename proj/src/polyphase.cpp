#include "dsmsim/polyphase.hpp"

#include <algorithm>

#include <Eigen/Core>
#include <stdexcept>

namespace dsmsim {

PolyphaseBank decompose(std::span<const double> taps, std::size_t factor) {
  if (factor < 1) throw std::invalid_argument("decompose: factor must be >= 1");
  if (taps.empty()) throw std::invalid_argument("decompose: no taps");
  PolyphaseBank bank;
  bank.factor = factor;
  bank.source_length = taps.size();
  const std::size_t branch_len = (taps.size() + factor - 1) / factor;
  bank.branches.assign(factor, std::vector<double>(branch_len, 0.0));
  bank.active_taps.assign(factor, 0);
  for (std::size_t i = 0; i < taps.size(); ++i) {
    bank.branches[i % factor][i / factor] = taps[i];
    ++bank.active_taps[i % factor];
  }
  return bank;
}

PolyphaseBank decompose(const FirFilter& filter, std::size_t factor) { return decompose(filter.taps(), factor); }

std::vector<double> PolyphaseBank::interleave() const {
  std::vector<double> taps(source_length);
  for (std::size_t i = 0; i < source_length; ++i) taps[i] = branches[i % factor][i / factor];
  return taps;
}

namespace {

// Split real/imag copy of x with `front` and `back` zeros around it, so every
// filter window is a plain contiguous dot product.
struct SplitBuffer {
  std::vector<double> re;
  std::vector<double> im;

  SplitBuffer(std::span<const cdouble> x, std::size_t front, std::size_t back)
      : re(front + x.size() + back, 0.0), im(front + x.size() + back, 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      re[front + i] = x[i].real();
      im[front + i] = x[i].imag();
    }
  }
};

using ConstVec = Eigen::Map<const Eigen::VectorXd>;

cdouble dot(const double* taps, const SplitBuffer& buf, std::size_t start, std::size_t len) {
  const auto n = static_cast<Eigen::Index>(len);
  const ConstVec h(taps, n);
  return {h.dot(ConstVec(buf.re.data() + start, n)), h.dot(ConstVec(buf.im.data() + start, n))};
}

}  // namespace

ComplexSignal interpolate(const PolyphaseBank& bank, std::span<const cdouble> symbols, double symbol_rate_hz,
                          MacCounter* counter) {
  if (symbols.empty()) throw std::invalid_argument("interpolate: no symbols");
  if (bank.factor < 1 || bank.branches.size() != bank.factor) throw std::invalid_argument("interpolate: bad bank");

  const std::size_t factor = bank.factor;
  const std::size_t n_sym = symbols.size();
  const std::size_t n_out = n_sym * factor;
  const std::size_t delay = (bank.source_length - 1) / 2;
  const std::size_t span = bank.branch_length();

  // Branch n evaluated at input k gives full-rate sample factor*k + n:
  // sum_m b_n[m] s[k - m]. Reversed branches turn that into a forward window
  // over s[k - active + 1 .. k].
  std::vector<std::vector<double>> reversed(factor);
  for (std::size_t n = 0; n < factor; ++n) {
    const auto& b = bank.branches[n];
    reversed[n].assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(bank.active_taps[n]));
    std::reverse(reversed[n].begin(), reversed[n].end());
  }
  const SplitBuffer buf(symbols, span, span);

  std::vector<cdouble> out(n_out);
  std::uint64_t macs = 0;
  const std::size_t k_last = (n_out - 1 + delay) / factor;
  for (std::size_t k = delay / factor; k <= k_last; ++k) {
    for (std::size_t n = 0; n < factor; ++n) {
      const std::size_t j = factor * k + n;
      if (j < delay || j - delay >= n_out) continue;
      const std::size_t active = bank.active_taps[n];
      if (active > 0) out[j - delay] = dot(reversed[n].data(), buf, k + span + 1 - active, active);
      // A branch evaluation costs its active taps whether or not the history
      // is still zero, matching a clocked hardware pipeline.
      macs += active;
    }
  }
  if (counter) {
    counter->macs += macs;
    counter->input_symbols += n_sym;
  }
  return {std::move(out), symbol_rate_hz * static_cast<double>(factor)};
}

ComplexSignal interpolate_naive(const FirFilter& filter, std::span<const cdouble> symbols, double symbol_rate_hz,
                                std::size_t factor) {
  ComplexSignal sym(std::vector<cdouble>(symbols.begin(), symbols.end()), symbol_rate_hz);
  const auto up = upsample_zero_insert(sym, factor);
  if (up.size() >= filter.length()) return apply_fir(filter, up);
  // Short inputs: pad so apply_fir's length precondition holds, then cut back.
  std::vector<cdouble> padded(up.samples().begin(), up.samples().end());
  padded.resize(filter.length(), cdouble{});
  auto y = apply_fir(filter, ComplexSignal(std::move(padded), up.sample_rate())).release();
  y.resize(up.size());
  return {std::move(y), up.sample_rate()};
}

ComplexSignal filter_decimate(const FirFilter& filter, const ComplexSignal& sig, std::size_t factor,
                              std::size_t offset) {
  if (factor < 1) throw std::invalid_argument("filter_decimate: factor must be >= 1");
  if (offset >= factor) throw std::invalid_argument("filter_decimate: offset must be < factor");
  const std::size_t n = sig.size();
  const std::size_t len = filter.length();
  if (n < len) throw std::invalid_argument("filter_decimate: signal shorter than filter");
  const std::size_t delay = filter.group_delay();
  // Symmetric taps: sum_j h[j] x[k + delay - j] == sum_i h[i] x[k - delay + i].
  const SplitBuffer buf(sig.samples(), delay, delay);

  std::vector<cdouble> out;
  out.reserve(n / factor + 1);
  for (std::size_t k = offset; k < n; k += factor) out.push_back(dot(filter.taps().data(), buf, k, len));
  return {std::move(out), sig.sample_rate() / static_cast<double>(factor)};
}

std::uint64_t count_multiplications(FilterStructure structure, std::uint64_t length, std::uint64_t subcarriers) {
  if (length < 1 || subcarriers < 1) throw std::invalid_argument("count_multiplications: L and N must be >= 1");
  return structure == FilterStructure::naive ? 2 * length * subcarriers : length;
}

}  // namespace dsmsim
