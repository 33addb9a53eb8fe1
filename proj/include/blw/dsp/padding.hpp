#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace blw::dsp {

/// Odd (point) reflection about both end samples: x[-k] = 2 x[0] - x[k].
///
/// Pads longer than the signal are produced by reflecting the already
/// extended sequence again, so any pad length is accepted.
inline std::vector<double> reflect_pad(std::span<const double> x, std::size_t left, std::size_t right) {
  std::vector<double> cur(x.begin(), x.end());
  if (cur.empty()) return cur;
  std::size_t need_left = left;
  std::size_t need_right = right;
  while (need_left > 0 || need_right > 0) {
    const std::size_t n = cur.size();
    const std::size_t l = std::min(need_left, n - 1);
    const std::size_t r = std::min(need_right, n - 1);
    if (n == 1) {
      // A single sample reflects onto itself.
      std::vector<double> out(need_left + 1 + need_right, cur[0]);
      return out;
    }
    std::vector<double> out;
    out.reserve(n + l + r);
    for (std::size_t k = l; k >= 1; --k) out.push_back(2.0 * cur.front() - cur[k]);
    out.insert(out.end(), cur.begin(), cur.end());
    for (std::size_t k = 1; k <= r; ++k) out.push_back(2.0 * cur.back() - cur[n - 1 - k]);
    cur = std::move(out);
    need_left -= l;
    need_right -= r;
  }
  return cur;
}

/// Half-sample symmetric index mapping (x[-1] = x[0], x[n] = x[n-1]) for any integer index.
inline std::size_t symmetric_index(long long i, std::size_t n) {
  const long long period = 2 * static_cast<long long>(n);
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<long long>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

}  // namespace blw::dsp
