#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace rroff {

// Fixed-capacity tapped delay line. After pushing x(0..k), value(0) is x(k),
// value(1) is x(k-1), and so on; slots not yet written read as zero.
class TappedDelayLine {
 public:
  TappedDelayLine() = default;
  explicit TappedDelayLine(std::size_t depth) : buf_(depth, 0.0) {}

  std::size_t depth() const { return buf_.size(); }

  void push(double x) {
    if (buf_.empty()) return;
    head_ = head_ == 0 ? buf_.size() - 1 : head_ - 1;
    buf_[head_] = x;
  }

  // Most recent first, j in [0, depth).
  double value(std::size_t j) const {
    std::size_t idx = head_ + j;
    if (idx >= buf_.size()) idx -= buf_.size();
    return buf_[idx];
  }

  void copy_to(std::span<double> out) const {
    for (std::size_t j = 0; j < buf_.size(); ++j) out[j] = value(j);
  }

  std::vector<double> read() const {
    std::vector<double> out(buf_.size());
    copy_to(out);
    return out;
  }

  void reset() {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    head_ = 0;
  }

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;
};

}  // namespace rroff
