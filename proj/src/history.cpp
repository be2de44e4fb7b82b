#include "rvm/history.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace rvm {

HistoryBuffer::HistoryBuffer(std::vector<double> weights, double depth, InitialData init)
    : weights_(std::move(weights)), depth_(depth), init_(init) {
  if (!(depth > 0.0)) throw std::invalid_argument("HistoryBuffer: depth must be positive");
}

void HistoryBuffer::push(ParticleSnapshot snap) {
  const std::size_t n = weights_.size();
  if (snap.x.size() != n || snap.p.size() != n || snap.E.size() != n || snap.B.size() != n)
    throw std::invalid_argument("HistoryBuffer: snapshot size does not match the ensemble");
  if (!snaps_.empty() && !(snap.t > snaps_.back().t))
    throw std::invalid_argument("HistoryBuffer: snapshot times must increase");
  snaps_.push_back(std::move(snap));
  while (snaps_.size() > 2 && snaps_.back().t - snaps_[1].t >= depth_) snaps_.pop_front();
}

double HistoryBuffer::t_begin() const {
  if (snaps_.empty()) throw std::out_of_range("HistoryBuffer: empty");
  return snaps_.front().t;
}

double HistoryBuffer::t_end() const {
  if (snaps_.empty()) throw std::out_of_range("HistoryBuffer: empty");
  return snaps_.back().t;
}

double HistoryBuffer::mean_stride() const {
  if (snaps_.size() < 2) return 0.0;
  return (snaps_.back().t - snaps_.front().t) / static_cast<double>(snaps_.size() - 1);
}

HistoryBuffer::Bracket HistoryBuffer::bracket(double s) const {
  if (snaps_.empty()) throw std::out_of_range("HistoryBuffer: empty");
  const double tol = 1e-12 * std::max(1.0, std::abs(s));
  if (s < snaps_.front().t - tol || s > snaps_.back().t + tol) {
    std::ostringstream msg;
    msg << "HistoryBuffer: time " << s << " outside stored window [" << snaps_.front().t << ", "
        << snaps_.back().t << "]";
    throw std::out_of_range(msg.str());
  }
  if (snaps_.size() == 1) return {&snaps_[0], &snaps_[0], 0.0};
  auto it = std::upper_bound(snaps_.begin(), snaps_.end(), s,
                             [](double v, const ParticleSnapshot& p) { return v < p.t; });
  std::size_t i = std::clamp<std::size_t>(it - snaps_.begin(), 1, snaps_.size() - 1);
  const ParticleSnapshot& a = snaps_[i - 1];
  const ParticleSnapshot& b = snaps_[i];
  const double frac = std::clamp((s - a.t) / (b.t - a.t), 0.0, 1.0);
  return {&a, &b, frac};
}

}  // namespace rvm
