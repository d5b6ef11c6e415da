#include "specfuse/tf_core.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "specfuse/errors.hpp"

namespace specfuse {

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) {
    throw DomainError(std::string(name) + " axis needs at least 2 points, got " +
                      std::to_string(axis.size()));
  }
  if (!std::isfinite(axis.front()) || axis.front() < 0.0) {
    throw DomainError(std::string(name) + " axis must start at a finite value >= 0");
  }
  for (std::size_t k = 1; k < axis.size(); ++k) {
    if (!std::isfinite(axis[k]) || !(axis[k] > axis[k - 1])) {
      throw DomainError(std::string(name) + " axis not strictly increasing at index " +
                        std::to_string(k + 1));
    }
  }
}

}  // namespace

TFSupport::TFSupport(std::vector<double> freqs, std::vector<double> times)
    : freqs_(std::move(freqs)), times_(std::move(times)) {
  check_axis(freqs_, "frequency");
  check_axis(times_, "time");
}

Spectrogram::Spectrogram(TFSupport support, std::vector<double> values, StftProvenance provenance)
    : support_(std::move(support)), values_(std::move(values)), provenance_(provenance) {
  if (values_.size() != support_.size()) {
    throw DomainError("spectrogram has " + std::to_string(values_.size()) +
                      " values for a " + std::to_string(support_.num_freqs()) + "x" +
                      std::to_string(support_.num_times()) + " support");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw DomainError("spectrogram value at linear index " + std::to_string(i + 1) +
                        " is negative or not finite");
    }
  }
  if (!(provenance_.window_len_s > 0.0) || provenance_.hop == 0 ||
      !(provenance_.sample_rate > 0.0)) {
    throw DomainError("spectrogram provenance needs positive window, hop and sample rate");
  }
}

double Spectrogram::mass() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double MeasureView::mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::size_t index_map(std::size_t m, std::size_t n, std::size_t num_rows) {
  if (m < 1 || m > num_rows) {
    throw IndexError("frequency index m=" + std::to_string(m) + " outside 1.." +
                     std::to_string(num_rows));
  }
  if (n < 1) throw IndexError("time index n must be >= 1");
  return (n - 1) * num_rows + m;
}

std::pair<std::size_t, std::size_t> index_unmap(std::size_t i, std::size_t num_rows) {
  if (i < 1 || num_rows == 0) throw IndexError("linear index must be >= 1");
  return {(i - 1) % num_rows + 1, (i - 1) / num_rows + 1};
}

MeasureView to_measure(const Spectrogram& spec) {
  return MeasureView{std::vector<double>(spec.values().begin(), spec.values().end()),
                     spec.support()};
}

MeasureView normalize(const MeasureView& view) {
  const double total = view.mass();
  if (!(total > 0.0)) throw DomainError("cannot normalize a measure with zero mass");
  MeasureView out{view.weights, view.support};
  for (double& w : out.weights) w /= total;
  return out;
}

Spectrogram to_spectrogram(const MeasureView& view, StftProvenance provenance) {
  return Spectrogram(view.support, view.weights, provenance);
}

}  // namespace specfuse
