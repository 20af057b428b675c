#include "rotorsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rotorsim/units.hpp"

namespace rotorsim {

namespace {

int bin_of(double angle, int bins) {
  double w = two_pi / bins;
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  int b = static_cast<int>(a / w);
  return std::min(b, bins - 1);
}

std::vector<double> count_fractions(const std::vector<double>& series, int bins, std::size_t begin,
                                    std::size_t end) {
  std::vector<long> counts(bins, 0);
  for (std::size_t s = begin; s < end; ++s) ++counts[bin_of(series[s], bins)];
  std::vector<double> fraction(bins, 0.0);
  double total = static_cast<double>(end - begin);
  for (int b = 0; b < bins; ++b) fraction[b] = counts[b] / total;
  return fraction;
}

}  // namespace

std::vector<double> Histogram::density() const {
  std::vector<double> out(fraction.size());
  for (std::size_t b = 0; b < fraction.size(); ++b) out[b] = fraction[b] / bin_width;
  return out;
}

Histogram angle_histogram(const std::vector<double>& series, int bins) {
  if (bins < 1) throw std::invalid_argument("angle_histogram: bins must be positive");
  if (series.empty()) throw std::invalid_argument("angle_histogram: empty series");
  Histogram h;
  h.bins = bins;
  h.bin_width = two_pi / bins;
  h.total = static_cast<long>(series.size());
  h.fraction = count_fractions(series, bins, 0, series.size());
  auto half = count_fractions(series, bins, 0, series.size() / 2);
  h.convergence_gap = kolmogorov_distance(h.fraction, half);
  return h;
}

bool wrap_detected(const std::vector<double>& series) {
  for (std::size_t s = 1; s < series.size(); ++s)
    if (std::abs(series[s] - series[s - 1]) > pi) return true;
  return false;
}

double CorrelationCurve::correlation_time(double threshold) const {
  if (values.empty()) return -1.0;
  double level = threshold * values.front();
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] <= level) return lag_step * static_cast<double>(k);
  return -1.0;
}

CorrelationCurve autocorrelation(const std::vector<double>& series, double sample_step,
                                 long max_lag) {
  long count = static_cast<long>(series.size());
  if (count < 2) throw std::invalid_argument("autocorrelation: series too short");
  max_lag = std::min(max_lag, count - 1);
  double mean = std::accumulate(series.begin(), series.end(), 0.0) / count;
  std::vector<double> dev(series.size());
  for (long s = 0; s < count; ++s) dev[s] = series[s] - mean;

  CorrelationCurve curve;
  curve.lag_step = sample_step;
  curve.wrap_flag = wrap_detected(series);
  curve.values.resize(max_lag + 1);
  for (long lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    long pairs = count - lag;
    for (long s = 0; s < pairs; ++s) acc += dev[s] * dev[s + lag];
    curve.values[lag] = acc / pairs;
  }
  return curve;
}

ConditionalFamily conditional_distribution(const std::vector<double>& series, long lag,
                                           int source_bins, int target_bins, long min_count) {
  long count = static_cast<long>(series.size());
  if (lag < 1 || lag >= count)
    throw std::invalid_argument("conditional_distribution: lag out of range");
  ConditionalFamily fam;
  fam.lag = lag;
  fam.source_bins = source_bins;
  fam.target_bins = target_bins;
  fam.min_count = min_count;
  fam.counts.assign(source_bins, 0);
  fam.adequate.assign(source_bins, 0);
  fam.probability = Eigen::MatrixXd::Zero(source_bins, target_bins);

  for (long s = 0; s + lag < count; ++s) {
    int src = bin_of(series[s], source_bins);
    int tgt = bin_of(series[s + lag], target_bins);
    ++fam.counts[src];
    fam.probability(src, tgt) += 1.0;
  }
  for (int src = 0; src < source_bins; ++src) {
    if (fam.counts[src] > 0) fam.probability.row(src) /= static_cast<double>(fam.counts[src]);
    fam.adequate[src] = fam.counts[src] >= min_count ? 1 : 0;
  }
  fam.marginal = count_fractions(series, target_bins, 0, series.size());
  return fam;
}

ChapmanKolmogorovReport chapman_kolmogorov_check(const std::vector<double>& series, long lag,
                                                 int bins, long min_count) {
  auto one = conditional_distribution(series, lag, bins, bins, min_count);
  auto two = conditional_distribution(series, 2 * lag, bins, bins, min_count);

  Eigen::MatrixXd composed = one.probability * one.probability;
  // rows through unvisited intermediate bins lose a little mass; renormalize
  for (int src = 0; src < bins; ++src) {
    double mass = composed.row(src).sum();
    if (mass > 0.0) composed.row(src) /= mass;
  }

  ChapmanKolmogorovReport report;
  report.lag = lag;
  report.bins = bins;
  for (int src = 0; src < bins; ++src) {
    if (!one.adequate[src] || !two.adequate[src]) continue;
    double gap = (composed.row(src) - two.probability.row(src)).cwiseAbs().maxCoeff();
    report.residual = std::max(report.residual, gap);
    ++report.compared_sources;
  }
  return report;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double kolmogorov_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kolmogorov_distance: size mismatch");
  double worst = 0.0;
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
    worst = std::max(worst, std::abs(ca - cb));
  }
  return worst;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& w, double spacing) {
  if (p.size() != w.size()) throw std::invalid_argument("total_variation: size mismatch");
  return 0.5 * (p - w).cwiseAbs().sum() * spacing;
}

std::vector<double> rebin_fractions(const std::vector<double>& fraction, int factor) {
  if (factor < 1 || fraction.size() % factor != 0)
    throw std::invalid_argument("rebin_fractions: factor must divide the bin count");
  std::vector<double> out(fraction.size() / factor, 0.0);
  for (std::size_t b = 0; b < fraction.size(); ++b) out[b / factor] += fraction[b];
  return out;
}

}  // namespace rotorsim
