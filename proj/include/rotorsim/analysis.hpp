#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rotorsim {

// Occupancy histogram of one angle series over [0, 2 pi).
struct Histogram {
  int bins = 0;
  double bin_width = 0.0;
  long total = 0;
  std::vector<double> fraction;  // sums to 1 (integer counting)
  // Kolmogorov distance between the half-record and full-record histograms;
  // large values signal an unconverged (still drifting) record
  double convergence_gap = 0.0;

  std::vector<double> density() const;
};

Histogram angle_histogram(const std::vector<double>& series, int bins);

// G(tau) by a discretized time average along the record.  Deviations are
// taken from the full-record mean and statistics are linear (non-circular):
// adequate for confined motion that never wraps; wrap_flag reports records
// where that assumption broke (consecutive samples more than pi apart).
struct CorrelationCurve {
  double lag_step = 0.0;
  std::vector<double> values;
  bool wrap_flag = false;

  double g0() const { return values.empty() ? 0.0 : values.front(); }
  // first lag where G drops to threshold * G(0); -1 if it never does
  double correlation_time(double threshold) const;
};

CorrelationCurve autocorrelation(const std::vector<double>& series, double sample_step,
                                 long max_lag);

bool wrap_detected(const std::vector<double>& series);

// Family of conditional target histograms, one per coarse source bin:
// probability(s, t) estimates Prob[ Q(j+lag) in target bin t | Q(j) in s ].
struct ConditionalFamily {
  long lag = 0;
  int source_bins = 0;
  int target_bins = 0;
  long min_count = 0;
  std::vector<long> counts;        // pairs contributing to each source bin
  std::vector<char> adequate;      // counts >= min_count
  Eigen::MatrixXd probability;     // rows sum to 1 where counts > 0
  std::vector<double> marginal;    // target-binned fractions of the whole series
};

ConditionalFamily conditional_distribution(const std::vector<double>& series, long lag,
                                           int source_bins, int target_bins, long min_count);

// Composition test of the Markov hypothesis: the empirical conditional at
// lag 2 tau is compared with the two-step composition of the lag-tau kernel.
// The residual is the worst sup-distance over source bins that are
// adequately sampled in both estimates.
struct ChapmanKolmogorovReport {
  long lag = 0;
  int bins = 0;
  double residual = 0.0;
  int compared_sources = 0;
};

ChapmanKolmogorovReport chapman_kolmogorov_check(const std::vector<double>& series, long lag,
                                                 int bins, long min_count);

// largest pointwise gap between two occupancy-fraction vectors
double sup_distance(const std::vector<double>& a, const std::vector<double>& b);
// largest gap between the two cumulative distributions
double kolmogorov_distance(const std::vector<double>& a, const std::vector<double>& b);

// (1/2) sum |p - w| dq for two densities on the same uniform grid
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& w, double spacing);

// merge adjacent occupancy fractions, factor bins at a time
std::vector<double> rebin_fractions(const std::vector<double>& fraction, int factor);

}  // namespace rotorsim
