#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpn/states.hpp"

namespace qpn {

struct DatasetMeta {
  std::string state;
  std::optional<cplx> alpha;  // probe amplitude tag
  double eta = 1.0;
  std::vector<double> phases;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  bool operator==(const DatasetMeta&) const = default;
};

/// Homodyne (x, phi) pairs. Samples are grouped by phase in the order of
/// meta.phases.
struct QuadratureDataset {
  DatasetMeta meta;
  std::vector<double> x;
  std::vector<double> phi;

  std::size_t size() const { return x.size(); }
  void validate() const;
};

/// K equally spaced phases k pi / K.
std::vector<double> default_phases(int k = 10);

/// Seed of the per-phase random stream.
std::uint64_t substream_seed(std::uint64_t seed, std::size_t index);

/// Samples per phase when `total` is split over k phases; the first
/// total % k phases get one extra sample.
std::vector<std::size_t> split_evenly(std::size_t total, std::size_t k);

/// Inverse-CDF sampler for one phase: 4096 nodes on mean +- 10 sd, CDF
/// interpolated by monotone cubic Hermite segments.
class InverseCdf {
 public:
  static constexpr int kNodes = 4096;
  InverseCdf(std::vector<double> x, std::vector<double> pdf);

  /// Quantile for u in (0, 1).
  double operator()(double u) const;
  /// Mass of the pdf integrated over the table before normalization.
  double raw_mass() const { return raw_mass_; }

 private:
  std::vector<double> x_, cdf_, slope_;
  double raw_mass_ = 0.0;
};

QuadratureDataset simulate_dataset(const StateModel& s, std::span<const double> phases,
                                   std::span<const std::size_t> n_per_phase, double eta, std::uint64_t seed,
                                   std::optional<cplx> alpha_tag = std::nullopt);
QuadratureDataset simulate_dataset(const StateModel& s, std::span<const double> phases, std::size_t n_per_phase,
                                   double eta, std::uint64_t seed, std::optional<cplx> alpha_tag = std::nullopt);

/// Reads the header eagerly and rows on demand.
class DatasetReader {
 public:
  explicit DatasetReader(const std::string& path);
  const DatasetMeta& meta() const { return meta_; }
  /// False at end of file; checks the row count against the header then.
  bool next(double& x, double& phi);

 private:
  [[noreturn]] void bad(const std::string& what) const;
  std::string path_;
  std::ifstream in_;
  DatasetMeta meta_;
  std::string pending_;
  bool has_pending_ = false;
  std::size_t line_ = 0;
  std::size_t rows_ = 0;
};

void write_dataset(const QuadratureDataset& d, const std::string& path);
QuadratureDataset read_dataset(const std::string& path);

}  // namespace qpn
