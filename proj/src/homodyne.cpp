#include "qpn/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qpn/error.hpp"
#include "qpn/fock.hpp"
#include "qpn/numerics.hpp"

namespace qpn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDigits = 17;
constexpr double kMassTolerance = 1e-6;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_open(std::mt19937_64& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

std::string fmt(double v) { return format_double_digits(v, kDigits); }

}  // namespace

void QuadratureDataset::validate() const {
  require(x.size() == phi.size(), "dataset x and phi columns differ in length");
  require(meta.n == x.size(), "dataset sample count does not match its header");
  require(meta.eta > 0.0 && meta.eta <= 1.0, "dataset eta must lie in (0, 1]");
  require(!meta.phases.empty(), "dataset has no phases");
  for (double p : meta.phases) require(p >= 0.0 && p < kPi, "dataset phases must lie in [0, pi)");
  for (double p : phi)
    require(std::find(meta.phases.begin(), meta.phases.end(), p) != meta.phases.end(),
            "sample phase not in the declared phase list");
}

std::vector<double> default_phases(int k) {
  require(k >= 1, "need at least one phase");
  std::vector<double> p(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = kPi * i / k;
  return p;
}

std::uint64_t substream_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(0xD1B54A32D192ED03ULL + index));
}

std::vector<std::size_t> split_evenly(std::size_t total, std::size_t k) {
  require(k >= 1, "need at least one phase");
  std::vector<std::size_t> n(k, total / k);
  for (std::size_t i = 0; i < total % k; ++i) ++n[i];
  return n;
}

InverseCdf::InverseCdf(std::vector<double> x, std::vector<double> pdf) : x_(std::move(x)) {
  const std::size_t n = x_.size();
  require(n >= 4 && pdf.size() == n, "inverse CDF needs at least 4 nodes");
  const double h = x_[1] - x_[0];
  cdf_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Trapezoid with the 4-point end correction.
    double seg = 0.5 * h * (pdf[i] + pdf[i + 1]);
    if (i >= 1 && i + 2 < n) seg -= h / 24.0 * (pdf[i + 2] - pdf[i + 1] - pdf[i] + pdf[i - 1]);
    cdf_[i + 1] = cdf_[i] + std::max(0.0, seg);
  }
  raw_mass_ = cdf_.back();
  if (!(raw_mass_ > 0.0)) fail(ErrorKind::Range, "quadrature pdf has no mass on the sampling table");
  for (double& c : cdf_) c /= raw_mass_;
  slope_.resize(n);
  for (std::size_t i = 0; i < n; ++i) slope_[i] = std::max(0.0, pdf[i]) / raw_mass_;
  // Fritsch-Carlson limiter keeps every segment monotone.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double delta = (cdf_[i + 1] - cdf_[i]) / h;
    if (delta == 0.0) {
      slope_[i] = slope_[i + 1] = 0.0;
      continue;
    }
    const double a = slope_[i] / delta, b = slope_[i + 1] / delta;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      slope_[i] = t * a * delta;
      slope_[i + 1] = t * b * delta;
    }
  }
}

double InverseCdf::operator()(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return x_.front();
  if (it == cdf_.end()) return x_.back();
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double c0 = cdf_[i], c1 = cdf_[i + 1], m0 = slope_[i] * h, m1 = slope_[i + 1] * h;
  auto H = [&](double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * c0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * c1 + (t3 - t2) * m1;
  };
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 52; ++k) {
    const double mid = 0.5 * (lo + hi);
    (H(mid) < u ? lo : hi) = mid;
  }
  return x_[i] + 0.5 * (lo + hi) * h;
}

QuadratureDataset simulate_dataset(const StateModel& s, std::span<const double> phases,
                                   std::span<const std::size_t> n_per_phase, double eta, std::uint64_t seed,
                                   std::optional<cplx> alpha_tag) {
  require(!phases.empty(), "simulate: phase list is empty");
  require(phases.size() == n_per_phase.size(), "simulate: one sample count per phase");
  require(eta > 0.0 && eta <= 1.0, "simulate: eta must lie in (0, 1]");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    require(phases[i] >= 0.0 && phases[i] < kPi, "simulate: phases must lie in [0, pi)");
    require(n_per_phase[i] >= 1, "simulate: need at least one sample per phase");
    for (std::size_t j = 0; j < i; ++j) require(phases[i] != phases[j], "simulate: phases must be distinct");
  }
  FockDensity rho = fock_density_adaptive(s);
  if (eta < 1.0) rho = apply_loss(rho, eta);

  QuadratureDataset d;
  d.meta.state = s.describe();
  d.meta.alpha = alpha_tag;
  d.meta.eta = eta;
  d.meta.phases.assign(phases.begin(), phases.end());
  d.meta.seed = seed;
  std::size_t total = 0;
  for (std::size_t n : n_per_phase) total += n;
  d.meta.n = total;
  d.x.reserve(total);
  d.phi.reserve(total);

  for (std::size_t k = 0; k < phases.size(); ++k) {
    const double phi = phases[k];
    const QuadratureMoments mom = quadrature_moments(s, phi, eta);
    const double sd = std::sqrt(mom.variance);
    std::vector<double> xs(InverseCdf::kNodes), pdf(InverseCdf::kNodes);
    for (int i = 0; i < InverseCdf::kNodes; ++i) {
      xs[static_cast<std::size_t>(i)] = mom.mean - 10.0 * sd + 20.0 * sd * i / (InverseCdf::kNodes - 1);
      pdf[static_cast<std::size_t>(i)] = quadrature_pdf_ideal(rho, xs[static_cast<std::size_t>(i)], phi);
    }
    const InverseCdf inv(std::move(xs), std::move(pdf));
    if (std::abs(inv.raw_mass() - 1.0) > kMassTolerance)
      fail(ErrorKind::Range, "quadrature pdf mass on mean +- 10 sd is " + format_double(inv.raw_mass()) +
                                 " at phase " + format_double(phi));
    std::mt19937_64 gen(substream_seed(seed, k));
    for (std::size_t j = 0; j < n_per_phase[k]; ++j) {
      d.x.push_back(inv(uniform_open(gen)));
      d.phi.push_back(phi);
    }
  }
  return d;
}

QuadratureDataset simulate_dataset(const StateModel& s, std::span<const double> phases, std::size_t n_per_phase,
                                   double eta, std::uint64_t seed, std::optional<cplx> alpha_tag) {
  const std::vector<std::size_t> n(phases.size(), n_per_phase);
  return simulate_dataset(s, phases, n, eta, seed, alpha_tag);
}

void write_dataset(const QuadratureDataset& d, const std::string& path) {
  d.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << "# state=" << d.meta.state << '\n';
  if (d.meta.alpha) out << "# alpha=" << fmt(d.meta.alpha->real()) << ',' << fmt(d.meta.alpha->imag()) << '\n';
  out << "# eta=" << fmt(d.meta.eta) << '\n';
  out << "# phases=";
  for (std::size_t i = 0; i < d.meta.phases.size(); ++i) out << (i ? ";" : "") << fmt(d.meta.phases[i]);
  out << '\n';
  out << "# n=" << d.meta.n << '\n';
  out << "# seed=" << d.meta.seed << '\n';
  std::string row;
  for (std::size_t i = 0; i < d.size(); ++i) {
    row = fmt(d.x[i]);
    row += ',';
    row += fmt(d.phi[i]);
    row += '\n';
    out << row;
  }
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

DatasetReader::DatasetReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) fail(ErrorKind::Io, "cannot open '" + path + "'");
  bool state = false, eta = false, phases = false, n = false, seed = false;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] != '#') {
      pending_ = line;
      has_pending_ = true;
      break;
    }
    std::string body = line.substr(1);
    body.erase(0, body.find_first_not_of(' '));
    const auto eq = body.find('=');
    if (eq == std::string::npos) bad("malformed header line");
    const std::string key = body.substr(0, eq), val = body.substr(eq + 1);
    try {
      if (key == "state") {
        meta_.state = val;
        state = true;
      } else if (key == "alpha") {
        const auto c = val.find(',');
        if (c == std::string::npos) bad("alpha needs re,im");
        meta_.alpha = cplx(parse_double(val.substr(0, c)), parse_double(val.substr(c + 1)));
      } else if (key == "eta") {
        meta_.eta = parse_double(val);
        eta = true;
      } else if (key == "phases") {
        std::size_t pos = 0;
        while (true) {
          const auto sc = val.find(';', pos);
          meta_.phases.push_back(parse_double(val.substr(pos, sc == std::string::npos ? std::string::npos : sc - pos)));
          if (sc == std::string::npos) break;
          pos = sc + 1;
        }
        phases = true;
      } else if (key == "n") {
        meta_.n = static_cast<std::size_t>(std::stoull(val));
        n = true;
      } else if (key == "seed") {
        meta_.seed = static_cast<std::uint64_t>(std::stoull(val));
        seed = true;
      } else {
        bad("unknown header key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse && std::string(e.what()).rfind(path_, 0) == 0) throw;
      bad("bad value for '" + key + "'");
    } catch (const std::logic_error&) {
      bad("bad value for '" + key + "'");
    }
  }
  const char* missing = !state ? "state" : !eta ? "eta" : !phases ? "phases" : !n ? "n" : !seed ? "seed" : nullptr;
  if (missing) bad(std::string("header is missing '") + missing + "'");
  if (!(meta_.eta > 0.0 && meta_.eta <= 1.0)) bad("eta must lie in (0, 1]");
  for (double p : meta_.phases)
    if (!(p >= 0.0 && p < kPi)) bad("phases must lie in [0, pi)");
}

void DatasetReader::bad(const std::string& what) const {
  fail(ErrorKind::Parse, path_ + ":" + std::to_string(line_) + ": " + what);
}

bool DatasetReader::next(double& x, double& phi) {
  std::string line;
  while (true) {
    if (has_pending_) {
      line = std::move(pending_);
      has_pending_ = false;
    } else {
      if (!std::getline(in_, line)) {
        if (rows_ != meta_.n)
          fail(ErrorKind::Parse, path_ + ": header declares n=" + std::to_string(meta_.n) + " but file has " +
                                     std::to_string(rows_) + " rows");
        return false;
      }
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    if (!line.empty()) break;
  }
  const auto c = line.find(',');
  if (c == std::string::npos || line.find(',', c + 1) != std::string::npos) bad("expected 'x,phi'");
  try {
    x = parse_double(line.substr(0, c));
    phi = parse_double(line.substr(c + 1));
  } catch (const Error&) {
    bad("malformed number");
  }
  if (std::find(meta_.phases.begin(), meta_.phases.end(), phi) == meta_.phases.end())
    bad("phase not in the declared phase list");
  ++rows_;
  return true;
}

QuadratureDataset read_dataset(const std::string& path) {
  DatasetReader r(path);
  QuadratureDataset d;
  d.meta = r.meta();
  d.x.reserve(d.meta.n);
  d.phi.reserve(d.meta.n);
  double x = 0.0, phi = 0.0;
  while (r.next(x, phi)) {
    d.x.push_back(x);
    d.phi.push_back(phi);
  }
  return d;
}

}  // namespace qpn
