#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/signal/filter_config.hpp"

namespace gprloc {

// Orthonormal Daubechies scaling filters, sum sqrt(2), unit energy.
// dbN has N vanishing moments and 2N taps.
struct WaveletBasis {
  std::string name;
  std::vector<double> h;  // lowpass
  std::vector<double> g;  // highpass, quadrature mirror of h
  int vanishing_moments = 0;
};

inline WaveletBasis make_basis(std::string name, std::vector<double> h) {
  WaveletBasis b;
  b.name = std::move(name);
  b.vanishing_moments = static_cast<int>(h.size()) / 2;
  b.g.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j)
    b.g[j] = (j % 2 == 0 ? 1.0 : -1.0) * h[h.size() - 1 - j];
  b.h = std::move(h);
  return b;
}

inline const WaveletBasis& wavelet_basis(const std::string& name) {
  static const std::vector<WaveletBasis> bases = [] {
    // db1..db3 have closed forms; evaluating them beats the published
    // decimal tables, whose last digits break orthonormality at ~1e-12.
    const double rt2 = std::sqrt(2.0);
    const double rt3 = std::sqrt(3.0);
    const double rt10 = std::sqrt(10.0);
    const double s = std::sqrt(5.0 + 2.0 * rt10);
    std::vector<WaveletBasis> v;
    v.push_back(make_basis("db1", {1.0 / rt2, 1.0 / rt2}));
    v.push_back(make_basis("db2", {(1.0 + rt3) / (4.0 * rt2), (3.0 + rt3) / (4.0 * rt2),
                                   (3.0 - rt3) / (4.0 * rt2), (1.0 - rt3) / (4.0 * rt2)}));
    v.push_back(make_basis("db3", {(1.0 + rt10 + s) / (16.0 * rt2),
                                   (5.0 + rt10 + 3.0 * s) / (16.0 * rt2),
                                   (10.0 - 2.0 * rt10 + 2.0 * s) / (16.0 * rt2),
                                   (10.0 - 2.0 * rt10 - 2.0 * s) / (16.0 * rt2),
                                   (5.0 + rt10 - 3.0 * s) / (16.0 * rt2),
                                   (1.0 + rt10 - s) / (16.0 * rt2)}));
    // db4/db6 from spectral factorization carried out in extended precision;
    // these literals satisfy the identities to the last bit of a double.
    v.push_back(make_basis("db4", {0.2303778133088965, 0.7148465705529157, 0.6308807679298589,
                                   -0.027983769416859854, -0.18703481171909309,
                                   0.030841381835560764, 0.0328830116668852,
                                   -0.010597401785069032}));
    v.push_back(make_basis("db6", {0.11154074335010947, 0.49462389039845306, 0.7511339080210954,
                                   0.31525035170919763, -0.22626469396543983,
                                   -0.12976686756726194, 0.09750160558732304,
                                   0.027522865530305727, -0.03158203931748603,
                                   0.0005538422011614961, 0.004777257510945511,
                                   -0.0010773010853084796}));
    return v;
  }();
  for (const auto& b : bases)
    if (b.name == name) return b;
  throw ConfigError("unknown wavelet '" + name + "'");
}

struct WaveletDecomposition {
  int n = 0;       // original length before padding
  int levels = 0;
  std::vector<Eigen::VectorXd> details;  // details[0] is the finest scale
  Eigen::VectorXd approx;
};

namespace detail {

// Half-point symmetric reflection, valid for any index.
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

inline void check_levels(Eigen::Index n_pad, int levels, const WaveletBasis& basis) {
  const auto taps = static_cast<Eigen::Index>(basis.h.size());
  if (levels < 1) throw ConfigError("wavelet levels must be >= 1");
  // Every level processes an even-length signal no shorter than the filter.
  Eigen::Index m = n_pad;
  for (int l = 0; l < levels; ++l) {
    if (m < taps || m % 2 != 0)
      throw ConfigError("trace too short for " + basis.name + " at " +
                        std::to_string(levels) + " levels");
    m /= 2;
  }
}

}  // namespace detail

// Periodized orthonormal transform of a symmetric extension. The padded
// length is the next multiple of 2^levels, so each stage halves exactly and
// the analysis matrix stays orthogonal, giving bit-tight reconstruction.
inline WaveletDecomposition wavelet_decompose(const Eigen::VectorXd& x, const WaveletBasis& basis,
                                              int levels) {
  const Eigen::Index n = x.size();
  if (n < 2) throw ConfigError("wavelet transform needs at least 2 samples");
  const Eigen::Index block = Eigen::Index(1) << levels;
  const Eigen::Index n_pad = ((n + block - 1) / block) * block;
  detail::check_levels(n_pad, levels, basis);

  Eigen::VectorXd a(n_pad);
  for (Eigen::Index i = 0; i < n_pad; ++i) a[i] = x[detail::reflect_index(i, n)];

  WaveletDecomposition dec;
  dec.n = static_cast<int>(n);
  dec.levels = levels;
  const auto taps = static_cast<Eigen::Index>(basis.h.size());
  for (int l = 0; l < levels; ++l) {
    const Eigen::Index m = a.size();
    Eigen::VectorXd ca(m / 2), cd(m / 2);
    for (Eigen::Index i = 0; i < m / 2; ++i) {
      double sa = 0.0, sd = 0.0;
      for (Eigen::Index j = 0; j < taps; ++j) {
        const double v = a[(2 * i + j) % m];
        sa += basis.h[static_cast<std::size_t>(j)] * v;
        sd += basis.g[static_cast<std::size_t>(j)] * v;
      }
      ca[i] = sa;
      cd[i] = sd;
    }
    dec.details.push_back(std::move(cd));
    a = std::move(ca);
  }
  dec.approx = std::move(a);
  return dec;
}

inline Eigen::VectorXd wavelet_reconstruct(const WaveletDecomposition& dec,
                                           const WaveletBasis& basis) {
  const auto taps = static_cast<Eigen::Index>(basis.h.size());
  Eigen::VectorXd a = dec.approx;
  for (int l = dec.levels - 1; l >= 0; --l) {
    const auto& cd = dec.details[static_cast<std::size_t>(l)];
    const Eigen::Index m = 2 * a.size();
    Eigen::VectorXd next = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m / 2; ++i) {
      for (Eigen::Index j = 0; j < taps; ++j) {
        next[(2 * i + j) % m] += basis.h[static_cast<std::size_t>(j)] * a[i] +
                                 basis.g[static_cast<std::size_t>(j)] * cd[i];
      }
    }
    a = std::move(next);
  }
  return a.head(dec.n);
}

inline double median_abs(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  std::vector<double> mag(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(v[i]);
  std::sort(mag.begin(), mag.end());
  const std::size_t n = mag.size();
  return n % 2 ? mag[n / 2] : 0.5 * (mag[n / 2 - 1] + mag[n / 2]);
}

// Universal-threshold shrinkage. Noise scale comes from the finest detail
// band; the threshold applies to every detail band, approx passes through.
inline Eigen::VectorXd wavelet_denoise(const Eigen::VectorXd& x, const FilterConfig& cfg) {
  const auto& basis = wavelet_basis(cfg.wavelet);
  auto dec = wavelet_decompose(x, basis, cfg.wavelet_levels);
  const double sigma = median_abs(dec.details.front()) / 0.6745;
  const double tau =
      cfg.wavelet_threshold_scale * sigma * std::sqrt(2.0 * std::log(static_cast<double>(x.size())));
  for (auto& d : dec.details) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double v = d[i];
      if (cfg.wavelet_threshold_rule == ThresholdRule::soft) {
        d[i] = std::abs(v) <= tau ? 0.0 : (v > 0 ? v - tau : v + tau);
      } else {
        d[i] = std::abs(v) <= tau ? 0.0 : v;
      }
    }
  }
  return wavelet_reconstruct(dec, basis);
}

}  // namespace gprloc
