// Copyright 2026 The symvar Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random matrix realization of free independence. A diagonal projection E
// and Y = U D U^* with U Haar-distributed are asymptotically free as n grows,
// so normalized traces tr((E+Y)^k)/n approach the free convolution moments.
//
// Laws are realized deterministically: E has rank round(p n) and D carries
// each atom with a largest-remainder multiplicity.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "symvar/certificate.hpp"
#include "symvar/cumulants.hpp"
#include "symvar/errors.hpp"
#include "symvar/measures.hpp"
#include "symvar/parallel.hpp"

namespace symvar {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxMatrixDimension = 4096;

struct MatrixModel {
  int n = 2;
  double p = 0.5;
  DiscreteMeasure<double> y_law = DiscreteMeasure<double>::point_mass(0.0);
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 2 || n > kMaxMatrixDimension)
      throw SizeError("matrix dimension " + std::to_string(n) + " outside [2, 4096]");
    if (!(p >= 0 && p <= 1)) throw DomainError("projection trace p must lie in [0, 1]");
  }
};

/// Integer multiplicities summing to n, each floor(w_i n) plus one extra
/// for the largest fractional parts (ties to the lower index).
inline std::vector<int> largest_remainder_counts(const std::vector<double>& weights, int n) {
  std::vector<int> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] * n;
    counts[i] = static_cast<int>(std::floor(exact + 1e-9));
    assigned += counts[i];
    remainders.push_back({exact - counts[i], i});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n && k < remainders.size(); ++k, ++assigned) ++counts[remainders[k].second];
  for (std::size_t k = 0; assigned > n; ++k)
    if (counts[remainders[remainders.size() - 1 - k].second] > 0) {
      --counts[remainders[remainders.size() - 1 - k].second];
      --assigned;
    }
  return counts;
}

inline int projection_rank(int n, double p) { return static_cast<int>(std::llround(p * n)); }

/// First k columns of a Haar unitary: QR of an n x k matrix of i.i.d.
/// standard complex Gaussians, columns rescaled by the phase of R's
/// diagonal. The Gaussian stream is filled column by column, so the result
/// is the prefix of sample_haar_unitary(n, seed).
inline ComplexMatrix sample_haar_isometry(int n, int k, std::uint64_t seed) {
  if (n < 1 || n > kMaxMatrixDimension || k < 0 || k > n) throw SizeError("invalid isometry shape");
  if (k == 0) return ComplexMatrix(n, 0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = {re, im};
    }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, k);
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < k; ++j) {
    const std::complex<double> d = r(j, j);
    const double mod = std::abs(d);
    if (mod > 0) q.col(j) *= d / mod;
  }
  return q;
}

inline ComplexMatrix sample_haar_unitary(int n, std::uint64_t seed) { return sample_haar_isometry(n, n, seed); }

/// E (diagonal), Y and the spectrum of Y as realized at dimension n.
struct RealizedPair {
  Eigen::VectorXd projection;     // diagonal of E
  ComplexMatrix y;                // empty when Y is diagonal
  Eigen::VectorXd y_diagonal;     // diagonal of Y in the commuting model
  std::vector<double> y_spectrum; // eigenvalues of Y with multiplicity
  bool rotated = true;
  double projection_trace_error = 0;  // rank/n - p
};

/// rotated: Y = U D U^* with Haar U (asymptotically free from E).
/// Otherwise E and Y are diagonal in a product arrangement: inside the range
/// of E and inside its kernel Y repeats the law with largest-remainder
/// counts, the classically independent joint law.
inline RealizedPair realize(const MatrixModel& model, bool rotated) {
  model.validate();
  const int n = model.n;
  const int rank = projection_rank(n, model.p);
  RealizedPair out;
  out.rotated = rotated;
  out.projection = Eigen::VectorXd::Zero(n);
  out.projection.head(rank).setOnes();
  out.projection_trace_error = static_cast<double>(rank) / n - model.p;

  std::vector<double> locations, weights;
  for (const auto& a : model.y_law.atoms()) {
    locations.push_back(a.location);
    weights.push_back(a.weight);
  }

  if (!rotated) {
    out.y_diagonal = Eigen::VectorXd::Zero(n);
    int offset = 0;
    for (int block : {rank, n - rank}) {
      const auto counts = largest_remainder_counts(weights, block);
      for (std::size_t i = 0; i < counts.size(); ++i)
        for (int c = 0; c < counts[i]; ++c) {
          out.y_diagonal(offset++) = locations[i];
          out.y_spectrum.push_back(locations[i]);
        }
    }
    return out;
  }

  const auto counts = largest_remainder_counts(weights, n);
  std::vector<double> nonzero;
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.y_spectrum.insert(out.y_spectrum.end(), counts[i], locations[i]);
  for (double v : out.y_spectrum)
    if (v != 0) nonzero.push_back(v);
  const int k = static_cast<int>(nonzero.size());
  if (k == 0) {
    out.y = ComplexMatrix::Zero(n, n);
    return out;
  }
  const ComplexMatrix v = sample_haar_isometry(n, k, model.seed);
  Eigen::VectorXd d(k);
  for (int i = 0; i < k; ++i) d(i) = nonzero[i];
  out.y = v * d.asDiagonal() * v.adjoint();
  return out;
}

inline ComplexMatrix sum_matrix(const RealizedPair& pair) {
  const auto n = pair.projection.size();
  if (!pair.rotated) {
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    a.diagonal() = (pair.projection + pair.y_diagonal).cast<std::complex<double>>();
    return a;
  }
  ComplexMatrix a = pair.y;
  a.diagonal() += pair.projection.cast<std::complex<double>>();
  return a;
}

/// tr(A^k)/n for k = 1..order, A Hermitian, from the powers up to
/// ceil(order/2): tr(A^{i+j}) = sum_ab (A^i)_ab conj((A^j)_ab).
inline std::vector<double> normalized_power_traces(const ComplexMatrix& a, int order) {
  const double n = static_cast<double>(a.rows());
  const int half = (order + 1) / 2;
  std::vector<ComplexMatrix> powers{ComplexMatrix::Identity(a.rows(), a.cols()), a};
  for (int k = 2; k <= half; ++k) powers.push_back(powers.back() * a);
  std::vector<double> traces(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    const int i = std::min(k, half);
    const int j = k - i;
    double t = 0;
    if (j == 0)
      t = powers[i].trace().real();
    else
      t = (powers[i].array() * powers[j].conjugate().array()).sum().real();
    traces[k - 1] = t / n;
  }
  return traces;
}

struct FreeSumSample {
  MomentSequence<double> moments;
  double projection_trace_error = 0;
};

/// Normalized trace moments of E + U D U^*.
inline FreeSumSample simulate_free_sum(const MatrixModel& model, int order) {
  detail::check_moment_order(order);
  const RealizedPair pair = realize(model, true);
  FreeSumSample out{MomentSequence<double>(normalized_power_traces(sum_matrix(pair), order)),
                    pair.projection_trace_error};
  return out;
}

/// Eigenvalues (ascending) of a Hermitian matrix by cyclic complex Jacobi
/// rotations, stopping when the off-diagonal Frobenius norm is below
/// `threshold`. Cubic per sweep; meant for modest n and cross-checks.
inline Eigen::VectorXd jacobi_eigenvalues(ComplexMatrix a, double threshold = 1e-11, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ValidationError("jacobi_eigenvalues needs a square matrix");
  auto off_norm = [&]() {
    double s = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < max_sweeps && off_norm() >= threshold; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const std::complex<double> apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0) continue;
        const std::complex<double> u = apq / r;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2 * r);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        // W = D P with D_qq = conj(u) and P the real rotation; A <- W^* A W.
        const std::complex<double> cu = std::conj(u);
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * cu * akq;
          a(k, q) = s * akp + c * cu * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * u * aqk;
          a(q, k) = s * apk + c * u * aqk;
        }
        a(p, q) = a(q, p) = 0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
  }
  Eigen::VectorXd eig = a.diagonal().real();
  std::sort(eig.data(), eig.data() + n);
  return eig;
}

/// Eigenvalues (ascending) of a Hermitian matrix, LAPACK-style tridiagonal QR.
inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InternalError("Hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

/// f(A) = V f(Lambda) V^* for Hermitian A = V Lambda V^*.
inline ComplexMatrix apply_spectral_function(const ComplexMatrix& a, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
  if (solver.info() != Eigen::Success) throw InternalError("Hermitian eigensolver did not converge");
  Eigen::VectorXd values = solver.eigenvalues().unaryExpr(f);
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().adjoint();
}

/// |tr f(E+Y)/n - (q tr f(Y)/n + p tr f(1+Y)/n)|. Linear f satisfies this
/// identically; for commuting E, Y in product arrangement it is the exact
/// conditioning on E.
inline double proof_identity_residual(const MatrixModel& model, bool rotated, const std::function<double(double)>& f) {
  const RealizedPair pair = realize(model, rotated);
  const double n = model.n;
  double lhs = 0;
  if (rotated) {
    const Eigen::VectorXd eig = hermitian_eigenvalues(sum_matrix(pair));
    for (Eigen::Index i = 0; i < eig.size(); ++i) lhs += f(eig(i));
  } else {
    for (Eigen::Index i = 0; i < pair.projection.size(); ++i) lhs += f(pair.projection(i) + pair.y_diagonal(i));
  }
  lhs /= n;
  double at_y = 0, at_shift = 0;
  for (double v : pair.y_spectrum) {
    at_y += f(v);
    at_shift += f(1 + v);
  }
  // Weights use the realized trace rank/n, not the nominal p.
  const double p_hat = pair.projection.sum() / n;
  return std::abs(lhs - ((1 - p_hat) * at_y / n + p_hat * at_shift / n));
}

/// The expansion step phi(psi(e+y)) = q phi(psi(y)) + p phi(psi(1+y)) on a
/// matrix model, psi the dual function for trace p.
inline double test_proof_identity(const MatrixModel& model, bool rotated) {
  check_certificate_parameter(model.p);
  const double p = model.p;
  return proof_identity_residual(model, rotated, [p](double t) { return psi(t, p); });
}

struct MomentDeviation {
  int order = 0;
  double predicted = 0;
  double mean = 0;
  double stderr_ = 0;
  double abs_error = 0;   // |mean - predicted|
  double tolerance = 0;   // 5 stderr + 10/n
  bool flagged = false;
};

struct MomentSampleRow {
  int n = 0;
  std::uint64_t seed = 0;
  int order = 0;
  double empirical = 0;
  double predicted = 0;
  double abs_error = 0;
};

struct MomentReport {
  int n = 0;
  double p = 0;
  int reps = 0;
  int order = 0;
  std::vector<MomentDeviation> deviations;
  std::vector<MomentSampleRow> samples;
  bool any_flagged = false;
  double max_abs_error = 0;
};

/// Free convolution prediction for the moments of e+y.
inline MomentSequence<double> predicted_free_moments(double p, const DiscreteMeasure<double>& y_law, int order) {
  return convolve_moments(moments_of(bernoulli(p), order), moments_of(y_law, order), IndependenceKind::Free);
}

/// Empirical moments over `reps` seeds derived from model.seed against the
/// free convolution prediction; orders with |mean - predicted| above
/// 5 stderr + 10/n are flagged.
inline MomentReport empirical_vs_predicted(const MatrixModel& model, int order, int reps) {
  model.validate();
  detail::check_moment_order(order);
  if (reps < 1) throw ValidationError("reps must be at least 1");
  const auto predicted = predicted_free_moments(model.p, model.y_law, order);
  auto samples = parallel_map(static_cast<std::size_t>(reps), [&](std::size_t i) {
    MatrixModel m = model;
    m.seed = derive_seed(model.seed, i);
    return std::make_pair(m.seed, simulate_free_sum(m, order).moments);
  });

  MomentReport report;
  report.n = model.n;
  report.p = model.p;
  report.reps = reps;
  report.order = order;
  for (int k = 1; k <= order; ++k) {
    double sum = 0;
    for (const auto& [seed, m] : samples) sum += m[k];
    const double mean = sum / reps;
    double ss = 0;
    for (const auto& [seed, m] : samples) ss += (m[k] - mean) * (m[k] - mean);
    const double stderr_ = reps > 1 ? std::sqrt(ss / (reps - 1) / reps) : 0.0;
    MomentDeviation d;
    d.order = k;
    d.predicted = predicted[k];
    d.mean = mean;
    d.stderr_ = stderr_;
    d.abs_error = std::abs(mean - predicted[k]);
    d.tolerance = 5 * stderr_ + 10.0 / model.n;
    d.flagged = d.abs_error > d.tolerance;
    report.any_flagged = report.any_flagged || d.flagged;
    report.max_abs_error = std::max(report.max_abs_error, d.abs_error);
    report.deviations.push_back(d);
  }
  for (const auto& [seed, m] : samples)
    for (int k = 1; k <= order; ++k)
      report.samples.push_back({model.n, seed, k, m[k], predicted[k], std::abs(m[k] - predicted[k])});
  return report;
}

/// Median over samples of |m_k - predicted| for one order.
inline double median_abs_error(const MomentReport& report, int order) {
  std::vector<double> errs;
  for (const auto& s : report.samples)
    if (s.order == order) errs.push_back(s.abs_error);
  if (errs.empty()) throw ValidationError("order not present in report");
  std::sort(errs.begin(), errs.end());
  const std::size_t mid = errs.size() / 2;
  return errs.size() % 2 ? errs[mid] : 0.5 * (errs[mid - 1] + errs[mid]);
}

struct IdentityRow {
  int n = 0;
  std::uint64_t seed = 0;
  double residual = 0;
};

struct IdentitySummary {
  int n = 0;
  double mean = 0;
  double median = 0;
  double max = 0;
};

/// Residuals of the expansion step for Haar-rotated models at each size,
/// plus the commuting-model residual as a control. No outcome is assumed:
/// shrinking residuals support the step, a plateau contradicts it.
struct IdentityExperiment {
  double p = 0;
  std::vector<IdentityRow> rows;
  std::vector<IdentitySummary> summary;
  double commuting_residual = 0;
};

inline IdentityExperiment run_identity_experiment(double p, const DiscreteMeasure<double>& y_law,
                                                  const std::vector<int>& sizes, int seeds_per_size,
                                                  std::uint64_t master_seed) {
  check_certificate_parameter(p);
  if (seeds_per_size < 1) throw ValidationError("seeds per size must be positive");
  IdentityExperiment out;
  out.p = p;
  std::uint64_t counter = 0;
  for (int n : sizes) {
    std::vector<std::uint64_t> seeds;
    for (int s = 0; s < seeds_per_size; ++s) seeds.push_back(derive_seed(master_seed, counter++));
    auto residuals = parallel_map(seeds.size(), [&](std::size_t i) {
      return test_proof_identity(MatrixModel{n, p, y_law, seeds[i]}, true);
    });
    IdentitySummary s;
    s.n = n;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      out.rows.push_back({n, seeds[i], residuals[i]});
      s.mean += residuals[i] / seeds.size();
      s.max = std::max(s.max, residuals[i]);
    }
    std::sort(residuals.begin(), residuals.end());
    const std::size_t mid = residuals.size() / 2;
    s.median = residuals.size() % 2 ? residuals[mid] : 0.5 * (residuals[mid - 1] + residuals[mid]);
    out.summary.push_back(s);
  }
  if (!sizes.empty())
    out.commuting_residual = test_proof_identity(MatrixModel{sizes.back(), p, y_law, master_seed}, false);
  return out;
}

// Serialization. CSV columns for moment samples: n,seed,order,empirical,predicted,abs_error.

inline std::string to_csv(const MomentReport& r) {
  std::string out = "n,seed,order,empirical,predicted,abs_error\n";
  char buf[256];
  for (const auto& s : r.samples) {
    std::snprintf(buf, sizeof buf, "%d,%llu,%d,%.17g,%.17g,%.17g\n", s.n, static_cast<unsigned long long>(s.seed),
                  s.order, s.empirical, s.predicted, s.abs_error);
    out += buf;
  }
  return out;
}

inline std::string to_csv(const IdentityExperiment& e) {
  std::string out = "n,seed,residual\n";
  char buf[128];
  for (const auto& r : e.rows) {
    std::snprintf(buf, sizeof buf, "%d,%llu,%.17g\n", r.n, static_cast<unsigned long long>(r.seed), r.residual);
    out += buf;
  }
  return out;
}

inline nlohmann::json to_json(const MomentReport& r) {
  nlohmann::json devs = nlohmann::json::array();
  for (const auto& d : r.deviations)
    devs.push_back({{"order", d.order}, {"predicted", d.predicted}, {"mean", d.mean}, {"stderr", d.stderr_},
                    {"abs_error", d.abs_error}, {"tolerance", d.tolerance}, {"flagged", d.flagged}});
  return {{"experiment", "moments"}, {"n", r.n}, {"p", r.p}, {"reps", r.reps}, {"order", r.order},
          {"deviations", devs}, {"any_flagged", r.any_flagged}, {"max_abs_error", r.max_abs_error}};
}

inline MomentReport moment_report_from_json(const nlohmann::json& doc) {
  try {
    MomentReport r;
    r.n = doc.at("n").get<int>();
    r.p = doc.at("p").get<double>();
    r.reps = doc.at("reps").get<int>();
    r.order = doc.at("order").get<int>();
    for (const auto& d : doc.at("deviations"))
      r.deviations.push_back({d.at("order").get<int>(), d.at("predicted").get<double>(), d.at("mean").get<double>(),
                              d.at("stderr").get<double>(), d.at("abs_error").get<double>(),
                              d.at("tolerance").get<double>(), d.at("flagged").get<bool>()});
    r.any_flagged = doc.at("any_flagged").get<bool>();
    r.max_abs_error = doc.at("max_abs_error").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed moment report: ") + e.what());
  }
}

inline nlohmann::json to_json(const IdentityExperiment& e) {
  nlohmann::json rows = nlohmann::json::array(), summary = nlohmann::json::array();
  for (const auto& r : e.rows) rows.push_back({{"n", r.n}, {"seed", r.seed}, {"residual", r.residual}});
  for (const auto& s : e.summary)
    summary.push_back({{"n", s.n}, {"mean", s.mean}, {"median", s.median}, {"max", s.max}});
  return {{"experiment", "identity"}, {"p", e.p}, {"rows", rows}, {"summary", summary},
          {"commuting_residual", e.commuting_residual}};
}

inline IdentityExperiment identity_experiment_from_json(const nlohmann::json& doc) {
  try {
    IdentityExperiment e;
    e.p = doc.at("p").get<double>();
    for (const auto& r : doc.at("rows"))
      e.rows.push_back({r.at("n").get<int>(), r.at("seed").get<std::uint64_t>(), r.at("residual").get<double>()});
    for (const auto& s : doc.at("summary"))
      e.summary.push_back({s.at("n").get<int>(), s.at("mean").get<double>(), s.at("median").get<double>(),
                           s.at("max").get<double>()});
    e.commuting_residual = doc.at("commuting_residual").get<double>();
    return e;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed identity experiment: ") + e.what());
  }
}

}  // namespace symvar
