#pragma once

// Reference Gaussian-copula synthesizer: empirical marginals coupled through
// a latent normal correlation structure. Enough to demo and integration-test
// the audit battery without an external generative model.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "synthaudit/dataset.hpp"
#include "synthaudit/rng.hpp"
#include "synthaudit/special.hpp"
#include "synthaudit/stats.hpp"

namespace synthaudit {

struct CopulaModel {
  struct NumericMarginal {
    std::vector<double> sorted_values;
  };
  struct CategoricalMarginal {
    std::vector<std::string> classes;
    std::vector<double> cumulative;  // nondecreasing, ends at 1
  };
  std::vector<ColumnSchema> schema;
  std::vector<NumericMarginal> numeric_marginals;          // indexed like schema
  std::vector<CategoricalMarginal> categorical_marginals;  // idem
  Eigen::MatrixXd latent_corr;                             // PSD, unit diagonal
  Eigen::MatrixXd cholesky;                                // lower factor of the repaired matrix
  std::vector<bool> constant;                              // columns scored all-zero
};

inline CopulaModel fit_copula(const Dataset& d) {
  if (d.n_rows < 30) throw TooFewRows(30);
  const std::size_t p = d.schema.size();
  const double n = static_cast<double>(d.n_rows);

  CopulaModel m;
  m.schema = d.schema;
  m.numeric_marginals.resize(p);
  m.categorical_marginals.resize(p);
  m.constant.assign(p, false);

  // per-column normal scores
  Eigen::MatrixXd scores(d.n_rows, p);
  for (std::size_t c = 0; c < p; ++c) {
    if (d.schema[c].kind == ColumnKind::numeric) {
      auto& marg = m.numeric_marginals[c];
      marg.sorted_values = d.columns[c].values;
      std::sort(marg.sorted_values.begin(), marg.sorted_values.end());
      if (marg.sorted_values.front() == marg.sorted_values.back()) {
        m.constant[c] = true;
        scores.col(c).setZero();
        continue;
      }
      const auto ranks = mid_ranks(d.columns[c].values);
      for (std::size_t r = 0; r < d.n_rows; ++r)
        scores(r, c) = normal_quantile((ranks[r] - 0.5) / n);
    } else {
      auto& marg = m.categorical_marginals[c];
      const auto& col = d.columns[c];
      std::vector<double> counts(col.classes.size(), 0.0);
      for (std::int32_t code : col.codes) counts[code] += 1.0;
      double acc = 0.0;
      std::vector<double> mid(col.classes.size());
      for (std::size_t k = 0; k < counts.size(); ++k) {
        mid[k] = (acc + counts[k] / 2.0) / n;
        acc += counts[k];
        marg.classes.push_back(col.classes[k]);
        marg.cumulative.push_back(acc / n);
      }
      marg.cumulative.back() = 1.0;
      if (col.classes.size() < 2) {
        m.constant[c] = true;
        scores.col(c).setZero();
        continue;
      }
      for (std::size_t r = 0; r < d.n_rows; ++r)
        scores(r, c) = normal_quantile(mid[col.codes[r]]);
    }
  }

  // Pearson correlation of the scores; constant columns stay decoupled
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (m.constant[i] || m.constant[j]) continue;
      std::vector<double> u(d.n_rows), v(d.n_rows);
      for (std::size_t r = 0; r < d.n_rows; ++r) {
        u[r] = scores(r, i);
        v[r] = scores(r, j);
      }
      double rho = pearson(u, v);
      if (std::isnan(rho)) rho = 0.0;
      corr(i, j) = rho;
      corr(j, i) = rho;
    }
  }

  // PSD repair: clip eigenvalues, rebuild, renormalize the diagonal
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(1e-6);
  Eigen::MatrixXd repaired = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  Eigen::VectorXd dinv = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = dinv.asDiagonal() * repaired * dinv.asDiagonal();

  m.latent_corr = repaired;
  Eigen::LLT<Eigen::MatrixXd> llt(repaired);
  if (llt.info() != Eigen::Success) {
    // nudge once more; the clipped matrix can sit on the PD boundary
    repaired += 1e-8 * Eigen::MatrixXd::Identity(p, p);
    llt.compute(repaired);
  }
  m.cholesky = llt.matrixL();
  return m;
}

inline Dataset sample_synthetic(const CopulaModel& m, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw TooFewRows(1);
  const std::size_t p = m.schema.size();

  Dataset d;
  d.schema = m.schema;
  d.columns.resize(p);
  d.n_rows = n;
  d.preprocessed = true;

  for (std::size_t c = 0; c < p; ++c) {
    if (m.schema[c].kind == ColumnKind::numeric) {
      d.columns[c].values.resize(n);
    } else {
      d.columns[c].codes.resize(n);
      for (const auto& cls : m.categorical_marginals[c].classes) d.columns[c].intern(cls);
    }
  }

  Rng rng(derive_seed(seed, {hash_tag("copula.sample")}));
  Eigen::VectorXd g(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) g(c) = rng.normal();
    const Eigen::VectorXd z = m.cholesky * g;
    for (std::size_t c = 0; c < p; ++c) {
      const double u = normal_cdf(z(c));
      if (m.schema[c].kind == ColumnKind::numeric) {
        d.columns[c].values[r] = quantile_sorted(m.numeric_marginals[c].sorted_values, u);
      } else {
        const auto& cum = m.categorical_marginals[c].cumulative;
        std::size_t k = 0;
        while (k + 1 < cum.size() && u > cum[k]) ++k;
        d.columns[c].codes[r] = static_cast<std::int32_t>(k);
      }
    }
  }
  return d;
}

}  // namespace synthaudit
