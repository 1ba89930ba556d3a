#include "qdist/jive.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "qdist/diagnostics.hpp"
#include "qdist/errors.hpp"
#include "qdist/lmoments.hpp"
#include "qdist/parallel.hpp"
#include "qdist/rng.hpp"

namespace qdist {

std::size_t LMomentBlockMatrix::rows() const noexcept {
  std::size_t r = 0;
  for (const auto& b : blocks) r += static_cast<std::size_t>(b.rows());
  return r;
}

Eigen::MatrixXd LMomentBlockMatrix::stacked() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(subjects()));
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    out.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return out;
}

void LMomentBlockMatrix::validate() const {
  if (blocks.empty()) throw ValidationError("no data blocks");
  if (domains.size() != blocks.size() || row_labels.size() != blocks.size())
    throw ValidationError("block names and labels do not match the number of blocks");
  for (std::size_t d = 0; d < blocks.size(); ++d) {
    if (blocks[d].cols() != static_cast<Eigen::Index>(subjects()))
      throw ValidationError("block '" + domains[d] + "' does not have one column per subject");
    if (blocks[d].rows() == 0) throw ValidationError("block '" + domains[d] + "' has no rows");
    if (row_labels[d].size() != static_cast<std::size_t>(blocks[d].rows()))
      throw ValidationError("block '" + domains[d] + "' row labels do not match its rows");
    if (!blocks[d].allFinite()) throw ValidationError("block '" + domains[d] + "' has non-finite entries");
  }
}

LMomentBlockMatrix make_blocks(std::vector<std::string> domains, std::vector<Eigen::MatrixXd> blocks) {
  if (domains.size() != blocks.size())
    throw ValidationError("got " + std::to_string(domains.size()) + " domain names for " +
                          std::to_string(blocks.size()) + " blocks");
  LMomentBlockMatrix out;
  out.domains = std::move(domains);
  out.blocks = std::move(blocks);
  const Eigen::Index n = out.blocks.empty() ? 0 : out.blocks.front().cols();
  for (Eigen::Index i = 0; i < n; ++i) out.subject_ids.push_back("s" + std::to_string(i + 1));
  for (std::size_t d = 0; d < out.blocks.size(); ++d) {
    std::vector<std::string> labels;
    for (Eigen::Index j = 0; j < out.blocks[d].rows(); ++j)
      labels.push_back(out.domains.at(d) + ":row" + std::to_string(j + 1));
    out.row_labels.push_back(std::move(labels));
    out.block_scale.push_back(1.0);
  }
  out.validate();
  return out;
}

LMomentBlockMatrix lmoment_blocks(const RepeatedMeasuresDataset& data, int order,
                                  std::size_t grid_resolution) {
  if (data.domains.empty()) throw ValidationError("JIVE needs a domains table mapping features to domains");
  std::map<std::string, std::vector<std::string>> by_domain;
  for (const auto& feature : data.feature_ids()) {
    auto it = data.domains.find(feature);
    if (it == data.domains.end()) {
      warn("feature '" + feature + "' has no domain and is left out of JIVE");
      continue;
    }
    by_domain[it->second].push_back(feature);
  }
  const GridPtr grid = make_grid(grid_resolution);
  LMomentBlockMatrix out;
  for (const auto& s : data.subjects) out.subject_ids.push_back(s.id);
  const auto n = static_cast<Eigen::Index>(data.size());
  for (const auto& [domain, features] : by_domain) {
    Eigen::MatrixXd block(static_cast<Eigen::Index>(features.size()) * order, n);
    std::vector<std::string> labels;
    for (std::size_t f = 0; f < features.size(); ++f) {
      const auto curves = subject_quantile_functions(data, features[f], grid);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto lm = lmoments_from_quantile(curves[static_cast<std::size_t>(i)], order);
        for (int r = 0; r < order; ++r)
          block(static_cast<Eigen::Index>(f) * order + r, i) = lm.values[static_cast<std::size_t>(r)];
      }
      for (int r = 1; r <= order; ++r) labels.push_back(features[f] + ":L" + std::to_string(r));
    }
    out.domains.push_back(domain);
    out.blocks.push_back(std::move(block));
    out.row_labels.push_back(std::move(labels));
    out.block_scale.push_back(1.0);
  }
  out.validate();
  return out;
}

std::vector<double> rank_normal_scores(std::span<const double> row) {
  const std::size_t n = row.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
  std::vector<double> out(n);
  const boost::math::normal standard;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && row[order[j + 1]] == row[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double z = boost::math::quantile(standard, (midrank - 0.5) / static_cast<double>(n));
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = z;
    i = j + 1;
  }
  return out;
}

LMomentBlockMatrix normalize_blocks(const LMomentBlockMatrix& raw) {
  raw.validate();
  const std::size_t n = raw.subjects();
  if (n < 3) throw ValidationError("normalization needs at least 3 subjects");
  LMomentBlockMatrix out;
  out.domains = raw.domains;
  out.subject_ids = raw.subject_ids;
  out.normalized = true;
  out.dropped_rows = raw.dropped_rows;
  for (std::size_t d = 0; d < raw.blocks.size(); ++d) {
    const Eigen::MatrixXd& B = raw.blocks[d];
    std::vector<Eigen::RowVectorXd> kept;
    std::vector<std::string> labels;
    for (Eigen::Index r = 0; r < B.rows(); ++r) {
      const Eigen::RowVectorXd row = B.row(r);
      if (row.maxCoeff() == row.minCoeff()) {
        out.dropped_rows.push_back(raw.row_labels[d][static_cast<std::size_t>(r)]);
        warn("constant row '" + raw.row_labels[d][static_cast<std::size_t>(r)] + "' dropped before JIVE");
        continue;
      }
      const auto z = rank_normal_scores(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
      Eigen::RowVectorXd zr = Eigen::Map<const Eigen::RowVectorXd>(z.data(), static_cast<Eigen::Index>(n));
      zr.array() -= zr.mean();
      kept.push_back(zr);
      labels.push_back(raw.row_labels[d][static_cast<std::size_t>(r)]);
    }
    if (kept.empty()) throw ValidationError("domain '" + raw.domains[d] + "' has no non-constant rows");
    Eigen::MatrixXd block(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < kept.size(); ++r) block.row(static_cast<Eigen::Index>(r)) = kept[r];
    const double norm = block.norm();
    block /= norm;
    out.blocks.push_back(std::move(block));
    out.row_labels.push_back(std::move(labels));
    out.block_scale.push_back(norm);
  }
  return out;
}

namespace {

struct Truncated {
  Eigen::MatrixXd U;  // rows x r
  Eigen::VectorXd s;
  Eigen::MatrixXd V;  // cols x r
  Eigen::MatrixXd approx() const { return U * s.asDiagonal() * V.transpose(); }
};

// Rank-r SVD with a deterministic sign: the largest |entry| of each left
// singular vector is positive.
Truncated truncated_svd(const Eigen::MatrixXd& M, int r) {
  Truncated t;
  const Eigen::Index rank = std::min<Eigen::Index>(r, std::min(M.rows(), M.cols()));
  t.U = Eigen::MatrixXd::Zero(M.rows(), std::max<Eigen::Index>(rank, 0));
  t.V = Eigen::MatrixXd::Zero(M.cols(), std::max<Eigen::Index>(rank, 0));
  t.s = Eigen::VectorXd::Zero(std::max<Eigen::Index>(rank, 0));
  if (rank <= 0) return t;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  t.U = svd.matrixU().leftCols(rank);
  t.V = svd.matrixV().leftCols(rank);
  t.s = svd.singularValues().head(rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    Eigen::Index at = 0;
    t.U.col(k).cwiseAbs().maxCoeff(&at);
    if (t.U(at, k) < 0) {
      t.U.col(k) *= -1.0;
      t.V.col(k) *= -1.0;
    }
  }
  return t;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& M) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues();
}

// M (I - V V^T) without forming the projector.
Eigen::MatrixXd project_out(const Eigen::MatrixXd& M, const Eigen::MatrixXd& V) {
  if (V.cols() == 0) return M;
  return M - (M * V) * V.transpose();
}

void check_ranks(const LMomentBlockMatrix& blocks, const JiveRanks& ranks) {
  if (ranks.individual.size() != blocks.blocks.size())
    throw ValidationError("one individual rank per domain is required");
  if (ranks.joint < 0) throw ValidationError("joint rank must be nonnegative");
  int max_individual = 0;
  for (int r : ranks.individual) {
    if (r < 0) throw ValidationError("individual ranks must be nonnegative");
    max_individual = std::max(max_individual, r);
  }
  if (static_cast<std::size_t>(ranks.joint + max_individual) > blocks.subjects())
    throw ValidationError("joint plus individual rank exceeds the number of subjects");
}

// (1 - alpha) quantile: the ceil((1 - alpha) N)-th smallest value.
double upper_quantile(std::vector<double> values, double alpha) {
  std::sort(values.begin(), values.end());
  const auto N = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * N));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

// Accepts components while the observed singular value beats the null.
int forward_select(const Eigen::VectorXd& observed, const std::vector<Eigen::VectorXd>& nulls,
                   int max_rank, double alpha) {
  int rank = 0;
  while (rank < max_rank && rank < observed.size()) {
    std::vector<double> column;
    for (const auto& s : nulls) column.push_back(rank < s.size() ? s(rank) : 0.0);
    if (!(observed(rank) > upper_quantile(std::move(column), alpha))) break;
    ++rank;
  }
  return rank;
}

}  // namespace

JiveDecomposition jive_decompose(const LMomentBlockMatrix& blocks, const JiveRanks& ranks,
                                 const JiveOptions& options) {
  blocks.validate();
  check_ranks(blocks, ranks);
  const std::size_t D = blocks.blocks.size();
  const Eigen::MatrixXd L = blocks.stacked();
  std::vector<Eigen::Index> offset(D, 0);
  for (std::size_t d = 1; d < D; ++d) offset[d] = offset[d - 1] + blocks.blocks[d - 1].rows();

  JiveDecomposition out;
  out.ranks = ranks;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(L.rows(), L.cols());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L.rows(), L.cols());
  Truncated joint;
  std::vector<Truncated> individual(D);
  const double threshold = options.tolerance * std::max(1.0, L.norm());

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    joint = truncated_svd(L - A, ranks.joint);
    const Eigen::MatrixXd J_new = joint.approx();
    for (std::size_t d = 0; d < D; ++d) {
      const Eigen::Index rows = blocks.blocks[d].rows();
      const Eigen::MatrixXd R = project_out(blocks.blocks[d] - J_new.middleRows(offset[d], rows), joint.V);
      individual[d] = truncated_svd(R, ranks.individual[d]);
      A.middleRows(offset[d], rows) = individual[d].approx();
    }
    const double change = (J_new - J).norm();
    J = J_new;
    out.iterations = iter;
    if (change < threshold) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    std::ostringstream msg;
    msg << "JIVE did not converge in " << options.max_iterations << " iterations";
    warn(msg.str());
  }

  out.joint_loadings = joint.U;
  out.joint_scores = joint.s.asDiagonal() * joint.V.transpose();
  out.joint_row_basis = joint.V;
  for (std::size_t d = 0; d < D; ++d) {
    const Eigen::Index rows = blocks.blocks[d].rows();
    out.joint.push_back(J.middleRows(offset[d], rows));
    out.individual.push_back(A.middleRows(offset[d], rows));
    out.residual.push_back(blocks.blocks[d] - out.joint.back() - out.individual.back());
    out.individual_loadings.push_back(individual[d].U);
    out.individual_scores.push_back(individual[d].s.asDiagonal() * individual[d].V.transpose());
    BlockVariance v;
    const double total = blocks.blocks[d].squaredNorm();
    if (total > 0.0) {
      v.joint = out.joint.back().squaredNorm() / total;
      v.individual = out.individual.back().squaredNorm() / total;
      v.residual_direct = out.residual.back().squaredNorm() / total;
    }
    v.residual = 1.0 - v.joint - v.individual;
    out.variance.push_back(v);
  }
  return out;
}

JiveRanks select_ranks_permutation(const LMomentBlockMatrix& blocks, const PermutationOptions& options) {
  blocks.validate();
  if (options.permutations < 20) throw ValidationError("at least 20 permutations are required");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const std::size_t D = blocks.blocks.size();
  const auto n = static_cast<Eigen::Index>(blocks.subjects());
  const auto B = static_cast<std::size_t>(options.permutations);

  // Joint rank: break cross-block alignment by permuting each block's columns.
  const Eigen::MatrixXd L = blocks.stacked();
  Eigen::Index min_rows = L.rows();
  for (const auto& b : blocks.blocks) min_rows = std::min(min_rows, b.rows());
  const int max_joint = static_cast<int>(std::min<Eigen::Index>(min_rows, n - 1));
  std::vector<Eigen::VectorXd> joint_null(B);
  parallel_for(B, [&](std::size_t b) {
    CounterRng rng(options.seed, derive_key(1, b));
    Eigen::MatrixXd P(L.rows(), n);
    Eigen::Index r = 0;
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (const auto& block : blocks.blocks) {
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(std::span<Eigen::Index>(perm));
      for (Eigen::Index i = 0; i < n; ++i) P.block(r, i, block.rows(), 1) = block.col(perm[static_cast<std::size_t>(i)]);
      r += block.rows();
    }
    joint_null[b] = singular_values(P);
  });
  JiveRanks ranks;
  ranks.joint = forward_select(singular_values(L), joint_null, max_joint, options.alpha);

  // Individual ranks: remove the joint row space, then permute within rows.
  const Eigen::MatrixXd V = truncated_svd(L, ranks.joint).V;
  for (std::size_t d = 0; d < D; ++d) {
    const Eigen::MatrixXd residual = project_out(blocks.blocks[d], V);
    const int max_ind = static_cast<int>(std::min<Eigen::Index>(residual.rows(), n - ranks.joint));
    std::vector<Eigen::VectorXd> null(B);
    parallel_for(B, [&](std::size_t b) {
      CounterRng rng(options.seed, derive_key(2 + d, b));
      Eigen::MatrixXd P = residual;
      std::vector<double> row(static_cast<std::size_t>(n));
      for (Eigen::Index r = 0; r < P.rows(); ++r) {
        for (Eigen::Index i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = P(r, i);
        rng.shuffle(std::span<double>(row));
        for (Eigen::Index i = 0; i < n; ++i) P(r, i) = row[static_cast<std::size_t>(i)];
      }
      null[b] = singular_values(P);
    });
    ranks.individual.push_back(forward_select(singular_values(residual), null, max_ind, options.alpha));
  }
  return ranks;
}

std::vector<NamedScore> jive_scores(const JiveDecomposition& decomposition,
                                    const LMomentBlockMatrix& blocks) {
  std::vector<NamedScore> out;
  for (Eigen::Index k = 0; k < decomposition.joint_scores.rows(); ++k)
    out.push_back({"joint" + std::to_string(k + 1), "", decomposition.joint_scores.row(k).transpose()});
  for (std::size_t d = 0; d < decomposition.individual_scores.size(); ++d)
    for (Eigen::Index k = 0; k < decomposition.individual_scores[d].rows(); ++k)
      out.push_back({blocks.domains.at(d) + "_indiv" + std::to_string(k + 1), blocks.domains.at(d),
                     decomposition.individual_scores[d].row(k).transpose()});
  return out;
}

std::vector<ScoreCorrelation> score_cross_correlation(const JiveDecomposition& decomposition,
                                                      const LMomentBlockMatrix& blocks) {
  blocks.validate();
  const auto scores = jive_scores(decomposition, blocks);
  std::vector<ScoreCorrelation> out;
  for (const auto& score : scores) {
    if (score.values.size() != static_cast<Eigen::Index>(blocks.subjects()))
      throw ValidationError("scores and blocks do not share subjects");
    const Eigen::VectorXd a = score.values.array() - score.values.mean();
    std::vector<ScoreCorrelation> rows;
    for (std::size_t d = 0; d < blocks.blocks.size(); ++d)
      for (Eigen::Index r = 0; r < blocks.blocks[d].rows(); ++r) {
        const Eigen::VectorXd row = blocks.blocks[d].row(r).transpose();
        const Eigen::VectorXd b = row.array() - row.mean();
        ScoreCorrelation c{score.name, blocks.row_labels[d][static_cast<std::size_t>(r)], blocks.domains[d], 0.0, false};
        const double denom = a.norm() * b.norm();
        if (denom > 0.0 && a.norm() > 1e-14 * std::max(1.0, score.values.cwiseAbs().maxCoeff()))
          c.correlation = std::clamp(a.dot(b) / denom, -1.0, 1.0);
        else
          c.zero_variance = true;
        rows.push_back(std::move(c));
      }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      return std::abs(x.correlation) > std::abs(y.correlation);
    });
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace qdist
