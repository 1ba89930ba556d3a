#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdist/dataset.hpp"

namespace qdist {

/// Per-domain matrices L^d (rows: feature L-moments, columns: subjects).
struct LMomentBlockMatrix {
  std::vector<std::string> domains;
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<std::vector<std::string>> row_labels;  // "feature:L2"
  std::vector<std::string> subject_ids;
  // Normalization record; empty/1 for raw blocks.
  bool normalized = false;
  std::vector<double> block_scale;         // Frobenius norm divided out of each block
  std::vector<std::string> dropped_rows;   // constant rows removed before scaling

  std::size_t subjects() const noexcept { return subject_ids.size(); }
  std::size_t rows() const noexcept;
  /// Blocks stacked vertically in domain order.
  Eigen::MatrixXd stacked() const;
  /// Checks shapes and labels; throws ValidationError.
  void validate() const;
};

/// Blocks from matrices as given (no normalization). Labels default to
/// "<domain>:row<j>"; subject ids to "s<i>".
LMomentBlockMatrix make_blocks(std::vector<std::string> domains, std::vector<Eigen::MatrixXd> blocks);

/// Projection L-moments of every feature with a domain label, grouped by
/// domain (sorted), features sorted within a domain.
LMomentBlockMatrix lmoment_blocks(const RepeatedMeasuresDataset& data, int order,
                                  std::size_t grid_resolution = 100);

/// Phi^{-1}((midrank - 0.5) / n) for each entry.
std::vector<double> rank_normal_scores(std::span<const double> row);

/// Row-wise normal scores, row centring, then unit Frobenius norm per block.
/// Constant rows are dropped with a warning. Requires n >= 3.
LMomentBlockMatrix normalize_blocks(const LMomentBlockMatrix& raw);

struct JiveRanks {
  int joint = 0;
  std::vector<int> individual;  // one per domain
};

struct BlockVariance {
  double joint = 0.0;
  double individual = 0.0;
  double residual = 0.0;         // 1 - joint - individual
  double residual_direct = 0.0;  // ||eps^d||^2 / ||L^d||^2
};

struct JiveDecomposition {
  JiveRanks ranks;
  std::vector<Eigen::MatrixXd> joint;       // J^d
  std::vector<Eigen::MatrixXd> individual;  // A^d
  std::vector<Eigen::MatrixXd> residual;    // eps^d = L^d - J^d - A^d
  Eigen::MatrixXd joint_loadings;           // rows of the stacked matrix x s
  Eigen::MatrixXd joint_scores;             // s x n
  Eigen::MatrixXd joint_row_basis;          // V, n x s
  std::vector<Eigen::MatrixXd> individual_loadings;  // v_d x s_d
  std::vector<Eigen::MatrixXd> individual_scores;    // s_d x n
  std::vector<BlockVariance> variance;
  int iterations = 0;
  bool converged = false;
};

struct JiveOptions {
  double tolerance = 1e-8;
  int max_iterations = 500;
};

/// Alternates a rank-s SVD of the stacked data minus individual structure
/// with per-domain rank-s_d SVDs of (L^d - J^d)(I - V V^T), stopping when the
/// joint structure changes by less than tolerance * max(1, ||L||_F).
/// A non-converged run returns the last iterate with converged = false.
JiveDecomposition jive_decompose(const LMomentBlockMatrix& blocks, const JiveRanks& ranks,
                                 const JiveOptions& options = {});

struct PermutationOptions {
  int permutations = 100;
  double alpha = 0.05;
  std::uint64_t seed = 1;
};

/// Forward selection against permutation nulls: joint components use
/// independent column permutations of each block; individual components use
/// independent within-row permutations of L^d (I - V V^T).
JiveRanks select_ranks_permutation(const LMomentBlockMatrix& blocks,
                                   const PermutationOptions& options);

struct NamedScore {
  std::string name;       // "joint1", "<domain>_indiv1"
  std::string domain;     // empty for joint scores
  Eigen::VectorXd values; // one per subject
};

std::vector<NamedScore> jive_scores(const JiveDecomposition& decomposition,
                                    const LMomentBlockMatrix& blocks);

struct ScoreCorrelation {
  std::string score;
  std::string row_label;
  std::string domain;
  double correlation = 0.0;
  bool zero_variance = false;  // score or row had no variance; correlation set to 0
};

/// Pearson correlation of every score with every row of the blocks, sorted by
/// score then decreasing absolute correlation.
std::vector<ScoreCorrelation> score_cross_correlation(const JiveDecomposition& decomposition,
                                                      const LMomentBlockMatrix& blocks);

}  // namespace qdist
