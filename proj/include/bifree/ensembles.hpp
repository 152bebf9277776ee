#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bifree/cumulants.hpp"
#include "bifree/rng.hpp"

namespace bifree {

/// Monte Carlo estimate with its standard error.
struct MomentEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long samples = 0;

    double z(double target) const { return stderr_ > 0 ? (mean - target) / stderr_ : 0.0; }
};

/// One letter of a sampled word: which factor it multiplies and on which
/// side it acts.  The colour groups letters into independent sub-ensembles
/// for residual tests.
struct SampledLetter {
    enum class Src : std::uint8_t { gauss, constant, haar, haar_adj };
    Src src = Src::gauss;
    Side side = Side::left;
    int gaussLabel = 0;       // index into the covariance labels
    std::string constName;    // registered constant matrix
    int color = 0;
};

using SampledWord = std::vector<SampledLetter>;

/// A random pair-of-matrices model.  The Gaussian family follows the
/// covariance spec entrywise; constants are fixed matrices; haar draws one
/// Haar unitary per sample.
struct PairEnsembleSpec {
    int N = 0;
    std::uint64_t seed = 0;
    std::optional<CovarianceSpec> gaussian;
    std::map<std::string, Eigen::MatrixXcd> constants;
    bool haar = false;
};

/// Draws the self-adjoint Gaussian family for the covariance spec:
/// diagonal entries real with covariance C/N across labels, off-diagonal
/// complex built from two independent C/(2N) families so that
/// E(X^a_{ij} X^b_{ji}) = c_ab/N and E(X^a_{ij} X^b_{ij}) = 0.
std::vector<Eigen::MatrixXcd> sample_gaussian_family(const CovarianceSpec& cov, int N,
                                                     SplitMix64& rng);

/// Haar-distributed unitary: complex Ginibre, QR, then the diagonal phase
/// correction that makes the factorization unique.
Eigen::MatrixXcd haar_unitary(int N, SplitMix64& rng);

/// Wishart factor X = (1/N) Y Y^T for Y an N x M_N matrix of standard
/// normals, M_N = round(lambda N); the pair is (alpha X, beta X).
Eigen::MatrixXd wishart_factor(double lambda, int N, SplitMix64& rng);
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> wishart_pair(double lambda, double alpha,
                                                         double beta, int N, SplitMix64& rng);
int wishart_inner_dim(double lambda, int N);

/// Chunk-deterministic estimates of several word moments over shared
/// samples: value per sample is Re((1/N) Tr(left product times reversed
/// right product)).  Chunks own derived substreams and partial sums are
/// combined in chunk order, so results do not depend on worker count.
std::vector<MomentEstimate> estimate_words(const PairEnsembleSpec& spec,
                                           const std::vector<SampledWord>& words, long samples);

MomentEstimate estimate_word_moment(const PairEnsembleSpec& spec, const SampledWord& word,
                                    long samples);

/// Imaginary-part companion of estimate_words for *-distribution checks.
std::vector<MomentEstimate> estimate_words_imag(const PairEnsembleSpec& spec,
                                                const std::vector<SampledWord>& words,
                                                long samples);

/// Estimated bi-freeness residual of a coloured word: the word estimate
/// minus the universal expansion evaluated on estimated single-colour block
/// moments.  Computed per chunk (each chunk's own means) so the reported
/// stderr is the spread of the chunk residuals.
struct ResidualEstimate {
    double residual = 0.0;
    double stderr_ = 0.0;
    double word_mean = 0.0;
    long samples = 0;
};
ResidualEstimate bifreeness_residual_mc(const PairEnsembleSpec& spec, const SampledWord& word,
                                        long samples, MobiusCache& cache);

/// Batched variant evaluating several residual words over shared samples.
std::vector<ResidualEstimate> bifreeness_residuals_mc(const PairEnsembleSpec& spec,
                                                      const std::vector<SampledWord>& words,
                                                      long samples, MobiusCache& cache);

/// Wishart word moment alpha^{#left} beta^{#right} tr(X^{len}) with the
/// free-Poisson target from the cumulant reversion oracle.
MomentEstimate wishart_word_moment(double lambda, double alpha, double beta, int N,
                                   std::uint64_t seed, int leftCount, int rightCount,
                                   long samples);
double wishart_word_target(double lambda, double alpha, double beta, int leftCount,
                           int rightCount, MobiusCache& cache);

}  // namespace bifree
