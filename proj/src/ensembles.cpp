#include "bifree/ensembles.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace bifree {

namespace {

constexpr long kChunkSize = 250;

/// Symmetric PSD square root of the covariance (eigendecomposition; LLT
/// would reject the semidefinite boundary).
Eigen::MatrixXd covFactor(const CovarianceSpec& cov) {
    cov.validate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

struct SampleSet {
    std::vector<Eigen::MatrixXcd> gauss;
    Eigen::MatrixXcd haarU;
};

class Sampler {
public:
    Sampler(const PairEnsembleSpec& spec) : spec_(spec) {
        if (spec.gaussian) {
            factor_ = covFactor(*spec.gaussian);
            nLabels_ = static_cast<int>(spec.gaussian->labels.size());
        }
    }

    SampleSet draw(SplitMix64& rng) const {
        SampleSet s;
        if (spec_.gaussian) s.gauss = drawGauss(rng);
        if (spec_.haar) s.haarU = haar_unitary(spec_.N, rng);
        return s;
    }

private:
    std::vector<Eigen::MatrixXcd> drawGauss(SplitMix64& rng) const {
        const int N = spec_.N;
        const int K = nLabels_;
        std::vector<Eigen::MatrixXcd> X(K, Eigen::MatrixXcd::Zero(N, N));
        const double dScale = 1.0 / std::sqrt(static_cast<double>(N));
        const double oScale = 1.0 / std::sqrt(2.0 * N);
        Eigen::VectorXd z(K), v(K), z2(K), v2(K);
        for (int i = 0; i < N; ++i) {
            for (int k = 0; k < K; ++k) z(k) = rng.gaussian();
            v = factor_ * z;
            for (int k = 0; k < K; ++k) X[k](i, i) = v(k) * dScale;
        }
        for (int i = 0; i < N; ++i) {
            for (int j = i + 1; j < N; ++j) {
                for (int k = 0; k < K; ++k) z(k) = rng.gaussian();
                for (int k = 0; k < K; ++k) z2(k) = rng.gaussian();
                v = factor_ * z;
                v2 = factor_ * z2;
                for (int k = 0; k < K; ++k) {
                    const std::complex<double> val(v(k) * oScale, v2(k) * oScale);
                    X[k](i, j) = val;
                    X[k](j, i) = std::conj(val);
                }
            }
        }
        return X;
    }

    const PairEnsembleSpec& spec_;
    Eigen::MatrixXd factor_;
    int nLabels_ = 0;
};

const Eigen::MatrixXcd& letterMatrix(const SampledLetter& l, const SampleSet& s,
                                     const PairEnsembleSpec& spec,
                                     Eigen::MatrixXcd& scratch) {
    switch (l.src) {
        case SampledLetter::Src::gauss:
            return s.gauss.at(l.gaussLabel);
        case SampledLetter::Src::constant:
            return spec.constants.at(l.constName);
        case SampledLetter::Src::haar:
            return s.haarU;
        case SampledLetter::Src::haar_adj:
            scratch = s.haarU.adjoint();
            return scratch;
    }
    throw std::logic_error("unreachable");
}

/// Left factors multiply in word order, right factors in reverse word
/// order; the sample value is (1/N) Tr of the product.
std::complex<double> evalWord(const SampledWord& word, const SampleSet& s,
                              const PairEnsembleSpec& spec) {
    const int N = spec.N;
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Identity(N, N);
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Identity(N, N);
    Eigen::MatrixXcd scratch;
    bool haveLeft = false, haveRight = false;
    for (const auto& l : word) {
        const Eigen::MatrixXcd& m = letterMatrix(l, s, spec, scratch);
        if (l.side == Side::left) {
            left = haveLeft ? Eigen::MatrixXcd(left * m) : m;
            haveLeft = true;
        } else {
            right = haveRight ? Eigen::MatrixXcd(m * right) : m;
            haveRight = true;
        }
    }
    // Tr(left * right) without forming the product.
    const std::complex<double> tr = (left.transpose().cwiseProduct(right)).sum();
    return tr / static_cast<double>(N);
}

struct ChunkStats {
    std::vector<double> sumRe, sumSqRe, sumIm, sumSqIm;
    long count = 0;
};

std::vector<ChunkStats> runChunks(const PairEnsembleSpec& spec,
                                  const std::vector<SampledWord>& words, long samples) {
    if (samples < 2) throw std::invalid_argument("estimate: samples must be at least 2");
    const long chunkCount = (samples + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkStats> chunks(chunkCount);
    Sampler sampler(spec);

    std::atomic<long> nextChunk{0};
    auto worker = [&]() {
        for (;;) {
            const long c = nextChunk.fetch_add(1);
            if (c >= chunkCount) return;
            SplitMix64 rng = substream(spec.seed, static_cast<std::uint64_t>(c));
            ChunkStats st;
            st.sumRe.assign(words.size(), 0.0);
            st.sumSqRe.assign(words.size(), 0.0);
            st.sumIm.assign(words.size(), 0.0);
            st.sumSqIm.assign(words.size(), 0.0);
            const long lo = c * kChunkSize;
            const long hi = std::min(samples, lo + kChunkSize);
            for (long t = lo; t < hi; ++t) {
                SampleSet s = sampler.draw(rng);
                for (std::size_t w = 0; w < words.size(); ++w) {
                    const std::complex<double> v = evalWord(words[w], s, spec);
                    st.sumRe[w] += v.real();
                    st.sumSqRe[w] += v.real() * v.real();
                    st.sumIm[w] += v.imag();
                    st.sumSqIm[w] += v.imag() * v.imag();
                }
            }
            st.count = hi - lo;
            chunks[c] = std::move(st);
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    unsigned nThreads = std::min<unsigned>(hw ? hw : 1, static_cast<unsigned>(chunkCount));
    if (nThreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nThreads);
        for (unsigned t = 0; t < nThreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return chunks;
}

std::vector<MomentEstimate> reduceEstimates(const std::vector<ChunkStats>& chunks,
                                            std::size_t nWords, bool imagPart) {
    std::vector<double> sum(nWords, 0.0), sumSq(nWords, 0.0);
    long total = 0;
    for (const auto& c : chunks) {  // fixed chunk order
        for (std::size_t w = 0; w < nWords; ++w) {
            sum[w] += imagPart ? c.sumIm[w] : c.sumRe[w];
            sumSq[w] += imagPart ? c.sumSqIm[w] : c.sumSqRe[w];
        }
        total += c.count;
    }
    std::vector<MomentEstimate> out(nWords);
    for (std::size_t w = 0; w < nWords; ++w) {
        const double mean = sum[w] / total;
        const double var = std::max(0.0, (sumSq[w] - total * mean * mean) / (total - 1));
        out[w] = {mean, std::sqrt(var / total), total};
    }
    return out;
}

}  // namespace

std::vector<Eigen::MatrixXcd> sample_gaussian_family(const CovarianceSpec& cov, int N,
                                                     SplitMix64& rng) {
    PairEnsembleSpec spec;
    spec.N = N;
    spec.gaussian = cov;
    Sampler sampler(spec);
    return sampler.draw(rng).gauss;
}

Eigen::MatrixXcd haar_unitary(int N, SplitMix64& rng) {
    if (N < 1) throw std::invalid_argument("haar_unitary: N must be positive");
    Eigen::MatrixXcd Z(N, N);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) Z(i, j) = std::complex<double>(rng.gaussian() * s, rng.gaussian() * s);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
    Eigen::MatrixXcd Q = qr.householderQ();
    Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    // Phase correction: without it Q is not Haar distributed.
    Eigen::VectorXcd d(N);
    for (int i = 0; i < N; ++i) {
        const std::complex<double> r = R(i, i);
        const double a = std::abs(r);
        d(i) = (a > 0) ? r / a : std::complex<double>(1, 0);
    }
    return Q * d.asDiagonal();
}

int wishart_inner_dim(double lambda, int N) {
    const int M = static_cast<int>(std::lround(lambda * N));
    if (M < 1) throw std::invalid_argument("wishart: round(lambda N) must be at least 1");
    return M;
}

Eigen::MatrixXd wishart_factor(double lambda, int N, SplitMix64& rng) {
    const int M = wishart_inner_dim(lambda, N);
    Eigen::MatrixXd Y(N, M);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < M; ++j) Y(i, j) = rng.gaussian();
    return (Y * Y.transpose()) / static_cast<double>(N);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> wishart_pair(double lambda, double alpha,
                                                         double beta, int N, SplitMix64& rng) {
    const Eigen::MatrixXd X = wishart_factor(lambda, N, rng);
    return {alpha * X, beta * X};
}

std::vector<MomentEstimate> estimate_words(const PairEnsembleSpec& spec,
                                           const std::vector<SampledWord>& words, long samples) {
    return reduceEstimates(runChunks(spec, words, samples), words.size(), false);
}

std::vector<MomentEstimate> estimate_words_imag(const PairEnsembleSpec& spec,
                                                const std::vector<SampledWord>& words,
                                                long samples) {
    return reduceEstimates(runChunks(spec, words, samples), words.size(), true);
}

MomentEstimate estimate_word_moment(const PairEnsembleSpec& spec, const SampledWord& word,
                                    long samples) {
    return estimate_words(spec, {word}, samples).front();
}

std::vector<ResidualEstimate> bifreeness_residuals_mc(const PairEnsembleSpec& spec,
                                                      const std::vector<SampledWord>& words,
                                                      long samples, MobiusCache& cache) {
    std::vector<SampledWord> allWords;
    auto wordIndex = [&](const SampledWord& w) {
        for (std::size_t i = 0; i < allWords.size(); ++i) {
            if (allWords[i].size() != w.size()) continue;
            bool same = true;
            for (std::size_t p = 0; p < w.size(); ++p) {
                const auto& a = allWords[i][p];
                const auto& b = w[p];
                if (a.src != b.src || a.side != b.side || a.gaussLabel != b.gaussLabel ||
                    a.constName != b.constName) {
                    same = false;
                    break;
                }
            }
            if (same) return static_cast<int>(i);
        }
        allWords.push_back(w);
        return static_cast<int>(allWords.size() - 1);
    };

    // Per input word: its index plus the universal expansion terms, each a
    // coefficient with the indices of its single-colour block subwords
    // (blocks stay single-colour by the pi <= eps constraint).
    struct Term {
        double coeff;
        std::vector<int> blockWordIdx;
    };
    struct Target {
        int wordIdx;
        std::vector<Term> terms;
    };
    std::vector<Target> targets;

    for (const auto& word : words) {
        const int n = static_cast<int>(word.size());
        std::vector<Side> tags;
        std::vector<std::uint8_t> epsRgs(n);
        std::vector<int> colorIds;
        for (int i = 0; i < n; ++i) {
            tags.push_back(word[i].side);
            int idx = -1;
            for (std::size_t c = 0; c < colorIds.size(); ++c)
                if (colorIds[c] == word[i].color) idx = static_cast<int>(c);
            if (idx == -1) {
                idx = static_cast<int>(colorIds.size());
                colorIds.push_back(word[i].color);
            }
            epsRgs[i] = static_cast<std::uint8_t>(idx);
        }
        const ChiMap chi{tags};
        const SetPartition eps = SetPartition::fromRgs(std::move(epsRgs));

        Target tgt;
        tgt.wordIdx = wordIndex(word);
        for (const auto& pi : cache.table(chi).parts) {
            if (!pi.refines(eps)) continue;
            const Rational coeff = interval_mobius_sum(pi, eps, chi, cache);
            if (coeff.isZero()) continue;
            Term t;
            t.coeff = coeff.toDouble();
            for (const auto& block : pi.blocks()) {
                SampledWord sub;
                for (int p : block) sub.push_back(word[p - 1]);
                t.blockWordIdx.push_back(wordIndex(sub));
            }
            tgt.terms.push_back(std::move(t));
        }
        targets.push_back(std::move(tgt));
    }

    const auto chunks = runChunks(spec, allWords, samples);
    if (chunks.size() < 2)
        throw std::invalid_argument("bifreeness residual: needs at least two chunks of samples");

    // Residual per chunk from that chunk's own means, then mean and spread
    // across chunks.
    std::vector<ResidualEstimate> out(words.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        double rSum = 0.0, rSumSq = 0.0, wordMeanSum = 0.0;
        long total = 0;
        for (const auto& c : chunks) {
            double rhs = 0.0;
            for (const auto& term : targets[t].terms) {
                double prod = term.coeff;
                for (int idx : term.blockWordIdx) prod *= c.sumRe[idx] / c.count;
                rhs += prod;
            }
            const double resid = c.sumRe[targets[t].wordIdx] / c.count - rhs;
            rSum += resid;
            rSumSq += resid * resid;
            wordMeanSum += c.sumRe[targets[t].wordIdx];
            total += c.count;
        }
        const double nc = static_cast<double>(chunks.size());
        const double m = rSum / nc;
        const double var = std::max(0.0, (rSumSq - nc * m * m) / (nc - 1));
        out[t] = {m, std::sqrt(var / nc), wordMeanSum / total, total};
    }
    return out;
}

ResidualEstimate bifreeness_residual_mc(const PairEnsembleSpec& spec, const SampledWord& word,
                                        long samples, MobiusCache& cache) {
    return bifreeness_residuals_mc(spec, {word}, samples, cache).front();
}

double wishart_word_target(double lambda, double alpha, double beta, int leftCount,
                           int rightCount, MobiusCache& cache) {
    Word w;
    for (int i = 0; i < leftCount; ++i) w.letters.push_back({0, Side::left, 0});
    for (int i = 0; i < rightCount; ++i) w.letters.push_back({0, Side::right, 0});
    auto cumulant = [&](const Word& sub) {
        double out = lambda;
        for (const auto& l : sub.letters) out *= (l.side == Side::left ? alpha : beta);
        return out;
    };
    return moment_from_cumulants<double>(w, cumulant, cache);
}

MomentEstimate wishart_word_moment(double lambda, double alpha, double beta, int N,
                                   std::uint64_t seed, int leftCount, int rightCount,
                                   long samples) {
    if (samples < 2) throw std::invalid_argument("estimate: samples must be at least 2");
    const int power = leftCount + rightCount;
    if (power < 1) throw std::invalid_argument("wishart word: needs at least one factor");
    const long chunkCount = (samples + kChunkSize - 1) / kChunkSize;
    std::vector<double> sums(chunkCount, 0.0), sumSqs(chunkCount, 0.0);
    std::vector<long> counts(chunkCount, 0);
    const double scale = std::pow(alpha, leftCount) * std::pow(beta, rightCount);

    std::atomic<long> nextChunk{0};
    auto worker = [&]() {
        for (;;) {
            const long c = nextChunk.fetch_add(1);
            if (c >= chunkCount) return;
            SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(c));
            const long lo = c * kChunkSize;
            const long hi = std::min(samples, lo + kChunkSize);
            for (long t = lo; t < hi; ++t) {
                Eigen::MatrixXd X = wishart_factor(lambda, N, rng);
                double trace;
                if (power == 1) {
                    trace = X.trace();
                } else if (power == 2) {
                    trace = X.squaredNorm();  // X symmetric: tr(X^2) = sum X_ij^2
                } else {
                    Eigen::MatrixXd P = X;
                    for (int e = 1; e < power; ++e) P = P * X;
                    trace = P.trace();
                }
                const double v = scale * trace / N;
                sums[c] += v;
                sumSqs[c] += v * v;
            }
            counts[c] = hi - lo;
        }
    };
    unsigned hw = std::thread::hardware_concurrency();
    unsigned nThreads = std::min<unsigned>(hw ? hw : 1, static_cast<unsigned>(chunkCount));
    if (nThreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nThreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    double sum = 0.0, sumSq = 0.0;
    long total = 0;
    for (long c = 0; c < chunkCount; ++c) {
        sum += sums[c];
        sumSq += sumSqs[c];
        total += counts[c];
    }
    const double mean = sum / total;
    const double var = std::max(0.0, (sumSq - total * mean * mean) / (total - 1));
    return {mean, std::sqrt(var / total), total};
}

}  // namespace bifree
