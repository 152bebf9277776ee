#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bifree/ensembles.hpp"

using namespace bifree;

namespace {

SampledLetter gaussLetter(const CovarianceSpec& cov, int label) {
    SampledLetter l;
    l.src = SampledLetter::Src::gauss;
    l.gaussLabel = label;
    l.side = cov.labels[label].side;
    l.color = cov.labels[label].color;
    return l;
}

}  // namespace

TEST_CASE("gaussian samples are exactly self-adjoint with the right covariance") {
    const CovarianceSpec cov = CovarianceSpec::pair(1.0, 0.5, 1.0);
    const int N = 10;
    SplitMix64 rng = substream(42, 0);
    double accLR = 0.0, accSame = 0.0;
    const int draws = 20000;
    for (int t = 0; t < draws; ++t) {
        const auto X = sample_gaussian_family(cov, N, rng);
        if (t < 20) {
            for (const auto& M : X) CHECK((M - M.adjoint()).norm() == 0.0);
        }
        accLR += (X[0](0, 1) * X[1](1, 0)).real();
        accSame += (X[0](0, 1) * X[1](0, 1)).real();
    }
    // E(X^l_{12} X^r_{21}) = c_lr / N = 0.05; E(X^l_{12} X^r_{12}) = 0.
    CHECK(accLR / draws == doctest::Approx(0.05).epsilon(0.15));
    CHECK(std::abs(accSame / draws) < 0.01);
}

TEST_CASE("two-letter gaussian word estimates hit the covariance") {
    const CovarianceSpec cov = CovarianceSpec::pair(1.0, 0.5, 1.0);
    PairEnsembleSpec spec;
    spec.N = 50;
    spec.seed = 7;
    spec.gaussian = cov;
    const SampledWord lr{gaussLetter(cov, 0), gaussLetter(cov, 1)};
    const auto e = estimate_word_moment(spec, lr, 10000);
    CHECK(std::abs(e.mean - 0.5) <= 5 * e.stderr_);
}

TEST_CASE("estimates are deterministic for a fixed seed") {
    const CovarianceSpec cov = CovarianceSpec::pair(1.0, 0.25, 1.0);
    PairEnsembleSpec spec;
    spec.N = 12;
    spec.seed = 99;
    spec.gaussian = cov;
    const SampledWord w{gaussLetter(cov, 0), gaussLetter(cov, 0), gaussLetter(cov, 1),
                        gaussLetter(cov, 1)};
    const auto a = estimate_word_moment(spec, w, 2000);
    const auto b = estimate_word_moment(spec, w, 2000);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    spec.seed = 100;
    const auto c = estimate_word_moment(spec, w, 2000);
    CHECK(a.mean != c.mean);
}

TEST_CASE("stderr scales like one over root samples") {
    const CovarianceSpec cov = CovarianceSpec::pair(1.0, 0.5, 1.0);
    PairEnsembleSpec spec;
    spec.N = 8;
    spec.seed = 5;
    spec.gaussian = cov;
    const SampledWord w{gaussLetter(cov, 0), gaussLetter(cov, 1)};
    const auto small = estimate_word_moment(spec, w, 2000);
    const auto large = estimate_word_moment(spec, w, 8000);
    const double ratio = small.stderr_ / large.stderr_;
    CHECK(ratio > 2.0 / 1.5);
    CHECK(ratio < 2.0 * 1.5);
}

TEST_CASE("wishart factors match the reversion oracle") {
    MobiusCache cache;
    const double lambda = 0.5;
    // First moment: lambda; second: lambda + lambda^2.
    CHECK(wishart_word_target(lambda, 1, 1, 1, 0, cache) == doctest::Approx(0.5));
    CHECK(wishart_word_target(lambda, 1, 1, 2, 0, cache) == doctest::Approx(0.75));
    CHECK(wishart_word_target(lambda, 1, 1, 1, 1, cache) == doctest::Approx(0.75));
    // alpha = 0 kills any word with a left factor.
    CHECK(wishart_word_target(lambda, 0, 1, 1, 1, cache) == 0.0);

    const auto m1 = wishart_word_moment(lambda, 1, 1, 100, 11, 1, 0, 1500);
    CHECK(std::abs(m1.mean - 0.5) <= std::max(5 * m1.stderr_, 0.05));
    const auto m2 = wishart_word_moment(lambda, 1, 1, 100, 11, 2, 0, 1500);
    CHECK(std::abs(m2.mean - 0.75) <= std::max(5 * m2.stderr_, 0.05));
    CHECK_THROWS(wishart_word_moment(0.001, 1, 1, 100, 11, 1, 0, 100));

    SplitMix64 rng = substream(19, 0);
    const auto [xl, xr] = wishart_pair(lambda, 2.0, 3.0, 30, rng);
    CHECK((xl / 2.0 - xr / 3.0).norm() < 1e-12);
    CHECK(wishart_inner_dim(lambda, 30) == 15);
    // alpha = 0 gives an identically zero left factor.
    const auto [zl, zr] = wishart_pair(lambda, 0.0, 1.0, 10, rng);
    CHECK(zl.norm() == 0.0);
    CHECK(zr.norm() > 0.0);
}

TEST_CASE("haar unitaries are unitary and centred") {
    SplitMix64 rng = substream(3, 0);
    const int N = 30;
    double accRe = 0.0;
    const int draws = 400;
    for (int t = 0; t < draws; ++t) {
        const Eigen::MatrixXcd U = haar_unitary(N, rng);
        if (t < 5)
            CHECK((U * U.adjoint() - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff() <
                  1e-10);
        accRe += (U.trace() / static_cast<double>(N)).real();
    }
    CHECK(std::abs(accRe / draws) < 0.05);
}

TEST_CASE("haar phase correction balances the first column argument") {
    // Without the diagonal phase fix the QR factor is biased; the fixed
    // sampler should give E[Re U_{00}] near 0.
    SplitMix64 rng = substream(8, 1);
    double acc = 0.0;
    const int draws = 3000;
    for (int t = 0; t < draws; ++t) acc += haar_unitary(4, rng)(0, 0).real();
    CHECK(std::abs(acc / draws) < 0.05);
}

TEST_CASE("residuals vanish for independent pairs at modest size") {
    CovarianceSpec cov;
    cov.labels = {{"l1", Side::left, 1},
                  {"r1", Side::right, 1},
                  {"l2", Side::left, 2},
                  {"r2", Side::right, 2}};
    cov.matrix = Eigen::MatrixXd::Identity(4, 4);
    PairEnsembleSpec spec;
    spec.N = 40;
    spec.seed = 321;
    spec.gaussian = cov;

    MobiusCache cache;
    // Centred letters of different colours: residual of the two-letter word.
    const SampledWord w2{gaussLetter(cov, 0), gaussLetter(cov, 3)};
    const auto r2 = bifreeness_residual_mc(spec, w2, 1000, cache);
    CHECK(std::abs(r2.residual) <= std::max(5 * r2.stderr_, 0.05));

    const SampledWord w4{gaussLetter(cov, 0), gaussLetter(cov, 2), gaussLetter(cov, 0),
                         gaussLetter(cov, 2)};
    const auto r4 = bifreeness_residual_mc(spec, w4, 1500, cache);
    CHECK(std::abs(r4.residual) <= std::max(5 * r4.stderr_, 0.1));
}

TEST_CASE("gaussian pair against a constant diagonal") {
    CovarianceSpec cov;
    cov.labels = {{"l", Side::left, 1}, {"r", Side::right, 1}};
    cov.matrix = Eigen::MatrixXd::Identity(2, 2);
    const int N = 40;
    PairEnsembleSpec spec;
    spec.N = N;
    spec.seed = 555;
    spec.gaussian = cov;
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Identity(N, N);
    for (int i = N / 2; i < N; ++i) D(i, i) = -1.0;
    spec.constants.emplace("d", D);

    SampledLetter dl;
    dl.src = SampledLetter::Src::constant;
    dl.constName = "d";
    dl.side = Side::left;
    dl.color = 2;
    SampledLetter dr = dl;
    dr.side = Side::right;

    MobiusCache cache;
    const SampledWord w{gaussLetter(cov, 0), dl, gaussLetter(cov, 1), dr};
    const auto r = bifreeness_residual_mc(spec, w, 1500, cache);
    CHECK(std::abs(r.residual) <= std::max(5 * r.stderr_, 0.1));
}

TEST_CASE("input validation") {
    const CovarianceSpec cov = CovarianceSpec::pair(1.0, 0.5, 1.0);
    PairEnsembleSpec spec;
    spec.N = 8;
    spec.seed = 1;
    spec.gaussian = cov;
    const SampledWord w{gaussLetter(cov, 0)};
    CHECK_THROWS(estimate_word_moment(spec, w, 1));
    CovarianceSpec bad = cov;
    bad.matrix(0, 1) = bad.matrix(1, 0) = 2.0;  // indefinite
    SplitMix64 rng(1);
    CHECK_THROWS(sample_gaussian_family(bad, 4, rng));
}
