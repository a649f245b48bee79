#include "support.hpp"

#include "agenda/topic_models.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace agenda;

namespace {

TokenCorpus corpus_of(std::vector<std::vector<int>> docs, int V)
{
    TokenCorpus c;
    c.vocab_size = V;
    c.docs = std::move(docs);
    return c;
}

DocTermMatrix dtm_of(const TokenCorpus& c)
{
    Eigen::MatrixXi dense = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(c.docs.size()), c.vocab_size);
    for (std::size_t d = 0; d < c.docs.size(); ++d)
        for (int w : c.docs[d])
            ++dense(static_cast<Eigen::Index>(d), w);
    return make_dtm(dense);
}

LdaHyper hyper(int K, double alpha, double eta, int iters = 200, int burn_in = 100, std::uint64_t seed = 7)
{
    LdaHyper h;
    h.topics = K;
    h.alpha = alpha;
    h.eta = eta;
    h.iters = iters;
    h.burn_in = burn_in;
    h.seed = seed;
    return h;
}

// log p(w, z) of collapsed LDA, written out from the Dirichlet-multinomial integrals
double log_joint(const TokenCorpus& c, const std::vector<std::vector<int>>& z, int K, double alpha, double eta)
{
    const int V = c.vocab_size;
    std::vector<std::vector<int>> nkw(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(V), 0));
    std::vector<int> nk(static_cast<std::size_t>(K), 0);
    double lp = 0.0;
    for (std::size_t d = 0; d < c.docs.size(); ++d) {
        std::vector<int> ndk(static_cast<std::size_t>(K), 0);
        for (std::size_t n = 0; n < c.docs[d].size(); ++n) {
            const auto k = static_cast<std::size_t>(z[d][n]);
            ++ndk[k];
            ++nk[k];
            ++nkw[k][static_cast<std::size_t>(c.docs[d][n])];
        }
        lp += std::lgamma(K * alpha) - std::lgamma(static_cast<double>(c.docs[d].size()) + K * alpha);
        for (int k = 0; k < K; ++k)
            lp += std::lgamma(ndk[static_cast<std::size_t>(k)] + alpha) - std::lgamma(alpha);
    }
    for (int k = 0; k < K; ++k) {
        lp += std::lgamma(V * eta) - std::lgamma(nk[static_cast<std::size_t>(k)] + V * eta);
        for (int w = 0; w < V; ++w)
            lp += std::lgamma(nkw[static_cast<std::size_t>(k)][static_cast<std::size_t>(w)] + eta) - std::lgamma(eta);
    }
    return lp;
}

} // namespace

TEST_CASE("conditional is uniform when nothing is assigned")
{
    GibbsState s(corpus_of({{0}}, 1), 2);
    const auto p = gibbs_conditional(s, 0, 0, hyper(2, 0.3, 0.7));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("single-term conditional reduces to the document prior ratio")
{
    // D=1, V=1, z = (0,0,0,1); token 0 excluded leaves topic counts (2,1)
    GibbsState s(corpus_of({{0, 0, 0, 0}}, 1), 2);
    s.initialize({{0, 0, 0, 1}});
    const auto p = gibbs_conditional(s, 0, 0, hyper(2, 0.5, 0.1));
    CHECK(p[0] == doctest::Approx(2.5 / 4.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(1.5 / 4.0).epsilon(1e-14));
}

TEST_CASE("two-term conditional by hand")
{
    // tokens (w0, w0, w1), z = (0, 1, 1); for token 0: topic 0 -> 0.1/0.2 * 0.5/3, topic 1 -> 1.1/2.2 * 2.5/3
    GibbsState s(corpus_of({{0, 0, 1}}, 2), 2);
    s.initialize({{0, 1, 1}});
    const auto p = gibbs_conditional(s, 0, 0, hyper(2, 0.5, 0.1));
    CHECK(p[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("counts always match the assignment vector")
{
    GibbsState s(corpus_of({{0, 1, 2, 2}, {1, 1, 0}}, 3), 3);
    Rng rng(3);
    s.initialize_random(rng);
    for (int i = 0; i < 20; ++i)
        s.sweep(rng, hyper(3, 0.2, 0.3));
    Eigen::MatrixXi tt = Eigen::MatrixXi::Zero(3, 3), dt = Eigen::MatrixXi::Zero(2, 3);
    for (int d = 0; d < 2; ++d)
        for (std::size_t n = 0; n < s.z()[static_cast<std::size_t>(d)].size(); ++n) {
            const int k = s.z()[static_cast<std::size_t>(d)][n];
            ++tt(k, s.corpus().docs[static_cast<std::size_t>(d)][n]);
            ++dt(d, k);
        }
    CHECK(tt == s.topic_term());
    CHECK(dt == s.doc_topic());
    CHECK(tt.rowwise().sum() == s.topic_total());
}

TEST_CASE("Gibbs frequencies match the enumerated posterior on a six-token corpus")
{
    const TokenCorpus c = corpus_of({{0, 1, 2}, {0, 2, 2}}, 3);
    const double alpha = 0.5, eta = 0.3;
    std::vector<double> exact(64);
    for (int m = 0; m < 64; ++m) {
        const std::vector<std::vector<int>> z = {{m & 1, (m >> 1) & 1, (m >> 2) & 1}, {(m >> 3) & 1, (m >> 4) & 1, (m >> 5) & 1}};
        exact[static_cast<std::size_t>(m)] = std::exp(log_joint(c, z, 2, alpha, eta));
    }
    double total = 0.0;
    for (double e : exact)
        total += e;

    GibbsState s(c, 2);
    Rng rng(11);
    s.initialize_random(rng);
    const LdaHyper h = hyper(2, alpha, eta);
    std::vector<double> freq(64, 0.0);
    const int sweeps = 40000;
    for (int i = 0; i < sweeps; ++i) {
        s.sweep(rng, h);
        int m = 0, bit = 0;
        for (const auto& zd : s.z())
            for (int k : zd)
                m |= k << bit++;
        freq[static_cast<std::size_t>(m)] += 1.0 / sweeps;
    }
    double tv = 0.0;
    for (int m = 0; m < 64; ++m)
        tv += 0.5 * std::abs(freq[static_cast<std::size_t>(m)] - exact[static_cast<std::size_t>(m)] / total);
    CHECK(tv < 0.03);
}

TEST_CASE("collapsed log likelihood matches the Dirichlet-multinomial formula")
{
    const TokenCorpus c = corpus_of({{0, 1, 2, 1}, {2, 2, 0}}, 3);
    GibbsState s(c, 2);
    const std::vector<std::vector<int>> z = {{0, 1, 1, 0}, {1, 1, 0}};
    s.initialize(z);
    // log p(w | z) = log p(w, z) minus the document-topic part
    double doc_part = 0.0;
    for (const auto& zd : z) {
        int n0 = 0;
        for (int k : zd)
            n0 += k == 0;
        const int n1 = static_cast<int>(zd.size()) - n0;
        doc_part += std::lgamma(1.0) - std::lgamma(zd.size() + 1.0) + std::lgamma(n0 + 0.5) + std::lgamma(n1 + 0.5) -
                    2 * std::lgamma(0.5);
    }
    CHECK(s.log_likelihood(0.2) == doctest::Approx(log_joint(c, z, 2, 0.5, 0.2) - doc_part).epsilon(1e-12));
}

TEST_CASE("LDA recovers two well-separated topics")
{
    GenerativeModel gm;
    gm.beta = Eigen::MatrixXd::Constant(2, 20, 0.001);
    gm.beta.block(0, 0, 1, 10).array() += 1.0;
    gm.beta.block(1, 10, 1, 10).array() += 1.0;
    gm.beta = gm.beta.array().colwise() / gm.beta.rowwise().sum().array();
    gm.alpha = Eigen::VectorXd::Constant(2, 0.5);
    const std::vector<int> lengths(200, 50);
    const auto sim = generate_corpus(gm, lengths, 5);
    const auto fit = fit_lda(sim.dtm, hyper(2, 0.5, 0.1, 300, 150));
    const auto match = greedy_alignment(fit.beta, gm.beta);
    for (int k = 0; k < 2; ++k)
        CHECK(total_variation(fit.beta.row(match[static_cast<std::size_t>(k)]), gm.beta.row(k)) < 0.1);
    CHECK(fit.theta.rowwise().sum().isOnes(1e-12));
    CHECK(fit.beta.rowwise().sum().isOnes(1e-12));
}

TEST_CASE("K=1 gives unit theta and smoothed corpus frequencies")
{
    const TokenCorpus c = corpus_of({{0, 0, 1}, {2, 0}}, 4);
    const auto fit = fit_lda(dtm_of(c), hyper(1, 0.5, 0.1, 10, 5));
    CHECK(fit.theta.isOnes());
    const double n = 5.0, eta = 0.1, V = 4.0;
    CHECK(fit.beta(0, 0) == doctest::Approx((3 + eta) / (n + V * eta)));
    CHECK(fit.beta(0, 1) == doctest::Approx((1 + eta) / (n + V * eta)));
    CHECK(fit.beta(0, 3) == doctest::Approx(eta / (n + V * eta)));
}

TEST_CASE("same seed, same fit")
{
    Rng rng(1);
    GenerativeModel gm;
    gm.beta = draw_topics(3, 30, 0.1, rng);
    gm.alpha = Eigen::VectorXd::Constant(3, 0.3);
    const std::vector<int> lengths(40, 30);
    const auto sim = generate_corpus(gm, lengths, 2);
    const auto a = fit_lda(sim.dtm, hyper(3, 0.3, 0.1, 60, 30));
    const auto b = fit_lda(sim.dtm, hyper(3, 0.3, 0.1, 60, 30));
    CHECK(a.beta == b.beta);
    CHECK(a.theta == b.theta);
    CHECK(a.z == b.z);
    const auto c = fit_lda(sim.dtm, hyper(3, 0.3, 0.1, 60, 30, 8));
    CHECK(c.z != a.z);
}

TEST_CASE("too many topics for the tokens is an input error")
{
    const TokenCorpus c = corpus_of({{0, 1}}, 2);
    CHECK_THROWS_AS(fit_lda(dtm_of(c), hyper(3, 0.5, 0.1)), InputError);
}

TEST_CASE("best-of-chains keeps a single chain's fit")
{
    Rng rng(4);
    GenerativeModel gm;
    gm.beta = draw_topics(2, 15, 0.2, rng);
    gm.alpha = Eigen::VectorXd::Constant(2, 0.5);
    const std::vector<int> lengths(30, 20);
    const auto sim = generate_corpus(gm, lengths, 4);
    const auto h = hyper(2, 0.5, 0.1, 40, 20);
    const auto one = fit_lda_chains(sim.dtm, h, 1);
    const auto plain = fit_lda(sim.dtm, h);
    CHECK(one.beta == plain.beta);
    const auto three = fit_lda_chains(sim.dtm, h, 3, 2);
    const auto three_serial = fit_lda_chains(sim.dtm, h, 3, 1);
    CHECK(three.beta == three_serial.beta);
}

TEST_CASE("logistic-normal map round-trips")
{
    Eigen::VectorXd theta(2);
    theta << 0.3, 0.7;
    const Eigen::VectorXd eta = logistic_normal_eta(theta);
    REQUIRE(eta.size() == 1);
    CHECK(eta[0] == doctest::Approx(std::log(0.3 / 0.7)));
    CHECK(logistic_normal_theta(eta).isApprox(theta, 1e-14));
    Eigen::VectorXd t4(4);
    t4 << 0.1, 0.2, 0.3, 0.4;
    CHECK(logistic_normal_theta(logistic_normal_eta(t4)).isApprox(t4, 1e-14));
}

TEST_CASE("CTM with K=2 has a scalar eta and a 1x1 covariance")
{
    Rng rng(9);
    GenerativeModel gm;
    gm.beta = draw_topics(2, 12, 0.2, rng);
    gm.alpha = Eigen::VectorXd::Constant(2, 1.0);
    const std::vector<int> lengths(25, 30);
    const auto sim = generate_corpus(gm, lengths, 9);
    const auto fit = fit_ctm(sim.dtm, hyper(2, 25.0, 0.1, 60, 30));
    CHECK(fit.params.sigma.rows() == 1);
    CHECK(fit.params.sigma.cols() == 1);
    CHECK(fit.params.eta_doc.cols() == 1);
    CHECK(fit.params.mu.size() == 1);
    CHECK(fit.fit.theta.rowwise().sum().isOnes(1e-12));
    CHECK(fit.acceptance_rate > 0.0);
}

TEST_CASE("reordering logistic-normal parameters is exact")
{
    CtmParams p;
    p.mu = Eigen::Vector3d(0.2, -0.4, 0.9);
    Eigen::Matrix3d L;
    L << 1, 0, 0, 0.5, 1, 0, -0.3, 0.2, 1;
    p.sigma = L * L.transpose();
    p.eta_doc = Eigen::MatrixXd(2, 3);
    p.eta_doc << 0.1, 0.5, -1.0, 2.0, -0.3, 0.4;
    const std::vector<int> order = {3, 1, 0, 2}; // new topic k is old topic order[k]; old reference moves to 0
    const CtmParams q = reorder_topics(p, order);
    for (int d = 0; d < 2; ++d) {
        const Eigen::VectorXd before = logistic_normal_theta(p.eta_doc.row(d).transpose());
        const Eigen::VectorXd after = logistic_normal_theta(q.eta_doc.row(d).transpose());
        for (int k = 0; k < 4; ++k)
            CHECK(after[k] == doctest::Approx(before[order[static_cast<std::size_t>(k)]]).epsilon(1e-12));
    }
    // covariance of a linear map, checked against an explicit A
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    const auto old_eta = [](int j, int r) { return j == 3 ? 0 : (j == r ? 1 : 0); };
    for (int k = 0; k < 3; ++k)
        for (int r = 0; r < 3; ++r)
            A(k, r) = old_eta(order[static_cast<std::size_t>(k)], r) - old_eta(order[3], r);
    CHECK(q.sigma.isApprox(A * p.sigma * A.transpose(), 1e-12));
    CHECK(q.mu.isApprox(A * p.mu, 1e-12));
}

TEST_CASE("point-mass topics identify document mixtures at long lengths")
{
    GenerativeModel gm;
    gm.beta = Eigen::MatrixXd::Identity(3, 3);
    gm.alpha = Eigen::VectorXd::Constant(3, 1.0);
    const std::vector<int> lengths(10, 10000);
    const auto sim = generate_corpus(gm, lengths, 21);
    for (int d = 0; d < 10; ++d) {
        const Eigen::RowVectorXd freq = Eigen::MatrixXd(sim.dtm.counts.cast<double>()).row(d) / 10000.0;
        CHECK((freq - sim.theta.row(d)).cwiseAbs().maxCoeff() < 0.03);
    }
}

TEST_CASE("one topic: word frequencies approach beta")
{
    GenerativeModel gm;
    gm.beta = Eigen::RowVectorXd(4);
    gm.beta << 0.1, 0.2, 0.3, 0.4;
    gm.alpha = Eigen::VectorXd::Constant(1, 1.0);
    const std::vector<int> lengths(20, 5000);
    const auto sim = generate_corpus(gm, lengths, 3);
    const Eigen::RowVectorXd freq = Eigen::MatrixXd(sim.dtm.counts.cast<double>()).colwise().sum() / 100000.0;
    CHECK((freq - gm.beta).cwiseAbs().maxCoeff() < 0.01);
    CHECK(sim.theta.isOnes());
}

TEST_CASE("corpus generation is seeded")
{
    Rng rng(5);
    GenerativeModel gm;
    gm.family = TopicFamily::Ctm;
    gm.beta = draw_topics(3, 10, 0.5, rng);
    gm.mu = Eigen::VectorXd::Zero(2);
    gm.sigma = Eigen::MatrixXd::Identity(2, 2);
    const std::vector<int> lengths(8, 12);
    const auto a = generate_corpus(gm, lengths, 17), b = generate_corpus(gm, lengths, 17);
    CHECK(Eigen::MatrixXi(a.dtm.counts) == Eigen::MatrixXi(b.dtm.counts));
    CHECK(a.theta == b.theta);
}

TEST_CASE("greedy alignment pairs each reference with its nearest estimate")
{
    Eigen::MatrixXd ref(3, 3), est(3, 3);
    ref << 1, 0, 0, 0, 1, 0, 0, 0, 1;
    est << 0, 0.1, 0.9, 0.8, 0.2, 0, 0.1, 0.9, 0;
    CHECK(greedy_alignment(est, ref) == std::vector<int>{1, 2, 0});
    CHECK(aligned_total_variation(est, ref) == doctest::Approx((0.2 + 0.1 + 0.1) / 3.0));
}

TEST_CASE("dense and CTM parameter files round-trip")
{
    const auto dir = test::scratch("topic_io");
    Eigen::MatrixXd m(2, 3);
    m << 0.1, 0.2, 0.7, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
    write_dense_csv(dir / "m.csv", m, "topic", {"a", "b", "c"});
    CHECK(read_dense_csv(dir / "m.csv") == m);
    CtmParams p;
    p.mu = Eigen::Vector2d(0.5, -0.25);
    p.sigma = Eigen::Matrix2d::Identity() * 0.3;
    p.eta_doc = Eigen::MatrixXd::Constant(3, 2, 0.125);
    write_ctm_params(dir / "ctm.csv", p);
    const auto q = read_ctm_params(dir / "ctm.csv");
    CHECK(q.mu == p.mu);
    CHECK(q.sigma == p.sigma);
    CHECK(q.eta_doc == p.eta_doc);
}
