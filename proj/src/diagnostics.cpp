#include "agenda/diagnostics.hpp"

#include "agenda/csv.hpp"
#include "agenda/log.hpp"
#include "agenda/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

namespace agenda {

double heldout_loglik(const Eigen::MatrixXd& beta, const DocTermMatrix& heldout, double alpha,
                      const HeldoutOptions& options)
{
    const int K = static_cast<int>(beta.rows());
    if (K < 1 || beta.cols() != heldout.cols())
        throw InputError("held-out documents do not match the topic-term matrix");
    if (!(alpha > 0.0))
        throw InputError("alpha must be positive");
    if (options.fold_in_iters < 1 || options.fold_in_burn_in < 0 || options.fold_in_burn_in >= options.fold_in_iters)
        throw InputError("need fold_in_iters >= 1 and 0 <= fold_in_burn_in < fold_in_iters");

    const TokenCorpus tc = TokenCorpus::from_dtm(heldout);
    Rng rng(options.seed);
    double total = 0.0;
    long long scored = 0;
    int skipped = 0;
    Eigen::VectorXd counts(K), theta(K), theta_sum(K), p(K);
    std::vector<int> z;
    for (std::size_t d = 0; d < tc.docs.size(); ++d) {
        std::vector<int> tokens = tc.docs[d];
        const int n = static_cast<int>(tokens.size());
        if (n < 2) {
            ++skipped;
            continue;
        }
        // Fisher-Yates with our own generator, so the split is portable
        for (int i = n - 1; i > 0; --i)
            std::swap(tokens[static_cast<std::size_t>(i)], tokens[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
        const int observed = n / 2;

        counts.setZero();
        z.assign(static_cast<std::size_t>(observed), 0);
        for (int i = 0; i < observed; ++i) {
            z[static_cast<std::size_t>(i)] = rng.uniform_int(K);
            counts[z[static_cast<std::size_t>(i)]] += 1.0;
        }
        theta_sum.setZero();
        for (int it = 0; it < options.fold_in_iters; ++it) {
            for (int i = 0; i < observed; ++i) {
                const int w = tokens[static_cast<std::size_t>(i)];
                counts[z[static_cast<std::size_t>(i)]] -= 1.0;
                p = beta.col(w).array() * (counts.array() + alpha);
                const int k = rng.categorical(p.data(), K, p.sum());
                z[static_cast<std::size_t>(i)] = k;
                counts[k] += 1.0;
            }
            if (it >= options.fold_in_burn_in)
                theta_sum += (counts.array() + alpha).matrix() / (observed + K * alpha);
        }
        theta = theta_sum / static_cast<double>(options.fold_in_iters - options.fold_in_burn_in);

        for (int i = observed; i < n; ++i) {
            const double prob = theta.dot(beta.col(tokens[static_cast<std::size_t>(i)]));
            total += std::log(std::max(prob, 1e-300));
            ++scored;
        }
    }
    if (skipped > 0)
        warn("held-out likelihood skipped " + std::to_string(skipped) + " document(s) with fewer than 2 tokens");
    if (scored == 0)
        throw InputError("no held-out document has 2 or more in-vocabulary tokens");
    return total / static_cast<double>(scored);
}

std::vector<int> top_words(const Eigen::Ref<const Eigen::RowVectorXd>& row, int m)
{
    std::vector<int> idx(static_cast<std::size_t>(row.size()));
    std::iota(idx.begin(), idx.end(), 0);
    const auto take = static_cast<std::size_t>(std::clamp<Eigen::Index>(m, 0, row.size()));
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(), [&](int a, int b) {
        return row[a] != row[b] ? row[a] > row[b] : a < b;
    });
    idx.resize(take);
    return idx;
}

Eigen::VectorXd exclusivity(const Eigen::MatrixXd& beta, int m)
{
    if (m < 1)
        throw InputError("need at least one top word");
    const Eigen::RowVectorXd col_sum = beta.colwise().sum();
    Eigen::VectorXd out(beta.rows());
    for (Eigen::Index k = 0; k < beta.rows(); ++k) {
        const auto top = top_words(beta.row(k), m);
        double s = 0.0;
        for (int v : top)
            s += col_sum[v] > 0.0 ? beta(k, v) / col_sum[v] : 0.0;
        out[k] = s / static_cast<double>(top.size());
    }
    return out;
}

Eigen::VectorXd coherence(const Eigen::MatrixXd& beta, const DocTermMatrix& dtm, int m)
{
    if (m < 2)
        throw InputError("coherence needs at least 2 top words");
    if (beta.cols() != dtm.cols())
        throw InputError("topic-term matrix and document-term matrix disagree on vocabulary size");

    // document sets per word, as sorted row lists
    std::vector<std::vector<int>> docs_of(static_cast<std::size_t>(dtm.cols()));
    for (int d = 0; d < dtm.rows(); ++d)
        for (CountMatrix::InnerIterator it(dtm.counts, d); it; ++it)
            if (it.value() > 0)
                docs_of[static_cast<std::size_t>(it.col())].push_back(d);

    Eigen::VectorXd out(beta.rows());
    int absent = 0;
    for (Eigen::Index k = 0; k < beta.rows(); ++k) {
        const auto top = top_words(beta.row(k), m);
        double s = 0.0;
        for (std::size_t j = 1; j < top.size(); ++j) {
            const auto& dj = docs_of[static_cast<std::size_t>(top[j])];
            double doc_j = static_cast<double>(dj.size());
            if (dj.empty()) {
                doc_j = 1.0;
                ++absent;
            }
            for (std::size_t i = 0; i < j; ++i) {
                const auto& di = docs_of[static_cast<std::size_t>(top[i])];
                std::size_t co = 0;
                auto a = di.begin();
                auto b = dj.begin();
                while (a != di.end() && b != dj.end()) {
                    if (*a < *b)
                        ++a;
                    else if (*b < *a)
                        ++b;
                    else {
                        ++co;
                        ++a;
                        ++b;
                    }
                }
                s += std::log((static_cast<double>(co) + 1.0) / doc_j);
            }
        }
        out[k] = s;
    }
    if (absent > 0)
        warn("coherence: top words absent from every document were counted as appearing in one document");
    return out;
}

double dispersion(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& beta, const DocTermMatrix& dtm)
{
    if (theta.rows() != dtm.rows() || beta.cols() != dtm.cols() || theta.cols() != beta.rows())
        throw InputError("fit and document-term matrix are not conformable");
    constexpr double floor = 1e-12;
    double total = 0.0;
    long long cells = 0;
    int floored = 0;
    for (int d = 0; d < dtm.rows(); ++d) {
        const double nd = static_cast<double>(dtm.doc_length(d));
        for (CountMatrix::InnerIterator it(dtm.counts, d); it; ++it) {
            if (it.value() == 0)
                continue;
            double m = theta.row(d).dot(beta.col(it.col()));
            if (m < floor) {
                m = floor;
                ++floored;
            }
            const double resid = it.value() - nd * m;
            const double var = std::max(nd * m * std::max(1.0 - m, floor), floor);
            total += resid == 0.0 ? 0.0 : resid * resid / var;
            ++cells;
        }
    }
    if (floored > 0)
        warn("dispersion: " + std::to_string(floored) + " observed cell(s) had zero model probability (floored at 1e-12)");
    if (cells == 0)
        throw InputError("document-term matrix has no nonzero cells");
    return total / static_cast<double>(cells);
}

std::pair<std::vector<int>, std::vector<int>> split_documents(int docs, double fraction, std::uint64_t seed)
{
    if (docs < 2)
        throw InputError("need at least 2 documents to hold some out");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw InputError("held-out fraction must be in (0, 1)");
    std::vector<int> order(static_cast<std::size_t>(docs));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, 0x5eed);
    for (int i = docs - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
    const int held = std::clamp(static_cast<int>(std::lround(fraction * docs)), 1, docs - 1);
    std::vector<int> test(order.begin(), order.begin() + held);
    std::vector<int> train(order.begin() + held, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return {std::move(train), std::move(test)};
}

std::vector<DiagnosticsReport> sweep_topics(const DocTermMatrix& dtm, const std::vector<int>& topic_counts,
                                            const LdaHyper& hyper_template, const SweepOptions& options)
{
    if (topic_counts.empty())
        throw InputError("topic count list is empty");
    const auto [train_rows, test_rows] = split_documents(dtm.rows(), options.heldout_fraction, hyper_template.seed);
    const DocTermMatrix train = dtm.select_rows(train_rows);
    const DocTermMatrix test = dtm.select_rows(test_rows);

    std::vector<DiagnosticsReport> reports(topic_counts.size());
    auto run = [&](std::size_t i) {
        auto& r = reports[i];
        r.topics = topic_counts[i];
        try {
            LdaHyper h = hyper_template;
            h.topics = r.topics;
            if (options.scale_alpha)
                h.alpha = 50.0 / r.topics;
            const TopicModelFit fit = fit_lda(train, h);
            HeldoutOptions ho = options.heldout;
            ho.seed = hyper_template.seed;
            r.heldout_loglik = heldout_loglik(fit.beta, test, h.alpha, ho);
            r.exclusivity = exclusivity(fit.beta, options.top_words);
            r.exclusivity_mean = r.exclusivity.mean();
            r.coherence = coherence(fit.beta, train, options.top_words);
            r.coherence_mean = r.coherence.mean();
            r.dispersion = dispersion(fit.theta, fit.beta, train);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)), 1,
                                                        topic_counts.size());
    for (std::size_t first = 0; first < topic_counts.size(); first += workers) {
        std::vector<std::jthread> pool;
        for (std::size_t i = first; i < std::min(topic_counts.size(), first + workers); ++i)
            pool.emplace_back(run, i);
    }
    for (const auto& r : reports)
        if (!r.error.empty())
            warn("diagnostics for K=" + std::to_string(r.topics) + " failed: " + r.error);
    return reports;
}

void write_report_csv(std::ostream& out, const std::vector<DiagnosticsReport>& reports)
{
    csv::write_record(out, {"K", "heldout", "exclusivity_mean", "coherence_mean", "dispersion"});
    for (const auto& r : reports)
        if (r.error.empty())
            csv::write_record(out, {std::to_string(r.topics), csv::format_number(r.heldout_loglik),
                                    csv::format_number(r.exclusivity_mean), csv::format_number(r.coherence_mean),
                                    csv::format_number(r.dispersion)});
}

void write_topic_scores_csv(std::ostream& out, const std::vector<DiagnosticsReport>& reports)
{
    csv::write_record(out, {"K", "topic", "exclusivity", "coherence"});
    for (const auto& r : reports) {
        if (!r.error.empty())
            continue;
        for (Eigen::Index k = 0; k < r.exclusivity.size(); ++k)
            csv::write_record(out, {std::to_string(r.topics), std::to_string(k + 1), csv::format_number(r.exclusivity[k]),
                                    csv::format_number(r.coherence[k])});
    }
}

} // namespace agenda
