#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "signfj/walks.hpp"
#include "test_support.hpp"

using namespace signfj;
namespace ts = testsupport;

TEST_CASE("an isolated node absorbs immediately with positive sign") {
    const SignedGraph g = ts::isolated_nodes(3);
    SplitMix64 rng(1);
    for (int rep = 0; rep < 10; ++rep) {
        const WalkOutcome outcome = sample_walk(g, 1, rng);
        CHECK(outcome.absorbed_at == 1);
        CHECK(outcome.sign == 1);
    }
}

TEST_CASE("walks on all-positive graphs never flip sign") {
    std::mt19937_64 seeds(40);
    const SignedGraph g = ts::random_graph(seeds, 12, 0.4, 0.0);
    SplitMix64 rng(2);
    for (int rep = 0; rep < 200; ++rep) CHECK(sample_walk(g, rep % g.node_count(), rng).sign == 1);
}

TEST_CASE("two-node negative edge hits the closed-form absorption split") {
    const SignedGraph g = ts::two_node_negative();
    const WalkEstimate est = estimate_pq(g, 0, 1000000, 99);
    const auto p = est.p_hat();
    const auto q = est.q_hat();
    CHECK(std::abs(p[0] - 2.0 / 3) <= 0.003);
    CHECK(p[1] == 0.0);
    CHECK(q[0] == 0.0);
    CHECK(std::abs(q[1] - 1.0 / 3) <= 0.003);
}

TEST_CASE("a single walk fills exactly one cell") {
    const SignedGraph g = ts::path_positive_negative();
    const WalkEstimate est = estimate_pq(g, 1, 1, 5);
    std::int64_t total = 0;
    for (size_t j = 0; j < est.positive_counts.size(); ++j) {
        total += est.positive_counts[j] + est.negative_counts[j];
    }
    CHECK(total == 1);
}

TEST_CASE("absorption completeness is exact at the counter level") {
    std::mt19937_64 seeds(41);
    for (int round = 0; round < 5; ++round) {
        const SignedGraph g = ts::random_graph(seeds, 3 + static_cast<int>(seeds() % 20), 0.4, 0.5);
        const WalkEstimate est = estimate_pq(g, 0, 5000, 1234 + static_cast<std::uint64_t>(round));
        std::int64_t total = 0;
        for (size_t j = 0; j < est.positive_counts.size(); ++j) {
            total += est.positive_counts[j] + est.negative_counts[j];
        }
        CHECK(total == est.walks);
    }
}

TEST_CASE("estimates are identical for any worker count") {
    std::mt19937_64 seeds(42);
    const SignedGraph g = ts::random_graph(seeds, 15, 0.3, 0.5);
    const WalkEstimate serial = estimate_pq(g, 3, 20000, 777, 1);
    const WalkEstimate parallel = estimate_pq(g, 3, 20000, 777, 4);
    CHECK(serial.positive_counts == parallel.positive_counts);
    CHECK(serial.negative_counts == parallel.negative_counts);
}

TEST_CASE("all-positive graphs have identically zero q_hat") {
    std::mt19937_64 seeds(43);
    const SignedGraph g = ts::random_graph(seeds, 10, 0.4, 0.0);
    const WalkEstimate est = estimate_pq(g, 2, 20000, 11);
    for (std::int64_t c : est.negative_counts) CHECK(c == 0);
}

TEST_CASE("exact_pq on the two-node negative edge") {
    const ExactAbsorption exact = exact_pq(ts::two_node_negative());
    CHECK(exact.p(0, 0) == Catch::Approx(2.0 / 3));
    CHECK(exact.p(1, 1) == Catch::Approx(2.0 / 3));
    CHECK(exact.p(0, 1) == Catch::Approx(0.0).margin(1e-14));
    CHECK(exact.q(0, 1) == Catch::Approx(1.0 / 3));
    CHECK(exact.q(1, 0) == Catch::Approx(1.0 / 3));
    CHECK(exact.q(0, 0) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("exact_pq reduces to the fundamental matrix on all-positive graphs") {
    std::mt19937_64 seeds(44);
    const SignedGraph g = ts::random_graph(seeds, 12, 0.4, 0.0);
    const ExactAbsorption exact = exact_pq(g);
    CHECK(exact.q.cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXd inv = ts::dense_shifted(g).ldlt().solve(
        Eigen::MatrixXd::Identity(g.node_count(), g.node_count()));
    CHECK((exact.p - inv).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("p - q is the inverse of I + L and rows of p + q sum to one") {
    std::mt19937_64 seeds(45);
    for (int round = 0; round < 6; ++round) {
        const SignedGraph g = ts::random_graph(seeds, 20, 0.3, 0.5);
        const ExactAbsorption exact = exact_pq(g);
        const Eigen::MatrixXd inv = ts::dense_shifted(g).ldlt().solve(
            Eigen::MatrixXd::Identity(g.node_count(), g.node_count()));
        CHECK((exact.p - exact.q - inv).cwiseAbs().maxCoeff() <= 1e-10);
        const Eigen::VectorXd row_sums = (exact.p + exact.q).rowwise().sum();
        for (int i = 0; i < g.node_count(); ++i) CHECK(row_sums(i) == Catch::Approx(1.0).margin(1e-10));
        CHECK(exact.p.minCoeff() >= -1e-12);
        CHECK(exact.q.minCoeff() >= -1e-12);
    }
}

TEST_CASE("exact_pq_row agrees with the full matrices") {
    std::mt19937_64 seeds(49);
    const SignedGraph g = ts::random_graph(seeds, 18, 0.35, 0.5);
    const ExactAbsorption full = exact_pq(g);
    for (const int source : {0, 7, 17}) {
        const auto [p_row, q_row] = exact_pq_row(g, source);
        for (int j = 0; j < g.node_count(); ++j) {
            CHECK(p_row[static_cast<size_t>(j)] == Catch::Approx(full.p(source, j)).margin(1e-12));
            CHECK(q_row[static_cast<size_t>(j)] == Catch::Approx(full.q(source, j)).margin(1e-12));
        }
    }
}

TEST_CASE("absorption coefficients can be negative on signed graphs") {
    const ExactAbsorption exact = exact_pq(ts::two_node_negative());
    CHECK(exact.p(0, 1) - exact.q(0, 1) == Catch::Approx(-1.0 / 3));
}

TEST_CASE("walk-interpretation payoff on the two-node negative edge") {
    const SignedGraph g = ts::two_node_negative();
    SECTION("mixed opinions make the negative coefficient visible") {
        const WalkInterpretationCheck check = verify_walk_interpretation(g, std::vector<double>{1.0, -1.0}, 0, 100000, 21);
        CHECK(check.z_exact == Catch::Approx(1.0));
        CHECK(std::abs(check.z_mc - check.z_exact) <= 4.0 * check.standard_error + 1e-12);
    }
    SECTION("uniform opinions") {
        const WalkInterpretationCheck check = verify_walk_interpretation(g, std::vector<double>{1.0, 1.0}, 0, 100000, 22);
        CHECK(check.z_exact == Catch::Approx(1.0 / 3));
        CHECK(std::abs(check.z_mc - check.z_exact) <= 4.0 * check.standard_error);
    }
    SECTION("zero opinions") {
        const WalkInterpretationCheck check = verify_walk_interpretation(g, std::vector<double>{0.0, 0.0}, 0, 1000, 23);
        CHECK(check.z_mc == 0.0);
        CHECK(check.z_exact == 0.0);
    }
}

TEST_CASE("monte carlo cells stay inside a five-sigma band") {
    std::mt19937_64 seeds(46);
    int flagged = 0;
    int cells = 0;
    for (int round = 0; round < 4; ++round) {
        const SignedGraph g = ts::random_graph(seeds, 4 + static_cast<int>(seeds() % 12), 0.4, 0.5);
        const ExactAbsorption exact = exact_pq(g);
        const std::int64_t walks = 100000;
        const int source = static_cast<int>(seeds() % static_cast<std::uint64_t>(g.node_count()));
        const WalkEstimate est = estimate_pq(g, source, walks, 500 + static_cast<std::uint64_t>(round));
        const auto p_hat = est.p_hat();
        const auto q_hat = est.q_hat();
        for (int j = 0; j < g.node_count(); ++j) {
            for (const auto& [hat, truth] :
                 {std::pair{p_hat[static_cast<size_t>(j)], exact.p(source, j)},
                  std::pair{q_hat[static_cast<size_t>(j)], exact.q(source, j)}}) {
                const double sigma = std::sqrt(std::max(truth * (1.0 - truth), 0.0) / static_cast<double>(walks));
                ++cells;
                if (std::abs(hat - truth) > 5.0 * sigma + 1e-12) ++flagged;
            }
        }
    }
    if (flagged > 0) {
        WARN("five-sigma band exceeded in " << flagged << " of " << cells << " cells");
    }
    CHECK(flagged <= cells / 100);
}

TEST_CASE("lifted correspondence holds on the worked examples") {
    CHECK(verify_lifted_correspondence(ts::two_node_negative()) <= 1e-12);
    std::mt19937_64 seeds(47);
    const SignedGraph all_positive = ts::random_graph(seeds, 10, 0.4, 0.0);
    CHECK(verify_lifted_correspondence(all_positive) <= 1e-10);
    const SignedGraph mixed = ts::random_graph(seeds, 30, 0.3, 0.5);
    CHECK(verify_lifted_correspondence(mixed) <= 1e-10);
}

TEST_CASE("sign-split step distributions follow the closed-form recursion") {
    // X(t+1) = X(t) (I+D)^-1 A+ - Y(t) (I+D)^-1 A-, and symmetrically for
    // Y, starting from X(0) = I, Y(0) = 0; the closed form uses powers of
    // (I+D)^-1 (A+ -+ A-).
    std::mt19937_64 seeds(48);
    for (int round = 0; round < 4; ++round) {
        const int n = 3 + static_cast<int>(seeds() % 8);
        const SignedGraph g = ts::random_graph(seeds, n, 0.5, 0.5);
        Eigen::MatrixXd a_pos = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd a_neg = Eigen::MatrixXd::Zero(n, n);
        for (const Edge& e : g.edges()) {
            auto& target = e.sign > 0 ? a_pos : a_neg;
            target(e.u, e.v) = static_cast<double>(e.sign);
            target(e.v, e.u) = static_cast<double>(e.sign);
        }
        Eigen::VectorXd inv_shift(n);
        for (int i = 0; i < n; ++i) inv_shift(i) = 1.0 / (1.0 + g.degree(i));
        const Eigen::MatrixXd step_mixed = inv_shift.asDiagonal() * (a_pos - a_neg);
        const Eigen::MatrixXd step_signed = inv_shift.asDiagonal() * (a_pos + a_neg);

        Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd mixed_power = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd signed_power = Eigen::MatrixXd::Identity(n, n);
        for (int t = 1; t <= 5; ++t) {
            const Eigen::MatrixXd x_next = x * inv_shift.asDiagonal() * a_pos - y * inv_shift.asDiagonal() * a_neg;
            const Eigen::MatrixXd y_next = y * inv_shift.asDiagonal() * a_pos - x * inv_shift.asDiagonal() * a_neg;
            x = x_next;
            y = y_next;
            mixed_power *= step_mixed;
            signed_power *= step_signed;
            CHECK((x - 0.5 * (mixed_power + signed_power)).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((y - 0.5 * (mixed_power - signed_power)).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("walk sources outside the graph are rejected") {
    const SignedGraph g = ts::two_node_negative();
    SplitMix64 rng(3);
    CHECK_THROWS_AS(sample_walk(g, 5, rng), std::invalid_argument);
    CHECK_THROWS_AS(estimate_pq(g, 0, 0, 1), std::invalid_argument);
}
