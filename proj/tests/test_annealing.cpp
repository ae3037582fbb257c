#include <doctest.h>

#include <cmath>
#include <random>

#include "mtc/annealing.hpp"
#include "mtc/error.hpp"
#include "oracles.hpp"

using namespace mtc;
using namespace mtc::annealing;
using transform::TransformBasis;
using transform::TruncatedDct;

namespace {

struct ClusterData {
    std::vector<Clip> clips;
    std::vector<TruncatedDct> dcts;
    std::vector<std::size_t> labels;
    double energy = 0.0;
};

// Clips of cluster c are U_c X_i with orthogonal U_0, U_1 (rank k each);
// the full DCT is kept so each cluster's optimum is exact.
ClusterData two_clusters(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t per_cluster, std::size_t L) {
    std::mt19937_64 rng(seed);
    const Matrix u = oracle::random_orthonormal(rng, 3 * n, 2 * k);
    const Matrix u0 = u.columns(0, k), u1 = u.columns(k, k);
    ClusterData d;
    for (std::size_t i = 0; i < 2 * per_cluster; ++i) {
        const std::size_t label = (i * 7 + 3) % 2;  // interleaved
        const Matrix x = oracle::random_matrix(rng, k, L, 10.0);
        d.clips.push_back(Clip{i * L, oracle::mul(label == 0 ? u0 : u1, x)});
        d.dcts.push_back(transform::truncated_dct(L, L));
        d.labels.push_back(label);
        d.energy += oracle::frob_sq(d.clips.back().data);
    }
    return d;
}

std::vector<TransformBasis> random_bases(std::mt19937_64& rng, std::size_t rows, std::size_t k, std::size_t count) {
    std::vector<TransformBasis> out;
    for (std::size_t j = 0; j < count; ++j) out.push_back({oracle::random_orthonormal(rng, rows, k), {}});
    return out;
}

}  // namespace

TEST_CASE("weights from residuals") {
    const Matrix same{{3, 3}, {7, 7}};
    const auto w = weights_from_residuals(same, 2.0);
    for (double v : w.weights.values()) CHECK(v == 0.5);

    const Matrix distinct{{1.0, 2.0, 1.5}, {5.0, 4.0, 6.0}};
    const auto cold = weights_from_residuals(distinct, 1e-8);
    CHECK(cold.weights(0, 0) > 1 - 1e-6);
    CHECK(cold.weights(1, 1) > 1 - 1e-6);

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    Matrix r(6, 3);
    for (auto& v : r.values()) v = u(rng);
    const double t = 7.5;
    const auto got = weights_from_residuals(r, t);
    for (std::size_t i = 0; i < 6; ++i) {
        // log-sum-exp oracle
        double m = -1e300;
        for (std::size_t j = 0; j < 3; ++j) m = std::max(m, -r(i, j) / t);
        double lse = 0.0;
        for (std::size_t j = 0; j < 3; ++j) lse += std::exp(-r(i, j) / t - m);
        lse = m + std::log(lse);
        double row = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(std::fabs(got.weights(i, j) - std::exp(-r(i, j) / t - lse)) < 1e-12);
            row += got.weights(i, j);
        }
        CHECK(std::fabs(row - 1.0) < 1e-9);
    }
    CHECK_THROWS_AS(weights_from_residuals(r, 0.0), InvalidArgument);
    CHECK_THROWS_AS(weights_from_residuals(r, -1.0), InvalidArgument);
}

TEST_CASE("residual energies and weight update use the explicit residual") {
    std::mt19937_64 rng(42);
    const std::vector<Clip> clips{Clip{0, oracle::random_matrix(rng, 6, 5)}, Clip{5, oracle::random_matrix(rng, 6, 4)}};
    const std::vector<TruncatedDct> dcts{transform::truncated_dct(5, 3), transform::truncated_dct(4, 2)};
    const auto bases = random_bases(rng, 6, 2, 3);
    const Matrix r = residual_energies(clips, dcts, bases);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const Matrix d = oracle::dct(dcts[i].length, dcts[i].retained);
            const Matrix& b = bases[j].matrix;
            const Matrix s = oracle::mul(oracle::mul(oracle::transpose(b), clips[i].data), d);
            const double e = oracle::frob_sq(oracle::sub(clips[i].data, oracle::mul(oracle::mul(b, s), oracle::transpose(d))));
            CHECK(oracle::rel_diff(r(i, j), e) < 1e-10);
        }
    const auto w = update_weights(clips, dcts, bases, 3.0);
    CHECK(w.weights == weights_from_residuals(r, 3.0).weights);
    CHECK_THROWS_AS(update_weights(clips, dcts, bases, 0.0), InvalidArgument);
}

TEST_CASE("accumulate_Cj") {
    std::mt19937_64 rng(43);
    std::vector<Clip> clips;
    std::vector<TruncatedDct> dcts;
    for (std::size_t i = 0; i < 4; ++i) {
        clips.push_back(Clip{0, oracle::random_matrix(rng, 6, 5 + i)});
        dcts.push_back(transform::truncated_dct(5 + i, 2 + i));
    }
    AssignmentMatrix ones{Matrix(4, 1, 1.0), 1.0};
    CHECK(oracle::max_abs(oracle::sub(accumulate_Cj(clips, dcts, ones, 0), transform::accumulate_C(clips, dcts))) < 1e-12);

    AssignmentMatrix w{Matrix(4, 2), 1.0};
    for (std::size_t i = 0; i < 4; ++i) w.weights(i, 1) = 1.0;
    CHECK(accumulate_Cj(clips, dcts, w, 0) == Matrix(6, 6));

    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        w.weights(i, 0) = u(rng);
        w.weights(i, 1) = 1.0 - w.weights(i, 0);
    }
    Matrix naive(6, 6);
    for (std::size_t i = 0; i < 4; ++i) {
        const Matrix p = oracle::mul(clips[i].data, oracle::dct(dcts[i].length, dcts[i].retained));
        naive = naive + w.weights(i, 1) * oracle::mul(p, oracle::transpose(p));
    }
    const Matrix c1 = accumulate_Cj(clips, dcts, w, 1);
    CHECK(oracle::max_abs(oracle::sub(c1, naive)) < 1e-10);
    CHECK(asymmetry(c1) < 1e-9);
    CHECK_THROWS_AS(accumulate_Cj(clips, dcts, w, 2), InvalidArgument);
}

TEST_CASE("hard assignment") {
    AssignmentMatrix w{Matrix{{0.2, 0.8}, {0.5, 0.5}, {0.9, 0.1}}, 1.0};
    CHECK(hard_assign(w) == std::vector<std::size_t>{1, 0, 0});

    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AssignmentMatrix r{Matrix(30, 4), 1.0};
    for (auto& v : r.weights.values()) v = u(rng);
    const auto got = hard_assign(r);
    for (std::size_t i = 0; i < 30; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 0; j < 4; ++j)
            if (r.weights(i, j) > r.weights(i, best)) best = j;
        CHECK(got[i] == best);
    }
}

TEST_CASE("random orthonormal initialization is seeded") {
    const Matrix a = random_orthonormal(9, 4, 5), b = random_orthonormal(9, 4, 5), c = random_orthonormal(9, 4, 6);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(oracle::max_abs(oracle::sub(oracle::mul(oracle::transpose(a), a), Matrix::identity(4))) < 1e-12);
    CHECK_THROWS_AS(random_orthonormal(3, 4, 0), InvalidArgument);
}

TEST_CASE("K = 1 reduces to the single-basis optimum") {
    std::mt19937_64 rng(45);
    std::vector<Clip> clips;
    std::vector<TruncatedDct> dcts;
    for (std::size_t i = 0; i < 5; ++i) {
        clips.push_back(Clip{0, oracle::random_matrix(rng, 9, 12)});
        dcts.push_back(transform::truncated_dct(12, 6));
    }
    AnnealOptions opt;
    opt.bases = 1;
    opt.components = 3;
    opt.seed = 1;
    const auto res = anneal(clips, dcts, opt);
    const auto single = transform::top_eigenvectors(transform::accumulate_C(clips, dcts), 3);
    const double expect = transform::objective_value(clips, dcts, single.matrix);
    CHECK(oracle::rel_diff(res.final_objective, expect) < 1e-8);
    CHECK(res.converged);
    CHECK(res.hard_assignment == std::vector<std::size_t>(5, 0));
}

TEST_CASE("two well-separated clusters are recovered") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        CAPTURE(seed);
        const auto d = two_clusters(seed, 4, 3, 5, 16);
        AnnealOptions opt;
        opt.bases = 2;
        opt.components = 3;
        opt.seed = seed;
        opt.tolerance = 1e-6;
        const auto res = anneal(d.clips, d.dcts, opt);
        CHECK(res.converged);
        CHECK(res.iterations <= 30);
        // Same partition up to a relabelling of the bases.
        const bool same = res.hard_assignment == d.labels;
        std::vector<std::size_t> flipped(d.labels.size());
        for (std::size_t i = 0; i < flipped.size(); ++i) flipped[i] = 1 - d.labels[i];
        CHECK((same || res.hard_assignment == flipped));
        CHECK(res.final_objective < 1e-6 * d.energy);
    }
}

TEST_CASE("random cluster sizes are recovered with the default restarts") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        CAPTURE(seed);
        std::mt19937_64 rng(2000 + seed);
        const std::size_t n = 5, k = 3, L = 24;
        const Matrix u = oracle::random_orthonormal(rng, 3 * n, 2 * k);
        std::vector<Clip> clips;
        std::vector<TruncatedDct> dcts;
        std::vector<std::size_t> labels;
        double energy = 0.0;
        for (std::size_t i = 0; i < 12; ++i) {
            const std::size_t label = i < 2 ? i : rng() % 2;
            clips.push_back(Clip{0, oracle::mul(u.columns(label * k, k), oracle::random_matrix(rng, k, L, 5.0))});
            dcts.push_back(transform::truncated_dct(L, L));
            labels.push_back(label);
            energy += oracle::frob_sq(clips.back().data);
        }
        AnnealOptions opt;
        opt.bases = 2;
        opt.components = k;
        opt.seed = seed;
        const auto res = anneal(clips, dcts, opt);
        CHECK(res.iterations <= 30);
        CHECK(res.final_objective < 1e-6 * energy);
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = 0; j < labels.size(); ++j)
                CHECK((labels[i] == labels[j]) == (res.hard_assignment[i] == res.hard_assignment[j]));
    }
}

TEST_CASE("restarts start progressively cooler and keep the best run") {
    const auto d = two_clusters(21, 4, 2, 4, 12);
    AnnealOptions opt;
    opt.bases = 2;
    opt.components = 2;
    opt.seed = 8;
    opt.initial_temperature = 1000.0;
    opt.restarts = 1;
    const auto single = anneal(d.clips, d.dcts, opt);
    CHECK(single.restart == 0);
    CHECK(single.initial_temperature == 1000.0);

    opt.restarts = 5;
    const auto best = anneal(d.clips, d.dcts, opt);
    CHECK(best.restart < 5);
    CHECK(best.initial_temperature == 1000.0 / std::pow(4.0, static_cast<double>(best.restart)));
    CHECK(best.final_objective <= single.final_objective);
    if (best.restart == 0) CHECK(best.assignment.weights == single.assignment.weights);

    opt.restarts = 0;
    CHECK_THROWS_AS(anneal(d.clips, d.dcts, opt), InvalidArgument);
}

TEST_CASE("coinciding bases are split apart") {
    // One clip in span(U0), three in span(U1) with k = 3n/3: both random bases
    // collapse onto U1 in one step and the tie would otherwise never break.
    std::mt19937_64 rng(8);
    const std::size_t n = 3, k = 3, L = 32;
    const Matrix u = oracle::random_orthonormal(rng, 3 * n, 2 * k);
    std::vector<Clip> clips;
    std::vector<TruncatedDct> dcts;
    const std::size_t labels[] = {0, 1, 1, 1};
    const double scales[] = {1.0, 20.0, 15.0, 12.0};
    double energy = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        clips.push_back(Clip{0, oracle::mul(u.columns(labels[i] * k, k), oracle::random_matrix(rng, k, L, scales[i]))});
        dcts.push_back(transform::truncated_dct(L, L));
        energy += oracle::frob_sq(clips.back().data);
    }
    std::size_t split_runs = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        AnnealOptions opt;
        opt.bases = 2;
        opt.components = k;
        opt.seed = seed;
        opt.restarts = 1;
        const auto res = anneal(clips, dcts, opt);
        CAPTURE(seed);
        CHECK(res.final_objective < 1e-6 * energy);
        CHECK(res.hard_assignment[0] != res.hard_assignment[1]);
        for (const auto& rec : res.trace) split_runs += rec.splits > 0;
    }
    CHECK(split_runs > 0);
}

TEST_CASE("invariants along the iteration") {
    const auto d = two_clusters(9, 5, 2, 6, 20);
    std::vector<TruncatedDct> dcts;
    for (const auto& c : d.clips) dcts.push_back(transform::truncated_dct(c.length(), 8));
    AnnealOptions opt;
    opt.bases = 3;
    opt.components = 2;
    opt.seed = 17;
    const auto res = anneal(d.clips, dcts, opt);
    REQUIRE_FALSE(res.trace.empty());
    for (std::size_t s = 0; s < res.trace.size(); ++s) {
        const auto& rec = res.trace[s];
        CHECK(rec.soft_objective_after_basis_update <= rec.soft_objective_before_basis_update * (1 + 1e-12) + 1e-9);
        if (s > 0) CHECK(rec.temperature == res.trace[s - 1].temperature / 2);
    }
    CHECK(res.trace.front().temperature == res.initial_temperature);
    for (std::size_t i = 0; i < res.assignment.clips(); ++i) {
        double row = 0.0;
        for (double v : res.assignment.weights.row(i)) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            row += v;
        }
        CHECK(std::fabs(row - 1.0) < 1e-9);
    }
    for (const auto& b : res.bases)
        CHECK(oracle::max_abs(oracle::sub(oracle::mul(oracle::transpose(b.matrix), b.matrix), Matrix::identity(2))) < 1e-10);
    CHECK(res.hard_assignment == hard_assign(res.assignment));
}

TEST_CASE("annealing is deterministic given the seed") {
    const auto d = two_clusters(11, 4, 2, 4, 12);
    AnnealOptions opt;
    opt.bases = 2;
    opt.components = 2;
    opt.seed = 99;
    const auto a = anneal(d.clips, d.dcts, opt);
    const auto b = anneal(d.clips, d.dcts, opt);
    CHECK(a.assignment.weights == b.assignment.weights);
    CHECK(a.iterations == b.iterations);
    CHECK(a.final_objective == b.final_objective);
    for (std::size_t j = 0; j < 2; ++j) CHECK(a.bases[j].matrix == b.bases[j].matrix);
}

TEST_CASE("annealing errors") {
    const auto d = two_clusters(12, 3, 1, 2, 8);
    AnnealOptions opt;
    opt.components = 1;
    opt.bases = 5;
    CHECK_THROWS_AS(anneal(d.clips, d.dcts, opt), InvalidArgument);  // N < K
    opt.bases = 2;
    opt.components = 10;
    CHECK_THROWS_AS(anneal(d.clips, d.dcts, opt), InvalidArgument);
    opt.components = 1;
    opt.initial_temperature = -1.0;
    CHECK_THROWS_AS(anneal(d.clips, d.dcts, opt), InvalidArgument);

    opt.initial_temperature = 1e12;
    opt.max_iterations = 1;
    opt.tolerance = 1e-15;
    try {
        anneal(d.clips, d.dcts, opt);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_state().iterations == 1);
        CHECK_FALSE(e.last_state().converged);
        CHECK(e.last_state().bases.size() == 2);
    }
}
