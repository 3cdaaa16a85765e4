#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "dynot/model.hpp"
#include "dynot/oracle.hpp"

using namespace dynot;

namespace {

// weights on a dyadic grid so the scaled reference solves the instance exactly
double dyadic(std::mt19937_64 &rng, double lo, double hi) {
	std::uniform_real_distribution<double> d(lo, hi);
	return std::round(d(rng) * 1048576.0) / 1048576.0;
}

instance random_instance(std::mt19937_64 &rng, std::size_t na, std::size_t nb, int dim) {
	std::uniform_real_distribution<double> coord(-2, 2);
	instance in(cost_kind::sqeuclidean, dim);
	std::vector<double> alpha(na), beta(nb);
	double sa = 0, sb = 0;
	for (auto &w : alpha) sa += (w = dyadic(rng, 0.1, 1.0));
	for (auto &w : beta) sb += (w = dyadic(rng, 0.1, 1.0));
	// rescale demands onto the dyadic grid and absorb the remainder in the last one
	double target = sa;
	double acc = 0;
	for (std::size_t j = 0; j + 1 < nb; ++j) {
		beta[j] = std::round(beta[j] / sb * target * 1048576.0) / 1048576.0;
		acc += beta[j];
	}
	beta[nb - 1] = target - acc;
	for (std::size_t i = 0; i < na; ++i) {
		std::vector<double> pt(dim);
		for (auto &x : pt) x = coord(rng);
		in.add_node(side_t::supply, pt, alpha[i]);
	}
	for (std::size_t j = 0; j < nb; ++j) {
		std::vector<double> pt(dim);
		for (auto &x : pt) x = coord(rng);
		in.add_node(side_t::demand, pt, -beta[j]);
	}
	return in;
}

instance canonical_2x2() {
	instance in(cost_kind::explicit_matrix, 0);
	auto a1 = in.add_node(side_t::supply, {}, 0.6);
	auto a2 = in.add_node(side_t::supply, {}, 0.4);
	auto b1 = in.add_node(side_t::demand, {}, -0.5);
	auto b2 = in.add_node(side_t::demand, {}, -0.5);
	in.set_explicit_cost(a1, b1, 0);
	in.set_explicit_cost(a1, b2, 1);
	in.set_explicit_cost(a2, b1, 1);
	in.set_explicit_cost(a2, b2, 0);
	return in;
}

} // namespace

TEST_CASE("enumerate_tiny basics") {
	SECTION("1x1") {
		instance in(cost_kind::explicit_matrix, 0);
		auto a = in.add_node(side_t::supply, {}, 0.75);
		auto b = in.add_node(side_t::demand, {}, -0.75);
		in.set_explicit_cost(a, b, 3.0);
		CHECK(oracle::enumerate_tiny(in) == Catch::Approx(0.75 * 3.0));
	}
	SECTION("2x2 identity cost") {
		instance in(cost_kind::explicit_matrix, 0);
		auto a1 = in.add_node(side_t::supply, {}, 0.5);
		auto a2 = in.add_node(side_t::supply, {}, 0.5);
		auto b1 = in.add_node(side_t::demand, {}, -0.5);
		auto b2 = in.add_node(side_t::demand, {}, -0.5);
		in.set_explicit_cost(a1, b1, 0);
		in.set_explicit_cost(a1, b2, 1);
		in.set_explicit_cost(a2, b1, 1);
		in.set_explicit_cost(a2, b2, 0);
		CHECK(oracle::enumerate_tiny(in) == Catch::Approx(0.0).margin(1e-12));
	}
	SECTION("size guard") {
		std::mt19937_64 rng(5);
		instance in = random_instance(rng, 5, 5, 2);
		CHECK_THROWS_AS(oracle::enumerate_tiny(in), error);
	}
}

TEST_CASE("solve_ssp basics") {
	SECTION("singleton pair") {
		instance in(cost_kind::sqeuclidean, 1);
		in.add_node(side_t::supply, {0.0}, 1.0);
		in.add_node(side_t::demand, {1.0}, -1.0);
		auto r = oracle::solve_ssp(in, 1 << 20);
		CHECK(r.cost == Catch::Approx(1.0));
		REQUIRE(r.plan.entries.size() == 1);
	}
	SECTION("canonical 2x2") {
		auto r = oracle::solve_ssp(canonical_2x2(), 1 << 20);
		CHECK(r.cost == Catch::Approx(0.1));
	}
	SECTION("unbalanced rejected") {
		instance in(cost_kind::sqeuclidean, 1);
		in.add_node(side_t::supply, {0.0}, 1.0);
		in.add_node(side_t::demand, {1.0}, -0.5);
		CHECK_THROWS_AS(oracle::solve_ssp(in), error);
	}
}

TEST_CASE("ssp plan satisfies conservation") {
	std::mt19937_64 rng(17);
	for (int rep = 0; rep < 20; ++rep) {
		instance in = random_instance(rng, 6, 8, 2);
		auto r = oracle::solve_ssp(in, 1 << 20);
		std::vector<double> net(in.size(), 0);
		for (auto &[k, x] : r.plan.entries) {
			CHECK(x >= 0);
			net[k.first] += x;
			net[k.second] -= x;
		}
		for (std::uint32_t i = 0; i < in.size(); ++i)
			CHECK(net[i] == Catch::Approx(in.weight(i)).margin(1e-6));
		CHECK(plan_cost(in, r.plan) == Catch::Approx(r.cost));
	}
}

TEST_CASE("mutual agreement on tiny instances") {
	std::mt19937_64 rng(23);
	for (int rep = 0; rep < 60; ++rep) {
		std::size_t na = 1 + rng() % 4, nb = 1 + rng() % 4;
		instance in = random_instance(rng, na, nb, 1 + (int)(rng() % 2));
		double te = oracle::enumerate_tiny(in);
		double ts = oracle::solve_ssp(in, 1 << 20).cost;
		CHECK(ts == Catch::Approx(te).epsilon(1e-9).margin(1e-9));
	}
}
