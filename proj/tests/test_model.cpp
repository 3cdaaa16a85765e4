#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "dynot/model.hpp"
#include "dynot/oracle.hpp"

using namespace dynot;

static instance canonical_2x2() {
	// alpha=(0.6,0.4), beta=(0.5,0.5), C=[[0,1],[1,0]]
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

TEST_CASE("cost oracle directions") {
	instance in(cost_kind::sqeuclidean, 1);
	auto u = in.add_node(side_t::supply, {0.0}, 1.0);
	auto v = in.add_node(side_t::demand, {2.0}, -1.0);
	CHECK(in.cost(u, v) == ext_scalar(4.0));
	CHECK(!in.cost(v, u).finite());
	CHECK(!in.cost(u, u).finite());
	CHECK(!in.cost(v, v).finite());

	instance bad(cost_kind::sqeuclidean, 2);
	CHECK_THROWS_AS(bad.add_node(side_t::supply, {0.0}, 1.0), error);
}

TEST_CASE("cost oracle is symmetric in the underlying metric") {
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> d(-3, 3);
	for (int k = 0; k < 100; ++k) {
		instance in(cost_kind::euclidean, 3);
		std::vector<double> pa{d(rng), d(rng), d(rng)}, pb{d(rng), d(rng), d(rng)};
		auto a = in.add_node(side_t::supply, pa, 1.0);
		auto b = in.add_node(side_t::demand, pb, -1.0);
		instance rev(cost_kind::euclidean, 3);
		auto b2 = rev.add_node(side_t::supply, pb, 1.0);
		auto a2 = rev.add_node(side_t::demand, pa, -1.0);
		CHECK(in.cost(a, b).v == Catch::Approx(rev.cost(b2, a2).v));
	}
}

TEST_CASE("plan cost") {
	instance in = canonical_2x2();
	SECTION("empty plan") {
		transport_plan p;
		CHECK(plan_cost(in, p) == 0.0);
	}
	SECTION("single term") {
		instance two(cost_kind::explicit_matrix, 0);
		auto a = two.add_node(side_t::supply, {}, 0.5);
		auto b = two.add_node(side_t::demand, {}, -0.5);
		two.set_explicit_cost(a, b, 2.0);
		transport_plan p;
		p.entries[{a.index, b.index}] = 0.5;
		CHECK(plan_cost(two, p) == 1.0);
	}
	SECTION("canonical optimum is 0.1") {
		transport_plan p;
		p.entries[{0, 2}] = 0.5;
		p.entries[{0, 3}] = 0.1;
		p.entries[{1, 3}] = 0.4;
		CHECK(plan_cost(in, p) == Catch::Approx(0.1));
		CHECK(oracle::enumerate_tiny(in) == Catch::Approx(0.1));
	}
	SECTION("flow on an infinite pair is rejected") {
		transport_plan p;
		p.entries[{2, 0}] = 0.1; // demand -> supply direction
		CHECK_THROWS_AS(plan_cost(in, p), error);
	}
}

TEST_CASE("plan cost is linear over disjoint supports") {
	instance in = canonical_2x2();
	transport_plan p1, p2, both;
	p1.entries[{0, 2}] = 0.5;
	p2.entries[{1, 3}] = 0.4;
	both.entries = p1.entries;
	both.entries.insert(p2.entries.begin(), p2.entries.end());
	CHECK(plan_cost(in, both) == Catch::Approx(plan_cost(in, p1) + plan_cost(in, p2)));
}

TEST_CASE("balance check") {
	instance a(cost_kind::sqeuclidean, 1);
	a.add_node(side_t::supply, {0.0}, 0.5);
	a.add_node(side_t::demand, {1.0}, -0.5);
	CHECK(check_balance(a));

	instance b(cost_kind::sqeuclidean, 1);
	b.add_node(side_t::supply, {0.0}, 0.5);
	b.add_node(side_t::demand, {1.0}, -0.4);
	CHECK(!check_balance(b));

	instance empty(cost_kind::sqeuclidean, 1);
	CHECK(check_balance(empty));
}

TEST_CASE("extended scalar arithmetic") {
	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> d(-1e6, 1e6);
	const ext_scalar inf = ext_scalar::infinity();
	for (int i = 0; i < 10000; ++i) {
		ext_scalar a(d(rng)), b(d(rng));
		CHECK(a + b == b + a);
		CHECK(min(a, b) == min(b, a));
		CHECK((a + b).finite());
		CHECK(inf + a == inf);
		CHECK(a + inf == inf);
		CHECK(min(inf, a) == a);
		CHECK(min(a, inf) == a);
	}
	CHECK(inf + inf == inf);
	CHECK(min(inf, inf) == inf);
}
