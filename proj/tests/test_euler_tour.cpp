#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <random>
#include <set>

#include "dynot/euler_tour.hpp"

using namespace dynot;
using namespace dynot::ett;

namespace {

struct kindof {
	std::uint32_t t, h;
};
std::vector<kindof> kinds(const pool &p, const tour &t) {
	std::vector<kindof> out;
	for (elem_id e : to_vector(p, t)) out.push_back({p.at(e).tail, p.at(e).head});
	return out;
}

// multiset of (tail, head) pairs, for comparisons up to rotation
std::multiset<std::pair<std::uint32_t, std::uint32_t>> pairs(const pool &p, const tour &t) {
	std::multiset<std::pair<std::uint32_t, std::uint32_t>> out;
	for (elem_id e : to_vector(p, t)) out.insert({p.at(e).tail, p.at(e).head});
	return out;
}

} // namespace

TEST_CASE("tour construction") {
	SECTION("single vertex") {
		pool p;
		basis_tree tree(1);
		tour t = build_from_tree(p, tree, {0});
		REQUIRE(t.size == 1);
		CHECK(p.at(t.head).self_loop());
		CHECK(valid_euler_tour(p, t));
	}
	SECTION("one edge") {
		pool p;
		basis_tree tree(2);
		tree.add_edge(0, 1, 1.0);
		tour t = build_from_tree(p, tree, {0, 1});
		REQUIRE(t.size == 4);
		auto ks = kinds(p, t);
		CHECK(ks[0].t == 0);
		CHECK(ks[0].h == 0);
		CHECK(ks[1].t == 0);
		CHECK(ks[1].h == 1);
		CHECK(ks[2].t == 1);
		CHECK(ks[2].h == 1);
		CHECK(ks[3].t == 1);
		CHECK(ks[3].h == 0);
		CHECK(valid_euler_tour(p, t));
	}
	SECTION("path on three vertices") {
		pool p;
		basis_tree tree(3);
		tree.add_edge(0, 1, 1.0);
		tree.add_edge(2, 1, 1.0);
		tour t = build_from_tree(p, tree, {0, 1, 2});
		REQUIRE(t.size == 7);
		CHECK(valid_euler_tour(p, t));
		std::map<std::pair<std::uint32_t, std::uint32_t>, int> seen;
		for (auto [a, b] : pairs(p, t)) ++seen[{a, b}];
		CHECK(seen[{0, 0}] == 1);
		CHECK(seen[{1, 1}] == 1);
		CHECK(seen[{2, 2}] == 1);
		CHECK(seen[{0, 1}] == 1);
		CHECK(seen[{1, 0}] == 1);
		CHECK(seen[{1, 2}] == 1);
		CHECK(seen[{2, 1}] == 1);
	}
	SECTION("disconnected input is rejected") {
		pool p;
		basis_tree tree(3);
		tree.add_edge(0, 1, 1.0);
		CHECK_THROWS_AS(build_from_tree(p, tree, {0, 1, 2}), error);
	}
}

TEST_CASE("tour cut") {
	SECTION("two vertices") {
		pool p;
		basis_tree tree(2);
		tree.add_edge(0, 1, 1.0);
		tour t = build_from_tree(p, tree, {0, 1});
		auto [t1, t2] = cut_tour(p, t, 0, 1);
		REQUIRE(t1.size == 1);
		REQUIRE(t2.size == 1);
		CHECK(p.at(t1.head).tail == 0);
		CHECK(p.at(t2.head).tail == 1);
	}
	SECTION("path split sizes") {
		pool p;
		basis_tree tree(3);
		tree.add_edge(0, 1, 1.0);
		tree.add_edge(2, 1, 1.0);
		tour t = build_from_tree(p, tree, {0, 1, 2});
		auto [t1, t2] = cut_tour(p, t, 0, 1);
		CHECK(t1.size == 1);
		CHECK(t2.size == 4);
		CHECK(valid_euler_tour(p, t1));
		CHECK(valid_euler_tour(p, t2));
	}
	SECTION("absent edge") {
		pool p;
		basis_tree tree(3);
		tree.add_edge(0, 1, 1.0);
		tree.add_edge(2, 1, 1.0);
		tour t = build_from_tree(p, tree, {0, 1, 2});
		CHECK_THROWS_AS(cut_tour(p, t, 0, 2), error);
	}
}

TEST_CASE("tour link") {
	SECTION("two singletons") {
		pool p;
		elem_id sa = p.make_self(0), sb = p.make_self(1);
		p.at(sa).succ = p.at(sa).pred = sa;
		p.at(sb).succ = p.at(sb).pred = sb;
		tour t = link_tours(p, tour{sa, 1}, tour{sb, 1}, 0, 1);
		REQUIRE(t.size == 4);
		auto ks = kinds(p, t);
		CHECK(ks[0].t == 0);
		CHECK(ks[0].h == 0);
		CHECK(ks[1].h == 1);
		CHECK(ks[2].t == 1);
		CHECK(ks[3].h == 0);
		CHECK(valid_euler_tour(p, t));
	}
	SECTION("link then cut restores the pair") {
		pool p;
		basis_tree ta(2), tb(4);
		ta.add_edge(0, 1, 1.0);
		tb.add_edge(2, 3, 1.0);
		tour t1 = build_from_tree(p, ta, {0, 1});
		tour t2 = build_from_tree(p, tb, {2, 3});
		auto before1 = pairs(p, t1), before2 = pairs(p, t2);
		tour linked = link_tours(p, t1, t2, 1, 2);
		CHECK(linked.size == 10); // two 4-element tours -> 3*4-2
		CHECK(valid_euler_tour(p, linked));
		auto [c1, c2] = cut_tour(p, linked, 1, 2);
		CHECK(pairs(p, c1) == before1);
		CHECK(pairs(p, c2) == before2);
		CHECK(valid_euler_tour(p, c1));
		CHECK(valid_euler_tour(p, c2));
	}
	SECTION("same tour is rejected") {
		pool p;
		basis_tree tree(2);
		tree.add_edge(0, 1, 1.0);
		tour t = build_from_tree(p, tree, {0, 1});
		CHECK_THROWS_AS(link_tours(p, t, t, 0, 1), error);
	}
}

TEST_CASE("tour range") {
	pool p;
	basis_tree tree(2);
	tree.add_edge(0, 1, 1.0);
	tour t = build_from_tree(p, tree, {0, 1});
	auto seq = to_vector(p, t);
	SECTION("single element") {
		auto r = tour_range(p, t, seq[2], seq[2]);
		REQUIRE(r.size() == 1);
		CHECK(r[0] == seq[2]);
	}
	SECTION("full cycle") {
		auto r = tour_range(p, t, seq[1], seq[0]);
		CHECK(r.size() == t.size);
	}
	SECTION("arc to self-loop") {
		auto r = tour_range(p, t, seq[1], seq[2]);
		REQUIRE(r.size() == 2);
		CHECK(p.at(r[0]).tail == 0);
		CHECK(p.at(r[0]).head == 1);
		CHECK(p.at(r[1]).self_loop());
	}
	SECTION("absent element") {
		pool q;
		basis_tree other(2);
		other.add_edge(0, 1, 1.0);
		tour t2 = build_from_tree(q, other, {0, 1});
		CHECK_THROWS_AS(tour_range(p, t, seq[0], t2.head == seq[0] ? 999 : t2.head), error);
	}
}

TEST_CASE("random cut/link churn keeps a valid tour") {
	std::mt19937_64 rng(123);
	const std::uint32_t n = 12;
	pool p;
	basis_tree tree(n);
	std::vector<std::uint32_t> verts(n);
	for (std::uint32_t i = 0; i < n; ++i) verts[i] = i;
	for (std::uint32_t i = 1; i < n; ++i) tree.add_edge(i, rng() % i, 1.0);
	tour t = build_from_tree(p, tree, verts);

	for (int step = 0; step < 200; ++step) {
		// pick a random tree edge, cut it, then relink the two components
		std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
		tree.for_each_edge([&](std::uint32_t, const basis_tree::edge &e) { edges.push_back({e.supply, e.demand}); });
		auto [u, v] = edges[rng() % edges.size()];
		std::uint32_t e = tree.find_edge(u, v);
		tree.remove_edge(e);
		auto [t1, t2] = cut_tour(p, t, u, v);
		CHECK(t1.size + t2.size == t.size - 2);
		CHECK(valid_euler_tour(p, t1));
		CHECK(valid_euler_tour(p, t2));
		// relink at a random vertex pair across the two components
		auto vs1 = to_vector(p, t1), vs2 = to_vector(p, t2);
		std::vector<std::uint32_t> c1, c2;
		for (elem_id x : vs1)
			if (p.at(x).self_loop()) c1.push_back(p.at(x).tail);
		for (elem_id x : vs2)
			if (p.at(x).self_loop()) c2.push_back(p.at(x).tail);
		std::uint32_t a = c1[rng() % c1.size()], b = c2[rng() % c2.size()];
		tree.add_edge(a, b, 1.0);
		t = link_tours(p, t1, t2, a, b);
		REQUIRE(t.size == 3 * n - 2);
		REQUIRE(valid_euler_tour(p, t));
		// element multiset must match a fresh build of the same tree
		pool fresh;
		tour ft = build_from_tree(fresh, tree, verts);
		CHECK(pairs(p, t) == pairs(fresh, ft));
	}
}
