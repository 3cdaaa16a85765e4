#pragma once
#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "model.hpp"

namespace dynot::ett {

using elem_id = std::uint32_t;
constexpr elem_id none = ~std::uint32_t(0);

// One element of an Euler tour: the self-loop (v,v) or a directed arc (u,v).
// Elements live in a pool shared by all tours of one solver; ids are assigned
// in creation order and never reused, so they double as a stable total order.
struct element {
	elem_id succ = none, pred = none;
	std::uint32_t tail = 0, head = 0; // arc tail->head; self-loop has tail == head
	std::int16_t height = -1;         // managed by the grid layer; -1 = not drawn yet
	std::uint8_t mark = 0;            // scratch for structure surgery
	bool self_loop() const { return tail == head; }
};

class pool {
public:
	elem_id make_self(std::uint32_t v) {
		if (v < self_.size() && self_[v] != none) throw error(errc::duplicate_node, "self-loop already exists");
		if (v >= self_.size()) self_.resize(v + 1, none);
		elem_id e = alloc(v, v);
		self_[v] = e;
		return e;
	}

	elem_id make_arc(std::uint32_t u, std::uint32_t v) {
		auto key = arc_key(u, v);
		if (arcs_.count(key)) throw error(errc::internal_invariant_violation, "arc already exists");
		elem_id e = alloc(u, v);
		arcs_.emplace(key, e);
		return e;
	}

	void retire_arc(elem_id e) {
		arcs_.erase(arc_key(elems_[e].tail, elems_[e].head));
		elems_[e].succ = elems_[e].pred = none;
	}

	elem_id self_of(std::uint32_t v) const {
		if (v >= self_.size() || self_[v] == none) throw error(errc::element_not_found, "no self-loop for vertex");
		return self_[v];
	}
	elem_id arc(std::uint32_t u, std::uint32_t v) const {
		auto it = arcs_.find(arc_key(u, v));
		if (it == arcs_.end()) throw error(errc::edge_not_found, "arc not present");
		return it->second;
	}
	bool has_arc(std::uint32_t u, std::uint32_t v) const { return arcs_.count(arc_key(u, v)) != 0; }

	element &at(elem_id e) { return elems_[e]; }
	const element &at(elem_id e) const { return elems_[e]; }
	std::size_t capacity() const { return elems_.size(); }

	elem_id succ(elem_id e) const { return elems_[e].succ; }
	elem_id pred(elem_id e) const { return elems_[e].pred; }

private:
	static std::uint64_t arc_key(std::uint32_t u, std::uint32_t v) { return (std::uint64_t)u << 32 | v; }

	elem_id alloc(std::uint32_t t, std::uint32_t h) {
		elem_id e = (std::uint32_t)elems_.size();
		elems_.push_back(element{});
		elems_[e].tail = t;
		elems_[e].head = h;
		return e;
	}

	std::vector<element> elems_;
	std::vector<elem_id> self_;
	std::unordered_map<std::uint64_t, elem_id> arcs_;
};

// Lightweight view of one circular tour inside a pool.
struct tour {
	elem_id head = none;
	std::uint32_t size = 0;
	bool empty() const { return size == 0; }
};

inline std::vector<elem_id> to_vector(const pool &p, const tour &t) {
	std::vector<elem_id> out;
	out.reserve(t.size);
	elem_id e = t.head;
	for (std::uint32_t i = 0; i < t.size; ++i, e = p.succ(e)) out.push_back(e);
	return out;
}

inline bool contains(const pool &p, const tour &t, elem_id x) {
	elem_id e = t.head;
	for (std::uint32_t i = 0; i < t.size; ++i, e = p.succ(e))
		if (e == x) return true;
	return false;
}

// Deterministic tour construction: DFS from the lowest-id vertex with
// neighbours visited in increasing vertex order.
inline tour build_from_tree(pool &p, const basis_tree &tree, const std::vector<std::uint32_t> &vertices) {
	if (vertices.empty()) return tour{};
	std::vector<std::uint32_t> order(vertices);
	std::sort(order.begin(), order.end());

	std::vector<elem_id> seq;
	seq.reserve(3 * order.size());
	std::vector<char> seen(tree.node_count(), 0);
	// iterative DFS emitting self-loop on entry and arcs around each subtree
	struct frame {
		std::uint32_t v;
		std::vector<std::uint32_t> nbr;
		std::size_t i;
	};
	std::vector<frame> stack;
	std::uint32_t root = order.front();
	auto sorted_nbrs = [&](std::uint32_t v) {
		std::vector<std::uint32_t> ns;
		for (std::uint32_t e : tree.incident(v)) ns.push_back(tree.other(e, v));
		std::sort(ns.begin(), ns.end());
		return ns;
	};
	seen[root] = 1;
	seq.push_back(p.make_self(root));
	stack.push_back({root, sorted_nbrs(root), 0});
	std::size_t visited = 1;
	while (!stack.empty()) {
		frame &f = stack.back();
		if (f.i == f.nbr.size()) {
			std::uint32_t v = f.v;
			stack.pop_back();
			if (!stack.empty()) seq.push_back(p.make_arc(v, stack.back().v));
			continue;
		}
		std::uint32_t w = f.nbr[f.i++];
		if (seen[w]) continue;
		seen[w] = 1;
		++visited;
		seq.push_back(p.make_arc(f.v, w));
		seq.push_back(p.make_self(w));
		stack.push_back({w, sorted_nbrs(w), 0});
	}
	if (visited != order.size()) throw error(errc::not_a_tree, "tree does not span the given vertices");

	for (std::size_t i = 0; i < seq.size(); ++i) {
		p.at(seq[i]).succ = seq[(i + 1) % seq.size()];
		p.at(seq[(i + 1) % seq.size()]).pred = seq[i];
	}
	return tour{seq.front(), (std::uint32_t)seq.size()};
}

// Removes Arc(u,v) and Arc(v,u); returns the tours of the components
// containing u and v, in that order.
inline std::pair<tour, tour> cut_tour(pool &p, const tour &t, std::uint32_t u, std::uint32_t v) {
	elem_id e1 = p.arc(u, v), e2 = p.arc(v, u);
	elem_id a = p.pred(e1), b = p.succ(e1);
	elem_id c = p.pred(e2), d = p.succ(e2);
	// run2 = b..c holds v's component, run1 = d..a holds u's
	std::uint32_t run2 = 1;
	for (elem_id e = b; e != c; e = p.succ(e)) ++run2;
	p.at(a).succ = d;
	p.at(d).pred = a;
	p.at(c).succ = b;
	p.at(b).pred = c;
	p.retire_arc(e1);
	p.retire_arc(e2);
	tour t2{b, run2};
	tour t1{d, t.size - 2 - run2};
	return {t1, t2};
}

// Splice with arcs the caller has already created.
inline tour link_tours_with(pool &p, const tour &t1, const tour &t2, elem_id e1, elem_id e2) {
	elem_id su = p.self_of(p.at(e1).tail), sv = p.self_of(p.at(e1).head);
	elem_id x = p.succ(su), ps = p.pred(sv);
	p.at(su).succ = e1;
	p.at(e1).pred = su;
	p.at(e1).succ = sv;
	p.at(sv).pred = e1;
	p.at(ps).succ = e2;
	p.at(e2).pred = ps;
	p.at(e2).succ = x;
	p.at(x).pred = e2;
	return tour{t1.head, t1.size + t2.size + 2};
}

// Splices t2 into t1 across a fresh edge {u,v}: the result reads
// [.., (u,u), (u,v), (v,v), .., pred(v,v), (v,u), succ(u,u), ..].
inline tour link_tours(pool &p, const tour &t1, const tour &t2, std::uint32_t u, std::uint32_t v) {
	if (contains(p, t1, p.self_of(v))) throw error(errc::would_create_cycle, "endpoints already connected");
	elem_id e1 = p.make_arc(u, v), e2 = p.make_arc(v, u);
	return link_tours_with(p, t1, t2, e1, e2);
}

// Inclusive cyclic range [from, to]; throws if either end is absent.
inline std::vector<elem_id> tour_range(const pool &p, const tour &t, elem_id from, elem_id to) {
	if (!contains(p, t, from) || !contains(p, t, to)) throw error(errc::element_not_found, "range end not in tour");
	std::vector<elem_id> out;
	elem_id e = from;
	for (std::uint32_t i = 0; i < t.size; ++i, e = p.succ(e)) {
		out.push_back(e);
		if (e == to) return out;
	}
	throw error(errc::internal_invariant_violation, "range walk did not terminate");
}

// Test aid: both Euler-tour invariants of a tour.
inline bool valid_euler_tour(const pool &p, const tour &t) {
	if (t.empty()) return true;
	elem_id e = t.head;
	for (std::uint32_t i = 0; i < t.size; ++i) {
		elem_id n = p.succ(e);
		if (p.pred(n) != e) return false;
		if (p.at(e).head != p.at(n).tail) return false;
		e = n;
	}
	return e == t.head;
}

} // namespace dynot::ett
