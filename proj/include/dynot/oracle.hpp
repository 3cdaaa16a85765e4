#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "euler_tour.hpp"
#include "model.hpp"

namespace dynot::oracle {

// Dense eager mirror of one grid piece, for differential testing.  Cells are
// keyed by tour element ids; row/col orders follow the piece's tours.
struct dense_shadow {
	std::vector<ett::elem_id> rows, cols;
	std::vector<double> val; // rows.size() x cols.size()

	std::size_t rpos(ett::elem_id r) const {
		for (std::size_t i = 0; i < rows.size(); ++i)
			if (rows[i] == r) return i;
		throw error(errc::element_not_found, "shadow row");
	}
	std::size_t cpos(ett::elem_id c) const {
		for (std::size_t i = 0; i < cols.size(); ++i)
			if (cols[i] == c) return i;
		throw error(errc::element_not_found, "shadow col");
	}
	double &at(ett::elem_id r, ett::elem_id c) { return val[rpos(r) * cols.size() + cpos(c)]; }
	double get(ett::elem_id r, ett::elem_id c) const { return val[rpos(r) * cols.size() + cpos(c)]; }

	template <class F> static dense_shadow build(const std::vector<ett::elem_id> &order, F &&cell) {
		dense_shadow s;
		s.rows = s.cols = order;
		s.val.resize(order.size() * order.size());
		for (std::size_t i = 0; i < order.size(); ++i)
			for (std::size_t j = 0; j < order.size(); ++j) s.val[i * order.size() + j] = cell(order[i], order[j]);
		return s;
	}

	void range_add(double x) {
		for (double &v : val)
			if (v != kInf) v += x;
	}

	// Minimum with ties broken toward the smallest (row id, col id) pair.
	std::tuple<double, ett::elem_id, ett::elem_id> min() const {
		double best = kInf;
		ett::elem_id br = ett::none, bc = ett::none;
		for (std::size_t i = 0; i < rows.size(); ++i)
			for (std::size_t j = 0; j < cols.size(); ++j) {
				double v = val[i * cols.size() + j];
				if (v == kInf) continue;
				if (v < best || (v == best && (rows[i] < br || (rows[i] == br && cols[j] < bc)))) {
					best = v;
					br = rows[i];
					bc = cols[j];
				}
			}
		return {best, br, bc};
	}

	// Splits along the removed arc lines; piece order (11, 12, 21, 22) with
	// run1 rows first.  run1/run2 are the element orders of the two tours.
	std::array<dense_shadow, 4> cut(const std::vector<ett::elem_id> &run1, const std::vector<ett::elem_id> &run2) const {
		auto sub = [&](const std::vector<ett::elem_id> &rs, const std::vector<ett::elem_id> &cs) {
			dense_shadow s;
			s.rows = rs;
			s.cols = cs;
			s.val.resize(rs.size() * cs.size());
			for (std::size_t i = 0; i < rs.size(); ++i)
				for (std::size_t j = 0; j < cs.size(); ++j) s.val[i * cs.size() + j] = get(rs[i], cs[j]);
			return s;
		};
		return {sub(run1, run1), sub(run1, run2), sub(run2, run1), sub(run2, run2)};
	}

	// Reassembles four pieces in the merged element order, with the two new
	// arc lines filled with `fill`.
	static dense_shadow link(const dense_shadow &p11, const dense_shadow &p12, const dense_shadow &p21,
	                         const dense_shadow &p22, const std::vector<ett::elem_id> &merged, ett::elem_id e1,
	                         ett::elem_id e2, double fill) {
		dense_shadow s;
		s.rows = s.cols = merged;
		s.val.assign(merged.size() * merged.size(), fill);
		auto put = [&](const dense_shadow &p) {
			for (std::size_t i = 0; i < p.rows.size(); ++i)
				for (std::size_t j = 0; j < p.cols.size(); ++j) s.at(p.rows[i], p.cols[j]) = p.val[i * p.cols.size() + j];
		};
		put(p11);
		put(p12);
		put(p21);
		put(p22);
		(void)e1;
		(void)e2;
		return s;
	}

	template <class FR, class FC> void refresh_line(ett::elem_id e, FR &&row_val, FC &&col_val) {
		std::size_t i = rpos(e);
		for (std::size_t j = 0; j < cols.size(); ++j) val[i * cols.size() + j] = row_val(cols[j]);
		std::size_t jj = cpos(e);
		for (std::size_t r = 0; r < rows.size(); ++r) val[r * cols.size() + jj] = col_val(rows[r]);
		val[i * cols.size() + jj] = row_val(e);
	}

	template <class F> dense_shadow inserted(ett::elem_id sv, F &&cell, int which) const {
		// which: 1 -> rows x {sv}; 2 -> {sv} x cols; 3 -> {sv} x {sv}
		dense_shadow s;
		if (which == 1) {
			s.rows = rows;
			s.cols = {sv};
			s.val.resize(rows.size());
			for (std::size_t i = 0; i < rows.size(); ++i) s.val[i] = cell(rows[i], sv);
		} else if (which == 2) {
			s.rows = {sv};
			s.cols = cols;
			s.val.resize(cols.size());
			for (std::size_t j = 0; j < cols.size(); ++j) s.val[j] = cell(sv, cols[j]);
		} else {
			s.rows = s.cols = {sv};
			s.val = {cell(sv, sv)};
		}
		return s;
	}
};

// Exhaustive ground truth for tiny instances: enumerates every bipartite
// spanning tree, solves its unique flow, and keeps the best feasible cost.
inline double enumerate_tiny(const instance &in) {
	std::vector<std::uint32_t> A, B;
	for (std::uint32_t i = 0; i < in.size(); ++i)
		(in.side(i) == side_t::supply ? A : B).push_back(i);
	if (A.size() > 4 || B.size() > 4) throw error(errc::too_large, "enumerate_tiny handles up to 4x4");
	if (!check_balance(in)) throw error(errc::unbalanced, "weights do not balance");
	if (A.empty() || B.empty()) return 0.0;

	const std::size_t m = A.size() * B.size(), want = A.size() + B.size() - 1;
	std::vector<std::uint32_t> pick;
	double best = kInf;

	std::vector<int> deg(in.size());
	std::vector<double> rem(in.size());
	auto try_tree = [&]() {
		// leaf elimination solves the unique flows of this candidate basis
		std::fill(deg.begin(), deg.end(), 0);
		for (std::uint32_t i = 0; i < in.size(); ++i) rem[i] = in.weight(i);
		std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
		for (std::uint32_t e : pick) edges.push_back({A[e / B.size()], B[e % B.size()]});
		for (auto [a, b] : edges) ++deg[a], ++deg[b];
		std::vector<char> used(edges.size(), 0);
		double cost = 0;
		for (std::size_t round = 0; round < edges.size(); ++round) {
			std::size_t leaf_edge = edges.size();
			for (std::size_t e = 0; e < edges.size(); ++e)
				if (!used[e] && (deg[edges[e].first] == 1 || deg[edges[e].second] == 1)) { leaf_edge = e; break; }
			if (leaf_edge == edges.size()) return; // cycle: not a tree
			auto [a, b] = edges[leaf_edge];
			std::uint32_t leaf = deg[a] == 1 ? a : b;
			double x = leaf == a ? rem[a] : -rem[b];
			if (x < -1e-9) return; // infeasible flow
			cost += in.finite_cost(a, b) * std::max(x, 0.0);
			rem[a] -= x;
			rem[b] += x;
			used[leaf_edge] = 1;
			--deg[a], --deg[b];
		}
		for (std::uint32_t i = 0; i < in.size(); ++i)
			if (std::abs(rem[i]) > 1e-7) return;
		best = std::min(best, cost);
	};

	// all edge subsets of size |A|+|B|-1
	std::vector<std::uint32_t> idx(want);
	std::iota(idx.begin(), idx.end(), 0);
	if (want > m) throw error(errc::internal_invariant_violation, "tree larger than edge set");
	while (true) {
		pick.assign(idx.begin(), idx.end());
		try_tree();
		// next combination
		std::size_t i = want;
		while (i > 0 && idx[i - 1] == m - (want - (i - 1))) --i;
		if (i == 0) break;
		++idx[i - 1];
		for (std::size_t j = i; j < want; ++j) idx[j] = idx[j - 1] + 1;
	}
	return best;
}

struct ssp_result {
	transport_plan plan;
	double cost = 0;
};

// Successive shortest paths with node potentials on the bipartite graph.
// Weights are scaled to integers at the given resolution; the result is the
// exact optimum of the scaled instance.
inline ssp_result solve_ssp(const instance &in, double resolution = 1e6) {
	if (!check_balance(in)) throw error(errc::unbalanced, "weights do not balance");
	const std::uint32_t n = (std::uint32_t)in.size();
	std::vector<std::uint32_t> A, B;
	for (std::uint32_t i = 0; i < n; ++i)
		(in.side(i) == side_t::supply ? A : B).push_back(i);
	ssp_result out;
	if (A.empty() || B.empty()) return out;

	std::vector<long long> rem(n);
	long long drift = 0;
	for (std::uint32_t i = 0; i < n; ++i) {
		rem[i] = (long long)std::llround(in.weight(i) * resolution);
		drift += rem[i];
	}
	// absorb rounding drift into the heaviest supply
	std::uint32_t heavy = A[0];
	for (std::uint32_t a : A)
		if (rem[a] > rem[heavy]) heavy = a;
	rem[heavy] -= drift;

	const std::size_t na = A.size(), nb = B.size();
	std::vector<double> cost(na * nb);
	for (std::size_t i = 0; i < na; ++i)
		for (std::size_t j = 0; j < nb; ++j) cost[i * nb + j] = in.finite_cost(A[i], B[j]);
	std::vector<long long> flow(na * nb, 0);
	std::vector<double> pi(na + nb, 0); // potentials: supplies then demands

	// clamped at zero so rounding noise cannot produce negative arcs
	auto reduced = [&](std::size_t i, std::size_t j) { return std::max(cost[i * nb + j] - pi[i] + pi[na + j], 0.0); };

	while (true) {
		long long pending = 0;
		for (std::uint32_t a : A) pending += std::max(rem[a], 0LL);
		if (pending == 0) break;

		// dense Dijkstra from all supplies with remaining weight
		const double unreached = kInf;
		const std::int64_t no_pred = std::numeric_limits<std::int64_t>::min();
		std::vector<double> dist(na + nb, unreached);
		std::vector<std::int64_t> from(na + nb, no_pred); // i*nb+j forward, -(i*nb+j)-1 backward
		std::vector<char> done(na + nb, 0);
		for (std::size_t i = 0; i < na; ++i)
			if (rem[A[i]] > 0) dist[i] = 0;
		for (std::size_t it = 0; it < na + nb; ++it) {
			std::size_t u = na + nb;
			for (std::size_t k = 0; k < na + nb; ++k)
				if (!done[k] && dist[k] < unreached && (u == na + nb || dist[k] < dist[u])) u = k;
			if (u == na + nb) break;
			done[u] = 1;
			if (u < na) {
				for (std::size_t j = 0; j < nb; ++j) {
					double d = dist[u] + reduced(u, j);
					if (!done[na + j] && d < dist[na + j]) { dist[na + j] = d; from[na + j] = (std::int64_t)(u * nb + j); }
				}
			} else {
				std::size_t j = u - na;
				for (std::size_t i = 0; i < na; ++i)
					if (flow[i * nb + j] > 0) {
						double d = dist[u] - reduced(i, j);
						if (!done[i] && d < dist[i]) { dist[i] = d; from[i] = -(std::int64_t)(i * nb + j) - 1; }
					}
			}
		}
		// nearest demand with unmet need
		std::size_t tgt = na + nb;
		for (std::size_t j = 0; j < nb; ++j)
			if (rem[B[j]] < 0 && dist[na + j] < unreached && (tgt == na + nb || dist[na + j] < dist[tgt]))
				tgt = na + j;
		if (tgt == na + nb) throw error(errc::internal_invariant_violation, "no augmenting path");

		// bottleneck along the path
		long long theta = -rem[B[tgt - na]];
		std::size_t cur = tgt;
		while (true) {
			std::int64_t e = from[cur];
			if (e >= 0) {
				std::size_t i = (std::size_t)e / nb;
				cur = i;
				if (from[cur] == no_pred) { theta = std::min(theta, rem[A[i]]); break; }
			} else {
				std::size_t idx = (std::size_t)(-e - 1);
				theta = std::min(theta, flow[idx]);
				cur = na + idx % nb;
			}
		}
		// apply
		cur = tgt;
		while (true) {
			std::int64_t e = from[cur];
			if (e >= 0) {
				std::size_t idx = (std::size_t)e;
				flow[idx] += theta;
				cur = idx / nb;
				if (from[cur] == no_pred) break;
			} else {
				std::size_t idx = (std::size_t)(-e - 1);
				flow[idx] -= theta;
				cur = na + idx % nb;
			}
		}
		rem[A[cur]] -= theta;
		rem[B[tgt - na]] += theta;
		// potential update keeps reduced costs nonnegative; capping at the
		// target distance also covers arcs into unreached nodes
		for (std::size_t k = 0; k < na + nb; ++k)
			if (dist[k] < unreached) pi[k] -= std::min(dist[k], dist[tgt]);
	}

	for (std::size_t i = 0; i < na; ++i)
		for (std::size_t j = 0; j < nb; ++j)
			if (flow[i * nb + j] > 0) {
				double x = (double)flow[i * nb + j] / resolution;
				out.plan.entries[{A[i], B[j]}] = x;
				out.cost += cost[i * nb + j] * x;
			}
	return out;
}

} // namespace dynot::oracle
