#pragma once
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ext_scalar.hpp"

namespace dynot {

enum class errc {
	invalid_instance,
	infeasible_plan,
	unbalanced,
	not_a_tree,
	edge_not_found,
	would_create_cycle,
	element_not_found,
	duplicate_node,
	shape_mismatch,
	node_pooled,
	weight_sign_violation,
	weight_not_zero,
	iteration_cap_exceeded,
	too_large,
	internal_invariant_violation,
};

struct error : std::runtime_error {
	errc code;
	error(errc c, const std::string &what) : std::runtime_error(what), code(c) {}
};

enum class side_t : std::uint8_t { supply, demand };

struct node_id {
	std::uint32_t index = 0;
	side_t side = side_t::supply;
	friend bool operator==(node_id a, node_id b) { return a.index == b.index; }
	friend auto operator<=>(node_id a, node_id b) { return a.index <=> b.index; }
};

constexpr double eps_bal = 1e-9;
constexpr double eps_flow = 1e-9;
constexpr double eps_dual = 1e-9;

enum class cost_kind : std::uint8_t { sqeuclidean, euclidean, explicit_matrix };

// Supply/demand points with signed weights (supplies positive, demands
// negative) and a pairwise cost oracle.  Directions other than supply->demand
// and self-pairs cost +infinity, which keeps them out of every minimum.
class instance {
public:
	instance() = default;

	instance(cost_kind kind, int dim) : kind_(kind), dim_(dim) {}

	// Builds from the (alpha, beta) convention: weights come in nonnegative
	// and demands are negated internally.
	static instance from_sides(cost_kind kind, int dim,
	                           const std::vector<std::vector<double>> &supply_pts, const std::vector<double> &alpha,
	                           const std::vector<std::vector<double>> &demand_pts, const std::vector<double> &beta) {
		if (supply_pts.size() != alpha.size() || demand_pts.size() != beta.size())
			throw error(errc::invalid_instance, "points/weights size mismatch");
		instance in(kind, dim);
		for (std::size_t i = 0; i < alpha.size(); ++i) in.add_node(side_t::supply, supply_pts[i], alpha[i]);
		for (std::size_t j = 0; j < beta.size(); ++j) in.add_node(side_t::demand, demand_pts[j], -beta[j]);
		return in;
	}

	node_id add_node(side_t side, const std::vector<double> &coords, double signed_weight) {
		if (kind_ != cost_kind::explicit_matrix && (int)coords.size() != dim_)
			throw error(errc::invalid_instance, "coordinate dimension mismatch");
		node_id id{(std::uint32_t)sides_.size(), side};
		sides_.push_back(side);
		weights_.push_back(signed_weight);
		points_.push_back(coords);
		return id;
	}

	// Explicit cost entry for a supply->demand pair; every other direction is
	// implied infinite and must not be supplied.
	void set_explicit_cost(node_id u, node_id v, double c) {
		if (kind_ != cost_kind::explicit_matrix) throw error(errc::invalid_instance, "not an explicit-cost instance");
		if (sides_[u.index] != side_t::supply || sides_[v.index] != side_t::demand)
			throw error(errc::invalid_instance, "explicit cost on an infinite direction");
		explicit_.emplace((std::uint64_t)u.index << 32 | v.index, c);
	}

	std::size_t size() const { return sides_.size(); }
	int dim() const { return dim_; }
	cost_kind kind() const { return kind_; }
	side_t side(std::uint32_t i) const { return sides_[i]; }
	double weight(std::uint32_t i) const { return weights_[i]; }
	void set_weight(std::uint32_t i, double w) { weights_[i] = w; }
	const std::vector<double> &point(std::uint32_t i) const { return points_[i]; }
	void set_point(std::uint32_t i, const std::vector<double> &p) {
		if (kind_ != cost_kind::explicit_matrix && (int)p.size() != dim_)
			throw error(errc::invalid_instance, "coordinate dimension mismatch");
		points_[i] = p;
	}

	node_id id(std::uint32_t i) const { return node_id{i, sides_[i]}; }

	ext_scalar cost(node_id u, node_id v) const {
		if (u.index == v.index) return ext_scalar::infinity();
		if (sides_[u.index] != side_t::supply || sides_[v.index] != side_t::demand) return ext_scalar::infinity();
		return ext_scalar(finite_cost(u.index, v.index));
	}

	// Finite supply->demand cost; callers must respect direction.
	double finite_cost(std::uint32_t u, std::uint32_t v) const {
		switch (kind_) {
		case cost_kind::explicit_matrix: {
			auto it = explicit_.find((std::uint64_t)u << 32 | v);
			if (it == explicit_.end()) throw error(errc::invalid_instance, "missing explicit cost entry");
			return it->second;
		}
		case cost_kind::sqeuclidean: {
			const auto &a = points_[u], &b = points_[v];
			if (a.size() != b.size()) throw error(errc::invalid_instance, "coordinate dimension mismatch");
			double s = 0;
			for (std::size_t k = 0; k < a.size(); ++k) { double d = a[k] - b[k]; s += d * d; }
			return s;
		}
		case cost_kind::euclidean: {
			const auto &a = points_[u], &b = points_[v];
			if (a.size() != b.size()) throw error(errc::invalid_instance, "coordinate dimension mismatch");
			double s = 0;
			for (std::size_t k = 0; k < a.size(); ++k) { double d = a[k] - b[k]; s += d * d; }
			return std::sqrt(s);
		}
		}
		return 0;
	}

	double weight_sum() const {
		double s = 0;
		for (double w : weights_) s += w;
		return s;
	}

private:
	cost_kind kind_ = cost_kind::sqeuclidean;
	int dim_ = 0;
	std::vector<side_t> sides_;
	std::vector<double> weights_;
	std::vector<std::vector<double>> points_;
	std::map<std::uint64_t, double> explicit_;
};

inline bool check_balance(const instance &in) { return std::abs(in.weight_sum()) <= eps_bal; }

struct transport_plan {
	// (supply index, demand index) -> flow > 0
	std::map<std::pair<std::uint32_t, std::uint32_t>, double> entries;
};

inline double plan_cost(const instance &in, const transport_plan &plan) {
	double total = 0;
	for (const auto &[key, x] : plan.entries) {
		ext_scalar c = in.cost(in.id(key.first), in.id(key.second));
		if (!c.finite()) throw error(errc::infeasible_plan, "flow on an infinite-cost pair");
		total += c.v * x;
	}
	return total;
}

struct dual_potential {
	std::vector<double> pi;
};

// Spanning tree of basic variables.  Every edge joins a supply node to a
// demand node and carries a nonnegative flow.
class basis_tree {
public:
	struct edge {
		std::uint32_t supply, demand;
		double flow;
	};

	explicit basis_tree(std::size_t n = 0) : adj_(n) {}

	void ensure_node(std::uint32_t i) {
		if (i >= adj_.size()) adj_.resize(i + 1);
	}

	std::size_t node_count() const { return adj_.size(); }
	std::size_t edge_count() const { return edges_.size() - free_.size(); }

	std::uint32_t add_edge(std::uint32_t supply, std::uint32_t demand, double flow) {
		ensure_node(std::max(supply, demand));
		std::uint32_t e;
		if (!free_.empty()) {
			e = free_.back();
			free_.pop_back();
			edges_[e] = {supply, demand, flow};
		} else {
			e = (std::uint32_t)edges_.size();
			edges_.push_back({supply, demand, flow});
		}
		adj_[supply].push_back(e);
		adj_[demand].push_back(e);
		return e;
	}

	void remove_edge(std::uint32_t e) {
		detach(edges_[e].supply, e);
		detach(edges_[e].demand, e);
		free_.push_back(e);
	}

	const edge &at(std::uint32_t e) const { return edges_[e]; }
	edge &at(std::uint32_t e) { return edges_[e]; }

	const std::vector<std::uint32_t> &incident(std::uint32_t node) const { return adj_[node]; }

	std::uint32_t find_edge(std::uint32_t u, std::uint32_t v) const {
		for (std::uint32_t e : adj_[u]) {
			const edge &ed = edges_[e];
			if ((ed.supply == u && ed.demand == v) || (ed.supply == v && ed.demand == u)) return e;
		}
		throw error(errc::edge_not_found, "basis edge not found");
	}

	std::uint32_t other(std::uint32_t e, std::uint32_t node) const {
		const edge &ed = edges_[e];
		return ed.supply == node ? ed.demand : ed.supply;
	}

	template <class F> void for_each_edge(F &&f) const {
		std::vector<char> freed(edges_.size(), 0);
		for (std::uint32_t e : free_) freed[e] = 1;
		for (std::uint32_t e = 0; e < edges_.size(); ++e)
			if (!freed[e]) f(e, edges_[e]);
	}

private:
	void detach(std::uint32_t node, std::uint32_t e) {
		auto &lst = adj_[node];
		for (std::size_t i = 0; i < lst.size(); ++i)
			if (lst[i] == e) {
				lst[i] = lst.back();
				lst.pop_back();
				return;
			}
		throw error(errc::internal_invariant_violation, "edge missing from adjacency");
	}

	std::vector<edge> edges_;
	std::vector<std::uint32_t> free_;
	std::vector<std::vector<std::uint32_t>> adj_;
};

} // namespace dynot
