#pragma once
#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "euler_tour.hpp"
#include "ext_scalar.hpp"
#include "model.hpp"

namespace dynot::sol {

using ett::elem_id;
using node_ref = std::uint32_t;
constexpr node_ref nil = ~std::uint32_t(0);

// Level-0 cell.  `value` is the true cell value minus all pending tags on the
// cell's dominator chain.
struct bottom_node {
	double value;
	node_ref row_fwd, row_bwd, col_fwd, col_bwd;
	elem_id row, col;
};

// Level >= 1 node.  `min_value` is the minimum over all dominated bottom
// cells net of tags strictly above this node (its own tag is already folded
// in); `tag` is pending for strict descendants only.
struct upper_node {
	double min_value;
	double tag;
	node_ref row_fwd, row_bwd, col_fwd, col_bwd;
	node_ref child;
	elem_id row, col;
	elem_id min_row, min_col;
};

// Chunked arena with 32-bit handles; bulk_alloc hands out index-contiguous
// runs so grid construction can address cells arithmetically.
template <class T> class node_pool {
	static constexpr std::size_t kShift = 18, kChunk = std::size_t(1) << kShift, kMask = kChunk - 1;

public:
	T &operator[](node_ref r) { return chunks_[r >> kShift][r & kMask]; }
	const T &operator[](node_ref r) const { return chunks_[r >> kShift][r & kMask]; }

	node_ref alloc() {
		if (!free_.empty()) {
			node_ref r = free_.back();
			free_.pop_back();
			return r;
		}
		return fresh();
	}

	node_ref bulk_alloc(std::size_t n) {
		node_ref base = (node_ref)count_;
		reserve_upto(count_ + n);
		count_ += n;
		return base;
	}

	void release(node_ref r) { free_.push_back(r); }

	std::size_t live() const { return count_ - free_.size(); }

private:
	node_ref fresh() {
		reserve_upto(count_ + 1);
		return (node_ref)count_++;
	}
	void reserve_upto(std::size_t n) {
		while (chunks_.size() * kChunk < n) chunks_.push_back(std::make_unique<T[]>(kChunk));
	}

	std::vector<std::unique_ptr<T[]>> chunks_;
	std::size_t count_ = 0;
	std::vector<node_ref> free_;
};

// One rectangular piece: a full structure, or one of the four fragments
// produced by a cut.  `entry` is some node at the piece's top level.
struct piece {
	ett::tour rows, cols;
	node_ref entry = nil;
	int top = -1;
	bool empty() const { return rows.size == 0 || cols.size == 0; }
};

struct insertion {
	piece main, main_by_new, new_by_main, corner; // V1xV1, V1xV2, V2xV1, V2xV2
};

class structure {
public:
	structure(ett::pool &elems, std::uint64_t seed, double p = 0.5) : elems_(&elems), rng_(seed), p_(p) {}

	std::uint64_t touched() const { return touched_; }
	std::size_t node_count() const { return bot_.live() + up_.live(); }
	ett::pool &elements() { return *elems_; }

	int height(elem_id e) {
		auto &el = elems_->at(e);
		if (el.height < 0) el.height = draw_height();
		return el.height;
	}
	int height_of(elem_id e) const { return elems_->at(e).height; }

	// ---- construction ------------------------------------------------------

	template <class F> piece build(const ett::tour &t, F &&cell) {
		piece out;
		out.rows = out.cols = t;
		if (t.size == 0) return out;
		const std::size_t n = t.size;
		std::vector<elem_id> order = ett::to_vector(*elems_, t);
		int max_h = 0;
		for (elem_id e : order) max_h = std::max(max_h, height(e));

		node_ref base0 = bot_.bulk_alloc(n * n);
		for (std::size_t i = 0; i < n; ++i) {
			const std::size_t up1 = (i + 1 == n ? 0 : i + 1) * n, dn1 = (i == 0 ? n - 1 : i - 1) * n;
			for (std::size_t j = 0; j < n; ++j) {
				bottom_node &b = bot_[base0 + (node_ref)(i * n + j)];
				b.value = cell(order[i], order[j]);
				b.row = order[i];
				b.col = order[j];
				b.row_fwd = base0 + (node_ref)(i * n + (j + 1 == n ? 0 : j + 1));
				b.row_bwd = base0 + (node_ref)(i * n + (j == 0 ? n - 1 : j - 1));
				b.col_fwd = base0 + (node_ref)(up1 + j);
				b.col_bwd = base0 + (node_ref)(dn1 + j);
			}
		}
		touched_ += n * n;

		struct level_info {
			node_ref base;
			std::size_t k;
		};
		std::vector<level_info> levels;
		std::vector<std::size_t> prev_pos(n); // position of surviving index in previous level
		std::vector<elem_id> prev_ids = order;
		node_ref prev_base = base0;
		std::size_t prev_k = n;
		out.top = 0;
		out.entry = base0;
		for (int l = 1; l <= max_h; ++l) {
			std::vector<elem_id> ids;
			std::vector<std::size_t> pos; // position within previous level
			for (std::size_t i = 0, pi = 0; i < prev_ids.size(); ++i) {
				if (height_of(prev_ids[i]) >= l) {
					ids.push_back(prev_ids[i]);
					pos.push_back(i);
				}
				(void)pi;
			}
			const std::size_t k = ids.size();
			if (k == 0) break;
			node_ref base = up_.bulk_alloc(k * k);
			for (std::size_t a = 0; a < k; ++a)
				for (std::size_t b = 0; b < k; ++b) {
					upper_node &u = up_[base + (node_ref)(a * k + b)];
					u.min_value = kInf;
					u.tag = 0;
					u.row = ids[a];
					u.col = ids[b];
					u.min_row = u.min_col = ett::none;
					u.row_fwd = base + (node_ref)(a * k + (b + 1 == k ? 0 : b + 1));
					u.row_bwd = base + (node_ref)(a * k + (b == 0 ? k - 1 : b - 1));
					u.col_fwd = base + (node_ref)((a + 1 == k ? 0 : a + 1) * k + b);
					u.col_bwd = base + (node_ref)((a == 0 ? k - 1 : a - 1) * k + b);
					u.child = prev_base + (node_ref)(pos[a] * prev_k + pos[b]);
				}
			touched_ += k * k;
			levels.push_back({base, k});
			prev_ids = ids;
			prev_base = base;
			prev_k = k;
			out.top = l;
			out.entry = base;
		}
		// aggregate bottom-up
		for (std::size_t li = 0; li < levels.size(); ++li)
			for (std::size_t i = 0; i < levels[li].k * levels[li].k; ++i) pull_up(levels[li].base + (node_ref)i, (int)li + 1);
		return out;
	}

	// ---- queries -----------------------------------------------------------

	std::tuple<double, elem_id, elem_id> global_min(const piece &p) {
		if (p.empty()) return {kInf, ett::none, ett::none};
		double best = kInf;
		elem_id br = ett::none, bc = ett::none;
		for_each_at_level(p.entry, p.top, [&](node_ref x) {
			double v;
			elem_id r, c;
			if (p.top == 0) {
				v = bot_[x].value;
				r = bot_[x].row;
				c = bot_[x].col;
			} else {
				v = up_[x].min_value;
				r = up_[x].min_row;
				c = up_[x].min_col;
			}
			consider(best, br, bc, v, r, c);
		});
		return {best, br, bc};
	}

	void range_add(piece &p, double x) {
		if (p.empty() || x == 0) return;
		for_each_at_level(p.entry, p.top, [&](node_ref n) {
			++touched_;
			if (p.top == 0) {
				bot_[n].value += x; // +inf absorbs
			} else {
				up_[n].tag += x;
				up_[n].min_value += x;
			}
		});
	}

	double read_cell(const piece &p, elem_id r, elem_id c) {
		auto chain = locate_chain(p, r, c);
		double sum = 0;
		for (int l = p.top; l >= 1; --l) sum += up_[chain[l]].tag;
		return bot_[chain[0]].value + sum;
	}

	void write_cell(piece &p, elem_id r, elem_id c, double v) {
		auto chain = locate_chain(p, r, c);
		for (int l = p.top; l >= 1; --l) push_down(chain[l], l);
		bot_[chain[0]].value = v;
		for (int l = 1; l <= p.top; ++l) pull_up(chain[l], l);
	}

	// Sets every cell in SelfLoop(v)'s row and column (whichever of the two
	// this piece contains) to the supplied true values.
	template <class FR, class FC> void refresh_line(piece &p, std::uint32_t v, FR &&row_val, FC &&col_val) {
		elem_id sv = elems_->self_of(v);
		bool in_rows = ett::contains(*elems_, p.rows, sv);
		bool in_cols = ett::contains(*elems_, p.cols, sv);
		if (!in_rows && !in_cols) throw error(errc::element_not_found, "vertex not in piece");
		auto entries = entry_chain(p);
		// clear pending tags above every touched cell
		for (int l = p.top; l >= 1; --l) {
			if (in_rows) walk_row(find_in_col(entries[l], l, dom_row(p, sv, l)), l, [&](node_ref x) { push_down(x, l); });
			if (in_cols) walk_col(find_in_row(entries[l], l, dom_col(p, sv, l)), l, [&](node_ref x) { push_down(x, l); });
		}
		if (in_rows)
			walk_row(find_in_col(entries[0], 0, sv), 0, [&](node_ref x) { bot_[x].value = row_val(bot_[x].col); });
		if (in_cols)
			walk_col(find_in_row(entries[0], 0, sv), 0, [&](node_ref x) { bot_[x].value = col_val(bot_[x].row); });
		for (int l = 1; l <= p.top; ++l) {
			if (in_rows) walk_row(find_in_col(entries[l], l, dom_row(p, sv, l)), l, [&](node_ref x) { pull_up(x, l); });
			if (in_cols) walk_col(find_in_row(entries[l], l, dom_col(p, sv, l)), l, [&](node_ref x) { pull_up(x, l); });
		}
	}

	// ---- cut ---------------------------------------------------------------

	// Removes the four lines of Arc(u,v), Arc(v,u), splits the piece into
	// (V1xV1, V1xV2, V2xV1, V2xV2) with V1 the component of u, and cuts the
	// tour.  The piece must be square.
	std::array<piece, 4> cut(const piece &p, std::uint32_t u, std::uint32_t v) {
		if (p.rows.head != p.cols.head || p.rows.size != p.cols.size)
			throw error(errc::shape_mismatch, "cut requires a square piece");
		elem_id e1 = elems_->arc(u, v), e2 = elems_->arc(v, u);
		const int top = p.top;

		// run tables from the current cyclic order: [e1, run2.., e2, run1..]
		std::vector<elem_id> run1, run2;
		for (elem_id e = elems_->succ(e2); e != e1; e = elems_->succ(e)) run1.push_back(e);
		for (elem_id e = elems_->succ(e1); e != e2; e = elems_->succ(e)) run2.push_back(e);
		for (elem_id e : run1) elems_->at(e).mark = 1;
		for (elem_id e : run2) elems_->at(e).mark = 2;
		elems_->at(e1).mark = elems_->at(e2).mark = 3;
		touched_ += run1.size() + run2.size();

		auto tail1 = tails(run1, top), tail2 = tails(run2, top);
		auto entries = entry_chain(p);

		// push pending tags off every line whose domination blocks change
		std::array<std::vector<node_ref>, 4> anchor; // [piece][level] -> (rowtail, coltail) node
		for (auto &a : anchor) a.assign(top + 1, nil);
		for (int l = top; l >= 1; --l) {
			for (elem_id line : {e1, e2, tail1[l], tail2[l]})
				if (line != ett::none && height_of(line) >= l)
					walk_row(find_in_col(entries[l], l, line), l, [&](node_ref x) {
						push_down(x, l);
						record_anchor(anchor, x, l, tail1[l], tail2[l]);
					});
			for (elem_id line : {e1, e2, tail1[l], tail2[l]})
				if (line != ett::none && height_of(line) >= l)
					walk_col(find_in_row(entries[l], l, line), l, [&](node_ref x) { push_down(x, l); });
		}
		// level-0 anchors
		for (elem_id line : {tail1[0], tail2[0]})
			walk_row(find_in_col(entries[0], 0, line), 0,
			         [&](node_ref x) { record_anchor(anchor, x, 0, tail1[0], tail2[0]); });

		// remove the four lines, then split every surviving list at the seams
		for (int l = 0; l <= top; ++l) {
			bool have_rows = tail1[l] != ett::none || tail2[l] != ett::none;
			if (!have_rows) {
				// level consists of arc lines only: free them wholesale
				for (elem_id line : {e1, e2})
					if (height_of(line) >= l) {
						node_ref start = find_in_col(entries[l], l, line);
						free_row(start, l);
					}
				continue;
			}
			node_ref safe = sanitize(entries[l], l, e1, e2);
			for (elem_id line : {e1, e2})
				if (height_of(line) >= l) remove_row(find_in_col(safe, l, line), l);
			for (elem_id line : {e1, e2})
				if (height_of(line) >= l) {
					node_ref c = find_in_row_checked(safe, l, line);
					if (c != nil) remove_col(c, l);
				}
			// seam split, rows dimension first (splits the column lists)
			if (tail1[l] != ett::none && tail2[l] != ett::none) {
				node_ref a = anchor_at(anchor, 0, l), b = anchor_at(anchor, 2, l); // (t1,t1) and (t2,t1)
				lockstep_rows_swap_col(a, b, l);
				lockstep_cols_swap_row(anchor_at(anchor, 0, l), anchor_at(anchor, 1, l), l); // group1: (t1,t1)x(t1,t2)
				lockstep_cols_swap_row(anchor_at(anchor, 2, l), anchor_at(anchor, 3, l), l); // group2
			}
		}

		// per-piece tops
		auto max_with = [&](const std::vector<elem_id> &ta, const std::vector<elem_id> &tb) {
			int m = -1;
			for (int l = 0; l <= top; ++l)
				if (ta[l] != ett::none && tb[l] != ett::none) m = l;
			return m;
		};
		int tops[4] = {max_with(tail1, tail1), max_with(tail1, tail2), max_with(tail2, tail1), max_with(tail2, tail2)};

		// recompute aggregates along the new boundaries
		for (int l = 1; l <= top; ++l)
			for (int pc = 0; pc < 4; ++pc)
				if (l <= tops[pc]) {
					node_ref a = anchor_at(anchor, pc, l);
					walk_row(a, l, [&](node_ref x) { pull_up(x, l); });
					walk_col(a, l, [&](node_ref x) { pull_up(x, l); });
				}

		for (elem_id e : run1) elems_->at(e).mark = 0;
		for (elem_id e : run2) elems_->at(e).mark = 0;

		auto [t1, t2] = ett::cut_tour(*elems_, p.rows, u, v);
		std::array<piece, 4> out;
		const ett::tour *rt[4] = {&t1, &t1, &t2, &t2};
		const ett::tour *ct[4] = {&t1, &t2, &t1, &t2};
		for (int pc = 0; pc < 4; ++pc) {
			out[pc].rows = *rt[pc];
			out[pc].cols = *ct[pc];
			out[pc].top = tops[pc];
			out[pc].entry = anchor_at(anchor, pc, tops[pc]);
		}
		return out;
	}

	// ---- link --------------------------------------------------------------

	// Inverse of cut: inserts fresh lines for Arc(u,v), Arc(v,u) (new cells
	// hold `fill`), merges the four pieces, and links the tours.
	piece link(const std::array<piece, 4> &ps, std::uint32_t u, std::uint32_t v, double fill) {
		const piece &p11 = ps[0], &p12 = ps[1], &p21 = ps[2], &p22 = ps[3];
		if (p11.rows.head != p12.rows.head || p21.rows.head != p22.rows.head || p11.cols.head != p21.cols.head ||
		    p12.cols.head != p22.cols.head)
			throw error(errc::shape_mismatch, "pieces do not share tours consistently");
		ett::tour t1 = p11.rows, t2 = p22.rows;
		if (t1.size == 0 || t2.size == 0) throw error(errc::shape_mismatch, "link requires nonempty pieces");
		elem_id su = elems_->self_of(u), sv = elems_->self_of(v);
		if (!ett::contains(*elems_, t1, su) || !ett::contains(*elems_, t2, sv))
			throw error(errc::shape_mismatch, "endpoints not in the expected tours");

		// target cyclic order: [e1, run2(sv..), e2, run1(succ(su)..su)]
		std::vector<elem_id> run1, run2;
		{
			elem_id e = elems_->succ(su);
			for (std::uint32_t i = 0; i < t1.size; ++i, e = elems_->succ(e)) run1.push_back(e);
			e = sv;
			for (std::uint32_t i = 0; i < t2.size; ++i, e = elems_->succ(e)) run2.push_back(e);
		}
		for (elem_id e : run1) elems_->at(e).mark = 1;
		for (elem_id e : run2) elems_->at(e).mark = 2;

		elem_id e1 = elems_->make_arc(u, v), e2 = elems_->make_arc(v, u);
		const int h1 = height(e1), h2 = height(e2);
		int old_top = std::max(std::max(p11.top, p22.top), std::max(p12.top, p21.top));
		int new_top = std::max(old_top, std::max(h1, h2));

		auto tail1 = tails(run1, new_top), tail2 = tails(run2, new_top);

		// entry chains per piece (valid until surgery starts)
		std::array<std::vector<node_ref>, 4> entries;
		for (int pc = 0; pc < 4; ++pc) entries[pc] = entry_chain(ps[pc]);

		// push pending tags off the wrap boundaries of all four pieces;
		// record (rowtail, coltail) anchors per piece and level
		std::array<std::vector<node_ref>, 4> anchor;
		for (auto &a : anchor) a.assign(new_top + 1, nil);
		const elem_id rowtail[4] = {tail1[0], tail1[0], tail2[0], tail2[0]};
		const elem_id coltail[4] = {tail1[0], tail2[0], tail1[0], tail2[0]};
		(void)rowtail;
		(void)coltail;
		for (int pc = 0; pc < 4; ++pc) {
			const std::vector<elem_id> &rt = (pc < 2) ? tail1 : tail2;
			const std::vector<elem_id> &ct = (pc % 2 == 0) ? tail1 : tail2;
			for (int l = ps[pc].top; l >= 1; --l) {
				if (rt[l] == ett::none || ct[l] == ett::none) continue;
				walk_row(find_in_col(entries[pc][l], l, rt[l]), l, [&](node_ref x) {
					push_down(x, l);
					if (col_of(x, l) == ct[l]) anchor[pc][l] = x;
				});
				walk_col(find_in_row(entries[pc][l], l, ct[l]), l, [&](node_ref x) { push_down(x, l); });
			}
			if (ps[pc].top >= 0)
				walk_row(find_in_col(entries[pc][0], 0, rt[0]), 0, [&](node_ref x) {
					if (col_of(x, 0) == ct[0]) anchor[pc][0] = x;
				});
		}

		// merge the four pieces level by level (no new lines yet)
		for (int l = 0; l <= old_top; ++l) {
			bool r1 = tail1[l] != ett::none, r2 = tail2[l] != ett::none;
			// columns dimension: unify the row lists of each row group
			if (r1 && r2) {
				if (anchor[0][l] != nil && anchor[1][l] != nil) lockstep_cols_swap_row(anchor[0][l], anchor[1][l], l);
				if (anchor[2][l] != nil && anchor[3][l] != nil) lockstep_cols_swap_row(anchor[2][l], anchor[3][l], l);
				// rows dimension: unify the column lists
				node_ref a = anchor[0][l] != nil ? anchor[0][l] : anchor[1][l];
				node_ref b = anchor[2][l] != nil ? anchor[2][l] : anchor[3][l];
				if (a != nil && b != nil) {
					b = align_to_col(b, l, col_of(a, l));
					lockstep_rows_swap_col(a, b, l);
				}
			}
		}

		// insert the new arc lines
		insert_new_lines(e1, e2, h1, h2, tail1, tail2, anchor, old_top, new_top, fill);

		// pull along the new lines and the former wrap boundaries
		ett::tour merged = ett::link_tours(*elems_, t1, t2, u, v);
		piece out;
		out.rows = out.cols = merged;
		out.top = new_top;
		out.entry = nil;
		{
			std::vector<node_ref> ent = entry_chain_from(top_entry_after_link(e1, e2, h1, h2, anchor, tail1, tail2, new_top), new_top);
			for (int l = 1; l <= new_top; ++l) {
				for (elem_id line : {e1, e2, tail1[l], tail2[l]})
					if (line != ett::none && height_of(line) >= l) {
						walk_row(find_in_col(ent[l], l, line), l, [&](node_ref x) { pull_up(x, l); });
						walk_col(find_in_row(ent[l], l, line), l, [&](node_ref x) { pull_up(x, l); });
					}
			}
			out.entry = ent[new_top];
		}

		for (elem_id e : run1) elems_->at(e).mark = 0;
		for (elem_id e : run2) elems_->at(e).mark = 0;
		return out;
	}

	// ---- insert ------------------------------------------------------------

	// Creates SelfLoop(v) plus its row/column pieces against an existing
	// square piece; the caller links them in with `link`.
	template <class F> insertion insert_line(const piece &p, std::uint32_t v, F &&cell) {
		elem_id sv = elems_->make_self(v);
		elems_->at(sv).succ = elems_->at(sv).pred = sv;
		int h = height(sv);
		ett::tour tv{sv, 1};
		insertion out;
		out.main = p;
		out.corner = build_strip(tv, tv, cell);
		if (!p.empty()) {
			if (p.rows.head != p.cols.head) throw error(errc::shape_mismatch, "insert_line needs a square piece");
			out.main_by_new = build_strip(p.rows, tv, cell);
			out.new_by_main = build_strip(tv, p.cols, cell);
		}
		(void)h;
		return out;
	}

	// ---- audits (test support) ---------------------------------------------

	// Recomputes every aggregate from scratch and checks the lazy equation,
	// witness validity, link structure, and level membership.
	void audit(const piece &p) const {
		if (p.empty()) return;
		std::vector<elem_id> rows = ett::to_vector(*elems_, p.rows), cols = ett::to_vector(*elems_, p.cols);
		int expected_top = -1;
		{
			int mr = 0, mc = 0;
			for (elem_id e : rows) mr = std::max(mr, (int)elems_->at(e).height);
			for (elem_id e : cols) mc = std::max(mc, (int)elems_->at(e).height);
			expected_top = std::min(mr, mc);
		}
		if (p.top != expected_top) throw error(errc::internal_invariant_violation, "piece top mismatch");

		// gather per-level surviving orders
		std::vector<std::vector<elem_id>> rl(p.top + 1), cl(p.top + 1);
		for (int l = 0; l <= p.top; ++l) {
			for (elem_id e : rows)
				if (elems_->at(e).height >= l) rl[l].push_back(e);
			for (elem_id e : cols)
				if (elems_->at(e).height >= l) cl[l].push_back(e);
			if (rl[l].empty() || cl[l].empty()) throw error(errc::internal_invariant_violation, "empty level below top");
		}

		// entry must sit at the top level
		{
			elem_id er = p.top == 0 ? bot_[p.entry].row : up_[p.entry].row;
			elem_id ec = p.top == 0 ? bot_[p.entry].col : up_[p.entry].col;
			if ((int)elems_->at(er).height < p.top || (int)elems_->at(ec).height < p.top)
				throw error(errc::internal_invariant_violation, "entry below top level");
		}

		// walk each level and record the grid of node refs
		std::vector<std::vector<node_ref>> grid(p.top + 1);
		node_ref ent = p.entry;
		for (int l = p.top; l >= 0; --l) {
			std::size_t nr = rl[l].size(), nc = cl[l].size();
			grid[l].assign(nr * nc, nil);
			// locate entry's coordinates within the expected orders
			elem_id er = row_of_c(ent, l), ec = col_of_c(ent, l);
			std::size_t ri = index_of(rl[l], er), ci = index_of(cl[l], ec);
			node_ref rstart = ent;
			for (std::size_t i = 0; i < nr; ++i) {
				node_ref x = rstart;
				std::size_t r = (ri + i) % nr;
				for (std::size_t j = 0; j < nc; ++j) {
					std::size_t c = (ci + j) % nc;
					if (row_of_c(x, l) != rl[l][r] || col_of_c(x, l) != cl[l][c])
						throw error(errc::internal_invariant_violation, "level order mismatch");
					if (fwd_c(x, l, true) == nil || fwd_c(x, l, false) == nil)
						throw error(errc::internal_invariant_violation, "nil link");
					if (bwd_of(fwd_c(x, l, true), l, true) != x || bwd_of(fwd_c(x, l, false), l, false) != x)
						throw error(errc::internal_invariant_violation, "link inverse broken");
					grid[l][r * nc + c] = x;
					x = fwd_c(x, l, true);
				}
				if (x != rstart) throw error(errc::internal_invariant_violation, "row not circular");
				rstart = fwd_c(rstart, l, false);
			}
			if (l > 0) ent = up_[ent].child;
		}

		// child pointers and the lazy equation
		std::vector<double> truth(rl[0].size() * cl[0].size());
		for (std::size_t i = 0; i < rl[0].size(); ++i)
			for (std::size_t j = 0; j < cl[0].size(); ++j) {
				double sum = bot_[grid[0][i * cl[0].size() + j]].value;
				// accumulate dominator tags
				for (int l = 1; l <= p.top; ++l) {
					elem_id dr = dom_of(rl[0][i], rows, l), dc = dom_of(cl[0][j], cols, l);
					node_ref nd = grid[l][index_of(rl[l], dr) * cl[l].size() + index_of(cl[l], dc)];
					sum += up_[nd].tag;
				}
				truth[i * cl[0].size() + j] = sum;
			}
		for (int l = 1; l <= p.top; ++l) {
			for (std::size_t a = 0; a < rl[l].size(); ++a)
				for (std::size_t b = 0; b < cl[l].size(); ++b) {
					node_ref x = grid[l][a * cl[l].size() + b];
					// child pointer targets the same pair one level down
					node_ref ch = up_[x].child;
					if (row_of_c(ch, l - 1) != rl[l][a] || col_of_c(ch, l - 1) != cl[l][b])
						throw error(errc::internal_invariant_violation, "child pointer mismatch");
					// recompute block minimum over dominated bottom cells
					double best = kInf;
					elem_id br = ett::none, bc = ett::none;
					for (std::size_t i = 0; i < rl[0].size(); ++i)
						for (std::size_t j = 0; j < cl[0].size(); ++j)
							if (dom_of(rl[0][i], rows, l) == rl[l][a] && dom_of(cl[0][j], cols, l) == cl[l][b])
								consider(best, br, bc, truth[i * cl[0].size() + j], rl[0][i], cl[0][j]);
					double above = 0;
					for (int l2 = l + 1; l2 <= p.top; ++l2) {
						elem_id dr = dom_of(rl[l][a], rows, l2), dc = dom_of(cl[l][b], cols, l2);
						above += up_[grid[l2][index_of(rl[l2], dr) * cl[l2].size() + index_of(cl[l2], dc)]].tag;
					}
					double stored = up_[x].min_value + above;
					if (best == kInf ? up_[x].min_value != kInf : stored != best)
						throw error(errc::internal_invariant_violation, "lazy equation violated");
					if (best != kInf && (up_[x].min_row != br || up_[x].min_col != bc))
						throw error(errc::internal_invariant_violation, "min witness mismatch");
				}
		}
	}

	// Domination audit: every node below the top has exactly one dominator at
	// the next level, found by backward scans, and the child pointer layout
	// partitions each level.
	void audit_domination(const piece &p) const {
		if (p.empty() || p.top == 0) return;
		std::vector<elem_id> rows = ett::to_vector(*elems_, p.rows), cols = ett::to_vector(*elems_, p.cols);
		for (int l = 1; l <= p.top; ++l) {
			for (elem_id r : rows)
				if ((int)elems_->at(r).height >= l - 1 || l == 1) {
					elem_id d = dom_of(r, rows, l);
					if ((int)elems_->at(d).height < l) throw error(errc::internal_invariant_violation, "dominator too low");
				}
			for (elem_id c : cols) {
				elem_id d = dom_of(c, cols, l);
				if ((int)elems_->at(d).height < l) throw error(errc::internal_invariant_violation, "dominator too low");
			}
		}
	}

private:
	// ---- tiny helpers -------------------------------------------------------

	int draw_height() {
		int h = 0;
		std::uniform_real_distribution<double> d(0.0, 1.0);
		while (d(rng_) < p_ && h < 60) ++h;
		return h;
	}

	static void consider(double &best, elem_id &br, elem_id &bc, double v, elem_id r, elem_id c) {
		if (v == kInf) return;
		if (v < best || (v == best && (r < br || (r == br && c < bc)))) {
			best = v;
			br = r;
			bc = c;
		}
	}

	static std::size_t index_of(const std::vector<elem_id> &v, elem_id e) {
		for (std::size_t i = 0; i < v.size(); ++i)
			if (v[i] == e) return i;
		throw error(errc::internal_invariant_violation, "element missing from order");
	}

	// nearest element at or before e (in the given cyclic order) with height >= l
	elem_id dom_of(elem_id e, const std::vector<elem_id> &order, int l) const {
		std::size_t i = index_of(order, e);
		for (std::size_t k = 0; k < order.size(); ++k) {
			elem_id cand = order[(i + order.size() - k) % order.size()];
			if ((int)elems_->at(cand).height >= l) return cand;
		}
		throw error(errc::internal_invariant_violation, "no dominator");
	}

	elem_id dom_row(const piece &p, elem_id e, int l) const {
		elem_id cur = e;
		while ((int)elems_->at(cur).height < l) cur = elems_->pred(cur);
		return cur;
	}
	elem_id dom_col(const piece &p, elem_id e, int l) const { return dom_row(p, e, l); }

	elem_id row_of(node_ref x, int l) const { return l ? up_[x].row : bot_[x].row; }
	elem_id col_of(node_ref x, int l) const { return l ? up_[x].col : bot_[x].col; }
	elem_id row_of_c(node_ref x, int l) const { return l ? up_[x].row : bot_[x].row; }
	elem_id col_of_c(node_ref x, int l) const { return l ? up_[x].col : bot_[x].col; }
	node_ref fwd_c(node_ref x, int l, bool row_dir) const {
		if (l) return row_dir ? up_[x].row_fwd : up_[x].col_fwd;
		return row_dir ? bot_[x].row_fwd : bot_[x].col_fwd;
	}
	node_ref bwd_of(node_ref x, int l, bool row_dir) const {
		if (l) return row_dir ? up_[x].row_bwd : up_[x].col_bwd;
		return row_dir ? bot_[x].row_bwd : bot_[x].col_bwd;
	}

	template <class F> void walk_row(node_ref start, int l, F &&f) {
		node_ref x = start;
		do {
			node_ref nxt = l ? up_[x].row_fwd : bot_[x].row_fwd;
			++touched_;
			f(x);
			x = nxt;
		} while (x != start);
	}
	template <class F> void walk_col(node_ref start, int l, F &&f) {
		node_ref x = start;
		do {
			node_ref nxt = l ? up_[x].col_fwd : bot_[x].col_fwd;
			++touched_;
			f(x);
			x = nxt;
		} while (x != start);
	}

	// visit every node of one level, given any node of that level
	template <class F> void for_each_at_level(node_ref entry, int l, F &&f) {
		node_ref r = entry;
		do {
			walk_row(r, l, f);
			r = l ? up_[r].col_fwd : bot_[r].col_fwd;
		} while (r != entry);
	}

	node_ref find_in_col(node_ref start, int l, elem_id row) {
		node_ref x = start;
		do {
			++touched_;
			if (row_of(x, l) == row) return x;
			x = l ? up_[x].col_fwd : bot_[x].col_fwd;
		} while (x != start);
		throw error(errc::element_not_found, "row not present at level");
	}
	node_ref find_in_row(node_ref start, int l, elem_id col) {
		node_ref x = start;
		do {
			++touched_;
			if (col_of(x, l) == col) return x;
			x = l ? up_[x].row_fwd : bot_[x].row_fwd;
		} while (x != start);
		throw error(errc::element_not_found, "col not present at level");
	}
	node_ref find_in_row_checked(node_ref start, int l, elem_id col) {
		node_ref x = start;
		do {
			++touched_;
			if (col_of(x, l) == col) return x;
			x = l ? up_[x].row_fwd : bot_[x].row_fwd;
		} while (x != start);
		return nil;
	}
	node_ref align_to_col(node_ref x, int l, elem_id col) { return find_in_row(x, l, col); }

	// entry per level by child descent from the piece's top entry
	std::vector<node_ref> entry_chain(const piece &p) const { return entry_chain_from(p.entry, p.top); }
	std::vector<node_ref> entry_chain_from(node_ref top_entry, int top) const {
		std::vector<node_ref> ent(top + 1, nil);
		node_ref x = top_entry;
		for (int l = top; l >= 0; --l) {
			ent[l] = x;
			if (l > 0) x = up_[x].child;
		}
		return ent;
	}

	// last element of the run with height >= l, per level
	std::vector<elem_id> tails(const std::vector<elem_id> &run, int top) const {
		std::vector<elem_id> t(top + 1, ett::none);
		int best = -1;
		for (auto it = run.rbegin(); it != run.rend(); ++it) {
			int h = elems_->at(*it).height;
			for (int l = best + 1; l <= std::min(h, top); ++l) t[l] = *it;
			best = std::max(best, h);
			if (best >= top) break;
		}
		return t;
	}

	void record_anchor(std::array<std::vector<node_ref>, 4> &anchor, node_ref x, int l, elem_id t1, elem_id t2) {
		elem_id r = row_of(x, l), c = col_of(x, l);
		int pr = r == t1 ? 0 : (r == t2 ? 2 : -1);
		if (pr < 0) return;
		if (c == t1) anchor[pr][l] = x;
		else if (t2 != ett::none && c == t2) anchor[pr + 1][l] = x;
	}
	node_ref anchor_at(const std::array<std::vector<node_ref>, 4> &anchor, int pc, int l) const {
		if (l < 0 || anchor[pc][l] == nil) throw error(errc::internal_invariant_violation, "missing anchor");
		return anchor[pc][l];
	}

	// ---- lazy propagation ----------------------------------------------------

	// block of x at level l: rows/cols forward from x's coordinates while
	// heights stay below l
	template <class F> void for_each_child(node_ref x, int l, F &&f) {
		node_ref rstart = up_[x].child;
		const int below = l - 1;
		while (true) {
			node_ref y = rstart;
			while (true) {
				node_ref nxt = below ? up_[y].row_fwd : bot_[y].row_fwd;
				++touched_;
				f(y);
				if (nxt == rstart || (int)elems_->at(col_of(nxt, below)).height >= l) break;
				y = nxt;
			}
			node_ref nr = below ? up_[rstart].col_fwd : bot_[rstart].col_fwd;
			if (nr == up_[x].child || (int)elems_->at(row_of(nr, below)).height >= l) break;
			rstart = nr;
		}
	}

	void push_down(node_ref x, int l) {
		double t = up_[x].tag;
		if (t == 0) return;
		up_[x].tag = 0;
		const int below = l - 1;
		for_each_child(x, l, [&](node_ref y) {
			if (below == 0) {
				bot_[y].value += t;
			} else {
				up_[y].tag += t;
				up_[y].min_value += t;
			}
		});
	}

	void pull_up(node_ref x, int l) {
		double best = kInf;
		elem_id br = ett::none, bc = ett::none;
		const int below = l - 1;
		for_each_child(x, l, [&](node_ref y) {
			if (below == 0) consider(best, br, bc, bot_[y].value, bot_[y].row, bot_[y].col);
			else consider(best, br, bc, up_[y].min_value, up_[y].min_row, up_[y].min_col);
		});
		up_[x].min_value = best == kInf ? kInf : best + up_[x].tag;
		up_[x].min_row = br;
		up_[x].min_col = bc;
	}

	// dominator chain of cell (r, c): node refs per level, chain[0] = bottom
	std::vector<node_ref> locate_chain(const piece &p, elem_id r, elem_id c) {
		if (p.empty()) throw error(errc::element_not_found, "empty piece");
		if (!ett::contains(*elems_, p.rows, r) || !ett::contains(*elems_, p.cols, c))
			throw error(errc::element_not_found, "cell outside piece");
		auto entries = entry_chain(p);
		std::vector<node_ref> chain(p.top + 1, nil);
		for (int l = p.top; l >= 0; --l) {
			elem_id dr = dom_row(p, r, l), dc = dom_col(p, c, l);
			chain[l] = find_in_row(find_in_col(entries[l], l, dr), l, dc);
		}
		return chain;
	}

	// ---- surgery primitives ---------------------------------------------------

	// unlink every node of `start`'s row from its column lists and free it
	void remove_row(node_ref start, int l) {
		node_ref x = start;
		do {
			node_ref nxt = l ? up_[x].row_fwd : bot_[x].row_fwd;
			node_ref cb = l ? up_[x].col_bwd : bot_[x].col_bwd;
			node_ref cf = l ? up_[x].col_fwd : bot_[x].col_fwd;
			if (l) {
				up_[cb].col_fwd = cf;
				up_[cf].col_bwd = cb;
				up_.release(x);
			} else {
				bot_[cb].col_fwd = cf;
				bot_[cf].col_bwd = cb;
				bot_.release(x);
			}
			++touched_;
			x = nxt;
		} while (x != start);
	}
	void remove_col(node_ref start, int l) {
		node_ref x = start;
		do {
			node_ref nxt = l ? up_[x].col_fwd : bot_[x].col_fwd;
			node_ref rb = l ? up_[x].row_bwd : bot_[x].row_bwd;
			node_ref rf = l ? up_[x].row_fwd : bot_[x].row_fwd;
			if (l) {
				up_[rb].row_fwd = rf;
				up_[rf].row_bwd = rb;
				up_.release(x);
			} else {
				bot_[rb].row_fwd = rf;
				bot_[rf].row_bwd = rb;
				bot_.release(x);
			}
			++touched_;
			x = nxt;
		} while (x != start);
	}
	void free_row(node_ref start, int l) {
		node_ref x = start;
		do {
			node_ref nxt = l ? up_[x].row_fwd : bot_[x].row_fwd;
			if (l) up_.release(x);
			else bot_.release(x);
			++touched_;
			x = nxt;
		} while (x != start);
	}

	// move an entry away from the two doomed lines
	node_ref sanitize(node_ref entry, int l, elem_id e1, elem_id e2) {
		node_ref x = entry;
		for (int k = 0; k < 3 && (row_of(x, l) == e1 || row_of(x, l) == e2); ++k)
			x = l ? up_[x].col_fwd : bot_[x].col_fwd;
		for (int k = 0; k < 3 && (col_of(x, l) == e1 || col_of(x, l) == e2); ++k)
			x = l ? up_[x].row_fwd : bot_[x].row_fwd;
		if (row_of(x, l) == e1 || row_of(x, l) == e2 || col_of(x, l) == e1 || col_of(x, l) == e2)
			throw error(errc::internal_invariant_violation, "no clean entry");
		return x;
	}

	// walking two aligned rows, swap their forward column links (splits or
	// merges the column lists at a seam)
	void lockstep_rows_swap_col(node_ref a, node_ref b, int l) {
		if (col_of(a, l) != col_of(b, l)) b = align_to_col(b, l, col_of(a, l));
		node_ref xa = a, xb = b;
		do {
			node_ref fa = l ? up_[xa].col_fwd : bot_[xa].col_fwd;
			node_ref fb = l ? up_[xb].col_fwd : bot_[xb].col_fwd;
			if (l) {
				up_[xa].col_fwd = fb;
				up_[fb].col_bwd = xa;
				up_[xb].col_fwd = fa;
				up_[fa].col_bwd = xb;
			} else {
				bot_[xa].col_fwd = fb;
				bot_[fb].col_bwd = xa;
				bot_[xb].col_fwd = fa;
				bot_[fa].col_bwd = xb;
			}
			++touched_;
			xa = l ? up_[xa].row_fwd : bot_[xa].row_fwd;
			xb = l ? up_[xb].row_fwd : bot_[xb].row_fwd;
		} while (xa != a);
		if (xb != b) throw error(errc::internal_invariant_violation, "lockstep desync");
	}

	// walking two aligned columns, swap their forward row links
	void lockstep_cols_swap_row(node_ref a, node_ref b, int l) {
		node_ref xa = a, xb = b;
		do {
			node_ref fa = l ? up_[xa].row_fwd : bot_[xa].row_fwd;
			node_ref fb = l ? up_[xb].row_fwd : bot_[xb].row_fwd;
			if (l) {
				up_[xa].row_fwd = fb;
				up_[fb].row_bwd = xa;
				up_[xb].row_fwd = fa;
				up_[fa].row_bwd = xb;
			} else {
				bot_[xa].row_fwd = fb;
				bot_[fb].row_bwd = xa;
				bot_[xb].row_fwd = fa;
				bot_[fa].row_bwd = xb;
			}
			++touched_;
			xa = l ? up_[xa].col_fwd : bot_[xa].col_fwd;
			xb = l ? up_[xb].col_fwd : bot_[xb].col_fwd;
		} while (xa != a);
		if (xb != b) throw error(errc::internal_invariant_violation, "lockstep desync");
	}

	// rectangular strip piece (1 x k, k x 1 or 1 x 1) used by insert_line
	template <class F> piece build_strip(const ett::tour &rt, const ett::tour &ct, F &&cell) {
		piece out;
		out.rows = rt;
		out.cols = ct;
		std::vector<elem_id> rows = ett::to_vector(*elems_, rt), cols = ett::to_vector(*elems_, ct);
		for (elem_id e : rows) height(e);
		for (elem_id e : cols) height(e);
		int mr = 0, mc = 0;
		for (elem_id e : rows) mr = std::max(mr, (int)elems_->at(e).height);
		for (elem_id e : cols) mc = std::max(mc, (int)elems_->at(e).height);
		int top = std::min(mr, mc);

		std::vector<node_ref> prev;
		std::vector<elem_id> prev_r, prev_c;
		for (int l = 0; l <= top; ++l) {
			std::vector<elem_id> lr, lc;
			for (elem_id e : rows)
				if ((int)elems_->at(e).height >= l) lr.push_back(e);
			for (elem_id e : cols)
				if ((int)elems_->at(e).height >= l) lc.push_back(e);
			if (lr.empty() || lc.empty()) break;
			std::vector<node_ref> cur(lr.size() * lc.size());
			for (std::size_t i = 0; i < lr.size(); ++i)
				for (std::size_t j = 0; j < lc.size(); ++j) cur[i * lc.size() + j] = l ? up_.alloc() : bot_.alloc();
			for (std::size_t i = 0; i < lr.size(); ++i)
				for (std::size_t j = 0; j < lc.size(); ++j) {
					node_ref x = cur[i * lc.size() + j];
					node_ref rf = cur[i * lc.size() + (j + 1 == lc.size() ? 0 : j + 1)];
					node_ref rb = cur[i * lc.size() + (j == 0 ? lc.size() - 1 : j - 1)];
					node_ref cf = cur[(i + 1 == lr.size() ? 0 : i + 1) * lc.size() + j];
					node_ref cb = cur[(i == 0 ? lr.size() - 1 : i - 1) * lc.size() + j];
					++touched_;
					if (l == 0) {
						bot_[x] = bottom_node{cell(lr[i], lc[j]), rf, rb, cf, cb, lr[i], lc[j]};
					} else {
						upper_node &u = up_[x];
						u.min_value = kInf;
						u.tag = 0;
						u.row_fwd = rf;
						u.row_bwd = rb;
						u.col_fwd = cf;
						u.col_bwd = cb;
						u.row = lr[i];
						u.col = lc[j];
						u.min_row = u.min_col = ett::none;
						std::size_t pi = index_of(prev_r, lr[i]), pj = index_of(prev_c, lc[j]);
						u.child = prev[pi * prev_c.size() + pj];
					}
					out.entry = x;
					out.top = l;
				}
			prev = cur;
			prev_r = lr;
			prev_c = lc;
		}
		// aggregate
		for (int l = 1; l <= out.top; ++l) {
			auto entries = entry_chain(out);
			for_each_at_level(entries[l], l, [&](node_ref x) { pull_up(x, l); });
		}
		return out;
	}

	// inserts the rows/cols of the two new arcs at every level they reach
	void insert_new_lines(elem_id e1, elem_id e2, int h1, int h2, const std::vector<elem_id> &tail1,
	                      const std::vector<elem_id> &tail2, std::array<std::vector<node_ref>, 4> &anchor, int old_top,
	                      int new_top, double fill) {
		// creation ledgers: per line, per level, ordered (elem, node)
		auto &led = line_ledger_;
		led.clear();
		led.resize(4); // row e1, row e2, col e1, col e2
		for (auto &v : led) v.assign(new_top + 1, {});

		for (int l = 0; l <= new_top; ++l) {
			bool old_rows = l <= old_top && (tail1[l] != ett::none || tail2[l] != ett::none);
			bool r1 = h1 >= l, r2 = h2 >= l;
			if (!r1 && !r2) break;
			if (!old_rows) {
				// tiny levels above the old structure: only arc lines
				build_mini_level(e1, e2, r1, r2, l, fill, led);
				continue;
			}
			// pick existing starting anchors for this level
			node_ref base = nil;
			for (int pc = 0; pc < 4 && base == nil; ++pc)
				if (l < (int)anchor[pc].size()) base = anchor[pc][l];
			if (base == nil) throw error(errc::internal_invariant_violation, "no merge anchor at level");

			// rows first; insertion order resolves predecessor availability
			bool t1_rows = tail1[l] != ett::none, t2_rows = tail2[l] != ett::none;
			if (r1 && r2) {
				if (t1_rows) {
					insert_row_after(e1, tail1[l], l, base, fill, led[0][l]);
					insert_row_after(e2, t2_rows ? tail2[l] : e1, l, base, fill, led[1][l]);
				} else {
					insert_row_after(e2, tail2[l], l, base, fill, led[1][l]);
					insert_row_after(e1, e2, l, base, fill, led[0][l]);
				}
			} else if (r1) {
				insert_row_after(e1, t1_rows ? tail1[l] : tail2[l], l, base, fill, led[0][l]);
			} else {
				insert_row_after(e2, t2_rows ? tail2[l] : tail1[l], l, base, fill, led[1][l]);
			}
			// then columns (they now cross the new rows as well)
			if (r1 && r2) {
				if (t1_rows) {
					insert_col_after(e1, tail1[l], l, base, fill, led[2][l]);
					insert_col_after(e2, t2_rows ? tail2[l] : e1, l, base, fill, led[3][l]);
				} else {
					insert_col_after(e2, tail2[l], l, base, fill, led[3][l]);
					insert_col_after(e1, e2, l, base, fill, led[2][l]);
				}
			} else if (r1) {
				insert_col_after(e1, t1_rows ? tail1[l] : tail2[l], l, base, fill, led[2][l]);
			} else {
				insert_col_after(e2, t2_rows ? tail2[l] : tail1[l], l, base, fill, led[3][l]);
			}
			// connect child pointers for this level's new nodes
			if (l > 0)
				for (int line = 0; line < 4; ++line) hook_children(led[line][l], led[line][l - 1], l);
		}
		mini_hooked_ = true;
	}

	void build_mini_level(elem_id e1, elem_id e2, bool r1, bool r2, int l, double fill,
	                      std::vector<std::vector<std::vector<std::pair<elem_id, node_ref>>>> &led) {
		std::vector<elem_id> ids;
		if (r1) ids.push_back(e1);
		if (r2) ids.push_back(e2);
		std::size_t k = ids.size();
		std::vector<node_ref> cur(k * k);
		for (auto &x : cur) x = l ? up_.alloc() : bot_.alloc();
		for (std::size_t a = 0; a < k; ++a)
			for (std::size_t b = 0; b < k; ++b) {
				node_ref x = cur[a * k + b];
				node_ref rf = cur[a * k + (b + 1 == k ? 0 : b + 1)];
				node_ref rb = cur[a * k + (b == 0 ? k - 1 : b - 1)];
				node_ref cf = cur[(a + 1 == k ? 0 : a + 1) * k + b];
				node_ref cb = cur[(a == 0 ? k - 1 : a - 1) * k + b];
				++touched_;
				if (l == 0) {
					bot_[x] = bottom_node{fill, rf, rb, cf, cb, ids[a], ids[b]};
				} else {
					upper_node &u = up_[x];
					u.min_value = kInf;
					u.tag = 0;
					u.row_fwd = rf;
					u.row_bwd = rb;
					u.col_fwd = cf;
					u.col_bwd = cb;
					u.row = ids[a];
					u.col = ids[b];
					u.min_row = u.min_col = ett::none;
					u.child = nil;
				}
			}
		// ledger entries so child hookup still works; a mini level's "row e1"
		// nodes are (e1, *) and "col e1" nodes are (*, e1)
		for (std::size_t a = 0; a < k; ++a)
			for (std::size_t b = 0; b < k; ++b) {
				node_ref x = cur[a * k + b];
				if (ids[a] == e1) led[0][l].push_back({ids[b], x});
				if (ids[a] == e2) led[1][l].push_back({ids[b], x});
				if (ids[b] == e1 && ids[a] != e1 && ids[a] != e2) led[2][l].push_back({ids[a], x});
				if (ids[b] == e2 && ids[a] != e1 && ids[a] != e2) led[3][l].push_back({ids[a], x});
			}
		if (l > 0)
			for (int line = 0; line < 2; ++line) hook_children(led[line][l], led[line][l - 1], l);
	}

	// create the row `re` right after row `pred_row` (in column order); every
	// column at this level receives one new node
	void insert_row_after(elem_id re, elem_id pred_row, int l, node_ref level_node, double fill,
	                      std::vector<std::pair<elem_id, node_ref>> &ledger) {
		node_ref pstart = find_in_col(level_node_for(level_node, l), l, pred_row);
		node_ref first = nil, prev = nil;
		walk_row(pstart, l, [&](node_ref x) {
			node_ref n = l ? up_.alloc() : bot_.alloc();
			node_ref cf = l ? up_[x].col_fwd : bot_[x].col_fwd;
			if (l) {
				upper_node &u = up_[n];
				u.min_value = kInf;
				u.tag = 0;
				u.row = re;
				u.col = col_of(x, l);
				u.min_row = u.min_col = ett::none;
				u.child = nil;
				u.col_bwd = x;
				u.col_fwd = cf;
				up_[x].col_fwd = n;
				up_[cf].col_bwd = n;
				if (prev != nil) {
					up_[prev].row_fwd = n;
					u.row_bwd = prev;
				}
			} else {
				bottom_node &b = bot_[n];
				b.value = fill;
				b.row = re;
				b.col = col_of(x, 0);
				b.col_bwd = x;
				b.col_fwd = cf;
				bot_[x].col_fwd = n;
				bot_[cf].col_bwd = n;
				if (prev != nil) {
					bot_[prev].row_fwd = n;
					b.row_bwd = prev;
				}
			}
			if (first == nil) first = n;
			prev = n;
			ledger.push_back({col_of(x, l), n});
		});
		// close the circular row list
		if (l) {
			up_[prev].row_fwd = first;
			up_[first].row_bwd = prev;
		} else {
			bot_[prev].row_fwd = first;
			bot_[first].row_bwd = prev;
		}
	}

	void insert_col_after(elem_id ce, elem_id pred_col, int l, node_ref level_node, double fill,
	                      std::vector<std::pair<elem_id, node_ref>> &ledger) {
		node_ref pstart = find_in_row(level_node_for(level_node, l), l, pred_col);
		node_ref first = nil, prev = nil;
		walk_col(pstart, l, [&](node_ref x) {
			node_ref n = l ? up_.alloc() : bot_.alloc();
			node_ref rf = l ? up_[x].row_fwd : bot_[x].row_fwd;
			if (l) {
				upper_node &u = up_[n];
				u.min_value = kInf;
				u.tag = 0;
				u.row = row_of(x, l);
				u.col = ce;
				u.min_row = u.min_col = ett::none;
				u.child = nil;
				u.row_bwd = x;
				u.row_fwd = rf;
				up_[x].row_fwd = n;
				up_[rf].row_bwd = n;
				if (prev != nil) {
					up_[prev].col_fwd = n;
					u.col_bwd = prev;
				}
			} else {
				bottom_node &b = bot_[n];
				b.value = fill;
				b.row = row_of(x, 0);
				b.col = ce;
				b.row_bwd = x;
				b.row_fwd = rf;
				bot_[x].row_fwd = n;
				bot_[rf].row_bwd = n;
				if (prev != nil) {
					bot_[prev].col_fwd = n;
					b.col_bwd = prev;
				}
			}
			if (first == nil) first = n;
			prev = n;
			ledger.push_back({row_of(x, l), n});
		});
		if (l) {
			up_[prev].col_fwd = first;
			up_[first].col_bwd = prev;
		} else {
			bot_[prev].col_fwd = first;
			bot_[first].col_bwd = prev;
		}
	}

	node_ref level_node_for(node_ref base, int /*l*/) const { return base; }

	// child pointers for a freshly created line: this level's (elem, node)
	// list is a subsequence of the previous level's
	void hook_children(std::vector<std::pair<elem_id, node_ref>> &cur, std::vector<std::pair<elem_id, node_ref>> &below,
	                   int l) {
		if (l == 0 || cur.empty()) return;
		std::size_t j = 0;
		for (auto &[e, n] : cur) {
			while (j < below.size() && below[j].first != e) ++j;
			if (j == below.size()) {
				// wrap once: creation order may start at a different column
				j = 0;
				while (j < below.size() && below[j].first != e) ++j;
			}
			if (j == below.size()) throw error(errc::internal_invariant_violation, "child hookup failed");
			up_[n].child = below[j].second;
		}
	}

	node_ref top_entry_after_link(elem_id e1, elem_id e2, int h1, int h2,
	                              const std::array<std::vector<node_ref>, 4> &anchor,
	                              const std::vector<elem_id> &tail1, const std::vector<elem_id> &tail2, int new_top) {
		// the top level contains at least one of: a new-line node, an anchor
		for (int line = 0; line < 4; ++line)
			if ((int)line_ledger_[line].size() > new_top && !line_ledger_[line][new_top].empty())
				return line_ledger_[line][new_top].back().second;
		for (int pc = 0; pc < 4; ++pc)
			if (new_top < (int)anchor[pc].size() && anchor[pc][new_top] != nil) return anchor[pc][new_top];
		(void)e1;
		(void)e2;
		(void)h1;
		(void)h2;
		(void)tail1;
		(void)tail2;
		throw error(errc::internal_invariant_violation, "no entry at merged top");
	}

	ett::pool *elems_;
	std::mt19937_64 rng_;
	double p_;
	node_pool<bottom_node> bot_;
	node_pool<upper_node> up_;
	std::uint64_t touched_ = 0;
	std::vector<std::vector<std::vector<std::pair<elem_id, node_ref>>>> line_ledger_;
	bool mini_hooked_ = false;
};

} // namespace dynot::sol
