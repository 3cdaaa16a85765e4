#pragma once
#include <cassert>
#include <cmath>
#include <limits>

namespace dynot {

// Real value extended with +infinity. Addition saturates; subtracting an
// infinite value is a program error (there is no -infinity in this model).
struct ext_scalar {
	double v = 0;

	constexpr ext_scalar() = default;
	constexpr explicit ext_scalar(double x) : v(x) {}

	static constexpr ext_scalar infinity() { return ext_scalar(std::numeric_limits<double>::infinity()); }
	constexpr bool finite() const { return v != std::numeric_limits<double>::infinity(); }

	friend constexpr ext_scalar operator+(ext_scalar a, ext_scalar b) {
		assert(a.v == a.v && b.v == b.v);
		return ext_scalar(a.v + b.v);
	}
	friend constexpr ext_scalar operator+(ext_scalar a, double b) { return a + ext_scalar(b); }
	friend ext_scalar operator-(ext_scalar a, ext_scalar b) {
		assert(b.finite() && "subtraction of an infinite value");
		return ext_scalar(a.v - b.v);
	}
	friend constexpr bool operator==(ext_scalar a, ext_scalar b) { return a.v == b.v; }
	friend constexpr bool operator<(ext_scalar a, ext_scalar b) { return a.v < b.v; }
	friend constexpr bool operator<=(ext_scalar a, ext_scalar b) { return a.v <= b.v; }

	friend constexpr ext_scalar min(ext_scalar a, ext_scalar b) { return a.v <= b.v ? a : b; }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace dynot
