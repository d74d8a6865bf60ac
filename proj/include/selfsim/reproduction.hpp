#pragma once

/// @file reproduction.hpp
/// @brief Reproduction degree of mapped polynomial spaces: the largest total
/// degree t such that every physical polynomial of degree <= t, pulled back by
/// the element map, lies in Q^p.

#include <selfsim/geometry.hpp>

#include <vector>

namespace selfsim
{

	struct DegreeFailures
	{
		int degree = 0;
		std::vector<MonomialIndex> failing;
	};

	struct ReproductionReport
	{
		/// -1 when not even constants are reproduced (never for valid maps).
		int kappa = -1;
		/// One entry per tested total degree 0..min(kappa+1, p).
		std::vector<DegreeFailures> per_degree;
		double tol_used = 0.0;
		/// True when every degree up to the search cap t = p passed.
		bool cap_reached = false;
	};

	inline constexpr double default_reproduction_tol = 1e-9;

	/// Tests monomials x^a y^b of increasing total degree t = 0..p. A
	/// composite is in Q^p when all coefficients with u- or v-exponent above p
	/// satisfy |c| <= tol * max|c|.
	ReproductionReport reproduction_degree(const ElementMap &G, int p, double tol = default_reproduction_tol);

	/// Same test in exact rational arithmetic (doubles convert exactly), so
	/// membership is decided by exact zero tests. Intended for maps with
	/// integer or dyadic coefficients.
	ReproductionReport reproduction_degree_exact(const ElementMap &G, int p);

	/// Minimum reproduction degree over the level-0 ring elements. As a sanity
	/// check, 3 pseudo-random dyadic sub-cells (depth 1 or 2) per element must give the same
	/// value; a mismatch throws NumericalError.
	int min_reproduction_degree(const RingSpec &ring, int p, double tol = default_reproduction_tol);

	/// The kappa0 + 2 monomials of exact total degree kappa0 + 1.
	std::vector<MonomialIndex> maximizing_monomials(int kappa0);

} // namespace selfsim
