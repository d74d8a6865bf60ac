#include <selfsim/reproduction.hpp>

#include <selfsim/errors.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace selfsim
{

	namespace
	{
		using Rational = boost::multiprecision::cpp_rational;
		using RationalPoly = BasicPoly2<Rational>;

		RationalPoly to_rational(const Poly2 &p)
		{
			RationalPoly out(p.deg_u(), p.deg_v());
			for (int i = 0; i <= p.deg_u(); ++i)
				for (int j = 0; j <= p.deg_v(); ++j)
					out(i, j) = Rational(p(i, j));
			return out;
		}

		template <typename Scalar, typename InQp>
		ReproductionReport search(const BasicPoly2<Scalar> &gx, const BasicPoly2<Scalar> &gy, int p, InQp in_qp)
		{
			if (p < 0)
				throw std::invalid_argument("reproduction_degree: p must be non-negative");
			ReproductionReport report;
			for (int t = 0; t <= p; ++t)
			{
				DegreeFailures f{t, {}};
				for (const MonomialIndex &m : monomials_of_degree(t))
					if (!in_qp(compose(m, gx, gy)))
						f.failing.push_back(m);
				const bool ok = f.failing.empty();
				report.per_degree.push_back(std::move(f));
				if (!ok)
					return report;
				report.kappa = t;
			}
			report.cap_reached = true;
			return report;
		}
	} // namespace

	ReproductionReport reproduction_degree(const ElementMap &G, int p, double tol)
	{
		auto in_qp = [&](const Poly2 &c) {
			const double thresh = tol * c.max_abs();
			for (int i = 0; i <= c.deg_u(); ++i)
				for (int j = 0; j <= c.deg_v(); ++j)
					if ((i > p || j > p) && std::abs(c(i, j)) > thresh)
						return false;
			return true;
		};
		ReproductionReport r = search(G.gx(), G.gy(), p, in_qp);
		r.tol_used = tol;
		return r;
	}

	ReproductionReport reproduction_degree_exact(const ElementMap &G, int p)
	{
		auto in_qp = [&](const RationalPoly &c) {
			for (int i = 0; i <= c.deg_u(); ++i)
				for (int j = 0; j <= c.deg_v(); ++j)
					if ((i > p || j > p) && c(i, j) != 0)
						return false;
			return true;
		};
		ReproductionReport r = search(to_rational(G.gx()), to_rational(G.gy()), p, in_qp);
		r.tol_used = 0.0;
		return r;
	}

	int min_reproduction_degree(const RingSpec &ring, int p, double tol)
	{
		if (ring.elements.empty())
			throw ConfigError("elements", "ring needs at least one element");
		std::mt19937 rng(20240611u);
		int kappa0 = std::numeric_limits<int>::max();
		for (const ElementMap &G : ring.elements)
		{
			const int kappa = reproduction_degree(G, p, tol).kappa;
			for (int s = 0; s < 3; ++s)
			{
				// deeper cells shrink the out-of-Q^p coefficients below the relative tolerance
				const int k = 1 + static_cast<int>(rng() % 2);
				std::uniform_int_distribution<int> pick(0, (1 << k) - 1);
				const int j1 = pick(rng), j2 = pick(rng);
				const int sub = reproduction_degree(G.reparam(j1, j2, k), p, tol).kappa;
				if (sub != kappa)
					throw NumericalError("reproduction degree of sub-cell (" + std::to_string(j1) + "," +
										 std::to_string(j2) + "," + std::to_string(k) + ") differs from its element");
			}
			kappa0 = std::min(kappa0, kappa);
		}
		return kappa0;
	}

	std::vector<MonomialIndex> maximizing_monomials(int kappa0)
	{
		if (kappa0 < 0)
			throw std::invalid_argument("maximizing_monomials: kappa0 must be non-negative");
		return monomials_of_degree(kappa0 + 1);
	}

} // namespace selfsim
