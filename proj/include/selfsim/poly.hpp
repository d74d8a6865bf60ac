#pragma once

/// @file poly.hpp
/// @brief Dense bivariate polynomials in the monomial basis u^i v^j.
///
/// The same container serves three roles: components of element maps
/// (in parameter coordinates u, v), pulled-back functions, and physical
/// polynomials psi(x, y), where x plays the role of u and y of v.
///
/// The scalar type is a template parameter so that the reproduction audit
/// can run in exact rational arithmetic on maps with dyadic coefficients.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace selfsim
{

	/// Exponents (alpha, beta) of a physical monomial x^alpha y^beta.
	struct MonomialIndex
	{
		int alpha = 0;
		int beta = 0;

		int total_degree() const { return alpha + beta; }
		friend bool operator==(const MonomialIndex &, const MonomialIndex &) = default;
	};

	enum class Direction
	{
		U,
		V
	};

	template <typename Scalar>
	class BasicPoly2
	{
	public:
		using scalar_type = Scalar;

		/// The zero polynomial of bidegree (0, 0).
		BasicPoly2() : BasicPoly2(0, 0) {}

		/// Zero polynomial with room for bidegree (du, dv).
		BasicPoly2(int du, int dv)
			: du_(du), dv_(dv), c_(static_cast<std::size_t>(du + 1) * (dv + 1), Scalar(0))
		{
			if (du < 0 || dv < 0)
				throw std::invalid_argument("BasicPoly2: negative bidegree");
		}

		/// Builds from a nested coefficient table c[i][j] for u^i v^j.
		static BasicPoly2 from_table(const std::vector<std::vector<Scalar>> &table)
		{
			if (table.empty())
				return BasicPoly2();
			std::size_t cols = 0;
			for (const auto &row : table)
				cols = std::max(cols, row.size());
			BasicPoly2 p(static_cast<int>(table.size()) - 1, std::max<int>(0, static_cast<int>(cols) - 1));
			for (std::size_t i = 0; i < table.size(); ++i)
				for (std::size_t j = 0; j < table[i].size(); ++j)
					p(static_cast<int>(i), static_cast<int>(j)) = table[i][j];
			return p;
		}

		static BasicPoly2 constant(Scalar c)
		{
			BasicPoly2 p(0, 0);
			p(0, 0) = c;
			return p;
		}

		static BasicPoly2 monomial(int i, int j, Scalar c = Scalar(1))
		{
			BasicPoly2 p(i, j);
			p(i, j) = c;
			return p;
		}

		static BasicPoly2 u() { return monomial(1, 0); }
		static BasicPoly2 v() { return monomial(0, 1); }

		int deg_u() const { return du_; }
		int deg_v() const { return dv_; }

		Scalar &operator()(int i, int j)
		{
			assert(i >= 0 && i <= du_ && j >= 0 && j <= dv_);
			return c_[static_cast<std::size_t>(i) * (dv_ + 1) + j];
		}

		const Scalar &operator()(int i, int j) const
		{
			assert(i >= 0 && i <= du_ && j >= 0 && j <= dv_);
			return c_[static_cast<std::size_t>(i) * (dv_ + 1) + j];
		}

		// coefficient access only; evaluation goes through eval()
		template <typename A, typename B>
			requires(!std::is_integral_v<A> || !std::is_integral_v<B>)
		void operator()(A, B) const = delete;

		/// Coefficient of u^i v^j; zero outside the stored bidegree.
		Scalar coeff(int i, int j) const
		{
			if (i < 0 || j < 0 || i > du_ || j > dv_)
				return Scalar(0);
			return (*this)(i, j);
		}

		const std::vector<Scalar> &data() const { return c_; }

		/// Horner evaluation in both directions.
		Scalar eval(const Scalar &u, const Scalar &v) const
		{
			Scalar result(0);
			for (int i = du_; i >= 0; --i)
			{
				Scalar row(0);
				for (int j = dv_; j >= 0; --j)
					row = row * v + (*this)(i, j);
				result = result * u + row;
			}
			return result;
		}

		Scalar max_abs() const
		{
			Scalar m(0);
			for (const auto &x : c_)
			{
				const Scalar a = x < Scalar(0) ? Scalar(-x) : x;
				if (a > m)
					m = a;
			}
			return m;
		}

		/// Drops trailing rows and columns whose entries are all "zero", i.e.
		/// |c| <= rel_tol * max|c|. With rel_tol = 0 only exact zeros are dropped.
		BasicPoly2 trimmed(double rel_tol = 1e-12) const
		{
			const Scalar thresh = Scalar(rel_tol) * max_abs();
			auto is_zero = [&](const Scalar &x) {
				const Scalar a = x < Scalar(0) ? Scalar(-x) : x;
				return a <= thresh;
			};
			int nu = 0, nv = 0;
			for (int i = 0; i <= du_; ++i)
				for (int j = 0; j <= dv_; ++j)
					if (!is_zero((*this)(i, j)))
					{
						nu = std::max(nu, i);
						nv = std::max(nv, j);
					}
			BasicPoly2 out(nu, nv);
			for (int i = 0; i <= nu; ++i)
				for (int j = 0; j <= nv; ++j)
					out(i, j) = is_zero((*this)(i, j)) ? Scalar(0) : (*this)(i, j);
			return out;
		}

		/// Largest i + j over coefficients that are not zero (exact test).
		int total_degree() const
		{
			int t = 0;
			for (int i = 0; i <= du_; ++i)
				for (int j = 0; j <= dv_; ++j)
					if ((*this)(i, j) != Scalar(0))
						t = std::max(t, i + j);
			return t;
		}

		BasicPoly2 &operator+=(const BasicPoly2 &o)
		{
			if (o.du_ > du_ || o.dv_ > dv_)
				*this = resized(std::max(du_, o.du_), std::max(dv_, o.dv_));
			for (int i = 0; i <= o.du_; ++i)
				for (int j = 0; j <= o.dv_; ++j)
					(*this)(i, j) += o(i, j);
			return *this;
		}

		BasicPoly2 &operator-=(const BasicPoly2 &o)
		{
			if (o.du_ > du_ || o.dv_ > dv_)
				*this = resized(std::max(du_, o.du_), std::max(dv_, o.dv_));
			for (int i = 0; i <= o.du_; ++i)
				for (int j = 0; j <= o.dv_; ++j)
					(*this)(i, j) -= o(i, j);
			return *this;
		}

		BasicPoly2 &operator*=(const Scalar &s)
		{
			for (auto &x : c_)
				x *= s;
			return *this;
		}

		friend BasicPoly2 operator+(BasicPoly2 a, const BasicPoly2 &b) { return a += b; }
		friend BasicPoly2 operator-(BasicPoly2 a, const BasicPoly2 &b) { return a -= b; }
		friend BasicPoly2 operator*(BasicPoly2 a, const Scalar &s) { return a *= s; }
		friend BasicPoly2 operator*(const Scalar &s, BasicPoly2 a) { return a *= s; }
		friend BasicPoly2 operator-(BasicPoly2 a)
		{
			a *= Scalar(-1);
			return a;
		}

		/// Coefficient convolution; bidegrees add.
		friend BasicPoly2 operator*(const BasicPoly2 &a, const BasicPoly2 &b)
		{
			BasicPoly2 out(a.du_ + b.du_, a.dv_ + b.dv_);
			for (int i = 0; i <= a.du_; ++i)
				for (int j = 0; j <= a.dv_; ++j)
				{
					const Scalar &ca = a(i, j);
					if (ca == Scalar(0))
						continue;
					for (int k = 0; k <= b.du_; ++k)
						for (int l = 0; l <= b.dv_; ++l)
							out(i + k, j + l) += ca * b(k, l);
				}
			return out;
		}

		friend bool operator==(const BasicPoly2 &a, const BasicPoly2 &b)
		{
			const int du = std::max(a.du_, b.du_), dv = std::max(a.dv_, b.dv_);
			for (int i = 0; i <= du; ++i)
				for (int j = 0; j <= dv; ++j)
					if (a.coeff(i, j) != b.coeff(i, j))
						return false;
			return true;
		}

		/// Copy with a different storage bidegree (truncates if smaller).
		BasicPoly2 resized(int du, int dv) const
		{
			BasicPoly2 out(du, dv);
			for (int i = 0; i <= std::min(du, du_); ++i)
				for (int j = 0; j <= std::min(dv, dv_); ++j)
					out(i, j) = (*this)(i, j);
			return out;
		}

	private:
		int du_;
		int dv_;
		std::vector<Scalar> c_;
	};

	using Poly2 = BasicPoly2<double>;

	template <typename Scalar>
	BasicPoly2<Scalar> pow(const BasicPoly2<Scalar> &p, int n)
	{
		if (n < 0)
			throw std::invalid_argument("pow: negative exponent");
		BasicPoly2<Scalar> result = BasicPoly2<Scalar>::constant(Scalar(1));
		BasicPoly2<Scalar> base = p;
		while (n > 0)
		{
			if (n & 1)
				result = result * base;
			n >>= 1;
			if (n > 0)
				base = base * base;
		}
		return result;
	}

	template <typename Scalar>
	BasicPoly2<Scalar> partial_derivative(const BasicPoly2<Scalar> &p, Direction dir)
	{
		if (dir == Direction::U)
		{
			if (p.deg_u() == 0)
				return BasicPoly2<Scalar>(0, p.deg_v());
			BasicPoly2<Scalar> out(p.deg_u() - 1, p.deg_v());
			for (int i = 1; i <= p.deg_u(); ++i)
				for (int j = 0; j <= p.deg_v(); ++j)
					out(i - 1, j) = Scalar(i) * p(i, j);
			return out;
		}
		if (p.deg_v() == 0)
			return BasicPoly2<Scalar>(p.deg_u(), 0);
		BasicPoly2<Scalar> out(p.deg_u(), p.deg_v() - 1);
		for (int i = 0; i <= p.deg_u(); ++i)
			for (int j = 1; j <= p.deg_v(); ++j)
				out(i, j - 1) = Scalar(j) * p(i, j);
		return out;
	}

	/// Substitutes u <- u0 + su * u and v <- v0 + sv * v. Bidegree is preserved.
	template <typename Scalar>
	BasicPoly2<Scalar> affine_substitute(const BasicPoly2<Scalar> &p,
										 const Scalar &u0, const Scalar &su,
										 const Scalar &v0, const Scalar &sv)
	{
		const int du = p.deg_u(), dv = p.deg_v();
		// binomial expansion tables: (a + s t)^n = sum_k C(n,k) a^(n-k) s^k t^k
		auto expansion = [](int n, const Scalar &a, const Scalar &s) {
			std::vector<std::vector<Scalar>> t(n + 1, std::vector<Scalar>(n + 1, Scalar(0)));
			t[0][0] = Scalar(1);
			for (int m = 1; m <= n; ++m)
				for (int k = 0; k <= m; ++k)
				{
					Scalar val(0);
					if (k <= m - 1)
						val += a * t[m - 1][k];
					if (k >= 1)
						val += s * t[m - 1][k - 1];
					t[m][k] = val;
				}
			return t;
		};
		const auto eu = expansion(du, u0, su);
		const auto ev = expansion(dv, v0, sv);
		BasicPoly2<Scalar> out(du, dv);
		for (int i = 0; i <= du; ++i)
			for (int j = 0; j <= dv; ++j)
			{
				const Scalar &c = p(i, j);
				if (c == Scalar(0))
					continue;
				for (int k = 0; k <= i; ++k)
					for (int l = 0; l <= j; ++l)
						out(k, l) += c * eu[i][k] * ev[j][l];
			}
		return out;
	}

	/// Restriction to the dyadic cell ](j1 + [0,1]) / 2^k[ x ](j2 + [0,1]) / 2^k[,
	/// re-expressed in the cell-local parameters.
	template <typename Scalar>
	BasicPoly2<Scalar> reparam_to_cell(const BasicPoly2<Scalar> &p, int j1, int j2, int k)
	{
		if (k < 0 || j1 < 0 || j2 < 0 || j1 >= (1 << k) || j2 >= (1 << k))
			throw std::invalid_argument("reparam_to_cell: cell index out of range");
		const Scalar h = Scalar(1) / Scalar(1 << k);
		return affine_substitute(p, Scalar(j1) * h, h, Scalar(j2) * h, h);
	}

	/// Expands psi(gx(u,v), gy(u,v)) exactly, with psi given in (x, y) monomials.
	template <typename Scalar>
	BasicPoly2<Scalar> compose(const BasicPoly2<Scalar> &psi,
							   const BasicPoly2<Scalar> &gx, const BasicPoly2<Scalar> &gy)
	{
		const int ax = psi.deg_u(), ay = psi.deg_v();
		std::vector<BasicPoly2<Scalar>> xp(ax + 1), yp(ay + 1);
		xp[0] = BasicPoly2<Scalar>::constant(Scalar(1));
		for (int a = 1; a <= ax; ++a)
			xp[a] = xp[a - 1] * gx;
		yp[0] = BasicPoly2<Scalar>::constant(Scalar(1));
		for (int b = 1; b <= ay; ++b)
			yp[b] = yp[b - 1] * gy;
		BasicPoly2<Scalar> out;
		for (int a = 0; a <= ax; ++a)
			for (int b = 0; b <= ay; ++b)
			{
				const Scalar &c = psi(a, b);
				if (c == Scalar(0))
					continue;
				out += (xp[a] * yp[b]) * c;
			}
		return out;
	}

	template <typename Scalar>
	BasicPoly2<Scalar> compose(MonomialIndex m,
							   const BasicPoly2<Scalar> &gx, const BasicPoly2<Scalar> &gy)
	{
		return pow(gx, m.alpha) * pow(gy, m.beta);
	}

	/// Factor mu^(alpha+beta) with psi(mu x, mu y) = factor * psi(x, y).
	inline double scale_physical(MonomialIndex m, double mu)
	{
		if (!(mu > 0.0))
			throw std::invalid_argument("scale_physical: mu must be positive");
		return std::pow(mu, m.alpha + m.beta);
	}

	/// All monomials of exact total degree t, ordered x^t, x^(t-1) y, ..., y^t.
	inline std::vector<MonomialIndex> monomials_of_degree(int t)
	{
		std::vector<MonomialIndex> out;
		for (int b = 0; b <= t; ++b)
			out.push_back({t - b, b});
		return out;
	}

} // namespace selfsim
