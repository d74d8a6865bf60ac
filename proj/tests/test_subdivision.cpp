#include <selfsim/errors.hpp>
#include <selfsim/numkernel.hpp>
#include <selfsim/reproduction.hpp>
#include <selfsim/subdivision.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace selfsim;

namespace
{
	std::vector<double> eigen_moduli(const Eigen::MatrixXd &S)
	{
		Eigen::EigenSolver<Eigen::MatrixXd> es(S);
		std::vector<double> m;
		for (Eigen::Index i = 0; i < S.rows(); ++i)
			m.push_back(std::abs(es.eigenvalues()(i)));
		std::sort(m.rbegin(), m.rend());
		return m;
	}

	const std::vector<double> samples{0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
} // namespace

TEST_CASE("subdivision_matrix")
{
	for (Scheme s : {Scheme::DooSabin, Scheme::CatmullClark})
		for (int n : {3, 4, 5, 6})
			for (int R : {1, 2, 3})
			{
				const auto m = subdivision_matrix({s, n}, R);
				const Eigen::VectorXd rows = m.S.rowwise().sum();
				CHECK((rows.array() - 1.0).abs().maxCoeff() <= 1e-15);
			}
	CHECK(subdivision_matrix({Scheme::DooSabin, 5}).S.rows() == 20);
	CHECK(subdivision_matrix({Scheme::CatmullClark, 5}).S.rows() == 11);
	CHECK(subdivision_matrix({Scheme::CatmullClark, 5}, 3).S.rows() == 61);
	CHECK_THROWS_AS(subdivision_matrix({Scheme::CatmullClark, 2}), UnsupportedValenceError);
	CHECK_THROWS_AS(subdivision_matrix({Scheme::DooSabin, 51}), UnsupportedValenceError);

	SUBCASE("dominant eigenvalue is simple and equals one")
	{
		for (Scheme s : {Scheme::DooSabin, Scheme::CatmullClark})
			for (int n : {3, 5, 6})
			{
				const auto mod = eigen_moduli(subdivision_matrix({s, n}).S);
				CHECK(mod[0] == doctest::Approx(1.0).epsilon(1e-12));
				CHECK(mod[1] < 1.0 - 1e-6);
			}
	}

	SUBCASE("eigenvalue ordering 1 > lambda > |mu|")
	{
		for (Scheme s : {Scheme::DooSabin, Scheme::CatmullClark})
			for (int n = 3; n <= 10; ++n)
			{
				const double lam = subdominant_lambda({s, n});
				const auto mod = eigen_moduli(subdivision_matrix({s, n}, 2).S);
				CHECK(mod[1] == doctest::Approx(lam).epsilon(1e-10));
				CHECK(mod[2] == doctest::Approx(lam).epsilon(1e-10));
				CHECK(mod[3] < lam - 1e-8);
			}
	}
}

TEST_CASE("subdominant_lambda")
{
	CHECK(subdominant_lambda({Scheme::DooSabin, 3}) == doctest::Approx(0.5).epsilon(1e-12));
	CHECK(std::abs(subdominant_lambda({Scheme::CatmullClark, 3}) - 0.410097) <= 1e-6);
	CHECK(std::abs(subdominant_lambda({Scheme::CatmullClark, 5}) - 0.549988) <= 1e-6);
	CHECK(std::abs(subdominant_lambda({Scheme::CatmullClark, 6}) - 0.579682) <= 1e-6);
	CHECK(subdominant_lambda({Scheme::CatmullClark, 4}) == doctest::Approx(0.5).epsilon(1e-12));
	// the extended neighbourhood carries the same eigenvalue
	for (int n : {3, 7})
		CHECK(characteristic_ring({Scheme::CatmullClark, n}).lambda ==
			  doctest::Approx(subdominant_lambda({Scheme::CatmullClark, n})).epsilon(1e-12));
}

TEST_CASE("characteristic_ring")
{
	for (Scheme s : {Scheme::DooSabin, Scheme::CatmullClark})
		for (int n : {3, 4, 5, 6})
		{
			CAPTURE(n);
			const auto ring = characteristic_ring({s, n});
			REQUIRE(ring.patches.size() == static_cast<std::size_t>(3 * n));
			const int d = s == Scheme::DooSabin ? 2 : 3;
			for (const auto &P : ring.patches)
				CHECK(P.q() == d);

			// normalization: sector-edge ring point at (1, 0)
			CHECK((ring.patches[0].eval(1.0, 0.0) - Eigen::Vector2d(1, 0)).norm() <= 1e-12);

			// regularity at quadrature nodes
			const auto &q = num::gauss_legendre(d + 4);
			for (const auto &P : ring.patches)
				for (double u : q.nodes)
					for (double v : q.nodes)
						CHECK(P.det_jacobian(u, v) > 0.0);

			// C0 compatibility within and across sectors
			for (int j = 0; j < n; ++j)
			{
				const auto &a = ring.patches[3 * j], &b = ring.patches[3 * j + 1], &c = ring.patches[3 * j + 2];
				const auto &next = ring.patches[3 * ((j + 1) % n)];
				for (double t : samples)
				{
					CHECK((a.eval(t, 1.0) - b.eval(t, 0.0)).norm() <= 1e-10);
					CHECK((b.eval(0.0, t) - c.eval(1.0, t)).norm() <= 1e-10);
					CHECK((c.eval(0.0, t) - next.eval(t, 0.0)).norm() <= 1e-10);
				}
			}

			// rotational symmetry
			for (int j = 1; j < n; ++j)
			{
				const double th = 2.0 * std::numbers::pi * j / n;
				Eigen::Matrix2d rot;
				rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
				for (int e = 0; e < 3; ++e)
					for (double t : samples)
						CHECK((ring.patches[3 * j + e].eval(t, 1.0 - t) - rot * ring.patches[e].eval(t, 1.0 - t)).norm() <=
							  1e-10);
			}

			// self-similarity: one subdivision step scales the patches by lambda
			std::vector<Eigen::Vector2d> refined(ring.control_points.size());
			for (std::size_t r = 0; r < refined.size(); ++r)
			{
				refined[r].setZero();
				for (std::size_t c = 0; c < refined.size(); ++c)
					refined[r] += ring.net.S(r, c) * ring.control_points[c];
			}
			const auto fine = ring.patches_from_net(refined);
			for (std::size_t e = 0; e < fine.size(); ++e)
			{
				const auto scaled = ring.patches[e].scaled(ring.lambda);
				for (int i = 0; i <= d; ++i)
					for (int k = 0; k <= d; ++k)
					{
						CHECK(std::abs(fine[e].gx()(i, k) - scaled.gx()(i, k)) <= 1e-9);
						CHECK(std::abs(fine[e].gy()(i, k) - scaled.gy()(i, k)) <= 1e-9);
					}
			}
		}
}

TEST_CASE("regular valence reproduces the bicubic grid")
{
	const auto ring = characteristic_ring({Scheme::CatmullClark, 4});
	CHECK(ring.lambda == doctest::Approx(0.5));
	for (const auto &P : ring.patches)
	{
		CHECK(P.gx().trimmed(1e-10).total_degree() <= 1);
		CHECK(P.gy().trimmed(1e-10).total_degree() <= 1);
		for (int p = 1; p <= 4; ++p)
			CHECK(reproduction_degree(P, p).kappa == p);
	}
}

TEST_CASE("coons_cap")
{
	for (Scheme s : {Scheme::DooSabin, Scheme::CatmullClark})
		for (int n : {3, 5})
		{
			const auto ring = characteristic_ring({s, n});
			const auto pieces = coons_cap_pieces(ring);
			REQUIRE(pieces.size() == static_cast<std::size_t>(n));
			for (int j = 0; j < n; ++j)
			{
				const auto &C = pieces[j];
				CHECK(C.q() == ring.scheme.degree());
				CHECK(C.eval(0.0, 0.0).norm() <= 1e-15);
				for (double t : samples)
				{
					CHECK((C.eval(1.0, t) - ring.patches[3 * j].eval(0.0, t)).norm() <= 1e-10);
					CHECK((C.eval(t, 1.0) - ring.patches[3 * j + 2].eval(t, 0.0)).norm() <= 1e-10);
					// neighbouring caps share the straight sector boundary
					CHECK((C.eval(0.0, t) - pieces[(j + 1) % n].eval(t, 0.0)).norm() <= 1e-10);
				}
			}

			for (int level : {0, 2})
			{
				const CapSpec cap = coons_cap(ring, level);
				CHECK(cap.scale == doctest::Approx(std::pow(ring.lambda, level + 1)));
				const double s = std::pow(ring.lambda, level);
				for (double t : samples)
					CHECK((cap.maps[0].eval(1.0, t) - s * ring.patches[0].eval(0.0, t)).norm() <= 1e-10);
			}
		}

	const auto cc = characteristic_ring({Scheme::CatmullClark, 5});
	CHECK(reproduction_degree(coons_cap_pieces(cc)[0], 3).kappa == 1);
}

TEST_CASE("scheme parsing and json")
{
	const SchemeId id = parse_scheme("cc:5");
	CHECK(id.scheme == Scheme::CatmullClark);
	CHECK(id.valence == 5);
	CHECK(parse_scheme("ds:3").scheme == Scheme::DooSabin);
	CHECK_THROWS_AS(parse_scheme("cc"), ConfigError);
	CHECK_THROWS_AS(parse_scheme("xx:3"), ConfigError);
	CHECK_THROWS_AS(parse_scheme("cc:2"), ConfigError);
	CHECK_THROWS_AS(parse_scheme("cc:5x"), ConfigError);

	const auto j = characteristic_ring_to_json(characteristic_ring({Scheme::CatmullClark, 5}));
	CHECK(std::abs(j["lambda"].get<double>() - 0.549988) <= 1e-6);
	CHECK(j["patches"].size() == 15);
	CHECK(j["cap_pieces"].size() == 5);
	CHECK(j["control_net"].size() == 61);
	CHECK(characteristic_ring_to_json(characteristic_ring({Scheme::DooSabin, 3}))["lambda"].get<double>() ==
		  doctest::Approx(0.5));
}
