#include <selfsim/errors.hpp>
#include <selfsim/geometry.hpp>
#include <selfsim/reproduction.hpp>
#include <selfsim/subdivision.hpp>

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace selfsim;

namespace
{
	bool contains(const std::vector<MonomialIndex> &v, MonomialIndex m)
	{
		return std::find(v.begin(), v.end(), m) != v.end();
	}
} // namespace

TEST_CASE("curved quadrilateral")
{
	const ElementMap G = make_curved_quad_example();
	for (bool exact : {false, true})
	{
		CAPTURE(exact);
		const auto r2 = exact ? reproduction_degree_exact(G, 2) : reproduction_degree(G, 2);
		CHECK(r2.kappa == 1);
		CHECK_FALSE(r2.cap_reached);
		REQUIRE(r2.per_degree.size() == 3);
		const auto &fail = r2.per_degree[2].failing;
		CHECK(fail.size() == 2);
		CHECK(contains(fail, {2, 0}));
		CHECK(contains(fail, {1, 1}));
		CHECK_FALSE(contains(fail, {0, 2}));

		const auto r4 = exact ? reproduction_degree_exact(G, 4) : reproduction_degree(G, 4);
		CHECK(r4.kappa == 2);
	}
}

TEST_CASE("identity map reaches the cap")
{
	const auto r = reproduction_degree(ElementMap(), 3);
	CHECK(r.kappa == 3);
	CHECK(r.cap_reached);
	CHECK(r.per_degree.size() == 4);
	CHECK(reproduction_degree_exact(ElementMap(), 3).kappa == 3);
}

TEST_CASE("ring reproduction degrees")
{
	const auto sb1 = make_sb1();
	for (int p = 1; p <= 6; ++p)
		CHECK(min_reproduction_degree(sb1.ring, p) == p / 2);
	CHECK(min_reproduction_degree(make_sb2().ring, 2) == 0);
	CHECK(min_reproduction_degree(characteristic_ring({Scheme::CatmullClark, 5}).ring_spec(), 3) == 1);
	CHECK(min_reproduction_degree(characteristic_ring({Scheme::CatmullClark, 3}).ring_spec(), 3) == 1);
	CHECK(min_reproduction_degree(characteristic_ring({Scheme::DooSabin, 4}).ring_spec(), 2) == 2);
	CHECK(min_reproduction_degree(characteristic_ring({Scheme::DooSabin, 5}).ring_spec(), 2) == 1);
	CHECK_THROWS_AS(min_reproduction_degree(RingSpec{}, 2), ConfigError);
}

TEST_CASE("maximizing monomials")
{
	const auto m = maximizing_monomials(1);
	REQUIRE(m.size() == 3);
	CHECK(m[0] == MonomialIndex{2, 0});
	CHECK(m[1] == MonomialIndex{1, 1});
	CHECK(m[2] == MonomialIndex{0, 2});
	CHECK(maximizing_monomials(3).size() == 5);
}

TEST_CASE("sub-cells inherit the reproduction degree")
{
	std::mt19937 rng(7);
	const std::vector<ElementMap> maps{make_sb1().ring.elements[0], make_sb2().ring.elements[0],
									   make_curved_quad_example(),
									   characteristic_ring({Scheme::CatmullClark, 5}).patches[1]};
	for (const ElementMap &G : maps)
		for (int p = 2; p <= 4; ++p)
		{
			const int kappa = reproduction_degree(G, p).kappa;
			for (int s = 0; s < 10; ++s)
			{
				// depth <= 2: deeper cells push genuine failures below the relative tolerance
				const int k = 1 + static_cast<int>(rng() % 2);
				const int j1 = static_cast<int>(rng() % (1u << k)), j2 = static_cast<int>(rng() % (1u << k));
				CHECK(reproduction_degree(G.reparam(j1, j2, k), p).kappa == kappa);
			}
			for (double mu : {0.5, 0.41, 3.0})
				CHECK(reproduction_degree(G.scaled(mu), p).kappa == kappa);
		}
}

TEST_CASE("monotone in p and bounded below by floor(p/q)")
{
	const std::vector<ElementMap> maps{make_sb1().global, make_sb2().global, make_curved_quad_example(),
									   characteristic_ring({Scheme::DooSabin, 3}).patches[0]};
	for (const ElementMap &G : maps)
	{
		int prev = -1;
		for (int p = 0; p <= 6; ++p)
		{
			const int kappa = reproduction_degree(G, p).kappa;
			CHECK(kappa >= prev);
			CHECK(kappa >= p / G.q());
			CHECK(kappa <= p);
			prev = kappa;
		}
	}
}

TEST_CASE("exact and tolerance modes agree on dyadic maps")
{
	const std::vector<ElementMap> maps{make_sb1().global, make_sb1().ring.elements[0], make_sb2().global,
									   make_sb2().ring.elements[0], make_curved_quad_example()};
	for (const ElementMap &G : maps)
		for (int p = 0; p <= 6; ++p)
			CHECK(reproduction_degree(G, p).kappa == reproduction_degree_exact(G, p).kappa);
}
