#include <selfsim/errors.hpp>
#include <selfsim/geometry.hpp>
#include <selfsim/numkernel.hpp>
#include <selfsim/subdivision.hpp>

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace selfsim;

namespace
{
	double coeff_diff(const ElementMap &a, const ElementMap &b)
	{
		double m = 0.0;
		for (const auto &[p, q] : {std::pair{&a.gx(), &b.gx()}, std::pair{&a.gy(), &b.gy()}})
		{
			const int du = std::max(p->deg_u(), q->deg_u()), dv = std::max(p->deg_v(), q->deg_v());
			for (int i = 0; i <= du; ++i)
				for (int j = 0; j <= dv; ++j)
					m = std::max(m, std::abs(p->coeff(i, j) - q->coeff(i, j)));
		}
		return m;
	}

	double area(const ElementMap &G, int n = 10)
	{
		const auto &q = num::gauss_legendre(n);
		double a = 0.0;
		for (int i = 0; i < n; ++i)
			for (int j = 0; j < n; ++j)
				a += q.weights[i] * q.weights[j] * std::abs(G.det_jacobian(q.nodes[i], q.nodes[j]));
		return a;
	}
} // namespace

TEST_CASE("make_sb1")
{
	const auto sb1 = make_sb1();
	CHECK((sb1.global.eval(1, 1) - Eigen::Vector2d(1, 0)).norm() == 0.0);
	CHECK((sb1.global.eval(1, 0) - Eigen::Vector2d(0, 1)).norm() == 0.0);
	REQUIRE(sb1.ring.elements.size() == 1);
	CHECK(sb1.ring.lambda == 0.5);
	for (double v : {0.0, 0.3, 0.8, 1.0})
		CHECK((sb1.ring.elements[0].eval(0.0, v) - sb1.global.eval(0.5, v)).norm() <= 1e-15);
	CHECK(sb1.ring.elements[0].q() == 2);
}

TEST_CASE("make_sb2")
{
	const auto sb2 = make_sb2();
	CHECK((sb2.global.eval(1, 1) - Eigen::Vector2d(1, 0)).norm() == 0.0);
	for (double v : {0.0, 0.4, 1.0})
		CHECK(sb2.global.eval(0.0, v).norm() == 0.0);
	CHECK(sb2.ring.elements[0].q() <= 3);
	CHECK(sb2.ring.elements[0].gx().deg_u() <= 3);
	CHECK(sb2.ring.elements[0].gx().deg_v() <= 3);
}

TEST_CASE("build_mesh")
{
	const auto sb1 = make_sb1();
	auto m0 = build_mesh(sb1.ring, 0);
	CHECK(m0.cells.size() == 1);
	CHECK(m0.cap.kind == CapKind::ScaledSingular);
	CHECK(m0.cap.maps.size() == 1);
	CHECK(m0.cap.scale == 0.5);

	auto m2 = build_mesh(sb1.ring, 2);
	CHECK(m2.cells.size() == 21);
	CHECK(m2.cap.scale == 0.125);

	const auto ds5 = characteristic_ring({Scheme::DooSabin, 5}).ring_spec();
	CHECK(ds5.elements.size() == 15);
	auto m = build_mesh(ds5, 1);
	CHECK(m.cells.size() == 75);
	CHECK(m.cap.kind == CapKind::CoonsPatch);
	CHECK(m.cap.maps.size() == 5);

	SUBCASE("cardinality formula")
	{
		for (int N : {1, 3, 20})
		{
			RingSpec r;
			r.elements.assign(N, ElementMap());
			for (int l = 0; l <= 6; ++l)
			{
				long long expect = 0;
				for (int i = 0; i <= l; ++i)
					expect += N * (1LL << (2 * (l - i)));
				CHECK(ring_cell_count(N, l) == expect);
				if (l <= 4)
					CHECK(static_cast<long long>(build_mesh(r, l, CapKind::Excluded).cells.size()) == expect);
			}
		}
	}

	SUBCASE("cap availability")
	{
		RingSpec bare;
		bare.elements = {ElementMap()};
		CHECK(build_mesh(bare, 1).cap.kind == CapKind::Excluded);
		CHECK_THROWS_AS(build_mesh(bare, 1, CapKind::CoonsPatch), CapUnavailableError);
		CHECK_THROWS_AS(build_mesh(bare, 1, CapKind::ScaledSingular), CapUnavailableError);
		CHECK(build_mesh(sb1.ring, 1, CapKind::Excluded).cap.maps.empty());
		CHECK_THROWS_AS(build_mesh(sb1.ring, -1), ConfigError);
	}

	SUBCASE("sector flags")
	{
		for (const Cell &c : m.cells)
			CHECK(c.in_sector == (c.n < 3));
		CHECK(m.cap.in_sector[0]);
		CHECK_FALSE(m.cap.in_sector[1]);
	}
}

TEST_CASE("cell_map")
{
	const auto sb1 = make_sb1();
	const auto mesh = build_mesh(sb1.ring, 3);
	const ElementMap &G0 = sb1.ring.elements[0];

	CHECK(coeff_diff(cell_map(mesh, {3, 0, 0, 0, 0}), G0.scaled(0.125)) <= 1e-16);
	const auto mesh1 = build_mesh(sb1.ring, 1);
	CHECK(coeff_diff(cell_map(mesh1, {0, 0, 0, 0, 1}), G0.reparam(0, 0, 1)) == 0.0);
	const auto mesh0 = build_mesh(sb1.ring, 0);
	CHECK(coeff_diff(cell_map(mesh0, {0, 0, 0, 0, 0}), G0) == 0.0);

	SUBCASE("self-similarity across rings")
	{
		for (int k = 0; k <= 2; ++k)
			for (int j1 = 0; j1 < (1 << k); ++j1)
				for (int j2 = 0; j2 < (1 << k); ++j2)
				{
					const ElementMap a = cell_map(mesh, {1, 0, j1, j2, k});
					const ElementMap b = cell_map(mesh, {0, 0, j1, j2, k}).scaled(0.5);
					CHECK(coeff_diff(a, b) <= 1e-13 * std::max(1.0, a.gx().max_abs()));
				}
	}

	SUBCASE("element sizes scale like lambda^i / 2^(l-i)")
	{
		const double d0 = estimate_diameter(cell_map(mesh, {0, 0, 0, 0, 3}));
		for (int i = 1; i <= 3; ++i)
		{
			const double di = estimate_diameter(cell_map(mesh, {i, 0, 0, 0, 3 - i}));
			const double ratio = di / d0, expect = std::pow(2.0 * 0.5, i);
			CHECK(ratio <= 4.0 * expect);
			CHECK(ratio >= expect / 4.0);
		}
	}

	SUBCASE("rings tile the scaled ring area")
	{
		const double a0 = area(G0);
		for (int i = 0; i <= 3; ++i)
		{
			double a = 0.0;
			for (const Cell &c : mesh.cells)
				if (c.i == i)
					a += area(cell_map(mesh, c));
			CHECK(std::abs(a - a0 * std::pow(0.25, i)) <= 1e-10 * a0 * std::pow(0.25, i));
		}
	}

	SUBCASE("regular cells have a Jacobian of one sign at quadrature nodes")
	{
		const auto &q = num::gauss_legendre(6);
		for (const Cell &c : mesh.cells)
		{
			const ElementMap G = cell_map(mesh, c);
			CHECK_FALSE(G.allow_singular());
			const double sign = G.det_jacobian(0.5, 0.5) > 0.0 ? 1.0 : -1.0;
			for (double u : q.nodes)
				for (double v : q.nodes)
					CHECK(sign * G.det_jacobian(u, v) > 0.0);
		}
	}
}

TEST_CASE("jacobian")
{
	const ElementMap id;
	CHECK(id.det_jacobian(0.2, 0.9) == 1.0);
	CHECK(make_sb1().global.det_jacobian(0.0, 0.4) == 0.0);
	CHECK(make_curved_quad_example().det_jacobian(0.5, 0.5) == doctest::Approx(1.25));

	const ElementMap G = make_curved_quad_example();
	const auto H = G.hessians(0.3, 0.6);
	// x_uu = 2v - 2v^2, x_uv = 2u - 4uv, x_vv = -2u^2
	CHECK(H[0](0, 0) == doctest::Approx(2 * 0.6 - 2 * 0.36));
	CHECK(H[0](0, 1) == doctest::Approx(2 * 0.3 - 4 * 0.18));
	CHECK(H[0](1, 1) == doctest::Approx(-2 * 0.09));
	CHECK(H[1].norm() == 0.0);
}

TEST_CASE("build_tensor_mesh")
{
	const auto sb2 = make_sb2();
	CHECK(build_tensor_mesh(sb2.global, 0.5, 0).cells.size() == 4);
	const auto m = build_tensor_mesh(sb2.global, 0.5, 2);
	CHECK(m.cells.size() == 64);
	CHECK(m.cap.kind == CapKind::Excluded);
	for (const Cell &c : m.cells)
		CHECK(cell_map(m, c).allow_singular() == (c.j1 == 0));
}

TEST_CASE("mesh json export")
{
	const auto mesh = build_mesh(make_sb1().ring, 1);
	const auto j = mesh_to_json(mesh);
	CHECK(j["level"] == 1);
	CHECK(j["lambda"] == 0.5);
	CHECK(j["cells"].size() == 5);
	CHECK(j["cells"][0].contains("j1"));
	CHECK(j["cap"]["kind"] == "scaled");
	CHECK(j["cap"]["scale"] == 0.25);

	const ElementMap G = make_curved_quad_example();
	const ElementMap back = element_map_from_json(element_map_to_json(G), "map");
	CHECK(coeff_diff(G, back) == 0.0);
	CHECK_THROWS_AS(element_map_from_json(nlohmann::json{{"gx", {{1}}}}, "map"), ConfigError);
}

TEST_CASE("custom domains from json")
{
	const auto sb1 = make_sb1();
	std::ifstream in(SELFSIM_DATA_DIR "/sb1.json");
	REQUIRE(in.good());
	const RingSpec ring = ring_spec_from_json(nlohmann::json::parse(in));
	CHECK(ring.lambda == 0.5);
	REQUIRE(ring.elements.size() == 1);
	CHECK(coeff_diff(ring.elements[0], sb1.ring.elements[0]) == 0.0);
	REQUIRE(ring.global_map.has_value());
	CHECK(ring.global_map->allow_singular());
	CHECK(build_mesh(ring, 1).cap.kind == CapKind::ScaledSingular);

	const auto j = nlohmann::json::parse(R"({"lambda": 0.5, "elements": [{"gx": [[0],[1]], "gy": [[0,1]]}],
		"sector": [0]})");
	const RingSpec square = ring_spec_from_json(j);
	CHECK(square.sector == std::vector<int>{0});
	CHECK(build_mesh(square, 0).cap.kind == CapKind::Excluded);

	auto field_of = [](const char *text) {
		try
		{
			ring_spec_from_json(nlohmann::json::parse(text));
		}
		catch (const ConfigError &e)
		{
			return e.field();
		}
		return std::string("<none>");
	};
	CHECK(field_of(R"({"elements": []})") == "lambda");
	CHECK(field_of(R"({"lambda": 1.5, "elements": []})") == "lambda");
	CHECK(field_of(R"({"lambda": 0.5})") == "elements");
	CHECK(field_of(R"({"lambda": 0.5, "elements": [{"gx": [[1]], "gy": [[0]]}, {"gx": [[1]]}]})") ==
		  "elements[1].gy");
	CHECK(field_of(R"({"lambda": 0.5, "elements": [{"gx": [[1]], "gy": [[0]]}], "sector": [3]})") == "sector");
	CHECK(field_of(R"({"lambda": 0.5, "elements": [{"gx": [[1]], "gy": [[0]]}], "sector": ["a"]})") == "sector[0]");
}

TEST_CASE("parse_cap_kind")
{
	CHECK(parse_cap_kind("coons") == CapKind::CoonsPatch);
	CHECK(parse_cap_kind("scaled") == CapKind::ScaledSingular);
	CHECK(parse_cap_kind("excluded") == CapKind::Excluded);
	CHECK(parse_cap_kind("auto") == CapKind::Auto);
	CHECK_THROWS_AS(parse_cap_kind("none"), ConfigError);
}
