#include <selfsim/rates.hpp>
#include <selfsim/subdivision.hpp>

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace selfsim;

TEST_CASE("observed_rates")
{
	const auto r = observed_rates({1.0, 0.25, 0.0625});
	REQUIRE(r.steps.size() == 2);
	CHECK(*r.steps[0] == doctest::Approx(2.0));
	CHECK(*r.final_step() == doctest::Approx(2.0));
	CHECK(*r.tail_fit == doctest::Approx(2.0));

	const auto z = observed_rates({1.0, 0.0, 0.5});
	CHECK_FALSE(z.steps[0].has_value());
	CHECK_FALSE(z.steps[1].has_value());

	// sqrt(l + 1) 2^-3l has exact rate 3 once the root is removed
	std::vector<double> e;
	for (int l = 0; l <= 5; ++l)
		e.push_back(std::sqrt(l + 1.0) * std::pow(2.0, -3 * l));
	CHECK(*observed_rates(e).final_step() < 3.0);
	CHECK(*observed_rates(e, 2.0, true).final_step() == doctest::Approx(3.0));

	const auto lam = observed_rates({1.0, std::pow(0.41, 3)}, 0.41);
	CHECK(*lam.final_step() == doctest::Approx(3.0));

	CHECK_THROWS_AS(observed_rates({1.0}), std::invalid_argument);
	CHECK_THROWS_AS(observed_rates({1.0, 0.5}, 1.0), std::invalid_argument);
}

TEST_CASE("predict_bounds")
{
	const auto a = predict_bounds(3, 1, 0.410097, 0);
	CHECK(a.rate_case == RateCase::A);
	CHECK(a.descriptor() == "2^-3.85789");

	const auto c4 = predict_bounds(3, 3, 0.5, 0);
	CHECK(c4.rate_case == RateCase::C);
	CHECK(c4.descriptor() == "2^-4.00000");

	const auto b = predict_bounds(2, 1, 0.5, 0);
	CHECK(b.rate_case == RateCase::B);
	CHECK(b.sqrt_factor);
	CHECK(b.descriptor() == "sqrt(1+l)*2^-3.00000");

	const auto c = predict_bounds(3, 1, 0.549988, 0);
	CHECK(c.rate_case == RateCase::A);
	CHECK(c.factor == doctest::Approx(std::pow(0.549988, 3)));

	CHECK(predict_bounds(2, 1, 0.5, 1).rate_case == RateCase::B);
	CHECK(predict_bounds(2, 1, 0.5, 0).linf_descriptor() == "2^-2.00000");
	CHECK(format_rate(1.0) == "2^0.00000");

	CHECK_THROWS_AS(predict_bounds(2, 1, 1.0, 0), std::invalid_argument);
	CHECK_THROWS_AS(predict_bounds(2, 1, 0.5, 3), std::invalid_argument);
	CHECK_THROWS_AS(predict_bounds(-1, 1, 0.5, 0), std::invalid_argument);
}

TEST_CASE("cases are exhaustive and the bound weakens with r")
{
	for (int p = 0; p <= 6; ++p)
		for (int kappa0 = 0; kappa0 <= p; ++kappa0)
			for (double lambda : {0.1, 0.25, 0.41, 0.5, 0.55, 0.9})
			{
				double prev = 0.0;
				for (int r = 0; r <= kappa0 + 1; ++r)
				{
					const auto b = predict_bounds(p, kappa0, lambda, r);
					CHECK(b.factor == doctest::Approx(std::max(b.A, b.B)));
					CHECK(b.factor >= prev);
					prev = b.factor;
				}
			}
}

TEST_CASE("summary tables match the golden rendering")
{
	std::ostringstream out;
	write_summary_tables(out, summary_tables());
	std::ifstream golden(SELFSIM_GOLDEN_DIR "/summary_tables.txt", std::ios::binary);
	REQUIRE(golden.good());
	std::stringstream expect;
	expect << golden.rdbuf();
	CHECK(out.str() == expect.str());

	const auto t = summary_tables();
	REQUIRE(t.doo_sabin.size() == 2);
	REQUIRE(t.catmull_clark.size() == 4);
	CHECK(t.catmull_clark[0].linf_l2.rate_case == RateCase::A);
	CHECK(t.catmull_clark[1].linf_l2.rate_case == RateCase::C);
	CHECK(t.catmull_clark[2].linf_l2.rate_case == RateCase::A);
	CHECK(t.doo_sabin[1].linf_l2.rate_case == RateCase::B);
}
