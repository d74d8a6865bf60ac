#include <selfsim/rates.hpp>

#include <selfsim/approx.hpp>
#include <selfsim/subdivision.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace selfsim
{

	std::optional<double> RateReport::final_step() const
	{
		if (steps.empty())
			return std::nullopt;
		return steps.back();
	}

	RateReport observed_rates(const std::vector<double> &errors, double base, bool remove_sqrt)
	{
		if (errors.size() < 2)
			throw std::invalid_argument("observed_rates: need at least two errors");
		if (!(base > 0.0) || base == 1.0)
			throw std::invalid_argument("observed_rates: base must be positive and different from 1");
		RateReport rep;
		rep.base = base;
		rep.sqrt_removed = remove_sqrt;
		std::vector<double> e(errors);
		if (remove_sqrt)
			for (std::size_t l = 0; l < e.size(); ++l)
				e[l] /= std::sqrt(static_cast<double>(l + 1));
		// positive rates for decreasing errors for any base: e[l] ~ base^(-rate l)
		// when base > 1 and ~ base^(rate l) when base < 1
		const double lb = std::abs(std::log(base));
		for (std::size_t l = 1; l < e.size(); ++l)
		{
			if (e[l - 1] > 0.0 && e[l] > 0.0)
				rep.steps.push_back(std::log(e[l - 1] / e[l]) / lb);
			else
				rep.steps.push_back(std::nullopt);
		}
		// slope of -log_base(e) against l over the final 3 positive points
		std::vector<std::pair<double, double>> pts;
		for (std::size_t l = e.size(); l-- > 0 && pts.size() < 3;)
		{
			if (!(e[l] > 0.0))
				break;
			pts.push_back({static_cast<double>(l), -std::log(e[l]) / lb});
		}
		if (pts.size() >= 2)
		{
			double mx = 0, my = 0;
			for (const auto &[x, y] : pts)
			{
				mx += x;
				my += y;
			}
			mx /= pts.size();
			my /= pts.size();
			double sxy = 0, sxx = 0;
			for (const auto &[x, y] : pts)
			{
				sxy += (x - mx) * (y - my);
				sxx += (x - mx) * (x - mx);
			}
			rep.tail_fit = sxy / sxx;
		}
		return rep;
	}

	char to_char(RateCase c)
	{
		switch (c)
		{
		case RateCase::A:
			return 'a';
		case RateCase::B:
			return 'b';
		case RateCase::C:
			return 'c';
		}
		return '?';
	}

	std::string format_rate(double factor)
	{
		char buf[64];
		double e = std::log2(factor);
		if (std::abs(e) < 5e-6)
			e = 0.0;
		std::snprintf(buf, sizeof(buf), "2^%.5f", e);
		return buf;
	}

	std::string BoundPrediction::descriptor() const
	{
		return (sqrt_factor ? "sqrt(1+l)*" : "") + format_rate(factor);
	}

	std::string BoundPrediction::linf_descriptor() const
	{
		return format_rate(linf_factor);
	}

	BoundPrediction predict_bounds(int p, int kappa0, double lambda, int r)
	{
		if (!(lambda > 0.0 && lambda < 1.0))
			throw std::invalid_argument("predict_bounds: lambda must lie in ]0,1[");
		if (kappa0 < 0 || p < 0)
			throw std::invalid_argument("predict_bounds: p and kappa0 must be non-negative");
		if (r < 0 || r > kappa0 + 1)
			throw std::invalid_argument("predict_bounds: r must lie in [0, kappa0 + 1]");
		BoundPrediction b;
		b.p = p;
		b.kappa0 = kappa0;
		b.lambda = lambda;
		b.r = r;
		b.A = std::pow(lambda, kappa0 + 2 - r);
		b.B = std::pow(2.0, -(p + 1 - r));
		if (std::abs(b.A - b.B) <= 1e-12 * std::max(b.A, b.B))
		{
			b.rate_case = RateCase::B;
			b.factor = b.B;
			b.sqrt_factor = true;
		}
		else if (b.A > b.B)
		{
			b.rate_case = RateCase::A;
			b.factor = b.A;
		}
		else
		{
			b.rate_case = RateCase::C;
			b.factor = b.B;
		}
		b.linf_factor = std::max(std::pow(lambda, kappa0 + 1), std::pow(2.0, -(p + 1)));
		return b;
	}

	SummaryTables summary_tables()
	{
		SummaryTables t;
		auto make = [](std::string scheme, std::string valence, double lambda, int kappa0, int p) {
			SummaryRow row;
			row.scheme = std::move(scheme);
			row.valence = std::move(valence);
			row.lambda = lambda;
			row.kappa0 = kappa0;
			row.p = p;
			row.linf_l2 = predict_bounds(p, kappa0, lambda, 0);
			row.h1 = predict_bounds(p, kappa0, lambda, 1);
			return row;
		};
		// regular rings consist of affine images of the unit square: kappa0 = p
		t.doo_sabin.push_back(make("DS", "4", subdominant_lambda({Scheme::DooSabin, 4}), 2, 2));
		t.doo_sabin.push_back(make("DS", "!=4", subdominant_lambda({Scheme::DooSabin, 3}), 1, 2));
		for (int n : {3, 4, 5, 6})
			t.catmull_clark.push_back(make("CC", std::to_string(n), subdominant_lambda({Scheme::CatmullClark, n}),
										   n == 4 ? 3 : 1, 3));
		return t;
	}

	void write_summary_tables(std::ostream &out, const SummaryTables &tables)
	{
		// padded columns; trailing blanks are stripped so the layout is stable
		auto emit = [&](const char *line) {
			std::string s(line);
			while (!s.empty() && s.back() == ' ')
				s.pop_back();
			out << s << '\n';
		};
		auto block = [&](const char *title, const std::vector<SummaryRow> &rows) {
			char line[256];
			out << title << '\n';
			std::snprintf(line, sizeof(line), "%-6s %-8s %-9s %-7s %-2s %-13s %-24s %s", "scheme", "valence",
						  "lambda", "kappa0", "p", "Linf-rate", "L2-rate", "H1-rate");
			emit(line);
			for (const SummaryRow &r : rows)
			{
				std::snprintf(line, sizeof(line), "%-6s %-8s %-9.6f %-7d %-2d %-13s %-24s %s", r.scheme.c_str(),
							  r.valence.c_str(), r.lambda, r.kappa0, r.p, r.linf_l2.linf_descriptor().c_str(),
							  r.linf_l2.descriptor().c_str(), r.h1.descriptor().c_str());
				emit(line);
			}
		};
		out << "Best possible convergence rates per refinement level (l = level, h = 2^-l)\n\n";
		block("Doo-Sabin (p = 2)", tables.doo_sabin);
		out << '\n';
		block("Catmull-Clark (p = 3)", tables.catmull_clark);
	}

	void write_summary_csv(std::ostream &out, const SummaryTables &tables)
	{
		out << "scheme,valence,lambda,kappa0,p,linf_factor,l2_factor,l2_sqrt,h1_factor,h1_sqrt\n";
		for (const auto *rows : {&tables.doo_sabin, &tables.catmull_clark})
			for (const SummaryRow &r : *rows)
				out << r.scheme << ',' << r.valence << ',' << format_real(r.lambda) << ',' << r.kappa0 << ',' << r.p
					<< ',' << format_real(r.linf_l2.linf_factor) << ',' << format_real(r.linf_l2.factor) << ','
					<< (r.linf_l2.sqrt_factor ? 1 : 0) << ',' << format_real(r.h1.factor) << ','
					<< (r.h1.sqrt_factor ? 1 : 0) << '\n';
	}

} // namespace selfsim
