#pragma once

/// @file rates.hpp
/// @brief Observed convergence rates and the best possible rates allowed by
/// the ring-scaling lower bounds.
///
/// With A = lambda^(kappa0 + 2 - r) and B = 2^-(p + 1 - r), the broken H^r
/// error of the level-l mesh behaves at best like
///   case a (A > B): A^l,  case b (A = B): sqrt(l + 1) B^l,  case c (A < B): B^l,
/// and the L-infinity error like max(lambda^(kappa0 + 1), 2^-(p + 1))^l.
/// These are best possible rates, not guarantees for observed errors.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace selfsim
{

	struct RateReport
	{
		double base = 2.0;
		/// Step rates log(e[l-1] / e[l]) / |log(base)|, for l = 1..; empty when
		/// either error is not positive.
		std::vector<std::optional<double>> steps;
		/// Least-squares slope over the final (up to) 3 levels.
		std::optional<double> tail_fit;
		bool sqrt_removed = false;

		std::optional<double> final_step() const;
	};

	/// Needs at least two entries. With remove_sqrt, e[l] is divided by
	/// sqrt(l + 1) before any rate is computed.
	RateReport observed_rates(const std::vector<double> &errors, double base = 2.0, bool remove_sqrt = false);

	enum class RateCase
	{
		A,
		B,
		C
	};

	char to_char(RateCase c);

	struct BoundPrediction
	{
		int p = 0;
		int kappa0 = 0;
		double lambda = 0.5;
		int r = 0;
		double A = 0.0;
		double B = 0.0;
		RateCase rate_case = RateCase::A;
		/// Per-level reduction factor: A (case a) or B (cases b, c).
		double factor = 0.0;
		bool sqrt_factor = false;
		double linf_factor = 0.0;

		/// e.g. "2^-3.85789" or "sqrt(1+l)*2^-3.00000"
		std::string descriptor() const;
		std::string linf_descriptor() const;
	};

	/// Throws std::invalid_argument unless 0 <= r <= kappa0 + 1 and 0 < lambda < 1.
	BoundPrediction predict_bounds(int p, int kappa0, double lambda, int r);

	/// "2^-x" with five decimals for a per-level factor.
	std::string format_rate(double factor);

	struct SummaryRow
	{
		std::string scheme;	 // "DS" or "CC"
		std::string valence; // "4", "!=4", "3", ...
		double lambda = 0.5;
		int kappa0 = 0;
		int p = 0;
		BoundPrediction linf_l2; // r = 0 (also carries the L-infinity factor)
		BoundPrediction h1;		 // r = 1
	};

	struct SummaryTables
	{
		std::vector<SummaryRow> doo_sabin;
		std::vector<SummaryRow> catmull_clark;
	};

	/// Rows DS {4, !=4} and CC {3, 4, 5, 6}; lambda from the subdivision module.
	SummaryTables summary_tables();

	/// Fixed-format text rendering, documented in the README and pinned by a
	/// golden file.
	void write_summary_tables(std::ostream &out, const SummaryTables &tables);

	/// scheme,valence,lambda,kappa0,p,linf,l2,h1 with 17-digit factors.
	void write_summary_csv(std::ostream &out, const SummaryTables &tables);

} // namespace selfsim
