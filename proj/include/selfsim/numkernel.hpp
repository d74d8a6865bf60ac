#pragma once

/// @file numkernel.hpp
/// @brief Small dense kernels: Gauss-Legendre rules on [0,1], SPD and PSD
/// solves, and eigenpairs of small matrices.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace selfsim::num
{

	/// Gauss-Legendre rule mapped to [0,1]; weights sum to one.
	struct QuadratureRule
	{
		std::vector<double> nodes;
		std::vector<double> weights;

		int order() const { return static_cast<int>(nodes.size()); }
	};

	inline constexpr double spd_tol = 1e-13;
	inline constexpr double psd_tol = 1e-10;

	/// n-point rule, 1 <= n <= 64. Rules are cached; the reference stays valid
	/// for the lifetime of the program.
	const QuadratureRule &gauss_legendre(int n);

	/// Cholesky solve. Throws NotSpdError when a pivot drops below
	/// spd_tol * max(diag(A)).
	Eigen::VectorXd solve_spd(const Eigen::MatrixXd &A, const Eigen::VectorXd &b);

	/// Minimum-norm minimizer of x'Ax/2 - b'x for symmetric PSD A, using an
	/// eigen pseudo-inverse with eigenvalues below psd_tol * lambda_max dropped.
	Eigen::VectorXd lstsq_psd(const Eigen::MatrixXd &A, const Eigen::VectorXd &b);

	struct RealEigenpair
	{
		double value;
		Eigen::VectorXd vector; // unit 2-norm
	};

	/// Real eigenpairs of a small square matrix, sorted by descending modulus.
	/// Complex-conjugate pairs are skipped. Throws NoConvergenceError.
	std::vector<RealEigenpair> real_eigen_small(const Eigen::MatrixXd &A);

	struct ComplexEigenpair
	{
		std::complex<double> value;
		Eigen::VectorXcd vector; // unit 2-norm
	};

	/// All eigenpairs of a small complex matrix, sorted by descending modulus.
	std::vector<ComplexEigenpair> complex_eigen_small(const Eigen::MatrixXcd &A);

} // namespace selfsim::num
