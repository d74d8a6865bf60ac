#include <selfsim/numkernel.hpp>

#include <selfsim/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace selfsim::num
{

	namespace
	{
		QuadratureRule compute_rule(int n)
		{
			// Newton iteration on P_n over [-1,1], then affine map to [0,1].
			QuadratureRule rule;
			rule.nodes.resize(n);
			rule.weights.resize(n);
			const int half = (n + 1) / 2;
			for (int i = 0; i < half; ++i)
			{
				double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
				double dp = 0.0;
				for (int it = 0; it < 100; ++it)
				{
					double p0 = 1.0, p1 = x;
					for (int k = 2; k <= n; ++k)
					{
						const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
						p0 = p1;
						p1 = p2;
					}
					if (n == 1)
					{
						p1 = x;
						p0 = 1.0;
					}
					dp = n * (x * p1 - p0) / (x * x - 1.0);
					const double dx = p1 / dp;
					x -= dx;
					if (std::abs(dx) < 1e-16)
						break;
				}
				// recompute derivative at the converged root
				double p0 = 1.0, p1 = x;
				for (int k = 2; k <= n; ++k)
				{
					const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
					p0 = p1;
					p1 = p2;
				}
				dp = n * (x * p1 - p0) / (x * x - 1.0);
				const double w = 2.0 / ((1.0 - x * x) * dp * dp);
				// x is the i-th largest root
				rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
				rule.nodes[i] = 0.5 * (1.0 - x);
				rule.weights[n - 1 - i] = 0.5 * w;
				rule.weights[i] = 0.5 * w;
			}
			if (n % 2 == 1)
				rule.nodes[n / 2] = 0.5;
			return rule;
		}
	} // namespace

	const QuadratureRule &gauss_legendre(int n)
	{
		if (n < 1 || n > 64)
			throw std::invalid_argument("gauss_legendre: n must lie in [1, 64], got " + std::to_string(n));
		static std::array<std::unique_ptr<QuadratureRule>, 65> cache;
		static std::mutex mutex;
		std::lock_guard lock(mutex);
		if (!cache[n])
			cache[n] = std::make_unique<QuadratureRule>(compute_rule(n));
		return *cache[n];
	}

	Eigen::VectorXd solve_spd(const Eigen::MatrixXd &A, const Eigen::VectorXd &b)
	{
		const Eigen::Index n = A.rows();
		if (A.cols() != n || b.size() != n)
			throw std::invalid_argument("solve_spd: dimension mismatch");
		const double max_diag = n > 0 ? A.diagonal().maxCoeff() : 0.0;
		if (!(max_diag > 0.0) && n > 0)
			throw NotSpdError("solve_spd: non-positive diagonal");
		const double pivot_floor = spd_tol * max_diag;

		Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
		for (Eigen::Index j = 0; j < n; ++j)
		{
			double d = A(j, j) - L.row(j).head(j).squaredNorm();
			if (!(d > pivot_floor))
				throw NotSpdError("solve_spd: pivot " + std::to_string(j) + " below tolerance");
			const double ljj = std::sqrt(d);
			L(j, j) = ljj;
			for (Eigen::Index i = j + 1; i < n; ++i)
				L(i, j) = (A(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / ljj;
		}
		Eigen::VectorXd y = L.triangularView<Eigen::Lower>().solve(b);
		return L.transpose().triangularView<Eigen::Upper>().solve(y);
	}

	Eigen::VectorXd lstsq_psd(const Eigen::MatrixXd &A, const Eigen::VectorXd &b)
	{
		if (A.rows() != A.cols() || b.size() != A.rows())
			throw std::invalid_argument("lstsq_psd: dimension mismatch");
		if (A.rows() == 0)
			return Eigen::VectorXd();
		Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
		if (es.info() != Eigen::Success)
			throw NoConvergenceError("lstsq_psd: eigen decomposition failed");
		const Eigen::VectorXd &ev = es.eigenvalues();
		const double cutoff = psd_tol * std::max(0.0, ev.maxCoeff());
		const Eigen::VectorXd proj = es.eigenvectors().transpose() * b;
		Eigen::VectorXd scaled = Eigen::VectorXd::Zero(ev.size());
		for (Eigen::Index i = 0; i < ev.size(); ++i)
			if (ev(i) > cutoff)
				scaled(i) = proj(i) / ev(i);
		return es.eigenvectors() * scaled;
	}

	std::vector<RealEigenpair> real_eigen_small(const Eigen::MatrixXd &A)
	{
		if (A.rows() != A.cols())
			throw std::invalid_argument("real_eigen_small: matrix must be square");
		Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
		if (es.info() != Eigen::Success)
			throw NoConvergenceError("real_eigen_small: QR iteration did not converge");
		const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
		std::vector<RealEigenpair> out;
		for (Eigen::Index i = 0; i < A.rows(); ++i)
		{
			const std::complex<double> lam = es.eigenvalues()(i);
			if (std::abs(lam.imag()) > 1e-10 * scale)
				continue;
			Eigen::VectorXcd vc = es.eigenvectors().col(i);
			// rotate the complex vector so that its largest entry is real
			Eigen::Index imax = 0;
			vc.cwiseAbs().maxCoeff(&imax);
			const std::complex<double> phase = std::abs(vc(imax)) > 0 ? std::conj(vc(imax)) / std::abs(vc(imax)) : 1.0;
			Eigen::VectorXd v = (vc * phase).real();
			v.normalize();
			out.push_back({lam.real(), v});
		}
		std::stable_sort(out.begin(), out.end(),
						 [](const RealEigenpair &a, const RealEigenpair &b) { return std::abs(a.value) > std::abs(b.value); });
		return out;
	}

	std::vector<ComplexEigenpair> complex_eigen_small(const Eigen::MatrixXcd &A)
	{
		if (A.rows() != A.cols())
			throw std::invalid_argument("complex_eigen_small: matrix must be square");
		Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, true);
		if (es.info() != Eigen::Success)
			throw NoConvergenceError("complex_eigen_small: QR iteration did not converge");
		std::vector<ComplexEigenpair> out;
		for (Eigen::Index i = 0; i < A.rows(); ++i)
			out.push_back({es.eigenvalues()(i), es.eigenvectors().col(i).normalized()});
		std::stable_sort(out.begin(), out.end(),
						 [](const ComplexEigenpair &a, const ComplexEigenpair &b) { return std::abs(a.value) > std::abs(b.value); });
		return out;
	}

} // namespace selfsim::num
