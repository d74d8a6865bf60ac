#pragma once

/// @file approx.hpp
/// @brief Element-local best approximation in mapped spaces S[p; omega]:
/// L2 projection, broken H^r seminorm minimization (r = 0, 1, 2) and an
/// L-infinity proxy, assembled per ring.
///
/// Every cell is handled independently (no continuity constraints), so the
/// global infimum over the broken space is the root-sum-square of the cell
/// minima. On each cell the pulled-back space Q^p is spanned by tensor
/// shifted Legendre polynomials in the cell-local parameters, which spans the
/// same space as the monomials u^i v^j but keeps the Gram matrix well
/// conditioned.

#include <selfsim/geometry.hpp>
#include <selfsim/numkernel.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace selfsim
{

	/// Value and physical derivatives up to order two.
	struct TargetValues
	{
		double v = 0.0;
		double dx = 0.0, dy = 0.0;
		double dxx = 0.0, dxy = 0.0, dyy = 0.0;
	};

	class TargetFunction
	{
	public:
		enum class Kind
		{
			Monomial,
			PhysPolynomial,
			CosSin,
			SinCos,
			SumSquares,
			Custom
		};

		using Evaluator = std::function<TargetValues(double, double)>;

		static TargetFunction monomial(MonomialIndex m);
		/// Polynomial in physical coordinates; u plays x and v plays y.
		static TargetFunction polynomial(const Poly2 &coeffs);
		/// cos(x) + sin(y + 1)
		static TargetFunction cos_sin();
		/// sin(x) cos(y + 1)
		static TargetFunction sin_cos();
		/// x^2 + y^2
		static TargetFunction sum_squares();
		static TargetFunction custom(Evaluator f, std::string name);

		Kind kind() const { return kind_; }
		const std::string &name() const { return name_; }
		/// Total degree for polynomial targets, empty for transcendental ones.
		std::optional<int> polynomial_degree() const;

		TargetValues eval(double x, double y) const { return f_(x, y); }
		double value(double x, double y) const { return f_(x, y).v; }

	private:
		TargetFunction(Kind kind, std::string name, Evaluator f, std::optional<int> degree);

		Kind kind_;
		std::string name_;
		Evaluator f_;
		std::optional<int> degree_;
	};

	/// Parses targets such as "x^2", "x^2+y^2", "3*x*y^2 - 0.5*y",
	/// "cos(x)+sin(y+1)", "sin(x)*cos(y+1)". Throws ConfigError on `field`.
	TargetFunction parse_target(const std::string &text, const std::string &field = "target");

	/// Quadrature points per direction when no override is given:
	/// max(p + q + 2, q (d + 1) + 1) for polynomial targets of total degree d
	/// (exact integration of the squared residual), p + q + 4 otherwise.
	int default_quad_order(int p, int q, const TargetFunction &phi);

	/// Result of the cell-local minimization.
	struct CellApprox
	{
		int p = 0;
		bool restricted_basis = false; // singular cell with r >= 1
		Eigen::VectorXd coeffs;
		double squared_error = 0.0;
		bool used_pseudo_inverse = false;

		/// phi_h at cell parameters (u, v).
		double eval(double u, double v) const;
	};

	/// L2 best approximation on one cell.
	CellApprox project_l2_cell(const TargetFunction &phi, const ElementMap &G, int p, const num::QuadratureRule &quad);

	/// Minimizes the order-r seminorm of phi - phi_h over S[p; G(B)].
	/// The squared seminorm sums each derivative multi-index once:
	/// r = 1: f_x^2 + f_y^2, r = 2: f_xx^2 + f_xy^2 + f_yy^2. For r >= 1 the
	/// Gram matrix is only semi-definite and the minimum-norm solution is used.
	/// On singular cells (allow_singular) with r >= 1 the basis is restricted
	/// to functions of finite seminorm: 1 and u * Q^(p-1,p).
	/// Throws SingularJacobianError when a regular cell has a (near) vanishing
	/// or sign-changing Jacobian at a quadrature node.
	CellApprox best_approx_seminorm(const TargetFunction &phi, const ElementMap &G, int p, int r,
									const num::QuadratureRule &quad);

	/// Squared best-approximation error in the order-r seminorm.
	double best_error_seminorm(const TargetFunction &phi, const ElementMap &G, int p, int r,
							   const num::QuadratureRule &quad);

	/// |phi|^2 in H^r(G(B)) by quadrature (no approximation).
	double seminorm_squared(const TargetFunction &phi, const ElementMap &G, int r, const num::QuadratureRule &quad);

	/// max |phi(G) - phi_h| over a grid_n x grid_n grid on B, including edges.
	double cell_linf(const TargetFunction &phi, const ElementMap &G, const CellApprox &approx, int grid_n);

	struct MeshErrorOptions
	{
		int p = 2;
		int r = 0;
		/// Points per direction; 0 selects default_quad_order.
		int quad_order = 0;
		bool sector_only = false;
		/// Worker threads; 0 uses all hardware threads.
		int threads = 0;
		/// Grid for the L-infinity proxy; 0 disables it. Requires r = 0.
		int linf_grid = 0;
	};

	struct ErrorReport
	{
		int level = 0;
		int r = 0;
		std::vector<double> ring_errors; // e_i, i = 0..level
		double cap_error = 0.0;
		double total = 0.0;
		/// L-infinity proxy, per ring and overall (when enabled).
		std::vector<double> ring_linf;
		double cap_linf = 0.0;
		double linf = 0.0;
		bool linf_computed = false;
		/// Number of cells that needed the pseudo-inverse fallback for r = 0.
		int pseudo_inverse_cells = 0;
	};

	/// Sums cell minima per ring (optionally only over the report sector),
	/// adds the cap (with the cap's own mapped space) and the L-infinity proxy.
	/// Cells are evaluated in parallel; the reduction order is fixed, so the
	/// result does not depend on the thread count.
	ErrorReport mesh_error(const TargetFunction &phi, const MeshLevel &mesh, const MeshErrorOptions &options);

	/// L-infinity proxy over all cells and the cap, using the L2 projection.
	double linf_proxy(const TargetFunction &phi, const MeshLevel &mesh, int p, int quad_order = 0, int grid_n = 33);

	/// CSV with columns level, ring_index, error, log2_error; ring_index is a
	/// ring number or "cap", "total", "linf". 17 significant digits.
	void write_error_csv(std::ostream &out, const std::vector<ErrorReport> &reports, bool header = true);

	/// printf("%.17g") without locale dependence.
	std::string format_real(double x);

} // namespace selfsim
