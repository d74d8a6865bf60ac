#include <selfsim/approx.hpp>

#include <selfsim/errors.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace selfsim
{

	// ---------------------------------------------------------------- targets

	TargetFunction::TargetFunction(Kind kind, std::string name, Evaluator f, std::optional<int> degree)
		: kind_(kind), name_(std::move(name)), f_(std::move(f)), degree_(degree)
	{
	}

	std::optional<int> TargetFunction::polynomial_degree() const { return degree_; }

	namespace
	{
		std::string monomial_name(MonomialIndex m)
		{
			std::string s;
			auto factor = [&](const char *var, int e) {
				if (e == 0)
					return;
				if (!s.empty())
					s += "*";
				s += var;
				if (e > 1)
					s += "^" + std::to_string(e);
			};
			factor("x", m.alpha);
			factor("y", m.beta);
			return s.empty() ? "1" : s;
		}

		TargetFunction::Evaluator polynomial_evaluator(const Poly2 &p)
		{
			const Poly2 px = partial_derivative(p, Direction::U);
			const Poly2 py = partial_derivative(p, Direction::V);
			const Poly2 pxx = partial_derivative(px, Direction::U);
			const Poly2 pxy = partial_derivative(px, Direction::V);
			const Poly2 pyy = partial_derivative(py, Direction::V);
			return [=](double x, double y) {
				return TargetValues{p.eval(x, y), px.eval(x, y), py.eval(x, y), pxx.eval(x, y), pxy.eval(x, y), pyy.eval(x, y)};
			};
		}
	} // namespace

	TargetFunction TargetFunction::monomial(MonomialIndex m)
	{
		if (m.alpha < 0 || m.beta < 0)
			throw std::invalid_argument("TargetFunction::monomial: negative exponent");
		return TargetFunction(Kind::Monomial, monomial_name(m), polynomial_evaluator(Poly2::monomial(m.alpha, m.beta)),
							  m.total_degree());
	}

	TargetFunction TargetFunction::polynomial(const Poly2 &coeffs)
	{
		return TargetFunction(Kind::PhysPolynomial, "polynomial", polynomial_evaluator(coeffs), coeffs.total_degree());
	}

	TargetFunction TargetFunction::cos_sin()
	{
		return TargetFunction(Kind::CosSin, "cos(x)+sin(y+1)", [](double x, double y) {
			const double c = std::cos(x), s = std::sin(x), sy = std::sin(y + 1.0), cy = std::cos(y + 1.0);
			return TargetValues{c + sy, -s, cy, -c, 0.0, -sy};
		},
							  std::nullopt);
	}

	TargetFunction TargetFunction::sin_cos()
	{
		return TargetFunction(Kind::SinCos, "sin(x)*cos(y+1)", [](double x, double y) {
			const double s = std::sin(x), c = std::cos(x), cy = std::cos(y + 1.0), sy = std::sin(y + 1.0);
			return TargetValues{s * cy, c * cy, -s * sy, -s * cy, -c * sy, -s * cy};
		},
							  std::nullopt);
	}

	TargetFunction TargetFunction::sum_squares()
	{
		return TargetFunction(Kind::SumSquares, "x^2+y^2", [](double x, double y) {
			return TargetValues{x * x + y * y, 2.0 * x, 2.0 * y, 2.0, 0.0, 2.0};
		},
							  2);
	}

	TargetFunction TargetFunction::custom(Evaluator f, std::string name)
	{
		return TargetFunction(Kind::Custom, std::move(name), std::move(f), std::nullopt);
	}

	TargetFunction parse_target(const std::string &text, const std::string &field)
	{
		std::string s;
		for (char c : text)
			if (!std::isspace(static_cast<unsigned char>(c)))
				s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
		if (s.empty())
			throw ConfigError(field, "empty target");
		if (s == "cos(x)+sin(y+1)" || s == "sin(y+1)+cos(x)" || s == "cossin")
			return TargetFunction::cos_sin();
		if (s == "sin(x)*cos(y+1)" || s == "sin(x)cos(y+1)" || s == "cos(y+1)*sin(x)" || s == "sincos")
			return TargetFunction::sin_cos();
		if (s == "x^2+y^2" || s == "y^2+x^2" || s == "sumsquares")
			return TargetFunction::sum_squares();

		// polynomial: sum of terms [coef][*]x[^a][*]y[^b]
		std::vector<std::pair<double, MonomialIndex>> terms;
		std::size_t pos = 0;
		auto fail = [&](const std::string &why) {
			throw ConfigError(field, "cannot parse '" + text + "': " + why);
		};
		auto read_int = [&]() {
			std::size_t start = pos;
			while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
				++pos;
			if (start == pos)
				fail("expected an exponent");
			const int e = std::stoi(s.substr(start, pos - start));
			if (e > 30)
				fail("exponent too large");
			return e;
		};
		while (pos < s.size())
		{
			double sign = 1.0;
			if (s[pos] == '+' || s[pos] == '-')
			{
				sign = s[pos] == '-' ? -1.0 : 1.0;
				++pos;
			}
			else if (!terms.empty())
				fail("expected '+' or '-'");
			double coef = 1.0;
			MonomialIndex m{0, 0};
			bool any = false;
			while (pos < s.size() && s[pos] != '+' && s[pos] != '-')
			{
				if (s[pos] == '*')
				{
					if (!any)
						fail("unexpected '*'");
					++pos;
					continue;
				}
				if (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')
				{
					double c = 0.0;
					const auto res = std::from_chars(s.data() + pos, s.data() + s.size(), c);
					if (res.ec != std::errc())
						fail("bad number");
					pos = static_cast<std::size_t>(res.ptr - s.data());
					coef *= c;
				}
				else if (s[pos] == 'x' || s[pos] == 'y')
				{
					const char var = s[pos++];
					int e = 1;
					if (pos < s.size() && s[pos] == '^')
					{
						++pos;
						e = read_int();
					}
					(var == 'x' ? m.alpha : m.beta) += e;
				}
				else
					fail(std::string("unexpected character '") + s[pos] + "'");
				any = true;
			}
			if (!any)
				fail("empty term");
			terms.push_back({sign * coef, m});
		}
		if (terms.size() == 1 && terms[0].first == 1.0)
			return TargetFunction::monomial(terms[0].second);
		int du = 0, dv = 0;
		for (const auto &t : terms)
		{
			du = std::max(du, t.second.alpha);
			dv = std::max(dv, t.second.beta);
		}
		Poly2 p(du, dv);
		for (const auto &t : terms)
			p(t.second.alpha, t.second.beta) += t.first;
		return TargetFunction::polynomial(p);
	}

	int default_quad_order(int p, int q, const TargetFunction &phi)
	{
		const int base = p + q + 2;
		if (const auto d = phi.polynomial_degree())
			return std::clamp(std::max(base, q * (*d + 1) + 1), 1, 64);
		return std::clamp(base + 2, 1, 64);
	}

	// ------------------------------------------------------------------ basis

	namespace
	{
		/// Shifted Legendre polynomials L_i(u) = P_i(2u - 1) and their first
		/// two u-derivatives, i = 0..p.
		struct Legendre1D
		{
			std::vector<double> f, d1, d2;
		};

		void legendre(int p, double u, Legendre1D &out)
		{
			out.f.assign(p + 1, 0.0);
			out.d1.assign(p + 1, 0.0);
			out.d2.assign(p + 1, 0.0);
			const double t = 2.0 * u - 1.0;
			std::vector<double> P(p + 2, 0.0), dP(p + 2, 0.0), ddP(p + 2, 0.0);
			P[0] = 1.0;
			if (p >= 1)
			{
				P[1] = t;
				dP[1] = 1.0;
			}
			for (int k = 1; k < p; ++k)
			{
				P[k + 1] = ((2.0 * k + 1.0) * t * P[k] - k * P[k - 1]) / (k + 1.0);
				dP[k + 1] = dP[k - 1] + (2.0 * k + 1.0) * P[k];
				ddP[k + 1] = ddP[k - 1] + (2.0 * k + 1.0) * dP[k];
			}
			for (int i = 0; i <= p; ++i)
			{
				out.f[i] = P[i];
				out.d1[i] = 2.0 * dP[i];
				out.d2[i] = 4.0 * ddP[i];
			}
		}

		/// Parameter-space values of all basis functions at one point.
		struct BasisValues
		{
			Eigen::VectorXd b, bu, bv, buu, buv, bvv;
		};

		int basis_size(int p, bool restricted) { return restricted ? 1 + p * (p + 1) : (p + 1) * (p + 1); }

		void eval_basis(int p, bool restricted, double u, double v, BasisValues &out)
		{
			Legendre1D lu, lv;
			legendre(p, u, lu);
			legendre(p, v, lv);
			const int nb = basis_size(p, restricted);
			out.b.resize(nb);
			out.bu.resize(nb);
			out.bv.resize(nb);
			out.buu.resize(nb);
			out.buv.resize(nb);
			out.bvv.resize(nb);
			int idx = 0;
			if (!restricted)
			{
				for (int a = 0; a <= p; ++a)
					for (int c = 0; c <= p; ++c, ++idx)
					{
						out.b[idx] = lu.f[a] * lv.f[c];
						out.bu[idx] = lu.d1[a] * lv.f[c];
						out.bv[idx] = lu.f[a] * lv.d1[c];
						out.buu[idx] = lu.d2[a] * lv.f[c];
						out.buv[idx] = lu.d1[a] * lv.d1[c];
						out.bvv[idx] = lu.f[a] * lv.d2[c];
					}
				return;
			}
			// 1 and u * L_a(u) L_c(v): functions whose restriction to the
			// degenerate edge u = 0 is constant
			out.b[0] = 1.0;
			out.bu[0] = out.bv[0] = out.buu[0] = out.buv[0] = out.bvv[0] = 0.0;
			idx = 1;
			for (int a = 0; a < p; ++a)
			{
				const double f = u * lu.f[a];
				const double f1 = lu.f[a] + u * lu.d1[a];
				const double f2 = 2.0 * lu.d1[a] + u * lu.d2[a];
				for (int c = 0; c <= p; ++c, ++idx)
				{
					out.b[idx] = f * lv.f[c];
					out.bu[idx] = f1 * lv.f[c];
					out.bv[idx] = f * lv.d1[c];
					out.buu[idx] = f2 * lv.f[c];
					out.buv[idx] = f1 * lv.d1[c];
					out.bvv[idx] = f * lv.d2[c];
				}
			}
		}

		int components(int r) { return r == 0 ? 1 : (r == 1 ? 2 : 3); }

		/// Physical order-r derivative rows of the basis (A) and of phi (F), with
		/// quadrature weights w |det J| per row.
		struct CellSystem
		{
			Eigen::MatrixXd A;
			Eigen::VectorXd F;
			Eigen::VectorXd W;
		};

		CellSystem assemble(const TargetFunction *phi, const ElementMap &G, int p, int r, bool restricted,
							const num::QuadratureRule &quad)
		{
			if (r < 0 || r > 2)
				throw std::invalid_argument("seminorm order r must be 0, 1 or 2");
			const int nq = quad.order();
			const int nc = components(r);
			const int nb = basis_size(p, restricted);
			CellSystem sys;
			sys.A.resize(static_cast<Eigen::Index>(nq) * nq * nc, nb);
			sys.F.resize(static_cast<Eigen::Index>(nq) * nq * nc);
			sys.W.resize(static_cast<Eigen::Index>(nq) * nq * nc);

			double max_det = 0.0;
			double min_signed = std::numeric_limits<double>::infinity();
			double max_signed = -std::numeric_limits<double>::infinity();
			BasisValues bv;
			Eigen::Index row = 0;
			for (int a = 0; a < nq; ++a)
				for (int c = 0; c < nq; ++c)
				{
					const double u = quad.nodes[a], v = quad.nodes[c];
					const MapSample s = G.sample(u, v);
					max_det = std::max(max_det, std::abs(s.det));
					min_signed = std::min(min_signed, s.det);
					max_signed = std::max(max_signed, s.det);
					const double w = quad.weights[a] * quad.weights[c] * std::abs(s.det);
					const TargetValues f = phi ? phi->eval(s.x.x(), s.x.y()) : TargetValues{};
					if (p >= 0)
						eval_basis(p, restricted, u, v, bv);

					if (r == 0)
					{
						if (p >= 0)
							sys.A.row(row) = bv.b.transpose();
						sys.F(row) = f.v;
						sys.W(row) = w;
						++row;
						continue;
					}
					if (s.det == 0.0)
						throw SingularJacobianError("Jacobian vanishes at a quadrature node");
					const Eigen::Matrix2d Jinv = s.J.inverse();
					const Eigen::Matrix2d JinvT = Jinv.transpose();
					// physical gradients of all basis functions: J^-T [b_u; b_v]
					Eigen::MatrixXd grad(2, nb);
					if (p >= 0)
					{
						grad.row(0) = bv.bu.transpose();
						grad.row(1) = bv.bv.transpose();
						grad = JinvT * grad;
					}
					if (r == 1)
					{
						if (p >= 0)
						{
							sys.A.row(row) = grad.row(0);
							sys.A.row(row + 1) = grad.row(1);
						}
						sys.F(row) = f.dx;
						sys.F(row + 1) = f.dy;
						sys.W(row) = sys.W(row + 1) = w;
						row += 2;
						continue;
					}
					// Hessian: J^-T (H_u b - sum_k (grad b)_k H_u G_k) J^-1
					const auto HG = G.hessians(u, v);
					for (int i = 0; i < nb && p >= 0; ++i)
					{
						Eigen::Matrix2d Hu;
						Hu << bv.buu[i], bv.buv[i], bv.buv[i], bv.bvv[i];
						const Eigen::Matrix2d H = JinvT * (Hu - grad(0, i) * HG[0] - grad(1, i) * HG[1]) * Jinv;
						sys.A(row, i) = H(0, 0);
						sys.A(row + 1, i) = H(0, 1);
						sys.A(row + 2, i) = H(1, 1);
					}
					sys.F(row) = f.dxx;
					sys.F(row + 1) = f.dxy;
					sys.F(row + 2) = f.dyy;
					sys.W(row) = sys.W(row + 1) = sys.W(row + 2) = w;
					row += 3;
				}

			if (!G.allow_singular())
			{
				const bool sign_change = min_signed < 0.0 && max_signed > 0.0;
				const double smallest = std::min(std::abs(min_signed), std::abs(max_signed));
				if (max_det == 0.0 || sign_change || smallest < 1e-12 * max_det)
					throw SingularJacobianError("element map is singular or folds at a quadrature node");
			}
			return sys;
		}

		double residual(const CellSystem &sys, const Eigen::VectorXd &c)
		{
			const Eigen::VectorXd res = sys.F - sys.A * c;
			return std::max(0.0, (sys.W.array() * res.array().square()).sum());
		}
	} // namespace

	double CellApprox::eval(double u, double v) const
	{
		BasisValues bv;
		eval_basis(p, restricted_basis, u, v, bv);
		return bv.b.dot(coeffs);
	}

	CellApprox best_approx_seminorm(const TargetFunction &phi, const ElementMap &G, int p, int r,
									const num::QuadratureRule &quad)
	{
		if (p < 0)
			throw std::invalid_argument("degree p must be non-negative");
		CellApprox out;
		out.p = p;
		out.restricted_basis = r >= 1 && G.allow_singular();
		const CellSystem sys = assemble(&phi, G, p, r, out.restricted_basis, quad);
		const Eigen::MatrixXd WA = sys.A.array().colwise() * sys.W.array();
		const Eigen::MatrixXd gram = sys.A.transpose() * WA;
		const Eigen::VectorXd load = WA.transpose() * sys.F;
		if (r == 0)
		{
			try
			{
				out.coeffs = num::solve_spd(gram, load);
			}
			catch (const NotSpdError &)
			{
				out.coeffs = num::lstsq_psd(gram, load);
				out.used_pseudo_inverse = true;
			}
		}
		else
		{
			out.coeffs = num::lstsq_psd(gram, load);
			out.used_pseudo_inverse = true;
		}
		out.squared_error = residual(sys, out.coeffs);
		return out;
	}

	CellApprox project_l2_cell(const TargetFunction &phi, const ElementMap &G, int p, const num::QuadratureRule &quad)
	{
		return best_approx_seminorm(phi, G, p, 0, quad);
	}

	double best_error_seminorm(const TargetFunction &phi, const ElementMap &G, int p, int r,
							   const num::QuadratureRule &quad)
	{
		return best_approx_seminorm(phi, G, p, r, quad).squared_error;
	}

	double seminorm_squared(const TargetFunction &phi, const ElementMap &G, int r, const num::QuadratureRule &quad)
	{
		const CellSystem sys = assemble(&phi, G, -1, r, false, quad);
		return (sys.W.array() * sys.F.array().square()).sum();
	}

	double cell_linf(const TargetFunction &phi, const ElementMap &G, const CellApprox &approx, int grid_n)
	{
		if (grid_n < 2)
			throw std::invalid_argument("cell_linf: grid_n must be at least 2");
		double m = 0.0;
		for (int a = 0; a < grid_n; ++a)
			for (int c = 0; c < grid_n; ++c)
			{
				const double u = static_cast<double>(a) / (grid_n - 1);
				const double v = static_cast<double>(c) / (grid_n - 1);
				const Eigen::Vector2d x = G.eval(u, v);
				m = std::max(m, std::abs(phi.value(x.x(), x.y()) - approx.eval(u, v)));
			}
		return m;
	}

	// ------------------------------------------------------------------- mesh

	ErrorReport mesh_error(const TargetFunction &phi, const MeshLevel &mesh, const MeshErrorOptions &options)
	{
		if (options.p < 0)
			throw ConfigError("p", "degree must be non-negative");
		if (options.r < 0 || options.r > 2)
			throw ConfigError("norm", "seminorm order must be 0, 1 or 2");
		if (options.quad_order < 0 || options.quad_order > 64)
			throw ConfigError("quad_order", "must lie in [1, 64] (0 = automatic)");
		if (options.linf_grid != 0 && options.linf_grid < 9)
			throw ConfigError("linf_grid", "must be at least 9");
		if (options.linf_grid != 0 && options.r != 0)
			throw ConfigError("norm", "the L-infinity proxy uses the L2 projection (r = 0)");

		struct Task
		{
			int ring; // -1 for cap pieces
			int index;
		};
		std::vector<Task> tasks;
		for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c)
			if (!options.sector_only || mesh.cells[c].in_sector)
				tasks.push_back({mesh.cells[c].i, c});
		for (int m = 0; m < static_cast<int>(mesh.cap.maps.size()); ++m)
			if (!options.sector_only || mesh.cap.in_sector[m])
				tasks.push_back({-1, m});

		std::vector<double> sq(tasks.size(), 0.0), linf(tasks.size(), 0.0);
		std::vector<char> pinv(tasks.size(), 0);
		std::vector<std::exception_ptr> errors(tasks.size());

		auto run = [&](std::size_t t) {
			try
			{
				const Task &task = tasks[t];
				const ElementMap G = task.ring >= 0 ? cell_map(mesh, mesh.cells[task.index]) : mesh.cap.maps[task.index];
				const int n = options.quad_order > 0 ? options.quad_order : default_quad_order(options.p, G.q(), phi);
				const auto &quad = num::gauss_legendre(n);
				const CellApprox a = best_approx_seminorm(phi, G, options.p, options.r, quad);
				sq[t] = a.squared_error;
				pinv[t] = options.r == 0 && a.used_pseudo_inverse;
				if (options.linf_grid > 0)
					linf[t] = cell_linf(phi, G, a, options.linf_grid);
			}
			catch (...)
			{
				errors[t] = std::current_exception();
			}
		};

		int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
		threads = std::clamp(threads, 1, 256);
		if (threads == 1 || tasks.size() < 64)
		{
			for (std::size_t t = 0; t < tasks.size(); ++t)
				run(t);
		}
		else
		{
			std::atomic<std::size_t> next{0};
			std::vector<std::thread> pool;
			for (int w = 0; w < threads; ++w)
				pool.emplace_back([&]() {
					for (std::size_t t = next++; t < tasks.size(); t = next++)
						run(t);
				});
			for (auto &th : pool)
				th.join();
		}
		for (const auto &e : errors)
			if (e)
				std::rethrow_exception(e);

		// fixed-order reduction
		ErrorReport report;
		report.level = mesh.level;
		report.r = options.r;
		const int rings = mesh.cells.empty() ? 0 : mesh.cells.back().i + 1;
		std::vector<double> ring_sq(std::max(rings, mesh.level + 1), 0.0);
		report.ring_linf.assign(ring_sq.size(), 0.0);
		double cap_sq = 0.0;
		for (std::size_t t = 0; t < tasks.size(); ++t)
		{
			report.pseudo_inverse_cells += pinv[t];
			if (tasks[t].ring >= 0)
			{
				ring_sq[tasks[t].ring] += sq[t];
				report.ring_linf[tasks[t].ring] = std::max(report.ring_linf[tasks[t].ring], linf[t]);
			}
			else
			{
				cap_sq += sq[t];
				report.cap_linf = std::max(report.cap_linf, linf[t]);
			}
		}
		double total_sq = 0.0;
		for (double s : ring_sq)
		{
			report.ring_errors.push_back(std::sqrt(s));
			total_sq += s;
		}
		total_sq += cap_sq;
		report.cap_error = std::sqrt(cap_sq);
		report.total = std::sqrt(total_sq);
		if (options.linf_grid > 0)
		{
			report.linf_computed = true;
			report.linf = report.cap_linf;
			for (double l : report.ring_linf)
				report.linf = std::max(report.linf, l);
		}
		else
			report.ring_linf.clear();
		return report;
	}

	double linf_proxy(const TargetFunction &phi, const MeshLevel &mesh, int p, int quad_order, int grid_n)
	{
		MeshErrorOptions o;
		o.p = p;
		o.quad_order = quad_order;
		o.linf_grid = grid_n;
		return mesh_error(phi, mesh, o).linf;
	}

	std::string format_real(double x)
	{
		if (std::isnan(x))
			return "nan";
		if (std::isinf(x))
			return x > 0 ? "inf" : "-inf";
		char buf[64];
		const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
		return std::string(buf, res.ptr);
	}

	void write_error_csv(std::ostream &out, const std::vector<ErrorReport> &reports, bool header)
	{
		if (header)
			out << "level,ring_index,error,log2_error\n";
		auto row = [&](int level, const std::string &idx, double e) {
			out << level << ',' << idx << ',' << format_real(e) << ',' << format_real(std::log2(e)) << '\n';
		};
		for (const ErrorReport &r : reports)
		{
			for (std::size_t i = 0; i < r.ring_errors.size(); ++i)
				row(r.level, std::to_string(i), r.ring_errors[i]);
			row(r.level, "cap", r.cap_error);
			row(r.level, "total", r.total);
			if (r.linf_computed)
				row(r.level, "linf", r.linf);
		}
	}

} // namespace selfsim
