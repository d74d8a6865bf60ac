#include <selfsim/subdivision.hpp>

#include <selfsim/errors.hpp>
#include <selfsim/numkernel.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace selfsim
{

	namespace
	{
		constexpr int min_valence = 3;
		constexpr int max_valence = 50;

		int mod(int a, int n) { return ((a % n) + n) % n; }

		/// Canonical address of a grid point; see the diagrams in the header.
		NetIndex canonical(Scheme scheme, int n, int j, int a, int b)
		{
			if (scheme == Scheme::CatmullClark)
			{
				if (a == 0 && b == 0)
					return {0, 0, 0, true};
				while (a < 0 || b < 0)
				{
					if (b < 0)
						std::tie(j, a, b) = std::make_tuple(j - 1, -b, a);
					else
						std::tie(j, a, b) = std::make_tuple(j + 1, b, -a);
				}
				if (a == 0)
					std::tie(j, a, b) = std::make_tuple(j + 1, b, 0);
				return {mod(j, n), a, b, false};
			}
			while (a < 0 || b < 0)
			{
				if (b < 0)
					std::tie(j, a, b) = std::make_tuple(j - 1, -b - 1, a);
				else
					std::tie(j, a, b) = std::make_tuple(j + 1, b, -a - 1);
			}
			return {mod(j, n), a, b, false};
		}

		// Uniform B-spline basis to monomials: row alpha holds the monomial
		// coefficients of the alpha-th basis function on one knot interval.
		Eigen::MatrixXd bspline_to_monomial(int degree)
		{
			Eigen::MatrixXd M(degree + 1, degree + 1);
			if (degree == 2)
				M << 1, -2, 1,
					1, 2, -2,
					0, 0, 1;
			else if (degree == 3)
				M << 1, -3, 3, -1,
					4, 0, -6, 3,
					1, 3, 3, -3,
					0, 0, 0, 1;
			else
				throw std::invalid_argument("bspline_to_monomial: degree must be 2 or 3");
			return M / (degree == 2 ? 2.0 : 6.0);
		}

		/// Cells (s, t) of the three ring patches per sector.
		constexpr int ring_cells[3][2] = {{1, 0}, {1, 1}, {0, 1}};

		ElementMap map_from_complex(const Eigen::MatrixXcd &C)
		{
			const int d = static_cast<int>(C.rows()) - 1;
			Poly2 gx(d, d), gy(d, d);
			for (int k = 0; k <= d; ++k)
				for (int l = 0; l <= d; ++l)
				{
					gx(k, l) = C(k, l).real();
					gy(k, l) = C(k, l).imag();
				}
			return ElementMap(gx, gy);
		}

		/// Monomial coefficients of the patch on cell (s, t) of sector j.
		Eigen::MatrixXcd patch_coefficients(const SubdivisionMatrix &net, const std::vector<std::complex<double>> &z,
											int j, int s, int t)
		{
			const int d = net.scheme.degree();
			const Eigen::MatrixXd M = bspline_to_monomial(d);
			Eigen::MatrixXcd P(d + 1, d + 1);
			for (int al = 0; al <= d; ++al)
				for (int be = 0; be <= d; ++be)
					P(al, be) = z[net.index(j, s - 1 + al, t - 1 + be)];
			return M.transpose().cast<std::complex<double>>() * P * M.cast<std::complex<double>>();
		}

		std::complex<double> eval_complex(const Eigen::MatrixXcd &C, double u, double v)
		{
			std::complex<double> r = 0.0;
			for (Eigen::Index k = C.rows() - 1; k >= 0; --k)
			{
				std::complex<double> row = 0.0;
				for (Eigen::Index l = C.cols() - 1; l >= 0; --l)
					row = row * v + C(k, l);
				r = r * u + row;
			}
			return r;
		}
	} // namespace

	std::string SchemeId::name() const
	{
		return std::string(scheme == Scheme::DooSabin ? "ds:" : "cc:") + std::to_string(valence);
	}

	SchemeId parse_scheme(const std::string &text, const std::string &field)
	{
		const auto colon = text.find(':');
		if (colon == std::string::npos)
			throw ConfigError(field, "expected ds:<valence> or cc:<valence>, got '" + text + "'");
		const std::string kind = text.substr(0, colon);
		SchemeId id;
		if (kind == "ds")
			id.scheme = Scheme::DooSabin;
		else if (kind == "cc")
			id.scheme = Scheme::CatmullClark;
		else
			throw ConfigError(field, "unknown scheme '" + kind + "'");
		try
		{
			std::size_t pos = 0;
			id.valence = std::stoi(text.substr(colon + 1), &pos);
			if (pos != text.size() - colon - 1)
				throw std::invalid_argument("trailing characters");
		}
		catch (const std::exception &)
		{
			throw ConfigError(field, "invalid valence in '" + text + "'");
		}
		if (id.valence < min_valence || id.valence > max_valence)
			throw ConfigError(field, "valence must lie in [3, 50]");
		return id;
	}

	int SubdivisionMatrix::index(int sector, int a, int b) const
	{
		const int n = scheme.valence;
		const NetIndex c = canonical(scheme.scheme, n, sector, a, b);
		if (c.center)
			return 0;
		const int R = rings;
		if (c.a > R || c.b > R)
			throw std::out_of_range("SubdivisionMatrix::index: point outside the neighbourhood");
		if (scheme.scheme == Scheme::CatmullClark)
			return 1 + c.sector * R * (R + 1) + (c.a - 1) * (R + 1) + c.b;
		return c.sector * (R + 1) * (R + 1) + c.a * (R + 1) + c.b;
	}

	SubdivisionMatrix subdivision_matrix(SchemeId scheme, int rings)
	{
		const int n = scheme.valence;
		if (n < min_valence || n > max_valence)
			throw UnsupportedValenceError("valence " + std::to_string(n) + " outside [3, 50]");
		if (rings < 1 || rings > 8)
			throw std::invalid_argument("subdivision_matrix: rings must lie in [1, 8]");

		SubdivisionMatrix m;
		m.scheme = scheme;
		m.rings = rings;
		const int R = rings;
		if (scheme.scheme == Scheme::CatmullClark)
		{
			m.points.push_back({0, 0, 0, true});
			for (int j = 0; j < n; ++j)
				for (int a = 1; a <= R; ++a)
					for (int b = 0; b <= R; ++b)
						m.points.push_back({j, a, b, false});
		}
		else
		{
			for (int j = 0; j < n; ++j)
				for (int a = 0; a <= R; ++a)
					for (int b = 0; b <= R; ++b)
						m.points.push_back({j, a, b, false});
		}
		const int size = static_cast<int>(m.points.size());
		m.S = Eigen::MatrixXd::Zero(size, size);

		for (int row = 0; row < size; ++row)
		{
			const NetIndex &p = m.points[row];
			auto add = [&](int j, int a, int b, double w) { m.S(row, m.index(j, a, b)) += w; };
			const int j = p.sector, A = p.a, B = p.b;

			if (scheme.scheme == Scheme::CatmullClark)
			{
				if (p.center)
				{
					m.S(row, 0) += 1.0 - 7.0 / (4.0 * n);
					for (int jj = 0; jj < n; ++jj)
					{
						add(jj, 1, 0, 3.0 / (2.0 * n * n));
						add(jj, 1, 1, 1.0 / (4.0 * n * n));
					}
					continue;
				}
				const int s = A / 2, t = B / 2;
				if (A % 2 == 1 && B % 2 == 1)
				{
					// face point
					for (int da = 0; da <= 1; ++da)
						for (int db = 0; db <= 1; ++db)
							add(j, s + da, t + db, 0.25);
				}
				else if (A % 2 == 1)
				{
					// edge point on a horizontal edge
					for (int da = 0; da <= 1; ++da)
					{
						add(j, s + da, t, 3.0 / 8.0);
						add(j, s + da, t - 1, 1.0 / 16.0);
						add(j, s + da, t + 1, 1.0 / 16.0);
					}
				}
				else if (B % 2 == 1)
				{
					for (int db = 0; db <= 1; ++db)
					{
						add(j, s, t + db, 3.0 / 8.0);
						add(j, s - 1, t + db, 1.0 / 16.0);
						add(j, s + 1, t + db, 1.0 / 16.0);
					}
				}
				else
				{
					// regular vertex point
					add(j, s, t, 9.0 / 16.0);
					add(j, s + 1, t, 3.0 / 32.0);
					add(j, s - 1, t, 3.0 / 32.0);
					add(j, s, t + 1, 3.0 / 32.0);
					add(j, s, t - 1, 3.0 / 32.0);
					add(j, s + 1, t + 1, 1.0 / 64.0);
					add(j, s - 1, t + 1, 1.0 / 64.0);
					add(j, s + 1, t - 1, 1.0 / 64.0);
					add(j, s - 1, t - 1, 1.0 / 64.0);
				}
			}
			else
			{
				// fine point (A, B) lies in coarse face (s, t) next to vertex (a, b)
				const int s = (A + 1) / 2, t = (B + 1) / 2;
				const int a = A / 2, b = B / 2;
				if (s == 0 && t == 0)
				{
					for (int i = 0; i < n; ++i)
					{
						double w = (3.0 + 2.0 * std::cos(2.0 * std::numbers::pi * i / n)) / (4.0 * n);
						if (i == 0)
							w += 0.25;
						add(j + i, 0, 0, w);
					}
				}
				else
				{
					const int a2 = 2 * s - 1 - a, b2 = 2 * t - 1 - b;
					add(j, a, b, 9.0 / 16.0);
					add(j, a2, b, 3.0 / 16.0);
					add(j, a, b2, 3.0 / 16.0);
					add(j, a2, b2, 1.0 / 16.0);
				}
			}
		}
		return m;
	}

	Eigen::MatrixXcd fourier_block(const SubdivisionMatrix &m, int k)
	{
		const int n = m.scheme.valence;
		const bool cc = m.scheme.scheme == Scheme::CatmullClark;
		const int first = cc ? 1 : 0;
		const int per_sector = (static_cast<int>(m.points.size()) - first) / n;
		const std::complex<double> w = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
		Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(per_sector, per_sector);
		for (int r = 0; r < per_sector; ++r)
		{
			const int row = first + r;
			for (int col = first; col < m.S.cols(); ++col)
			{
				const double s = m.S(row, col);
				if (s == 0.0)
					continue;
				const NetIndex &c = m.points[col];
				const int local = col - first - c.sector * per_sector;
				block(r, local) += s * std::pow(w, c.sector);
			}
		}
		return block;
	}

	namespace
	{
		struct SubdominantPair
		{
			double lambda;
			Eigen::VectorXcd vector;
		};

		SubdominantPair subdominant_pair(const SubdivisionMatrix &m)
		{
			const auto pairs = num::complex_eigen_small(fourier_block(m, 1));
			if (pairs.empty())
				throw DegenerateEigenspaceError("empty Fourier block");
			const std::complex<double> lam = pairs[0].value;
			if (std::abs(lam.imag()) > 1e-10 || !(lam.real() > 0.0))
				throw DegenerateEigenspaceError("subdominant eigenvalue of " + m.scheme.name() + " is not real positive");
			if (pairs.size() > 1 && std::abs(pairs[1].value) > (1.0 - 1e-8) * std::abs(lam))
				throw DegenerateEigenspaceError("subdominant eigenvalue of " + m.scheme.name() + " is not simple in its Fourier block");
			return {lam.real(), pairs[0].vector};
		}
	} // namespace

	double subdominant_lambda(SchemeId scheme)
	{
		return subdominant_pair(subdivision_matrix(scheme, 1)).lambda;
	}

	std::vector<ElementMap> CharacteristicRing::patches_from_net(const std::vector<Eigen::Vector2d> &points) const
	{
		if (points.size() != net.points.size())
			throw std::invalid_argument("patches_from_net: control net size mismatch");
		std::vector<std::complex<double>> z(points.size());
		for (std::size_t i = 0; i < points.size(); ++i)
			z[i] = {points[i].x(), points[i].y()};
		std::vector<ElementMap> out;
		for (int j = 0; j < scheme.valence; ++j)
			for (const auto &cell : ring_cells)
				out.push_back(map_from_complex(patch_coefficients(net, z, j, cell[0], cell[1])));
		return out;
	}

	RingSpec CharacteristicRing::ring_spec() const
	{
		RingSpec spec;
		spec.elements = patches;
		spec.lambda = lambda;
		spec.sector = sector;
		spec.cap_pieces = coons_cap_pieces(*this);
		spec.cap_sector = {0};
		return spec;
	}

	CharacteristicRing characteristic_ring(SchemeId scheme)
	{
		CharacteristicRing ring;
		ring.scheme = scheme;
		// enough rings to cover the support of the three ring patches
		ring.net = subdivision_matrix(scheme, scheme.scheme == Scheme::CatmullClark ? 3 : 2);
		const SubdominantPair pair = subdominant_pair(ring.net);
		ring.lambda = pair.lambda;

		const int n = scheme.valence;
		const bool cc = scheme.scheme == Scheme::CatmullClark;
		const int first = cc ? 1 : 0;
		const int per_sector = (static_cast<int>(ring.net.points.size()) - first) / n;
		const std::complex<double> w = std::polar(1.0, 2.0 * std::numbers::pi / n);

		// plant the complex eigenvector: z_j = w^j v
		std::vector<std::complex<double>> z(ring.net.points.size(), 0.0);
		for (std::size_t i = first; i < z.size(); ++i)
		{
			const NetIndex &p = ring.net.points[i];
			z[i] = std::pow(w, p.sector) * pair.vector(static_cast<Eigen::Index>(i) - first - p.sector * per_sector);
		}

		// orientation: the sector-0 patch (1,0) must have det J > 0
		{
			const Eigen::MatrixXcd C = patch_coefficients(ring.net, z, 0, 1, 0);
			if (map_from_complex(C).det_jacobian(0.5, 0.5) < 0.0)
				for (auto &zi : z)
					zi = std::conj(zi);
		}

		// rotate and scale: the ring point on the sector-0 edge goes to (1, 0)
		{
			const std::complex<double> ref = eval_complex(patch_coefficients(ring.net, z, 0, 1, 0), 1.0, 0.0);
			if (std::abs(ref) < 1e-14)
				throw DegenerateEigenspaceError("characteristic net collapses for " + scheme.name());
			const std::complex<double> factor = std::conj(ref) / std::norm(ref);
			for (auto &zi : z)
				zi *= factor;
		}

		ring.control_points.resize(z.size());
		for (std::size_t i = 0; i < z.size(); ++i)
			ring.control_points[i] = {z[i].real(), z[i].imag()};
		ring.patches = ring.patches_from_net(ring.control_points);
		return ring;
	}

	std::vector<ElementMap> coons_cap_pieces(const CharacteristicRing &ring)
	{
		const int n = ring.scheme.valence;
		std::vector<ElementMap> out;
		for (int j = 0; j < n; ++j)
		{
			const ElementMap &right = ring.patches.at(3 * j + 0); // cell (1,0)
			const ElementMap &top = ring.patches.at(3 * j + 2);	  // cell (0,1)
			auto component = [](const Poly2 &r, const Poly2 &t) {
				// C(u,v) = u d1(v) + v c1(u) - u v P11, where d1 = r(0, .) and c1 = t(., 0);
				// the boundaries u = 0 and v = 0 are straight segments to the origin
				const int d = std::max({r.deg_u(), r.deg_v(), t.deg_u(), t.deg_v()});
				Poly2 C(d, d);
				for (int l = 0; l <= r.deg_v(); ++l)
					C(1, l) += r(0, l);
				for (int k = 0; k <= t.deg_u(); ++k)
					C(k, 1) += t(k, 0);
				C(1, 1) -= r.eval(0.0, 1.0);
				return C;
			};
			out.emplace_back(component(right.gx(), top.gx()), component(right.gy(), top.gy()));
		}
		return out;
	}

	CapSpec coons_cap(const CharacteristicRing &ring, int level)
	{
		if (level < 0)
			throw ConfigError("levels", "level must be non-negative");
		CapSpec cap;
		cap.kind = CapKind::CoonsPatch;
		cap.scale = std::pow(ring.lambda, level + 1);
		const double s = std::pow(ring.lambda, level);
		const auto pieces = coons_cap_pieces(ring);
		for (std::size_t m = 0; m < pieces.size(); ++m)
		{
			cap.maps.push_back(pieces[m].scaled(s));
			cap.in_sector.push_back(m == 0);
		}
		return cap;
	}

	nlohmann::json characteristic_ring_to_json(const CharacteristicRing &ring, int polyline_samples)
	{
		using nlohmann::json;
		json net = json::array();
		for (std::size_t i = 0; i < ring.net.points.size(); ++i)
		{
			const NetIndex &p = ring.net.points[i];
			net.push_back({{"sector", p.sector}, {"a", p.a}, {"b", p.b}, {"center", p.center},
						   {"x", ring.control_points[i].x()}, {"y", ring.control_points[i].y()}});
		}
		auto polyline = [&](const ElementMap &G) {
			json line = json::array();
			const int m = std::max(2, polyline_samples);
			auto push = [&](double u, double v) {
				const Eigen::Vector2d x = G.eval(u, v);
				line.push_back({x.x(), x.y()});
			};
			for (int s = 0; s < m; ++s)
				push(static_cast<double>(s) / (m - 1), 0.0);
			for (int s = 1; s < m; ++s)
				push(1.0, static_cast<double>(s) / (m - 1));
			for (int s = 1; s < m; ++s)
				push(1.0 - static_cast<double>(s) / (m - 1), 1.0);
			for (int s = 1; s < m; ++s)
				push(0.0, 1.0 - static_cast<double>(s) / (m - 1));
			return line;
		};
		json patches = json::array();
		for (std::size_t e = 0; e < ring.patches.size(); ++e)
		{
			json p = element_map_to_json(ring.patches[e]);
			p["sector"] = static_cast<int>(e / 3);
			p["cell"] = {ring_cells[e % 3][0], ring_cells[e % 3][1]};
			p["polyline"] = polyline(ring.patches[e]);
			patches.push_back(std::move(p));
		}
		json cap = json::array();
		for (const ElementMap &G : coons_cap_pieces(ring))
		{
			json p = element_map_to_json(G);
			p["polyline"] = polyline(G);
			cap.push_back(std::move(p));
		}
		return {{"scheme", ring.scheme.scheme == Scheme::DooSabin ? "doo-sabin" : "catmull-clark"},
				{"valence", ring.scheme.valence},
				{"lambda", ring.lambda},
				{"rings", ring.net.rings},
				{"control_net", std::move(net)},
				{"patches", std::move(patches)},
				{"cap_pieces", std::move(cap)}};
	}

} // namespace selfsim
