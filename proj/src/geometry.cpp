#include <selfsim/geometry.hpp>

#include <selfsim/errors.hpp>

#include <algorithm>
#include <cmath>

namespace selfsim
{

	ElementMap::ElementMap() : ElementMap(Poly2::u(), Poly2::v()) {}

	ElementMap::ElementMap(Poly2 gx, Poly2 gy, bool allow_singular)
		: gx_(std::move(gx)), gy_(std::move(gy)), allow_singular_(allow_singular)
	{
		q_ = std::max({gx_.deg_u(), gx_.deg_v(), gy_.deg_u(), gy_.deg_v()});
		init_derivatives();
	}

	void ElementMap::init_derivatives()
	{
		xu_ = partial_derivative(gx_, Direction::U);
		xv_ = partial_derivative(gx_, Direction::V);
		yu_ = partial_derivative(gy_, Direction::U);
		yv_ = partial_derivative(gy_, Direction::V);
		xuu_ = partial_derivative(xu_, Direction::U);
		xuv_ = partial_derivative(xu_, Direction::V);
		xvv_ = partial_derivative(xv_, Direction::V);
		yuu_ = partial_derivative(yu_, Direction::U);
		yuv_ = partial_derivative(yu_, Direction::V);
		yvv_ = partial_derivative(yv_, Direction::V);
	}

	Eigen::Vector2d ElementMap::eval(double u, double v) const
	{
		return {gx_.eval(u, v), gy_.eval(u, v)};
	}

	Eigen::Matrix2d ElementMap::jacobian(double u, double v) const
	{
		Eigen::Matrix2d J;
		J << xu_.eval(u, v), xv_.eval(u, v), yu_.eval(u, v), yv_.eval(u, v);
		return J;
	}

	double ElementMap::det_jacobian(double u, double v) const
	{
		return jacobian(u, v).determinant();
	}

	MapSample ElementMap::sample(double u, double v) const
	{
		MapSample s;
		s.x = eval(u, v);
		s.J = jacobian(u, v);
		s.det = s.J.determinant();
		return s;
	}

	std::array<Eigen::Matrix2d, 2> ElementMap::hessians(double u, double v) const
	{
		std::array<Eigen::Matrix2d, 2> H;
		const double xuv = xuv_.eval(u, v), yuv = yuv_.eval(u, v);
		H[0] << xuu_.eval(u, v), xuv, xuv, xvv_.eval(u, v);
		H[1] << yuu_.eval(u, v), yuv, yuv, yvv_.eval(u, v);
		return H;
	}

	ElementMap ElementMap::scaled(double mu) const
	{
		return ElementMap(gx_ * mu, gy_ * mu, allow_singular_);
	}

	ElementMap ElementMap::reparam(int j1, int j2, int k) const
	{
		return ElementMap(reparam_to_cell(gx_, j1, j2, k), reparam_to_cell(gy_, j1, j2, k), allow_singular_);
	}

	ElementMap ElementMap::with_allow_singular(bool allow) const
	{
		ElementMap out = *this;
		out.allow_singular_ = allow;
		return out;
	}

	bool RingSpec::element_in_sector(int n) const
	{
		return sector.empty() || std::find(sector.begin(), sector.end(), n) != sector.end();
	}

	bool RingSpec::cap_piece_in_sector(int m) const
	{
		return cap_sector.empty() || std::find(cap_sector.begin(), cap_sector.end(), m) != cap_sector.end();
	}

	void RingSpec::validate() const
	{
		if (!(lambda > 0.0 && lambda < 1.0))
			throw ConfigError("lambda", "must lie in ]0,1[");
		if (elements.empty())
			throw ConfigError("elements", "ring needs at least one element");
		for (int s : sector)
			if (s < 0 || s >= static_cast<int>(elements.size()))
				throw ConfigError("sector", "element index " + std::to_string(s) + " out of range");
		for (int s : cap_sector)
			if (s < 0 || s >= static_cast<int>(cap_pieces.size()))
				throw ConfigError("cap_sector", "cap piece index " + std::to_string(s) + " out of range");
	}

	std::string to_string(CapKind kind)
	{
		switch (kind)
		{
		case CapKind::Auto:
			return "auto";
		case CapKind::ScaledSingular:
			return "scaled";
		case CapKind::CoonsPatch:
			return "coons";
		case CapKind::Excluded:
			return "excluded";
		}
		return "unknown";
	}

	CapKind parse_cap_kind(const std::string &text, const std::string &field)
	{
		for (CapKind k : {CapKind::Auto, CapKind::ScaledSingular, CapKind::CoonsPatch, CapKind::Excluded})
			if (text == to_string(k))
				return k;
		throw ConfigError(field, "unknown cap kind '" + text + "' (auto, scaled, coons, excluded)");
	}

	long long ring_cell_count(int n_elements, int level)
	{
		long long sum = 0;
		for (int i = 0; i <= level; ++i)
			sum += 1LL << (2 * (level - i));
		return n_elements * sum;
	}

	MeshLevel build_mesh(const RingSpec &ring, int level, CapKind cap)
	{
		if (level < 0)
			throw ConfigError("levels", "level must be non-negative");
		if (level > 12)
			throw ConfigError("levels", "level above 12 is not supported");
		ring.validate();

		MeshLevel mesh;
		mesh.level = level;
		mesh.ring = ring;
		mesh.cells.reserve(static_cast<std::size_t>(ring_cell_count(static_cast<int>(ring.elements.size()), level)));
		for (int i = 0; i <= level; ++i)
		{
			const int k = level - i;
			const int m = 1 << k;
			for (int n = 0; n < static_cast<int>(ring.elements.size()); ++n)
			{
				const bool in_sector = ring.element_in_sector(n);
				for (int j1 = 0; j1 < m; ++j1)
					for (int j2 = 0; j2 < m; ++j2)
						mesh.cells.push_back({i, n, j1, j2, k, in_sector});
			}
		}

		if (cap == CapKind::Auto)
		{
			if (ring.global_map)
				cap = CapKind::ScaledSingular;
			else if (!ring.cap_pieces.empty())
				cap = CapKind::CoonsPatch;
			else
				cap = CapKind::Excluded;
		}

		const double scale = std::pow(ring.lambda, level + 1);
		mesh.cap.kind = cap;
		mesh.cap.scale = scale;
		switch (cap)
		{
		case CapKind::ScaledSingular:
			if (!ring.global_map)
				throw CapUnavailableError("scaled cap requested but the ring has no global map");
			mesh.cap.maps.push_back(ring.global_map->scaled(scale).with_allow_singular(true));
			mesh.cap.in_sector.push_back(true);
			break;
		case CapKind::CoonsPatch:
			if (ring.cap_pieces.empty())
				throw CapUnavailableError("Coons cap requested but the ring has no inner boundary data");
			// pieces cover lambda * Omega, hence the factor lambda^l
			for (int m = 0; m < static_cast<int>(ring.cap_pieces.size()); ++m)
			{
				mesh.cap.maps.push_back(ring.cap_pieces[m].scaled(scale / ring.lambda));
				mesh.cap.in_sector.push_back(ring.cap_piece_in_sector(m));
			}
			break;
		case CapKind::Excluded:
		case CapKind::Auto:
			mesh.cap.kind = CapKind::Excluded;
			break;
		}
		return mesh;
	}

	ElementMap cell_map(const MeshLevel &mesh, const Cell &cell)
	{
		const ElementMap &base = mesh.ring.elements.at(cell.n);
		ElementMap out = base.reparam(cell.j1, cell.j2, cell.k);
		if (cell.i > 0)
			out = out.scaled(std::pow(mesh.ring.lambda, cell.i));
		return out.with_allow_singular(base.allow_singular() && cell.j1 == 0);
	}

	MeshLevel build_tensor_mesh(const ElementMap &global, double lambda, int level)
	{
		if (level < 0)
			throw ConfigError("levels", "level must be non-negative");
		MeshLevel mesh;
		mesh.level = level;
		mesh.ring.elements = {global.with_allow_singular(true)};
		mesh.ring.lambda = lambda;
		const int k = level + 1;
		const int m = 1 << k;
		for (int j1 = 0; j1 < m; ++j1)
			for (int j2 = 0; j2 < m; ++j2)
				mesh.cells.push_back({0, 0, j1, j2, k, true});
		mesh.cap.kind = CapKind::Excluded;
		return mesh;
	}

	ScaledBoundaryDomain make_scaled_boundary(const ElementMap &global, double lambda)
	{
		if (!(lambda > 0.0 && lambda < 1.0))
			throw ConfigError("lambda", "must lie in ]0,1[");
		ScaledBoundaryDomain d;
		d.global = global.with_allow_singular(true);
		d.ring.elements = {ElementMap(affine_substitute(global.gx(), lambda, 1.0 - lambda, 0.0, 1.0),
									  affine_substitute(global.gy(), lambda, 1.0 - lambda, 0.0, 1.0))};
		d.ring.lambda = lambda;
		d.ring.global_map = d.global;
		return d;
	}

	ScaledBoundaryDomain make_sb1()
	{
		// u (2v - v^2), u (1 - v^2)
		const Poly2 gx = Poly2::from_table({{0, 0, 0}, {0, 2, -1}});
		const Poly2 gy = Poly2::from_table({{0, 0, 0}, {1, 0, -1}});
		return make_scaled_boundary(ElementMap(gx, gy, true), 0.5);
	}

	ScaledBoundaryDomain make_sb2()
	{
		// u (v + v^2 - v^3), u (1 - v^2)
		const Poly2 gx = Poly2::from_table({{0, 0, 0, 0}, {0, 1, 1, -1}});
		const Poly2 gy = Poly2::from_table({{0, 0, 0}, {1, 0, -1}});
		return make_scaled_boundary(ElementMap(gx, gy, true), 0.5);
	}

	ElementMap make_curved_quad_example()
	{
		// u + u^2 v - u^2 v^2, v
		const Poly2 gx = Poly2::from_table({{0, 0, 0}, {1, 0, 0}, {0, 1, -1}});
		return ElementMap(gx, Poly2::v());
	}

	double estimate_diameter(const ElementMap &map)
	{
		constexpr int samples = 20;
		std::vector<Eigen::Vector2d> pts;
		pts.reserve(4 * samples);
		for (int s = 0; s < samples; ++s)
		{
			const double t = static_cast<double>(s) / samples;
			pts.push_back(map.eval(t, 0.0));
			pts.push_back(map.eval(1.0, t));
			pts.push_back(map.eval(1.0 - t, 1.0));
			pts.push_back(map.eval(0.0, 1.0 - t));
		}
		double d = 0.0;
		for (std::size_t a = 0; a < pts.size(); ++a)
			for (std::size_t b = a + 1; b < pts.size(); ++b)
				d = std::max(d, (pts[a] - pts[b]).norm());
		return d;
	}

	nlohmann::json mesh_to_json(const MeshLevel &mesh)
	{
		nlohmann::json cells = nlohmann::json::array();
		for (const Cell &c : mesh.cells)
			cells.push_back({{"i", c.i}, {"n", c.n}, {"j1", c.j1}, {"j2", c.j2}, {"k", c.k}});
		return {{"level", mesh.level},
				{"lambda", mesh.ring.lambda},
				{"cells", std::move(cells)},
				{"cap", {{"kind", to_string(mesh.cap.kind)}, {"scale", mesh.cap.scale}}}};
	}

	namespace
	{
		nlohmann::json poly_to_json(const Poly2 &p)
		{
			nlohmann::json rows = nlohmann::json::array();
			for (int i = 0; i <= p.deg_u(); ++i)
			{
				nlohmann::json row = nlohmann::json::array();
				for (int j = 0; j <= p.deg_v(); ++j)
					row.push_back(p(i, j));
				rows.push_back(std::move(row));
			}
			return rows;
		}

		Poly2 poly_from_json(const nlohmann::json &j, const std::string &field)
		{
			if (!j.is_array() || j.empty())
				throw ConfigError(field, "expected a non-empty array of coefficient rows");
			std::vector<std::vector<double>> table;
			for (const auto &row : j)
			{
				if (!row.is_array() || row.empty())
					throw ConfigError(field, "each coefficient row must be a non-empty array");
				std::vector<double> r;
				for (const auto &c : row)
				{
					if (!c.is_number())
						throw ConfigError(field, "coefficients must be numbers");
					r.push_back(c.get<double>());
				}
				table.push_back(std::move(r));
			}
			return Poly2::from_table(table);
		}
	} // namespace

	nlohmann::json element_map_to_json(const ElementMap &map)
	{
		return {{"gx", poly_to_json(map.gx())}, {"gy", poly_to_json(map.gy())}};
	}

	ElementMap element_map_from_json(const nlohmann::json &j, const std::string &field)
	{
		if (!j.is_object())
			throw ConfigError(field, "expected an object with gx and gy");
		if (!j.contains("gx"))
			throw ConfigError(field + ".gx", "missing");
		if (!j.contains("gy"))
			throw ConfigError(field + ".gy", "missing");
		const bool singular = j.value("allow_singular", false);
		return ElementMap(poly_from_json(j.at("gx"), field + ".gx"), poly_from_json(j.at("gy"), field + ".gy"), singular);
	}

	namespace
	{
		std::vector<int> indices_from_json(const nlohmann::json &j, const std::string &field)
		{
			if (!j.is_array())
				throw ConfigError(field, "expected an array of indices");
			std::vector<int> out;
			for (std::size_t i = 0; i < j.size(); ++i)
			{
				if (!j[i].is_number_integer())
					throw ConfigError(field + "[" + std::to_string(i) + "]", "expected an integer");
				out.push_back(j[i].get<int>());
			}
			return out;
		}

		std::vector<ElementMap> maps_from_json(const nlohmann::json &j, const std::string &field)
		{
			if (!j.is_array() || j.empty())
				throw ConfigError(field, "expected a non-empty array of maps");
			std::vector<ElementMap> out;
			for (std::size_t i = 0; i < j.size(); ++i)
				out.push_back(element_map_from_json(j[i], field + "[" + std::to_string(i) + "]"));
			return out;
		}
	} // namespace

	RingSpec ring_spec_from_json(const nlohmann::json &j)
	{
		if (!j.is_object())
			throw ConfigError("domain", "expected a JSON object");
		if (!j.contains("lambda") || !j.at("lambda").is_number())
			throw ConfigError("lambda", "missing or not a number");
		const double lambda = j.at("lambda").get<double>();
		if (!(lambda > 0.0 && lambda < 1.0))
			throw ConfigError("lambda", "must lie in ]0,1[");

		RingSpec ring;
		if (j.contains("scaled_boundary_map"))
		{
			if (j.contains("elements"))
				throw ConfigError("elements", "not allowed together with scaled_boundary_map");
			ElementMap global = element_map_from_json(j.at("scaled_boundary_map"), "scaled_boundary_map");
			ring = make_scaled_boundary(global, lambda).ring;
		}
		else
		{
			if (!j.contains("elements"))
				throw ConfigError("elements", "missing (or give scaled_boundary_map)");
			ring.lambda = lambda;
			ring.elements = maps_from_json(j.at("elements"), "elements");
			if (j.contains("global_map"))
				ring.global_map = element_map_from_json(j.at("global_map"), "global_map");
			if (j.contains("cap_pieces"))
				ring.cap_pieces = maps_from_json(j.at("cap_pieces"), "cap_pieces");
			if (j.contains("cap_sector"))
				ring.cap_sector = indices_from_json(j.at("cap_sector"), "cap_sector");
		}
		if (j.contains("sector"))
			ring.sector = indices_from_json(j.at("sector"), "sector");
		ring.validate();
		return ring;
	}

} // namespace selfsim
