#pragma once

/// @file geometry.hpp
/// @brief Element maps, self-similar rings and level-l meshes with caps.
///
/// A ring Omega^0 consists of N element maps G^0_n : B -> R^2 on the unit
/// square B. Ring i is lambda^i * Omega^0. The level-l mesh contains rings
/// 0..l, where every element of ring i is split into 4^(l-i) dyadic cells,
/// plus a cap covering the remaining hole lambda^(l+1) * Omega.

#include <selfsim/poly.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace selfsim
{

	/// Position, Jacobian and Jacobian determinant of a map at one point.
	struct MapSample
	{
		Eigen::Vector2d x;
		Eigen::Matrix2d J; // [[x_u, x_v], [y_u, y_v]]
		double det;
	};

	/// Polynomial element map G = (gx, gy) on B = ]0,1[^2.
	///
	/// Maps flagged `allow_singular` may degenerate along the edge u = 0
	/// (scaled-boundary apex); everything else must be regular.
	class ElementMap
	{
	public:
		ElementMap();
		ElementMap(Poly2 gx, Poly2 gy, bool allow_singular = false);

		const Poly2 &gx() const { return gx_; }
		const Poly2 &gy() const { return gy_; }
		/// Declared bidegree bound: the largest stored degree of either component.
		int q() const { return q_; }
		bool allow_singular() const { return allow_singular_; }

		Eigen::Vector2d eval(double u, double v) const;
		Eigen::Matrix2d jacobian(double u, double v) const;
		double det_jacobian(double u, double v) const;
		MapSample sample(double u, double v) const;
		/// Parameter Hessians [d2x, d2y], each [[.._uu, .._uv], [.._uv, .._vv]].
		std::array<Eigen::Matrix2d, 2> hessians(double u, double v) const;

		ElementMap scaled(double mu) const;
		/// Restriction to a dyadic sub-cell, see reparam_to_cell.
		ElementMap reparam(int j1, int j2, int k) const;
		ElementMap with_allow_singular(bool allow) const;

	private:
		void init_derivatives();

		Poly2 gx_, gy_;
		Poly2 xu_, xv_, yu_, yv_;
		Poly2 xuu_, xuv_, xvv_, yuu_, yuv_, yvv_;
		int q_ = 0;
		bool allow_singular_ = false;
	};

	/// One self-similar ring Omega^0.
	struct RingSpec
	{
		std::vector<ElementMap> elements;
		double lambda = 0.5;
		/// Element indices (0-based) on which errors are reported; empty = all.
		std::vector<int> sector;
		/// Scaled-boundary domains: the map of the whole domain Omega.
		std::optional<ElementMap> global_map;
		/// Subdivision rings: pieces parameterizing the hole lambda * Omega
		/// inside Omega^0 (one Coons patch per sector).
		std::vector<ElementMap> cap_pieces;
		/// Indices into cap_pieces belonging to the report sector; empty = all.
		std::vector<int> cap_sector;

		bool element_in_sector(int n) const;
		bool cap_piece_in_sector(int m) const;
		/// Throws ConfigError when lambda, elements or sector are invalid.
		void validate() const;
	};

	struct Cell
	{
		int i = 0;  // ring index
		int n = 0;  // element index within the ring
		int j1 = 0; // dyadic position
		int j2 = 0;
		int k = 0; // refinement depth, l - i
		bool in_sector = true;
	};

	enum class CapKind
	{
		Auto,
		ScaledSingular,
		CoonsPatch,
		Excluded
	};

	std::string to_string(CapKind kind);
	/// "auto", "scaled", "coons" or "excluded"; throws ConfigError on `field`.
	CapKind parse_cap_kind(const std::string &text, const std::string &field = "cap");

	/// The cap lambda^(l+1) * Omega. `maps` are already scaled.
	struct CapSpec
	{
		CapKind kind = CapKind::Excluded;
		std::vector<ElementMap> maps;
		std::vector<bool> in_sector;
		/// lambda^(l+1): the cap is this multiple of the whole domain.
		double scale = 0.0;
	};

	struct MeshLevel
	{
		int level = 0;
		RingSpec ring;
		std::vector<Cell> cells;
		CapSpec cap;
	};

	/// Number of ring cells: N * sum_{i=0..l} 4^(l-i).
	long long ring_cell_count(int n_elements, int level);

	/// Auto picks ScaledSingular when a global map exists, CoonsPatch when cap
	/// pieces exist and Excluded otherwise. Throws CapUnavailableError when the
	/// requested kind lacks its data.
	MeshLevel build_mesh(const RingSpec &ring, int level, CapKind cap = CapKind::Auto);

	/// lambda^i * reparam_to_cell(G^0_n, j1, j2, k). Only cells touching the
	/// singular edge (j1 = 0) of a singular base map keep `allow_singular`.
	ElementMap cell_map(const MeshLevel &mesh, const Cell &cell);

	/// The whole global map bisected uniformly l+1 times, as one "ring"
	/// without cap; cells with j1 = 0 touch the singular apex edge.
	MeshLevel build_tensor_mesh(const ElementMap &global, double lambda, int level);

	/// Scaled-boundary example domain: global map and extracted ring
	/// G^0(u, v) = G(lambda + (1 - lambda) u, v).
	struct ScaledBoundaryDomain
	{
		ElementMap global;
		RingSpec ring;
	};

	/// Ring extraction for any scaled-boundary map with apex at u = 0.
	ScaledBoundaryDomain make_scaled_boundary(const ElementMap &global, double lambda);

	/// Biquadratic example: (u (2v - v^2), u (1 - v^2)).
	ScaledBoundaryDomain make_sb1();
	/// Bicubic example: (u (v + v^2 - v^3), u (1 - v^2)).
	ScaledBoundaryDomain make_sb2();
	/// The curved quadrilateral (u + u^2 v - u^2 v^2, v).
	ElementMap make_curved_quad_example();

	/// Max pairwise distance among 20 samples on each of the 4 edges.
	double estimate_diameter(const ElementMap &map);

	/// {level, lambda, cells:[{i,n,j1,j2,k}], cap:{kind,scale}}
	nlohmann::json mesh_to_json(const MeshLevel &mesh);

	nlohmann::json element_map_to_json(const ElementMap &map);
	/// Expects {"gx": [[...]], "gy": [[...]]}; optional "allow_singular".
	ElementMap element_map_from_json(const nlohmann::json &j, const std::string &field);

	/// Custom domain file. Either
	///   {"lambda": l, "scaled_boundary_map": {gx, gy}, "sector"?: [...]}
	/// (ring extracted as in make_scaled_boundary) or
	///   {"lambda": l, "elements": [{gx, gy}, ...], "sector"?: [...],
	///    "global_map"?: {...}, "cap_pieces"?: [...], "cap_sector"?: [...]}.
	/// Errors name the offending field path, e.g. "elements[1].gx".
	RingSpec ring_spec_from_json(const nlohmann::json &j);

} // namespace selfsim
