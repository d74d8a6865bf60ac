#pragma once

/// @file subdivision.hpp
/// @brief Doo-Sabin and Catmull-Clark subdivision around an extraordinary
/// vertex of valence n, subdominant eigenanalysis and characteristic rings.
///
/// Control points are addressed per sector j = 0..n-1 by grid indices (a, b).
/// Sector j is a quadrant of a regular grid; sector j+1 follows
/// counter-clockwise and the two share the half-line a-axis(j+1) = b-axis(j).
///
/// Catmull-Clark (primal grid, vertex (a, b) sits at grid node (a, b)):
///
///       b
///       3  o   o   o   o
///       2  o   o   o   o          (0, b)_j  ==  (b, 0)_(j+1)
///       1  o   o   o   o          (a,-b)_j  ==  (b, a)_(j-1)
///       0  C   o   o   o          (-a,b)_j  ==  (b, a)_(j+1)
///          0   1   2   3  a
///
///   C is the extraordinary vertex, shared by all sectors. Stored per sector:
///   a = 1..R, b = 0..R, i.e. n (R (R + 1)) + 1 points. R = 1 yields the
///   2n + 1 points {C, (1,0)_j, (1,1)_j}.
///
/// Doo-Sabin (dual grid, point (a, b) sits at (a + 1/2, b + 1/2)):
///
///       b
///       1   o   o        (a,-1-b)_j  ==  (b, a)_(j-1)     [b >= 0]
///       0   o   o        (-1-a,b)_j  ==  (b, a)_(j+1)     [a >= 0]
///           0   1  a
///
///   The n points (0,0)_j form the extraordinary n-gon face. Stored per
///   sector: a, b = 0..R, i.e. n (R + 1)^2 points; R = 1 yields the 4n-point
///   neighbourhood of the n quads incident to the extraordinary face.
///
/// Ring patches per sector: the B-spline patches on the grid cells
/// (1,0), (1,1), (0,1) (cell (s,t) = [s,s+1] x [t,t+1]); element index
/// 3 j + {0, 1, 2}. Cell (0,0) is the hole filled by the cap.

#include <selfsim/geometry.hpp>

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace selfsim
{

	enum class Scheme
	{
		DooSabin,
		CatmullClark
	};

	struct SchemeId
	{
		Scheme scheme = Scheme::CatmullClark;
		int valence = 4;

		bool extraordinary() const { return valence != 4; }
		/// Parametric degree of the ring patches: 2 (DS) or 3 (CC).
		int degree() const { return scheme == Scheme::DooSabin ? 2 : 3; }
		/// "ds:5" / "cc:3"
		std::string name() const;
	};

	/// Parses "ds:<valence>" or "cc:<valence>"; throws ConfigError on `field`.
	SchemeId parse_scheme(const std::string &text, const std::string &field = "domain");

	/// Address of a control point; `center` marks the Catmull-Clark EV.
	struct NetIndex
	{
		int sector = 0;
		int a = 0;
		int b = 0;
		bool center = false;
	};

	struct SubdivisionMatrix
	{
		SchemeId scheme;
		int rings = 1;
		Eigen::MatrixXd S;
		std::vector<NetIndex> points;

		/// Row/column of a (possibly non-canonical) grid address.
		int index(int sector, int a, int b) const;
	};

	/// Local subdivision matrix on the R-ring neighbourhood described above.
	/// Throws UnsupportedValenceError outside [3, 50].
	SubdivisionMatrix subdivision_matrix(SchemeId scheme, int rings = 1);

	/// Fourier block of frequency k: entries sum_j S[(0,r), (j,c)] w^(j k)
	/// with w = exp(2 pi i / n), restricted to non-center points.
	Eigen::MatrixXcd fourier_block(const SubdivisionMatrix &m, int k);

	/// Largest-modulus eigenvalue of Fourier block k = 1.
	double subdominant_lambda(SchemeId scheme);

	struct CharacteristicRing
	{
		SchemeId scheme;
		double lambda = 0.0;
		/// 3 patches per sector, element index 3 j + {0: cell (1,0), 1: (1,1), 2: (0,1)}.
		std::vector<ElementMap> patches;
		/// Report sector: the three patches of sector 0.
		std::vector<int> sector{0, 1, 2};
		/// Characteristic control net on the extended neighbourhood.
		SubdivisionMatrix net;
		std::vector<Eigen::Vector2d> control_points;

		/// Ring patch maps built from an arbitrary control net (same layout).
		std::vector<ElementMap> patches_from_net(const std::vector<Eigen::Vector2d> &points) const;
		/// RingSpec with lambda, sector 0 and the Coons cap pieces.
		RingSpec ring_spec() const;
	};

	/// Characteristic ring normalized so that the ring point on the sector-0
	/// edge, patch (1,0) at (u,v) = (1,0), lies at (1, 0).
	/// Throws DegenerateEigenspaceError if the subdominant eigenvalue is not
	/// real, positive and simple within its Fourier block.
	CharacteristicRing characteristic_ring(SchemeId scheme);

	/// Per-sector bilinearly blended Coons patches filling the hole
	/// lambda * Omega inside Omega^0. Boundaries: the inner edges of the
	/// sector's patches (1,0) and (0,1) and straight segments to the origin.
	std::vector<ElementMap> coons_cap_pieces(const CharacteristicRing &ring);

	/// Cap of the level-l mesh: the Coons pieces scaled by lambda^l.
	CapSpec coons_cap(const CharacteristicRing &ring, int level);

	/// lambda, control net, patch coefficients and polylines for plotting.
	nlohmann::json characteristic_ring_to_json(const CharacteristicRing &ring, int polyline_samples = 17);

} // namespace selfsim
