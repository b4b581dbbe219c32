#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "udn/rng.hpp"

namespace udn
{

struct Point
{
    double x = 0;  //!< meters
    double y = 0;  //!< meters

    friend bool operator==(Point const&, Point const&) = default;
};

inline double squared_distance(Point a, Point b)
{
    double const dx = a.x - b.x;
    double const dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double distance(Point a, Point b);

//---------------------------------------------------------------------------//
/*!
 * Finite observation window: a disk or an axis-aligned square.
 *
 * Coordinates are in meters, areas are reported in km² to match the density
 * units (nodes per km²) used everywhere else.
 */
class Window
{
  public:
    enum class Shape
    {
        disk,
        square
    };

    static Window disk(Point center, double radius_m);
    static Window square(Point center, double side_m);

    Shape shape() const noexcept { return shape_; }
    Point center() const noexcept { return center_; }
    //! Radius for disks, side length for squares.
    double extent_m() const noexcept { return extent_; }
    double area_km2() const noexcept;

    bool contains(Point p) const noexcept;
    Point sample_uniform(Engine& rng) const;
    Window translated(Point shift) const;

  private:
    Window(Shape s, Point c, double e) : shape_(s), center_(c), extent_(e) {}

    Shape shape_;
    Point center_;
    double extent_;
};

enum class NodeKind
{
    access_node,
    user
};

struct PointSet
{
    std::vector<Point> points;
    NodeKind kind = NodeKind::access_node;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
};

struct Association
{
    std::vector<std::size_t> serving;  //!< UE index -> AN index
    std::vector<std::size_t> loads;    //!< AN index -> associated UE count
};

struct NetworkSnapshot
{
    Window window = Window::square({}, 1000.0);
    PointSet ans{{}, NodeKind::access_node};
    PointSet ues{{}, NodeKind::user};
    std::optional<std::size_t> typical_ue;
    std::vector<std::size_t> assoc;
    std::vector<std::size_t> loads;
};

//---------------------------------------------------------------------------//
// Sampling
//---------------------------------------------------------------------------//

/*!
 * Homogeneous Poisson point process restricted to a window.
 *
 * Points are generated as arrivals along the density axis: the k-th point is
 * kept while Γ_k / area ≤ density, where Γ_k is a sum of unit exponentials.
 * The kept count is Poisson(density · area) and positions are i.i.d. uniform.
 * For a fixed stream and window, the sample at a higher density is a superset
 * of the sample at a lower one.
 */
PointSet sample_hppp(double density_per_km2, Window const& window, Engine& rng,
                     NodeKind kind = NodeKind::access_node);

//! Exactly `count` i.i.d. uniform points; prefixes are stable across counts.
PointSet sample_fixed(std::size_t count, Window const& window, Engine& rng,
                      NodeKind kind = NodeKind::access_node);

//---------------------------------------------------------------------------//
// Association
//---------------------------------------------------------------------------//

/*!
 * Uniform-grid index answering nearest-point queries.
 *
 * Ties in distance resolve to the lowest point index.
 */
class NearestIndex
{
  public:
    explicit NearestIndex(std::vector<Point> const& points);

    std::size_t nearest(Point q) const;

  private:
    std::vector<Point> const* points_;
    double x0_ = 0;
    double y0_ = 0;
    double cell_ = 1;
    long nx_ = 1;
    long ny_ = 1;
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> sorted_;
};

Association associate_nearest(PointSet const& ans, PointSet const& ues);

//! Build a snapshot and compute its association.
NetworkSnapshot make_snapshot(Window const& window, PointSet ans, PointSet ues);

//! Insert a UE at the window center and mark it as the typical UE.
NetworkSnapshot place_typical_ue(NetworkSnapshot snapshot);

}  // namespace udn
