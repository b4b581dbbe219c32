#include "udn/pointprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "udn/error.hpp"

namespace udn
{
namespace
{
constexpr double m2_per_km2 = 1e6;
}

double distance(Point a, Point b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

//---------------------------------------------------------------------------//
// Window
//---------------------------------------------------------------------------//

Window Window::disk(Point center, double radius_m)
{
    if (!(radius_m > 0) || !std::isfinite(radius_m))
        throw InvalidParameter("disk radius must be positive and finite");
    return Window{Shape::disk, center, radius_m};
}

Window Window::square(Point center, double side_m)
{
    if (!(side_m > 0) || !std::isfinite(side_m))
        throw InvalidParameter("square side must be positive and finite");
    return Window{Shape::square, center, side_m};
}

double Window::area_km2() const noexcept
{
    double const area_m2 = shape_ == Shape::disk
                               ? std::numbers::pi * extent_ * extent_
                               : extent_ * extent_;
    return area_m2 / m2_per_km2;
}

bool Window::contains(Point p) const noexcept
{
    if (shape_ == Shape::disk)
        return squared_distance(p, center_) <= extent_ * extent_;
    double const h = extent_ / 2;
    return std::abs(p.x - center_.x) <= h && std::abs(p.y - center_.y) <= h;
}

Point Window::sample_uniform(Engine& rng) const
{
    double const u = uniform01(rng);
    double const v = uniform01(rng);
    if (shape_ == Shape::disk)
    {
        double const r = extent_ * std::sqrt(u);
        double const phi = 2 * std::numbers::pi * v;
        return {center_.x + r * std::cos(phi), center_.y + r * std::sin(phi)};
    }
    return {center_.x + (u - 0.5) * extent_, center_.y + (v - 0.5) * extent_};
}

Window Window::translated(Point shift) const
{
    return Window{shape_, {center_.x + shift.x, center_.y + shift.y}, extent_};
}

//---------------------------------------------------------------------------//
// Sampling
//---------------------------------------------------------------------------//

PointSet sample_hppp(double density_per_km2, Window const& window, Engine& rng,
                     NodeKind kind)
{
    if (!(density_per_km2 >= 0) || !std::isfinite(density_per_km2))
        throw InvalidParameter("point density must be finite and non-negative");

    PointSet result{{}, kind};
    if (density_per_km2 == 0)
        return result;

    double const area = window.area_km2();
    result.points.reserve(
        static_cast<std::size_t>(density_per_km2 * area * 1.1 + 16));
    double arrival = 0;
    while (true)
    {
        arrival += exponential1(rng) / area;
        if (arrival > density_per_km2)
            break;
        result.points.push_back(window.sample_uniform(rng));
    }
    return result;
}

PointSet sample_fixed(std::size_t count, Window const& window, Engine& rng,
                      NodeKind kind)
{
    PointSet result{{}, kind};
    result.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        result.points.push_back(window.sample_uniform(rng));
    return result;
}

//---------------------------------------------------------------------------//
// NearestIndex
//---------------------------------------------------------------------------//

NearestIndex::NearestIndex(std::vector<Point> const& points) : points_(&points)
{
    if (points.empty())
        throw NoServerError("nearest-point index needs at least one point");

    double xmin = points.front().x, xmax = xmin;
    double ymin = points.front().y, ymax = ymin;
    for (auto const& p : points)
    {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    double const w = xmax - xmin;
    double const h = ymax - ymin;
    auto const n = static_cast<double>(points.size());
    // About one point per cell
    cell_ = std::max({std::sqrt(w * h / n), std::max(w, h) / n, 1e-9});
    x0_ = xmin;
    y0_ = ymin;
    nx_ = std::max(1L, static_cast<long>(std::floor(w / cell_)) + 1);
    ny_ = std::max(1L, static_cast<long>(std::floor(h / cell_)) + 1);

    auto const ncells = static_cast<std::size_t>(nx_ * ny_);
    std::vector<std::size_t> cell_of(points.size());
    cell_start_.assign(ncells + 1, 0);
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        long cx = std::min(nx_ - 1,
                           static_cast<long>((points[i].x - x0_) / cell_));
        long cy = std::min(ny_ - 1,
                           static_cast<long>((points[i].y - y0_) / cell_));
        cell_of[i] = static_cast<std::size_t>(cy * nx_ + cx);
        ++cell_start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c)
        cell_start_[c + 1] += cell_start_[c];
    sorted_.resize(points.size());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    // Ascending index order inside each cell
    for (std::size_t i = 0; i < points.size(); ++i)
        sorted_[fill[cell_of[i]]++] = i;
}

std::size_t NearestIndex::nearest(Point q) const
{
    auto const& pts = *points_;
    long const cx = std::clamp(
        static_cast<long>(std::floor((q.x - x0_) / cell_)), 0L, nx_ - 1);
    long const cy = std::clamp(
        static_cast<long>(std::floor((q.y - y0_) / cell_)), 0L, ny_ - 1);

    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_d2 = std::numeric_limits<double>::infinity();
    auto visit = [&](long i, long j) {
        auto const c = static_cast<std::size_t>(j * nx_ + i);
        for (std::size_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k)
        {
            std::size_t const idx = sorted_[k];
            double const d2 = squared_distance(q, pts[idx]);
            if (d2 < best_d2 || (d2 == best_d2 && idx < best))
            {
                best_d2 = d2;
                best = idx;
            }
        }
    };

    for (long ring = 0;; ++ring)
    {
        long const i0 = cx - ring, i1 = cx + ring;
        long const j0 = cy - ring, j1 = cy + ring;
        for (long j = std::max(j0, 0L); j <= std::min(j1, ny_ - 1); ++j)
        {
            bool const edge_row = (j == j0 || j == j1);
            for (long i = std::max(i0, 0L); i <= std::min(i1, nx_ - 1); ++i)
            {
                if (edge_row || i == i0 || i == i1)
                    visit(i, j);
            }
        }

        bool const covers_all = i0 <= 0 && j0 <= 0 && i1 >= nx_ - 1
                                && j1 >= ny_ - 1;
        if (covers_all)
            break;
        if (best == std::numeric_limits<std::size_t>::max())
            continue;

        // Distance from q to the part of the block boundary that still has
        // unvisited cells behind it
        double margin = std::numeric_limits<double>::infinity();
        if (i0 > 0)
            margin = std::min(margin, q.x - (x0_ + i0 * cell_));
        if (i1 < nx_ - 1)
            margin = std::min(margin, x0_ + (i1 + 1) * cell_ - q.x);
        if (j0 > 0)
            margin = std::min(margin, q.y - (y0_ + j0 * cell_));
        if (j1 < ny_ - 1)
            margin = std::min(margin, y0_ + (j1 + 1) * cell_ - q.y);
        // Strict so that an equidistant lower-index point beyond the block
        // is still found
        if (margin > 0 && best_d2 < margin * margin)
            break;
    }
    return best;
}

//---------------------------------------------------------------------------//
// Association
//---------------------------------------------------------------------------//

Association associate_nearest(PointSet const& ans, PointSet const& ues)
{
    if (ans.empty())
        throw NoServerError("cannot associate UEs: no access nodes");

    Association result;
    result.serving.resize(ues.size());
    result.loads.assign(ans.size(), 0);
    NearestIndex const index(ans.points);
    for (std::size_t u = 0; u < ues.size(); ++u)
    {
        std::size_t const a = index.nearest(ues.points[u]);
        result.serving[u] = a;
        ++result.loads[a];
    }
    return result;
}

NetworkSnapshot make_snapshot(Window const& window, PointSet ans, PointSet ues)
{
    NetworkSnapshot snap;
    snap.window = window;
    snap.ans = std::move(ans);
    snap.ues = std::move(ues);
    if (!snap.ans.empty())
    {
        auto assoc = associate_nearest(snap.ans, snap.ues);
        snap.assoc = std::move(assoc.serving);
        snap.loads = std::move(assoc.loads);
    }
    return snap;
}

NetworkSnapshot place_typical_ue(NetworkSnapshot snapshot)
{
    Point const center = snapshot.window.center();
    snapshot.typical_ue = snapshot.ues.size();
    snapshot.ues.points.push_back(center);
    if (!snapshot.ans.empty())
    {
        if (snapshot.assoc.size() + 1 != snapshot.ues.size())
        {
            auto assoc = associate_nearest(snapshot.ans, snapshot.ues);
            snapshot.assoc = std::move(assoc.serving);
            snapshot.loads = std::move(assoc.loads);
        }
        else
        {
            NearestIndex const index(snapshot.ans.points);
            std::size_t const a = index.nearest(center);
            snapshot.assoc.push_back(a);
            ++snapshot.loads[a];
        }
    }
    return snapshot;
}

}  // namespace udn
