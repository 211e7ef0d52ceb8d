#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/stats/clopper_pearson.hpp"

namespace hpstl::stats {

/// Closed halfspace { x : coeffs . x <= bound }.
struct Halfspace {
    std::vector<double> coeffs;
    double bound = 0.0;

    double slack(std::span<const double> x) const {
        double s = bound;
        for (std::size_t i = 0; i < coeffs.size(); ++i) s -= coeffs[i] * x[i];
        return s;
    }
    double l1_norm() const {
        double n = 0.0;
        for (double c : coeffs) n += std::fabs(c);
        return n;
    }
    Halfspace negated() const {
        Halfspace h{coeffs, -bound};
        for (double& c : h.coeffs) c = -c;
        return h;
    }
    friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

using Box = std::vector<Interval>;

/// Acceptance region D inside [0,1]^n. Every variant is stored either as an
/// intersection or a union of closed halfspaces; the faces of the unit cube
/// are not part of the region boundary.
class Region {
public:
    enum class Kind { BoxProduct, AbsDiffLE, AbsDiffGE, HalfspaceConj, HalfspaceUnion, LowerHalfLine, UpperHalfLine };

    static Region box_product(const Box& box) {
        Region r(Kind::BoxProduct, box.size(), true);
        for (std::size_t i = 0; i < box.size(); ++i) {
            if (!(box[i].lo <= box[i].hi)) throw DomainError("box side with lo > hi");
            if (box[i].hi < 1.0) r.halfspaces_.push_back(r.unit(i, 1.0, box[i].hi));
            if (box[i].lo > 0.0) r.halfspaces_.push_back(r.unit(i, -1.0, -box[i].lo));
        }
        return r;
    }

    // |x_i - x_j| <= delta; indices are zero-based.
    static Region abs_diff_le(std::size_t dim, std::size_t i, std::size_t j, double delta) {
        check_pair(dim, i, j);
        Region r(Kind::AbsDiffLE, dim, true);
        r.halfspaces_.push_back(r.pair(i, j, delta));
        r.halfspaces_.push_back(r.pair(j, i, delta));
        return r;
    }

    // |x_i - x_j| >= delta
    static Region abs_diff_ge(std::size_t dim, std::size_t i, std::size_t j, double delta) {
        check_pair(dim, i, j);
        Region r(Kind::AbsDiffGE, dim, false);
        r.halfspaces_.push_back(r.pair(i, j, delta).negated());
        r.halfspaces_.push_back(r.pair(j, i, delta).negated());
        return r;
    }

    static Region halfspace_conj(std::size_t dim, std::vector<Halfspace> hs) {
        Region r(Kind::HalfspaceConj, dim, true);
        r.halfspaces_ = std::move(hs);
        r.check_dims();
        return r;
    }

    static Region halfspace_union(std::size_t dim, std::vector<Halfspace> hs) {
        Region r(Kind::HalfspaceUnion, dim, false);
        r.halfspaces_ = std::move(hs);
        r.check_dims();
        return r;
    }

    // [0, p]
    static Region lower_half_line(double p) {
        Region r(Kind::LowerHalfLine, 1, true);
        r.halfspaces_.push_back(Halfspace{{1.0}, p});
        return r;
    }

    // [p, 1]
    static Region upper_half_line(double p) {
        Region r(Kind::UpperHalfLine, 1, true);
        r.halfspaces_.push_back(Halfspace{{-1.0}, -p});
        return r;
    }

    Kind kind() const { return kind_; }
    std::size_t dimension() const { return dim_; }
    bool is_intersection() const { return intersection_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

    bool contains(std::span<const double> x) const {
        check_point(x);
        return test(x, [](double s) { return s >= 0.0; });
    }

    bool contains_interior(std::span<const double> x) const {
        check_point(x);
        return test(x, [](double s) { return s > 0.0; });
    }

    /// Closure of [0,1]^n \ D, in the same representation.
    Region complement() const {
        Region r(intersection_ ? Kind::HalfspaceUnion : Kind::HalfspaceConj, dim_, !intersection_);
        if (kind_ == Kind::LowerHalfLine) r.kind_ = Kind::UpperHalfLine;
        if (kind_ == Kind::UpperHalfLine) r.kind_ = Kind::LowerHalfLine;
        for (const auto& h : halfspaces_) r.halfspaces_.push_back(h.negated());
        return r;
    }

    std::string describe() const {
        std::string out = intersection_ ? "all{" : "any{";
        for (std::size_t k = 0; k < halfspaces_.size(); ++k) {
            if (k) out += "; ";
            const auto& h = halfspaces_[k];
            bool first = true;
            for (std::size_t i = 0; i < h.coeffs.size(); ++i) {
                if (h.coeffs[i] == 0.0) continue;
                if (!first) out += " + ";
                out += fmt_num(h.coeffs[i]) + "*x" + std::to_string(i + 1);
                first = false;
            }
            if (first) out += "0";
            out += " <= " + fmt_num(h.bound);
        }
        return out + "}";
    }

private:
    Region(Kind k, std::size_t dim, bool intersection) : kind_(k), dim_(dim), intersection_(intersection) {
        if (dim == 0) throw DomainError("region dimension must be positive");
    }

    static void check_pair(std::size_t dim, std::size_t i, std::size_t j) {
        if (i >= dim || j >= dim || i == j) throw DomainError("absdiff region needs two distinct indices");
    }

    void check_dims() const {
        for (const auto& h : halfspaces_) {
            if (h.coeffs.size() != dim_) throw DomainError("halfspace dimension mismatch");
        }
    }

    void check_point(std::span<const double> x) const {
        if (x.size() != dim_) throw DomainError("point dimension does not match region");
    }

    Halfspace unit(std::size_t i, double c, double b) const {
        Halfspace h{std::vector<double>(dim_, 0.0), b};
        h.coeffs[i] = c;
        return h;
    }

    // x_i - x_j <= delta
    Halfspace pair(std::size_t i, std::size_t j, double delta) const {
        Halfspace h{std::vector<double>(dim_, 0.0), delta};
        h.coeffs[i] = 1.0;
        h.coeffs[j] = -1.0;
        return h;
    }

    template <typename Pred>
    bool test(std::span<const double> x, Pred ok) const {
        if (intersection_) {
            return std::all_of(halfspaces_.begin(), halfspaces_.end(),
                               [&](const Halfspace& h) { return ok(h.slack(x)); });
        }
        return std::any_of(halfspaces_.begin(), halfspaces_.end(),
                           [&](const Halfspace& h) { return ok(h.slack(x)); });
    }

    static std::string fmt_num(double v) {
        std::string s = std::to_string(v);
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }

    Kind kind_;
    std::size_t dim_;
    bool intersection_;
    std::vector<Halfspace> halfspaces_;
};

namespace detail {

// Largest-slack cube around the point, then each side pushed outward as far
// as every constraint allows (worst case over the box is attained at a corner).
inline std::optional<Box> box_in_polytope(std::span<const double> point, std::span<const Halfspace> hs) {
    constexpr double shrink = 1.0 - 1e-12;
    // Absolute slack kept back so that rounding cannot put a corner outside.
    const auto margin = [](const Halfspace& h) {
        return 16.0 * std::numeric_limits<double>::epsilon() * (std::fabs(h.bound) + h.l1_norm());
    };
    const std::size_t n = point.size();
    double radius = std::numeric_limits<double>::infinity();
    for (const auto& h : hs) {
        const double s = h.slack(point);
        const double norm = h.l1_norm();
        if (norm == 0.0) {
            if (s < 0.0) return std::nullopt;
            continue;
        }
        if (!(s > 0.0)) return std::nullopt;
        radius = std::min(radius, std::max(0.0, shrink * s - margin(h)) / norm);
    }
    Box box(n);
    for (std::size_t i = 0; i < n; ++i) {
        box[i].lo = std::max(0.0, point[i] - radius);
        box[i].hi = std::min(1.0, point[i] + radius);
    }

    auto worst_slack = [&](const Halfspace& h) {
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            worst += h.coeffs[j] * (h.coeffs[j] > 0.0 ? box[j].hi : box[j].lo);
        }
        return h.bound - worst;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (int side = 0; side < 2; ++side) {
            const bool lower = side == 0;
            double room = lower ? box[i].lo : 1.0 - box[i].hi;
            for (const auto& h : hs) {
                const double c = h.coeffs[i];
                if ((lower && c < 0.0) || (!lower && c > 0.0)) {
                    room = std::min(room, std::max(0.0, shrink * worst_slack(h) - margin(h)) / std::fabs(c));
                }
            }
            if (room <= 0.0) continue;
            if (lower) {
                box[i].lo = std::max(0.0, box[i].lo - room);
            } else {
                box[i].hi = std::min(1.0, box[i].hi + room);
            }
        }
    }
    return box;
}

} // namespace detail

/// Axis-aligned box containing `point` and contained in D, or nothing when the
/// point is not in the interior of D.
inline std::optional<Box> largest_box(std::span<const double> point, const Region& region) {
    if (point.size() != region.dimension()) throw DomainError("point dimension does not match region");
    for (double x : point) {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("point must lie in [0,1]^n");
    }
    const auto& hs = region.halfspaces();
    // Half-lines are closed on their inner side, so the whole of D is the box.
    if (region.kind() == Region::Kind::LowerHalfLine) {
        const double p = hs[0].bound / hs[0].coeffs[0];
        if (!(point[0] < p)) return std::nullopt;
        return Box{Interval{0.0, p}};
    }
    if (region.kind() == Region::Kind::UpperHalfLine) {
        const double p = hs[0].bound / hs[0].coeffs[0];
        if (!(point[0] > p)) return std::nullopt;
        return Box{Interval{p, 1.0}};
    }
    if (region.is_intersection()) return detail::box_in_polytope(point, hs);

    // Union: use the member halfspace with the most normalized slack.
    const Halfspace* best = nullptr;
    double best_radius = 0.0;
    for (const auto& h : hs) {
        const double norm = h.l1_norm();
        const double s = h.slack(point);
        const double r = norm == 0.0 ? (s >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0) : s / norm;
        if (r > best_radius) {
            best_radius = r;
            best = &h;
        }
    }
    if (best == nullptr) return std::nullopt;
    return detail::box_in_polytope(point, std::span<const Halfspace>(best, 1));
}

} // namespace hpstl::stats
