#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace vomcts {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Tolerance used when merging touching angular intervals.
inline constexpr double kArcMergeTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const = default;

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Bearing of `to` as seen from `from`, in (-pi, pi].
inline double bearing(const Vec2& from, const Vec2& to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

/// Normalizes an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

/// Signed angular difference a - b wrapped into (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// Distance from point p to segment [a, b].
inline double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len_sq = ab.norm_sq();
    if (len_sq == 0.0) return (p - a).norm();
    double t = (p - a).dot(ab) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

/// Parameter range s in [0,1] of segment [a,b] lying inside the closed ball
/// (center, radius). Returns false when the segment misses the ball.
inline bool clip_segment_to_ball(const Vec2& a, const Vec2& b, const Vec2& center, double radius,
                                 double& s_lo, double& s_hi) {
    const Vec2 d = b - a;
    const Vec2 f = a - center;
    const double qa = d.norm_sq();
    if (qa == 0.0) {
        if (f.norm_sq() <= radius * radius) {
            s_lo = 0.0;
            s_hi = 0.0;
            return true;
        }
        return false;
    }
    const double qb = 2.0 * f.dot(d);
    const double qc = f.norm_sq() - radius * radius;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return false;
    const double root = std::sqrt(disc);
    s_lo = std::max(0.0, (-qb - root) / (2.0 * qa));
    s_hi = std::min(1.0, (-qb + root) / (2.0 * qa));
    return s_lo <= s_hi;
}

/// A circular arc of headings: [start, start + width], start in (-pi, pi],
/// width in [0, 2pi]. The arc may wrap past +pi.
struct Arc {
    double start = 0.0;
    double width = 0.0;

    bool operator==(const Arc& o) const = default;
};

inline Arc arc_from_center(double center, double half_width) {
    return Arc{wrap_angle(center - half_width), 2.0 * half_width};
}

/// A set of pairwise-disjoint arcs on the circle, kept in a canonical form:
/// arcs sorted by start angle, merged when touching within kArcMergeTol, and
/// at most one arc wrapping past +pi. Canonical form makes equality
/// comparisons meaningful.
class AngularIntervalSet {
public:
    AngularIntervalSet() = default;

    static AngularIntervalSet empty_set() { return {}; }

    static AngularIntervalSet full_circle() {
        AngularIntervalSet s;
        s.arcs_.push_back(Arc{kPi, kTwoPi});
        return s;
    }

    /// The closed interval [lo, hi] (hi >= lo) mapped onto the circle.
    static AngularIntervalSet interval(double lo, double hi) {
        AngularIntervalSet s;
        const double width = hi - lo;
        if (width <= 0.0) return s;
        if (width >= kTwoPi - kArcMergeTol) return full_circle();
        s.arcs_.push_back(Arc{wrap_angle(lo), width});
        s.canonicalize();
        return s;
    }

    static AngularIntervalSet from_arcs(const std::vector<Arc>& arcs) {
        AngularIntervalSet s;
        s.arcs_ = arcs;
        s.canonicalize();
        return s;
    }

    bool empty() const { return arcs_.empty(); }

    bool is_full() const { return arcs_.size() == 1 && arcs_[0].width >= kTwoPi - kArcMergeTol; }

    double measure() const {
        double total = 0.0;
        for (const Arc& a : arcs_) total += a.width;
        return total;
    }

    const std::vector<Arc>& arcs() const { return arcs_; }

    bool contains(double angle, double tol = 1e-9) const {
        const double a = wrap_angle(angle);
        for (const Arc& arc : arcs_) {
            double d = a - arc.start;
            if (d < 0.0) d += kTwoPi;
            if (d <= arc.width + tol || d >= kTwoPi - tol) return true;
        }
        return false;
    }

    void subtract(const Arc& cut) {
        if (cut.width <= 0.0 || arcs_.empty()) return;
        if (cut.width >= kTwoPi - kArcMergeTol) {
            arcs_.clear();
            return;
        }
        auto pieces = to_linear();
        std::vector<std::pair<double, double>> out;
        for (const auto& cut_piece : linear_pieces_of(cut)) {
            out.clear();
            for (const auto& [lo, hi] : pieces) {
                const double c_lo = std::max(lo, cut_piece.first);
                const double c_hi = std::min(hi, cut_piece.second);
                if (c_lo >= c_hi) {
                    out.emplace_back(lo, hi);
                    continue;
                }
                if (c_lo > lo) out.emplace_back(lo, c_lo);
                if (c_hi < hi) out.emplace_back(c_hi, hi);
            }
            pieces.swap(out);
        }
        from_linear(std::move(pieces));
    }

    void subtract(const AngularIntervalSet& other) {
        for (const Arc& a : other.arcs_) subtract(a);
    }

    AngularIntervalSet intersect(const AngularIntervalSet& other) const {
        AngularIntervalSet res;
        const auto pa = to_linear();
        const auto pb = other.to_linear();
        std::vector<std::pair<double, double>> out;
        for (const auto& [alo, ahi] : pa) {
            for (const auto& [blo, bhi] : pb) {
                const double lo = std::max(alo, blo);
                const double hi = std::min(ahi, bhi);
                if (lo < hi) out.emplace_back(lo, hi);
            }
        }
        res.from_linear(std::move(out));
        return res;
    }

    /// Angle at measure-fraction u in [0, 1) from the set start, for uniform
    /// sampling. Caller must ensure the set is non-empty.
    double sample_at(double u) const {
        double target = u * measure();
        for (const Arc& a : arcs_) {
            if (target < a.width) return wrap_angle(a.start + target);
            target -= a.width;
        }
        return wrap_angle(arcs_.back().start + arcs_.back().width);
    }

    /// All arc endpoint angles, wrapped; used by tests to grant boundary slack.
    std::vector<double> boundaries() const {
        std::vector<double> out;
        out.reserve(arcs_.size() * 2);
        for (const Arc& a : arcs_) {
            out.push_back(a.start);
            out.push_back(wrap_angle(a.start + a.width));
        }
        return out;
    }

    bool operator==(const AngularIntervalSet& o) const = default;

private:
    std::vector<Arc> arcs_;

    // Linear chart: half-open [lo, hi) pieces with lo in [-pi, pi), hi <= pi.
    static std::vector<std::pair<double, double>> linear_pieces_of(const Arc& arc) {
        std::vector<std::pair<double, double>> pieces;
        double lo = wrap_angle(arc.start);
        if (lo == kPi) lo = -kPi;
        const double hi = lo + std::min(arc.width, kTwoPi);
        if (hi <= kPi) {
            pieces.emplace_back(lo, hi);
        } else {
            pieces.emplace_back(lo, kPi);
            pieces.emplace_back(-kPi, hi - kTwoPi);
        }
        return pieces;
    }

    std::vector<std::pair<double, double>> to_linear() const {
        std::vector<std::pair<double, double>> pieces;
        for (const Arc& a : arcs_) {
            for (auto& p : linear_pieces_of(a)) pieces.push_back(p);
        }
        std::sort(pieces.begin(), pieces.end());
        return pieces;
    }

    void from_linear(std::vector<std::pair<double, double>> pieces) {
        std::erase_if(pieces, [](const auto& p) { return p.second - p.first <= kArcMergeTol; });
        std::sort(pieces.begin(), pieces.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& p : pieces) {
            if (!merged.empty() && p.first <= merged.back().second + kArcMergeTol) {
                merged.back().second = std::max(merged.back().second, p.second);
            } else {
                merged.push_back(p);
            }
        }
        arcs_.clear();
        if (merged.empty()) return;

        double total = 0.0;
        for (const auto& [lo, hi] : merged) total += hi - lo;
        if (total >= kTwoPi - kArcMergeTol) {
            arcs_.push_back(Arc{kPi, kTwoPi});
            return;
        }

        // Merge across the -pi/+pi seam into a single wrap arc.
        bool wraps = merged.size() >= 2 && merged.front().first <= -kPi + kArcMergeTol &&
                     merged.back().second >= kPi - kArcMergeTol;
        if (wraps) {
            auto first = merged.front();
            auto& last = merged.back();
            last.second = last.second + (first.second - first.first);
            merged.erase(merged.begin());
        }
        for (const auto& [lo, hi] : merged) {
            arcs_.push_back(Arc{wrap_angle(lo), hi - lo});
        }
        std::sort(arcs_.begin(), arcs_.end(),
                  [](const Arc& a, const Arc& b) { return a.start < b.start; });
    }

    void canonicalize() { from_linear(to_linear()); }
};

}  // namespace vomcts
