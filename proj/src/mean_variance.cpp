#include "hashalloc/mean_variance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hashalloc {

namespace {

double mean_sq_jump(const CompoundPoissonModel& m) {
    double s = 0.0;
    for (const auto& a : m.atoms()) s += a.probability * a.jump_size * a.jump_size;
    return s;
}

struct RatePoint {
    double variance;  // lambda_k b_k^2
    double mean;      // lambda_k b_k
    std::size_t pool;
};

void validate_frontier_ordering(const std::vector<RatePoint>& pts) {
    for (std::size_t k = 1; k < pts.size(); ++k) {
        if (pts[k - 1].mean < pts[k].mean || pts[k - 1].variance < pts[k].variance) {
            throw std::invalid_argument(
                "efficient frontier: pools must be sorted with lambda_k b_k and "
                "lambda_k b_k^2 both non-increasing (offending index " + std::to_string(k) + ")");
        }
    }
}

// Upper concave envelope over (variance, mean), collinear vertices kept.
std::vector<RatePoint> upper_hull(std::vector<RatePoint> pts) {
    // Ascending variance; on equal variance keep only the best mean.
    std::reverse(pts.begin(), pts.end());
    std::vector<RatePoint> clean;
    for (const auto& p : pts) {
        if (!clean.empty() && clean.back().variance == p.variance) {
            if (p.mean > clean.back().mean) clean.back() = p;
            continue;
        }
        clean.push_back(p);
    }
    std::vector<RatePoint> hull;
    for (const auto& p : clean) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross = (b.variance - a.variance) * (p.mean - b.mean) -
                                 (b.mean - a.mean) * (p.variance - b.variance);
            if (cross > 0.0) {
                hull.pop_back();  // b lies below the chord a-p
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    return hull;
}

}  // namespace

double expected_wealth(const CompoundPoissonModel& model, double x, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("expected_wealth: t must be >= 0");
    return x - model.drift() * t + t * model.total_intensity() * model.mean_jump();
}

double wealth_variance(const CompoundPoissonModel& model, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("wealth_variance: t must be >= 0");
    return t * model.total_intensity() * mean_sq_jump(model);
}

std::size_t mv_best_pool(const std::vector<PoolTerms>& pools, double gamma) {
    if (pools.empty()) throw std::invalid_argument("mv_best_pool: pool list is empty");
    if (!(gamma >= 0.0)) throw std::invalid_argument("mv_best_pool: gamma must be >= 0");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pools.size(); ++k) {
        const double b = pools[k].share_reward;
        const double score = pools[k].share_rate * (b - gamma * b * b);
        if (score > best_score) {
            best_score = score;
            best = k;
        }
    }
    return best;
}

double mv_objective(const CompoundPoissonModel& model, double x, double T, double gamma) {
    if (!(T > 0.0)) throw std::invalid_argument("mv_objective: T must be > 0");
    return expected_wealth(model, x, T) - gamma * wealth_variance(model, T);
}

FrontierPoint efficient_frontier_point(const std::vector<PoolTerms>& pools, double sigma2) {
    if (pools.empty()) throw std::invalid_argument("efficient_frontier_point: pool list is empty");
    std::vector<RatePoint> pts;
    pts.reserve(pools.size());
    for (std::size_t k = 0; k < pools.size(); ++k) {
        const double lb = pools[k].share_rate * pools[k].share_reward;
        pts.push_back({lb * pools[k].share_reward, lb, k});
    }
    validate_frontier_ordering(pts);

    const double v_min = pts.back().variance;
    const double v_max = pts.front().variance;
    if (!(sigma2 >= v_min && sigma2 <= v_max)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "efficient_frontier_point: sigma2 = %.17g outside the feasible interval "
                      "[%.17g, %.17g]", sigma2, v_min, v_max);
        throw std::invalid_argument(msg);
    }

    const std::vector<RatePoint> hull = upper_hull(pts);

    std::vector<double> weights(pools.size(), 0.0);
    for (const auto& h : hull) {
        if (sigma2 == h.variance) {
            weights[h.pool] = 1.0;
            return FrontierPoint{h.variance, h.mean, Allocation(std::move(weights)),
                                 {h.pool, h.pool}};
        }
    }
    std::size_t seg = 1;
    while (seg < hull.size() && hull[seg].variance < sigma2) ++seg;
    const RatePoint& left = hull[seg - 1];
    const RatePoint& right = hull[seg];
    const double w_right = (sigma2 - left.variance) / (right.variance - left.variance);
    const double w_left = 1.0 - w_right;
    weights[left.pool] = w_left;
    weights[right.pool] = w_right;
    const double expected = w_left * left.mean + w_right * right.mean;

    // Report the segment with the lower pool index first.
    std::size_t pi = left.pool, pj = right.pool;
    if (pi > pj) std::swap(pi, pj);
    return FrontierPoint{sigma2, expected, Allocation::normalized(std::move(weights)), {pi, pj}};
}

std::vector<FrontierPoint> frontier_curve(const std::vector<PoolTerms>& pools, int n_points) {
    if (n_points < 2) throw std::invalid_argument("frontier_curve: n_points must be >= 2");
    if (pools.empty()) throw std::invalid_argument("frontier_curve: pool list is empty");
    double v_min = std::numeric_limits<double>::infinity();
    double v_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : pools) {
        const double v = p.share_rate * p.share_reward * p.share_reward;
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
    }
    std::vector<FrontierPoint> curve;
    if (v_min == v_max) {
        curve.push_back(efficient_frontier_point(pools, v_min));
        return curve;
    }
    curve.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        double s = v_min + (v_max - v_min) * static_cast<double>(i) / (n_points - 1);
        s = std::clamp(s, v_min, v_max);  // endpoint arithmetic can overshoot by 1 ulp
        curve.push_back(efficient_frontier_point(pools, s));
    }
    return curve;
}

void write_frontier_csv(std::ostream& out, const std::vector<FrontierPoint>& curve) {
    out << "sigma2,expected_rate,pool_i,pool_j,w_i,w_j\n";
    char buf[128];
    for (const auto& pt : curve) {
        const std::size_t i = pt.segment.first;
        const std::size_t j = pt.segment.second;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%zu,%.17g,%.17g\n", pt.variance_rate,
                      pt.expected_rate, i, j, pt.allocation[i],
                      i == j ? 0.0 : pt.allocation[j]);
        out << buf;
    }
}

}  // namespace hashalloc
