#include "varcomp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace varcomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector project(Vector x)
{
    return x.cwiseMax(0.0);
}

double safe_eval(const Objective& f, const Vector& x)
{
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
}

struct Simplex {
    std::vector<Vector> points;
    std::vector<double> values;

    void sort()
    {
        std::vector<std::size_t> idx(points.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<Vector> p;
        std::vector<double> v;
        for (auto i : idx) {
            p.push_back(points[i]);
            v.push_back(values[i]);
        }
        points = std::move(p);
        values = std::move(v);
    }

    [[nodiscard]] double radius() const
    {
        double r = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            r = std::max(r, (points[i] - points[0]).cwiseAbs().maxCoeff());
        }
        return r;
    }
};

Simplex build_simplex(const Objective& f, const Vector& x0, double step, int& evals)
{
    Simplex s;
    const Eigen::Index d = x0.size();
    s.points.push_back(x0);
    for (Eigen::Index i = 0; i < d; ++i) {
        Vector v = x0;
        v(i) += step * std::max(1.0, std::abs(x0(i)));
        s.points.push_back(v);
    }
    for (const auto& p : s.points) {
        s.values.push_back(safe_eval(f, p));
        ++evals;
    }
    return s;
}

struct RunOutcome {
    bool converged = false;
};

/// One Nelder-Mead run; mutates the simplex in place.
RunOutcome run(const Objective& f, Simplex& s, const SimplexOptions& opts, int& iterations)
{
    const std::size_t d = s.points.size() - 1;
    int evals = 0;
    while (true) {
        s.sort();
        const double fbest = s.values.front();
        const double spread = s.values.back() - fbest;
        const double scale = 1.0 + s.points.front().cwiseAbs().maxCoeff();
        if (std::isfinite(spread) && spread <= opts.f_tol * (1.0 + std::abs(fbest)) &&
            s.radius() <= opts.x_tol * scale) {
            return {true};
        }
        if (iterations >= opts.max_iters) {
            return {false};
        }
        ++iterations;

        Vector centroid = Vector::Zero(s.points.front().size());
        for (std::size_t i = 0; i < d; ++i) {
            centroid += s.points[i];
        }
        centroid /= static_cast<double>(d);
        const Vector& worst = s.points[d];

        const Vector raw = centroid + (centroid - worst);
        const Vector xr = project(raw);
        const bool clipped = (xr.array() != raw.array()).any();
        const double fr = safe_eval(f, xr);
        ++evals;
        if (fr < s.values[0]) {
            const Vector xe = project(centroid + 2.0 * (centroid - worst));
            const double fe = safe_eval(f, xe);
            ++evals;
            if (fe < fr) {
                s.points[d] = xe;
                s.values[d] = fe;
            } else {
                s.points[d] = xr;
                s.values[d] = fr;
            }
            continue;
        }
        if (fr < s.values[d - 1]) {
            s.points[d] = xr;
            s.values[d] = fr;
            continue;
        }
        bool accepted = false;
        // A clipped reflection may land on an existing vertex; contracting
        // toward it would collapse the simplex onto the boundary.
        if (fr < s.values[d] && !clipped) {
            const Vector xc = project(centroid + 0.5 * (xr - centroid));
            const double fc = safe_eval(f, xc);
            ++evals;
            if (fc <= fr) {
                s.points[d] = xc;
                s.values[d] = fc;
                accepted = true;
            }
        } else {
            const Vector xc = project(centroid + 0.5 * (worst - centroid));
            const double fc = safe_eval(f, xc);
            ++evals;
            if (fc < s.values[d]) {
                s.points[d] = xc;
                s.values[d] = fc;
                accepted = true;
            }
        }
        if (!accepted) {
            for (std::size_t i = 1; i <= d; ++i) {
                s.points[i] = project(s.points[0] + 0.5 * (s.points[i] - s.points[0]));
                s.values[i] = safe_eval(f, s.points[i]);
                ++evals;
            }
        }
    }
}

}  // namespace

SimplexResult minimize_nonnegative(const Objective& f, const Vector& start,
                                   const SimplexOptions& opts)
{
    SimplexResult out;
    out.x = project(start);
    out.value = safe_eval(f, out.x);
    if (start.size() == 0) {
        out.converged = true;
        return out;
    }
    int evals = 0;
    bool converged = false;
    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        Simplex s = build_simplex(f, out.x, opts.initial_step, evals);
        const double before = out.value;
        converged = run(f, s, opts, out.iterations).converged;
        if (s.values.front() <= out.value) {
            out.x = s.points.front();
            out.value = s.values.front();
        }
        if (!converged) {
            break;
        }
        const double gain = before - out.value;
        if (restart > 0 && !(gain > opts.f_tol * (1.0 + std::abs(out.value)))) {
            break;
        }
    }
    out.converged = converged;
    return out;
}

SimplexResult polish_nonnegative(const Objective& f, SimplexResult from, double free_floor,
                                 int max_steps)
{
    if (!std::isfinite(from.value)) {
        return from;
    }
    const Eigen::Index d = from.x.size();
    for (int step = 0; step < max_steps; ++step) {
        std::vector<Eigen::Index> free;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (from.x(i) > free_floor) {
                free.push_back(i);
            }
        }
        const auto nf = static_cast<Eigen::Index>(free.size());
        if (nf == 0) {
            return from;
        }
        const Vector& x = from.x;
        const double fx = from.value;
        Vector h(nf);
        for (Eigen::Index a = 0; a < nf; ++a) {
            const double xi = x(free[a]);
            h(a) = std::min(1e-3 * std::max(xi, 1e-2), 0.5 * xi);
        }
        auto shifted = [&](Eigen::Index a, double da, Eigen::Index b, double db) {
            Vector p = x;
            p(free[a]) += da;
            if (b >= 0) {
                p(free[b]) += db;
            }
            return safe_eval(f, p);
        };
        Vector grad(nf);
        Matrix hess(nf, nf);
        bool finite = true;
        for (Eigen::Index a = 0; a < nf; ++a) {
            const double fp = shifted(a, h(a), -1, 0.0);
            const double fm = shifted(a, -h(a), -1, 0.0);
            const double fp2 = shifted(a, 0.5 * h(a), -1, 0.0);
            const double fm2 = shifted(a, -0.5 * h(a), -1, 0.0);
            const double d1 = (fp - fm) / (2.0 * h(a));
            const double d2 = (fp2 - fm2) / h(a);
            grad(a) = (4.0 * d2 - d1) / 3.0;
            hess(a, a) = (fp - 2.0 * fx + fm) / (h(a) * h(a));
            finite = finite && std::isfinite(grad(a)) && std::isfinite(hess(a, a));
        }
        for (Eigen::Index a = 0; a < nf; ++a) {
            for (Eigen::Index b = a + 1; b < nf; ++b) {
                const double v = (shifted(a, h(a), b, h(b)) - shifted(a, h(a), b, -h(b)) -
                                  shifted(a, -h(a), b, h(b)) + shifted(a, -h(a), b, -h(b))) /
                                 (4.0 * h(a) * h(b));
                hess(a, b) = v;
                hess(b, a) = v;
                finite = finite && std::isfinite(v);
            }
        }
        if (!finite) {
            return from;
        }
        Eigen::LLT<Matrix> llt(hess);
        if (llt.info() != Eigen::Success) {
            return from;
        }
        Vector delta = -llt.solve(grad);
        const double noise = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
        bool moved = false;
        for (int halving = 0; halving < 6; ++halving) {
            Vector candidate = x;
            for (Eigen::Index a = 0; a < nf; ++a) {
                candidate(free[a]) += delta(a);
            }
            candidate = project(candidate);
            const double fc = safe_eval(f, candidate);
            if (fc <= fx + noise) {
                const double size = (candidate - x).cwiseAbs().maxCoeff();
                from.x = candidate;
                from.value = fc;
                moved = size > 1e-14 * (1.0 + x.cwiseAbs().maxCoeff());
                break;
            }
            delta *= 0.5;
        }
        if (!moved) {
            return from;
        }
    }
    return from;
}

}  // namespace varcomp
