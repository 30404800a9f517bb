#include "fixtures.hpp"

#include <Eigen/QR>

#include <cmath>

namespace varcomp::testing {

VarCompModel tiny_model()
{
    return build_model(Matrix::Ones(3, 1), {vec({1.0, 0.0, 0.0})});
}

Matrix group_indicator(int a, int b)
{
    Matrix z = Matrix::Zero(a * b, a);
    for (int g = 0; g < a; ++g) {
        z.block(g * b, g, b, 1).setOnes();
    }
    return z;
}

VarCompModel one_way_model(int a, int b)
{
    return build_model(Matrix::Ones(a * b, 1), {group_indicator(a, b)});
}

Vector vec(std::initializer_list<double> values)
{
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v(i++) = x;
    }
    return v;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index size, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        v(i) = g(rng);
    }
    return v;
}

Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> g;
    Matrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            a(i, j) = g(rng);
        }
    }
    return a;
}

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p)
{
    return std::bernoulli_distribution(p)(rng);
}

Matrix random_block(std::mt19937_64& rng, int n, int k, const RandomModelOptions& opts)
{
    Matrix z;
    if (coin(rng, opts.p_indicator)) {
        z = Matrix::Zero(n, k);
        for (int i = 0; i < n; ++i) {
            z(i, uniform_int(rng, 0, k - 1)) = 1.0;
        }
    } else {
        z = gaussian_matrix(rng, n, k);
    }
    if (k >= 2 && coin(rng, opts.p_dependent_block)) {
        z.col(k - 1) = z.col(0) - 0.5 * z.col(k - 2);
    }
    if (z.isZero(0.0)) {
        z(0, 0) = 1.0;
    }
    return z;
}

}  // namespace

VarCompModel random_model(std::mt19937_64& rng, const RandomModelOptions& opts)
{
    while (true) {
        const int n = uniform_int(rng, opts.n_min, opts.n_max);
        const int r = uniform_int(rng, 1, opts.r_max);
        std::vector<int> k(static_cast<std::size_t>(r));
        int total = 0;
        for (auto& ki : k) {
            ki = uniform_int(rng, 1, opts.k_max);
            total += ki;
        }
        const int m_max = n - total - 1;
        if (m_max < 1) {
            continue;
        }
        const int m = uniform_int(rng, 1, std::min(m_max, 3));
        Matrix x = gaussian_matrix(rng, n, m);
        if (coin(rng, 0.3)) {
            x.col(0).setOnes();
        }
        if (!opts.full_rank_x && m >= 2 && coin(rng, opts.p_rank_deficient_x)) {
            x.col(m - 1) = 2.0 * x.col(0);
        }
        std::vector<Matrix> blocks;
        for (int ki : k) {
            blocks.push_back(random_block(rng, n, ki, opts));
        }
        VarCompModel model = build_model(std::move(x), std::move(blocks));
        if (opts.full_rank_x && !model.full_rank_x()) {
            continue;
        }
        return model;
    }
}

Vector random_member(std::mt19937_64& rng, const VarCompModel& model)
{
    const Matrix xz = model.xz();
    Vector y = xz * gaussian_vector(rng, xz.cols());
    if (y.norm() == 0.0) {
        y = xz.col(0);
    }
    return y;
}

Vector random_complement_direction(std::mt19937_64& rng, const VarCompModel& model)
{
    const Matrix xz = model.xz();
    Eigen::FullPivHouseholderQR<Matrix> qr(xz);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    const Matrix q = qr.matrixQ();
    const Eigen::Index free = q.cols() - rank;
    Vector v = q.rightCols(free) * gaussian_vector(rng, free);
    return v / v.norm();
}

Vector random_nonmember(std::mt19937_64& rng, const VarCompModel& model)
{
    const Vector member = random_member(rng, model);
    const double c = log_uniform(rng, 1e-3, 1.0);
    return member + c * member.norm() * random_complement_direction(rng, model);
}

KappaParams random_kappa_point(std::mt19937_64& rng, const VarCompModel& model)
{
    KappaParams p;
    p.beta = gaussian_vector(rng, model.m(), 3.0);
    p.kappa0 = log_uniform(rng, 1e-3, 1e3);
    p.kappa = Vector(static_cast<Eigen::Index>(model.r()));
    for (Eigen::Index i = 0; i < p.kappa.size(); ++i) {
        p.kappa(i) = coin(rng, 0.2) ? 0.0 : log_uniform(rng, 1e-3, 1e3);
    }
    return p;
}

Vector random_sigma2(std::mt19937_64& rng, std::size_t r)
{
    Vector s(static_cast<Eigen::Index>(r) + 1);
    s(0) = log_uniform(rng, 1e-2, 1e2);
    for (Eigen::Index i = 1; i < s.size(); ++i) {
        s(i) = coin(rng, 0.2) ? 0.0 : log_uniform(rng, 1e-2, 1e2);
    }
    return s;
}

}  // namespace varcomp::testing
