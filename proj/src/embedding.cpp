#include "toponet/embedding.hpp"

#include "toponet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace toponet {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& cloud) {
    const Eigen::Index n = cloud.rows();
    const Eigen::VectorXd sq = cloud.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) - 2.0 * cloud * cloud.transpose();
    return d2.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

GeodesicDistances geodesic_distances(const Eigen::MatrixXd& cloud, int k_neighbors) {
    const Eigen::Index n = cloud.rows();
    if (n < 2) throw std::invalid_argument("geodesic_distances: need at least two points");
    if (k_neighbors < 1 || k_neighbors >= n)
        throw std::invalid_argument("geodesic_distances: need 1 <= k_neighbors < cloud size");

    const Eigen::MatrixXd dense = pairwise_distances(cloud);

    // symmetrized k-NN adjacency; ties broken by index so the graph is
    // reproducible
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> order;
    order.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        order.clear();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        std::partial_sort(order.begin(), order.begin() + k_neighbors, order.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (dense(i, a) != dense(i, b)) return dense(i, a) < dense(i, b);
            return a < b;
        });
        for (int r = 0; r < k_neighbors; ++r) {
            const Eigen::Index j = order[static_cast<std::size_t>(r)];
            adj[static_cast<std::size_t>(i)].emplace_back(static_cast<int>(j), dense(i, j));
            adj[static_cast<std::size_t>(j)].emplace_back(static_cast<int>(i), dense(i, j));
        }
    }

    GeodesicDistances out;
    out.dist.setConstant(n, n, std::numeric_limits<double>::infinity());

    // Dijkstra from every source
    using Entry = std::pair<double, int>;
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (Eigen::Index src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        dist[static_cast<std::size_t>(src)] = 0.0;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        heap.emplace(0.0, static_cast<int>(src));
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[static_cast<std::size_t>(u)]) continue;
            for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
                const double nd = d + w;
                if (nd < dist[static_cast<std::size_t>(v)]) {
                    dist[static_cast<std::size_t>(v)] = nd;
                    heap.emplace(nd, v);
                }
            }
        }
        for (Eigen::Index j = 0; j < n; ++j) out.dist(src, j) = dist[static_cast<std::size_t>(j)];
    }
    out.dist = 0.5 * (out.dist + out.dist.transpose());  // kill asymmetric rounding

    if (!out.dist.allFinite()) {
        UnionFind uf(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
            for (const auto& [j, w] : adj[static_cast<std::size_t>(i)]) uf.unite(static_cast<int>(i), j);
        std::vector<int> sizes;
        std::vector<int> root_id(static_cast<std::size_t>(n), -1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int r = uf.find(static_cast<int>(i));
            if (root_id[static_cast<std::size_t>(r)] < 0) {
                root_id[static_cast<std::size_t>(r)] = static_cast<int>(sizes.size());
                sizes.push_back(0);
            }
            ++sizes[static_cast<std::size_t>(root_id[static_cast<std::size_t>(r)])];
        }
        std::string msg = "geodesic_distances: k-NN graph disconnected (component sizes";
        for (int s : sizes) msg += " " + std::to_string(s);
        msg += "); increase k_neighbors (got " + std::to_string(k_neighbors) + ")";
        throw std::runtime_error(msg);
    }
    out.connected = true;
    return out;
}

namespace {

// Top eigenpairs of a symmetric matrix by power iteration on B + shift*I
// with deflation against already-found vectors. The shift (an upper bound on
// |lambda|) makes the spectrum of the iterated operator nonnegative, so the
// pairs come out ordered by eigenvalue, not magnitude.
void top_symmetric_eigenpairs(const Eigen::MatrixXd& b, int count, Eigen::VectorXd& values, Eigen::MatrixXd& vectors,
                              double tol = 1e-10, int max_iters = 20000) {
    const Eigen::Index n = b.rows();
    const double shift = std::max(b.cwiseAbs().rowwise().sum().maxCoeff(), 1.0);
    values.resize(count);
    vectors.resize(n, count);
    Rng rng(0x7069736f6d617000ull);

    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
        for (int j = 0; j < k; ++j) v -= vectors.col(j).dot(v) * vectors.col(j);
        v.normalize();

        double lambda = 0.0;
        for (int iter = 0; iter < max_iters; ++iter) {
            Eigen::VectorXd next = b * v + shift * v;
            for (int j = 0; j < k; ++j) next -= vectors.col(j).dot(next) * vectors.col(j);
            const double norm = next.norm();
            if (norm < 1e-300) break;  // operator annihilates the deflated space
            next /= norm;
            lambda = next.dot(b * next);
            if ((b * next - lambda * next).norm() <= tol * shift) {
                v = next;
                break;
            }
            v = next;
        }
        values[k] = lambda;
        vectors.col(k) = v;
    }
}

double pearson_upper_tri(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::Index n = a.rows();
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    long count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            sa += a(i, j);
            sb += b(i, j);
            saa += a(i, j) * a(i, j);
            sbb += b(i, j) * b(i, j);
            sab += a(i, j) * b(i, j);
            ++count;
        }
    const double num = sab - sa * sb / count;
    const double den = std::sqrt(std::max(saa - sa * sa / count, 0.0)) * std::sqrt(std::max(sbb - sb * sb / count, 0.0));
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

IsomapResult classical_mds(const Eigen::MatrixXd& dist, int target_dim) {
    const Eigen::Index n = dist.rows();
    if (dist.cols() != n) throw std::invalid_argument("classical_mds: distance matrix must be square");
    if (target_dim < 1 || target_dim > n) throw std::invalid_argument("classical_mds: bad target_dim");

    // B = -1/2 J D^2 J with J = I - 11^T/n, i.e.
    // B_ij = -1/2 (d2_ij - rowmean_i - rowmean_j + grand mean)
    const Eigen::MatrixXd d2 = dist.array().square();
    const Eigen::VectorXd row_mean = d2.rowwise().mean();
    const double grand = d2.mean();
    const Eigen::MatrixXd b =
        -0.5 * (((d2.colwise() - row_mean).rowwise() - row_mean.transpose()).array() + grand).matrix();

    IsomapResult result;
    Eigen::MatrixXd vectors;
    top_symmetric_eigenpairs(b, target_dim, result.eigenvalues, vectors);
    result.coords.resize(n, target_dim);
    for (int k = 0; k < target_dim; ++k)
        result.coords.col(k) = vectors.col(k) * std::sqrt(std::max(result.eigenvalues[k], 0.0));

    const Eigen::MatrixXd embedded = pairwise_distances(result.coords);
    const double r = pearson_upper_tri(dist, embedded);
    result.residual_variance = 1.0 - r * r;
    return result;
}

IsomapResult isomap(const Eigen::MatrixXd& cloud, int k_neighbors, int target_dim) {
    if (target_dim < 1) throw std::invalid_argument("isomap: target_dim must be >= 1");
    if (cloud.rows() <= k_neighbors) throw std::invalid_argument("isomap: cloud size must exceed k_neighbors");
    const GeodesicDistances geo = geodesic_distances(cloud, k_neighbors);
    return classical_mds(geo.dist, target_dim);
}

ComponentAssignment epsilon_components(const Eigen::MatrixXd& cloud, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon_components: eps must be > 0");
    const Eigen::Index n = cloud.rows();
    ComponentAssignment out;
    out.eps = eps;
    UnionFind uf(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if ((cloud.row(i) - cloud.row(j)).norm() <= eps) uf.unite(static_cast<int>(i), static_cast<int>(j));

    out.component_of.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> root_id(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int r = uf.find(static_cast<int>(i));
        if (root_id[static_cast<std::size_t>(r)] < 0) root_id[static_cast<std::size_t>(r)] = out.count++;
        out.component_of[static_cast<std::size_t>(i)] = root_id[static_cast<std::size_t>(r)];
    }
    return out;
}

double default_component_epsilon(const Eigen::MatrixXd& cloud) {
    const Eigen::Index n = cloud.rows();
    if (n < 2) throw std::invalid_argument("default_component_epsilon: need at least two points");
    std::vector<double> nn(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) nn[static_cast<std::size_t>(i)] = std::min(nn[static_cast<std::size_t>(i)],
                                                                   (cloud.row(i) - cloud.row(j)).norm());
    // largest nearest-neighbour gap, not the median: the single-link
    // connectivity radius of a surface sample carries a sqrt(log n) factor
    // over the typical spacing, so median-based scales undercount dense
    // samples and concentration-collapsed clouds alike
    const double largest = *std::max_element(nn.begin(), nn.end());
    // all-duplicate clouds have no spacing to scale from; any eps gives one
    // component
    return largest > 0.0 ? 1.5 * largest : 1.0;
}

}  // namespace toponet
