#include "chimera/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "chimera/error.hpp"
#include "chimera/rng.hpp"

namespace chimera {

Network::Network(int n_nodes, std::vector<double> weights, bool directed, std::string name)
    : n_(n_nodes), directed_(directed), name_(std::move(name)), w_(std::move(weights)) {
    if (n_ < 2)
        throw ValidationError("network needs at least 2 nodes, got " + std::to_string(n_));
    if (w_.size() != static_cast<size_t>(n_) * n_)
        throw ShapeError("weight matrix size " + std::to_string(w_.size()) +
                         " does not match " + std::to_string(n_) + " nodes");
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            double w = weight(i, j);
            if (!std::isfinite(w))
                throw ValidationError("non-finite weight at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            if (w < 0.0)
                throw ValidationError("negative weight " + std::to_string(w) + " at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (weight(i, i) != 0.0)
            throw ValidationError("self-loop at node " + std::to_string(i));
    }
    if (!directed_) {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (weight(i, j) != weight(j, i))
                    throw ValidationError("undirected network has asymmetric weights at (" +
                                          std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

double Network::row_sum(int i) const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j)
        s += weight(i, j);
    return s;
}

namespace {

bool matrix_is_symmetric(const std::vector<double>& w, int n) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (w[static_cast<size_t>(i) * n + j] != w[static_cast<size_t>(j) * n + i])
                return false;
    return true;
}

Network load_dense(const std::string& path, bool symmetrize) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open network file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &pos);
            } catch (const std::exception&) {
                throw ParseError("bad number '" + tok + "'", line_no);
            }
            if (pos != tok.size())
                throw ParseError("bad number '" + tok + "'", line_no);
            row.push_back(v);
        }
        if (!row.empty())
            rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("empty matrix file: " + path, line_no == 0 ? 1 : line_no);

    size_t n = rows.size();
    for (size_t i = 0; i < n; ++i)
        if (rows[i].size() != n)
            throw ShapeError("matrix is not square: row " + std::to_string(i + 1) + " has " +
                             std::to_string(rows[i].size()) + " columns, expected " +
                             std::to_string(n));

    std::vector<double> w(n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            w[i * n + j] = rows[i][j];

    if (!matrix_is_symmetric(w, static_cast<int>(n))) {
        if (!symmetrize)
            throw ValidationError("matrix in " + path +
                                  " is not symmetric; rerun with symmetrize enabled to use (A+A^T)/2");
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) {
                double m = 0.5 * (w[i * n + j] + w[j * n + i]);
                w[i * n + j] = m;
                w[j * n + i] = m;
            }
    }
    return Network(static_cast<int>(n), std::move(w), /*directed=*/false, path);
}

Network load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open network file: " + path);

    struct Edge {
        long i, j;
        double w;
        long line;
    };
    std::vector<Edge> edges;
    bool directed = false;
    bool saw_any = false;
    long max_node = -1;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string a, b, c, extra;
        if (!(ls >> a))
            continue; // blank or comment-only line
        if (!saw_any && a == "directed" && !(ls >> b)) {
            directed = true;
            saw_any = true;
            continue;
        }
        saw_any = true;
        if (!(ls >> b >> c))
            throw ParseError("expected 'i j w'", line_no);
        if (ls >> extra)
            throw ParseError("trailing token '" + extra + "'", line_no);
        long i, j;
        double w;
        try {
            size_t pi = 0, pj = 0, pw = 0;
            i = std::stol(a, &pi);
            j = std::stol(b, &pj);
            w = std::stod(c, &pw);
            if (pi != a.size() || pj != b.size() || pw != c.size())
                throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("bad edge line '" + a + " " + b + " " + c + "'", line_no);
        }
        if (i < 0 || j < 0)
            throw ParseError("negative node index", line_no);
        if (i == j)
            throw ValidationError("self-loop at node " + std::to_string(i) + " (line " +
                                  std::to_string(line_no) + ")");
        if (w < 0.0)
            throw ValidationError("negative weight " + std::to_string(w) + " (line " +
                                  std::to_string(line_no) + ")");
        max_node = std::max({max_node, i, j});
        edges.push_back({i, j, w, line_no});
    }
    if (edges.empty())
        throw ParseError("no edges in " + path, line_no == 0 ? 1 : line_no);
    if (max_node < 1)
        throw ValidationError("network needs at least 2 nodes");

    size_t n = static_cast<size_t>(max_node) + 1;
    std::vector<double> w(n * n, 0.0);
    std::vector<uint8_t> set(n * n, 0);
    for (const auto& e : edges) {
        size_t a = static_cast<size_t>(e.i) * n + e.j;
        if (set[a])
            throw ParseError("duplicate edge " + std::to_string(e.i) + "-" + std::to_string(e.j),
                             e.line);
        w[a] = e.w;
        set[a] = 1;
        if (!directed) {
            size_t b = static_cast<size_t>(e.j) * n + e.i;
            if (set[b])
                throw ParseError("duplicate edge " + std::to_string(e.i) + "-" + std::to_string(e.j),
                                 e.line);
            w[b] = e.w;
            set[b] = 1;
        }
    }
    return Network(static_cast<int>(n), std::move(w), directed, path);
}

} // namespace

Network load_network(const std::string& path, NetworkFormat format, bool symmetrize) {
    switch (format) {
    case NetworkFormat::DenseMatrix:
        return load_dense(path, symmetrize);
    case NetworkFormat::EdgeList:
        return load_edge_list(path);
    }
    throw ArgumentError("unknown network format");
}

void save_network(const Network& net, const std::string& path, NetworkFormat format) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write network file: " + path);
    char buf[64];
    int n = net.n_nodes();
    if (format == NetworkFormat::DenseMatrix) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", net.weight(i, j));
                out << (j ? " " : "") << buf;
            }
            out << '\n';
        }
    } else {
        if (net.directed())
            out << "directed\n";
        for (int i = 0; i < n; ++i) {
            int j0 = net.directed() ? 0 : i + 1;
            for (int j = j0; j < n; ++j) {
                if (i == j || net.weight(i, j) == 0.0)
                    continue;
                std::snprintf(buf, sizeof buf, "%.17g", net.weight(i, j));
                out << i << ' ' << j << ' ' << buf << '\n';
            }
        }
    }
    if (!out.flush())
        throw IoError("failed writing " + path);
}

Network generate_two_population(int pop_size, double intra_weight, double inter_weight,
                                uint64_t drop_edge_seed, bool drop_edge) {
    if (pop_size < 2)
        throw ArgumentError("pop_size must be >= 2, got " + std::to_string(pop_size));
    if (intra_weight < 0.0 || inter_weight < 0.0)
        throw ArgumentError("population weights must be nonnegative");

    int n = 2 * pop_size;
    std::vector<double> w(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j)
                continue;
            bool same_pop = (i < pop_size) == (j < pop_size);
            w[static_cast<size_t>(i) * n + j] = same_pop ? intra_weight : inter_weight;
        }
    }

    if (drop_edge) {
        // existing undirected edges in fixed (i<j) order
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (w[static_cast<size_t>(i) * n + j] > 0.0)
                    edges.emplace_back(i, j);
        if (!edges.empty()) {
            Rng rng(drop_edge_seed);
            auto [i, j] = edges[rng.below(edges.size())];
            w[static_cast<size_t>(i) * n + j] = 0.0;
            w[static_cast<size_t>(j) * n + i] = 0.0;
        }
    }

    return Network(n, std::move(w), /*directed=*/false,
                   "two-population(" + std::to_string(pop_size) + ")");
}

NetworkSummary network_info(const Network& net) {
    NetworkSummary s;
    int n = net.n_nodes();
    s.degree_per_node.resize(n);
    for (int i = 0; i < n; ++i)
        s.degree_per_node[i] = net.row_sum(i);
    s.is_symmetric = matrix_is_symmetric(net.weights(), n);

    bool any = false;
    for (int i = 0; i < n; ++i) {
        int j0 = (!net.directed()) ? i + 1 : 0;
        for (int j = j0; j < n; ++j) {
            double w = net.weight(i, j);
            if (i == j || w == 0.0)
                continue;
            ++s.edge_count;
            if (!any) {
                s.min_weight = s.max_weight = w;
                any = true;
            } else {
                s.min_weight = std::min(s.min_weight, w);
                s.max_weight = std::max(s.max_weight, w);
            }
        }
    }
    return s;
}

} // namespace chimera
