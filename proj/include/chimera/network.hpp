#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chimera {

enum class NetworkFormat { DenseMatrix, EdgeList };

// Weighted coupling graph. Weights are stored row-major with zero diagonal
// and nonnegative entries; undirected networks keep the matrix exactly
// symmetric. Immutable after construction, safe to share across workers.
class Network {
public:
    Network(int n_nodes, std::vector<double> weights, bool directed, std::string name);

    int n_nodes() const { return n_; }
    bool directed() const { return directed_; }
    const std::string& name() const { return name_; }
    double weight(int i, int j) const { return w_[static_cast<size_t>(i) * n_ + j]; }
    const std::vector<double>& weights() const { return w_; }
    double row_sum(int i) const;

private:
    int n_;
    bool directed_;
    std::string name_;
    std::vector<double> w_; // n_ x n_, row-major
};

struct NetworkSummary {
    std::vector<double> degree_per_node; // weighted row sums
    bool is_symmetric = false;
    long edge_count = 0;      // nonzero unordered pairs (ordered for directed nets)
    double min_weight = 0.0;  // over nonzero entries
    double max_weight = 0.0;
};

// File formats:
//   dense matrix: UTF-8 text, N rows of N whitespace-separated decimal reals
//   edge list:    lines "i j w" (0-indexed, decimal weight), '#' comments,
//                 undirected unless a leading header line "directed"
// An asymmetric dense matrix is rejected unless symmetrize is set, which
// replaces A with (A+A^T)/2.
Network load_network(const std::string& path, NetworkFormat format, bool symmetrize = false);
void save_network(const Network& net, const std::string& path, NetworkFormat format);
void save_network(const Network& net, const std::string& path, NetworkFormat format);

// Two globally coupled populations of pop_size nodes each: intra_weight
// inside a population, inter_weight across, then one edge chosen uniformly
// at random (seeded) removed symmetrically. drop_edge=false keeps the
// complete graph.
Network generate_two_population(int pop_size, double intra_weight, double inter_weight,
                                uint64_t drop_edge_seed, bool drop_edge = true);

NetworkSummary network_info(const Network& net);

} // namespace chimera
