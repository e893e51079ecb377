#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sbnoise/bath_kernel.hpp"
#include "sbnoise/types.hpp"

namespace sbnoise {

enum class Channel { DephasingZ, BitflipZ, BitflipY };

std::string_view to_string(Channel channel);
// Accepts "dephasing-z", "bitflip-z", "bitflip-y".
Channel parse_channel(std::string_view name);

// Qubit positions and the common local splitting of H_S = sum_j (Delta/2) X_j.
struct QubitLayout {
    std::vector<Vec3> positions;
    double splitting = 0.0;

    std::size_t size() const { return positions.size(); }
    double distance(std::size_t j, std::size_t m) const;
    void validate() const;
};

// Equal-time contractions C[j][m] = <phi_j^dag phi_m> of the bath displacement
// operators attached to each qubit. Since phi^dag = -phi this is -<phi_j phi_m>;
// storing the positive form keeps diagonal entries equal to the single-qubit
// error weights. Immutable after construction.
class ContractionMatrix {
public:
    ContractionMatrix(Eigen::MatrixXcd entries, double time, Channel channel, double splitting);

    // All entries equal to `value`: the fully correlated limit.
    static ContractionMatrix fully_correlated(std::size_t n, double value, double time = 0.0,
                                              Channel channel = Channel::DephasingZ, double splitting = 0.0);

    std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
    std::complex<double> operator()(std::size_t j, std::size_t m) const { return entries_(j, m); }
    const Eigen::MatrixXcd& entries() const { return entries_; }
    double time() const { return time_; }
    Channel channel() const { return channel_; }
    double splitting() const { return splitting_; }

private:
    Eigen::MatrixXcd entries_;
    double time_;
    Channel channel_;
    double splitting_;
};

struct BuildOptions {
    KernelOptions kernel{};
    std::size_t threads = 1;
};

// Kernel evaluations are shared between pairs whose distances agree to 1e-12 relative.
ContractionMatrix build_contraction_matrix(const BathSpec& bath, const QubitLayout& layout, double time,
                                           Channel channel, const BuildOptions& opts = {});

// C[j][m] / sqrt(C[j][j] C[m][m]).
double correlation_ratio(const ContractionMatrix& c, std::size_t j, std::size_t m);

enum class Regime { Independent, Intermediate, Correlated };

std::string_view to_string(Regime regime);

struct RegimeThresholds {
    double independent = 0.1;
    double correlated = 0.9;

    void validate() const;
};

struct PairRegime {
    std::size_t j;
    std::size_t m;
    double ratio;
    Regime regime;
};

struct RegimeClassification {
    std::vector<PairRegime> pairs;
    Regime global = Regime::Independent;  // worst pair
};

RegimeClassification classify_regime(const ContractionMatrix& c, const RegimeThresholds& thresholds = {});

}  // namespace sbnoise
