#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrnn/circuit.hpp"
#include "qrnn/encoding.hpp"
#include "qrnn/state_vector.hpp"

namespace qrnn {

/// Shallow approximate state-preparation ansatz.
///
/// Gate order: RX(-pi/2) on every qubit; then for each layer l, RZ(theta[l*n + q])
/// on every qubit q followed by the CY ladder CY(q -> q+1), q = 0..n-2; then
/// RX(-pi/2) and RY(-pi/2) on every qubit. The leading column puts each qubit
/// on the equator so that the RZ angles act on a superposition.
struct EnqodeAnsatz {
  int n_qubits = 2;
  int layers = 2;

  std::size_t param_count() const {
    return static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(layers);
  }
  Circuit bind(std::span<const double> params) const;
  StateVector state(std::span<const double> params) const;
};

struct KMeansResult {
  FeatureMatrix centroids;
  std::vector<std::size_t> assignments;
  double inertia = 0.0;
  /// Inertia after every assignment step.
  std::vector<double> inertia_history;
  int iterations = 0;
};

/// Lloyd iteration on unit rows with k-means++ seeding. Centroids are
/// re-normalized after every update; ties go to the lowest centroid index;
/// an empty cluster keeps its previous centroid.
KMeansResult kmeans(const FeatureMatrix& rows, std::size_t k, std::uint64_t seed, int max_iters = 100);

struct EnqodeTrainConfig {
  int max_steps = 500;
  double learning_rate = 0.05;
  double target_infidelity = 1e-4;
  std::uint64_t seed = 0;
};

struct CentroidFit {
  std::vector<double> params;
  double fidelity = 0.0;
  /// d(amplitude)/d(theta_j), column-major: jacobian[j * dim + i].
  std::vector<cplx> jacobian;
  int steps = 0;
};

/// Parameter-shift gradient of fidelity(ansatz_state(theta), target).
std::vector<double> fidelity_gradient(const EnqodeAnsatz& ansatz, std::span<const double> params,
                                      std::span<const cplx> target);

/// Exact statevector Jacobian: column j is half the state at theta + pi e_j.
std::vector<cplx> state_jacobian(const EnqodeAnsatz& ansatz, std::span<const double> params);

/// Minimizes 1 - fidelity by full-gradient Adam from a seeded random start.
CentroidFit train_centroid(std::span<const double> centroid, const EnqodeAnsatz& ansatz,
                           const EnqodeTrainConfig& config);

struct EnqodeModel {
  EnqodeAnsatz ansatz;
  FeatureMatrix centroids;
  std::vector<std::vector<double>> params;
  std::vector<std::vector<cplx>> jacobians;
  std::vector<double> train_fidelities;

  std::size_t dimension() const { return std::size_t{1} << ansatz.n_qubits; }
  std::size_t size() const { return centroids.size(); }
  std::size_t nearest(std::span<const double> x) const;
};

struct EnqodeFitConfig {
  int layers = 2;
  /// 0 selects min(32, 2 * ceil(sqrt(rows))), capped at the row count.
  std::size_t clusters = 0;
  int kmeans_iters = 100;
  EnqodeTrainConfig train;
  unsigned threads = 0;
};

std::size_t default_cluster_count(std::size_t n_rows);

/// Clusters unit rows (zero-padded to 2^n_qubits) and trains one ansatz per centroid.
EnqodeModel fit_enqode(const FeatureMatrix& unit_rows, int n_qubits, const EnqodeFitConfig& config);

struct EncodedSample {
  Circuit circuit;
  std::vector<double> params;
  std::size_t centroid = 0;
  double fidelity = 0.0;
};

/// Nearest-centroid encoding. With `refine`, takes one damped least-squares
/// step (lambda = 1e-3) along the stored Jacobian that moves the prepared state
/// by the phase-aligned displacement x - c; the step is kept only if it does
/// not lower the fidelity.
EncodedSample encode_sample(const EnqodeModel& model, std::span<const double> x, bool refine);

double mean_fidelity(const EnqodeModel& model, const FeatureMatrix& unit_rows, bool refine);

/// JSON document with ansatz shape, centroids, parameters and fidelities.
/// Jacobians are recomputed on load.
std::string enqode_to_json(const EnqodeModel& model);
EnqodeModel enqode_from_json(std::string_view text);

}  // namespace qrnn
