#include "qrnn/enqode.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qrnn/optim.hpp"
#include "qrnn/parallel.hpp"
#include "qrnn/random.hpp"

namespace qrnn {

namespace {

constexpr double kRefineDamping = 1e-3;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

std::vector<cplx> padded_target(std::span<const double> x, std::size_t dim) {
  if (x.size() > dim) throw std::invalid_argument("enqode: sample dimension exceeds model dimension");
  std::vector<cplx> t(dim, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) t[i] = x[i];
  return t;
}

FeatureRow padded_row(std::span<const double> x, std::size_t dim) {
  if (x.size() > dim) throw std::invalid_argument("enqode: sample dimension exceeds model dimension");
  FeatureRow r(dim, 0.0);
  std::copy(x.begin(), x.end(), r.begin());
  return r;
}

double overlap_fidelity(const StateVector& state, std::span<const cplx> target) {
  return fidelity(target, state.amplitudes());
}

}  // namespace

Circuit EnqodeAnsatz::bind(std::span<const double> params) const {
  if (params.size() != param_count()) {
    throw std::invalid_argument("enqode ansatz: expected " + std::to_string(param_count()) +
                                " parameters");
  }
  constexpr double half_pi = std::numbers::pi / 2;
  Circuit c(n_qubits);
  for (int q = 0; q < n_qubits; ++q) c.rx(q, -half_pi);
  std::size_t p = 0;
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n_qubits; ++q) c.rz(q, params[p++]);
    for (int q = 0; q + 1 < n_qubits; ++q) c.cy(q, q + 1);
  }
  for (int q = 0; q < n_qubits; ++q) {
    c.rx(q, -half_pi);
    c.ry(q, -half_pi);
  }
  return c;
}

StateVector EnqodeAnsatz::state(std::span<const double> params) const {
  return simulate(bind(params));
}

KMeansResult kmeans(const FeatureMatrix& rows, std::size_t k, std::uint64_t seed, int max_iters) {
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (rows.empty()) throw std::invalid_argument("kmeans: no rows");
  if (k > rows.size()) throw std::invalid_argument("kmeans: k exceeds the number of rows");
  const std::size_t dim = rows.front().size();
  Rng rng(seed);

  // k-means++ seeding.
  KMeansResult result;
  std::vector<double> d2(rows.size(), std::numeric_limits<double>::infinity());
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, rows.size() - 1)(rng);
  while (result.centroids.size() < k) {
    result.centroids.push_back(rows[pick]);
    double total = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(rows[i], result.centroids.back()));
      total += d2[i];
    }
    if (result.centroids.size() == k) break;
    if (total <= 0.0) {
      pick = (pick + 1) % rows.size();
      continue;
    }
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    pick = rows.size() - 1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      acc += d2[i];
      if (d2[i] > 0.0 && u < acc) {
        pick = i;
        break;
      }
    }
  }

  result.assignments.assign(rows.size(), k);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(rows[i], result.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(rows[i], result.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignments[i] != best) changed = true;
      result.assignments[i] = best;
      inertia += best_d;
    }
    result.inertia = inertia;
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed && iter > 0) break;

    FeatureMatrix sums(k, FeatureRow(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t c = result.assignments[i];
      ++sizes[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c][j] += rows[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0 || l2_norm(sums[c]) == 0.0) continue;
      result.centroids[c] = normalize_l2(sums[c]);
    }
  }
  return result;
}

std::vector<double> fidelity_gradient(const EnqodeAnsatz& ansatz, std::span<const double> params,
                                      std::span<const cplx> target) {
  constexpr double shift = std::numbers::pi / 2;
  std::vector<double> grad(params.size());
  std::vector<double> shifted(params.begin(), params.end());
  for (std::size_t j = 0; j < params.size(); ++j) {
    shifted[j] = params[j] + shift;
    const double plus = overlap_fidelity(ansatz.state(shifted), target);
    shifted[j] = params[j] - shift;
    const double minus = overlap_fidelity(ansatz.state(shifted), target);
    shifted[j] = params[j];
    grad[j] = 0.5 * (plus - minus);
  }
  return grad;
}

std::vector<cplx> state_jacobian(const EnqodeAnsatz& ansatz, std::span<const double> params) {
  const std::size_t dim = std::size_t{1} << ansatz.n_qubits;
  std::vector<cplx> jac(dim * params.size());
  std::vector<double> shifted(params.begin(), params.end());
  for (std::size_t j = 0; j < params.size(); ++j) {
    shifted[j] = params[j] + std::numbers::pi;
    const StateVector s = ansatz.state(shifted);
    shifted[j] = params[j];
    for (std::size_t i = 0; i < dim; ++i) jac[j * dim + i] = 0.5 * s[i];
  }
  return jac;
}

CentroidFit train_centroid(std::span<const double> centroid, const EnqodeAnsatz& ansatz,
                           const EnqodeTrainConfig& config) {
  const std::size_t dim = std::size_t{1} << ansatz.n_qubits;
  const std::vector<cplx> target = padded_target(centroid, dim);
  Rng rng(config.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

  CentroidFit fit;
  fit.params.resize(ansatz.param_count());
  for (double& p : fit.params) p = angle(rng);

  AdamState adam(fit.params.size());
  std::vector<double> best = fit.params;
  double best_fid = overlap_fidelity(ansatz.state(fit.params), target);
  for (int step = 0; step < config.max_steps && 1.0 - best_fid >= config.target_infidelity; ++step) {
    std::vector<double> grad = fidelity_gradient(ansatz, fit.params, target);
    for (double& g : grad) g = -g;  // loss = 1 - fidelity
    adam_step(adam, grad, fit.params, config.learning_rate);
    fit.steps = step + 1;
    const double f = overlap_fidelity(ansatz.state(fit.params), target);
    if (f > best_fid) {
      best_fid = f;
      best = fit.params;
    }
  }
  fit.params = std::move(best);
  fit.fidelity = best_fid;
  fit.jacobian = state_jacobian(ansatz, fit.params);
  return fit;
}

std::size_t EnqodeModel::nearest(std::span<const double> x) const {
  if (centroids.empty()) throw std::logic_error("enqode model has no centroids");
  const FeatureRow row = padded_row(x, dimension());
  std::size_t best = 0;
  double best_d = squared_distance(row, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(row, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::size_t default_cluster_count(std::size_t n_rows) {
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_rows))));
  return std::max<std::size_t>(1, std::min({std::size_t{32}, 2 * root, n_rows}));
}

EnqodeModel fit_enqode(const FeatureMatrix& unit_rows, int n_qubits, const EnqodeFitConfig& config) {
  if (unit_rows.empty()) throw std::invalid_argument("fit_enqode: no rows");
  if (n_qubits < 1) throw std::invalid_argument("fit_enqode: need at least one qubit");
  if (config.layers < 1) throw std::invalid_argument("fit_enqode: need at least one layer");
  EnqodeModel model;
  model.ansatz = EnqodeAnsatz{n_qubits, config.layers};
  const std::size_t dim = model.dimension();

  FeatureMatrix padded;
  padded.reserve(unit_rows.size());
  for (const auto& row : unit_rows) {
    if (std::abs(l2_norm(row) - 1.0) > 1e-9) throw std::invalid_argument("fit_enqode: rows must be unit norm");
    padded.push_back(padded_row(row, dim));
  }
  const std::size_t k =
      config.clusters == 0 ? default_cluster_count(padded.size()) : std::min(config.clusters, padded.size());
  const KMeansResult clusters = kmeans(padded, k, config.train.seed, config.kmeans_iters);

  model.centroids = clusters.centroids;
  model.params.resize(k);
  model.jacobians.resize(k);
  model.train_fidelities.resize(k);
  parallel_for(
      k,
      [&](std::size_t c) {
        EnqodeTrainConfig tc = config.train;
        tc.seed = derive_seed(config.train.seed, {c});
        CentroidFit fit = train_centroid(model.centroids[c], model.ansatz, tc);
        model.params[c] = std::move(fit.params);
        model.jacobians[c] = std::move(fit.jacobian);
        model.train_fidelities[c] = fit.fidelity;
      },
      config.threads);
  return model;
}

EncodedSample encode_sample(const EnqodeModel& model, std::span<const double> x, bool refine) {
  const std::size_t dim = model.dimension();
  const std::vector<cplx> target = padded_target(x, dim);
  EncodedSample out;
  out.centroid = model.nearest(x);
  out.params = model.params[out.centroid];
  out.fidelity = overlap_fidelity(model.ansatz.state(out.params), target);

  if (refine) {
    const auto& c = model.centroids[out.centroid];
    const auto& jac = model.jacobians[out.centroid];
    const std::size_t n_params = out.params.size();
    const StateVector at_centroid = model.ansatz.state(out.params);
    cplx overlap{0.0, 0.0};
    for (std::size_t i = 0; i < dim; ++i) overlap += c[i] * at_centroid[i];
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};

    Eigen::MatrixXd a(2 * dim, n_params);
    Eigen::VectorXd b(2 * dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const cplx r = phase * (std::real(target[i]) - c[i]);
      b(static_cast<Eigen::Index>(i)) = r.real();
      b(static_cast<Eigen::Index>(dim + i)) = r.imag();
      for (std::size_t j = 0; j < n_params; ++j) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = jac[j * dim + i].real();
        a(static_cast<Eigen::Index>(dim + i), static_cast<Eigen::Index>(j)) = jac[j * dim + i].imag();
      }
    }
    if (b.squaredNorm() > 0.0) {
      Eigen::MatrixXd normal = a.transpose() * a;
      normal.diagonal().array() += kRefineDamping;
      const Eigen::VectorXd step = normal.ldlt().solve(a.transpose() * b);
      std::vector<double> adjusted = out.params;
      for (std::size_t j = 0; j < n_params; ++j) adjusted[j] += step(static_cast<Eigen::Index>(j));
      const double f = overlap_fidelity(model.ansatz.state(adjusted), target);
      if (f >= out.fidelity) {
        out.params = std::move(adjusted);
        out.fidelity = f;
      }
    }
  }
  out.circuit = model.ansatz.bind(out.params);
  return out;
}

double mean_fidelity(const EnqodeModel& model, const FeatureMatrix& unit_rows, bool refine) {
  if (unit_rows.empty()) throw std::invalid_argument("mean_fidelity: empty dataset");
  double total = 0.0;
  for (const auto& row : unit_rows) total += encode_sample(model, row, refine).fidelity;
  return total / static_cast<double>(unit_rows.size());
}

std::string enqode_to_json(const EnqodeModel& model) {
  nlohmann::json j;
  j["format"] = "qrnn-forge/enqode";
  j["schema_version"] = 1;
  j["n_qubits"] = model.ansatz.n_qubits;
  j["layers"] = model.ansatz.layers;
  j["centroids"] = model.centroids;
  j["params"] = model.params;
  j["train_fidelities"] = model.train_fidelities;
  return j.dump(2);
}

EnqodeModel enqode_from_json(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  EnqodeModel model;
  model.ansatz = EnqodeAnsatz{j.at("n_qubits").get<int>(), j.at("layers").get<int>()};
  model.centroids = j.at("centroids").get<FeatureMatrix>();
  model.params = j.at("params").get<std::vector<std::vector<double>>>();
  model.train_fidelities = j.at("train_fidelities").get<std::vector<double>>();
  if (model.params.size() != model.centroids.size() ||
      model.train_fidelities.size() != model.centroids.size()) {
    throw std::invalid_argument("enqode model: centroid, parameter and fidelity counts differ");
  }
  for (const auto& p : model.params) {
    if (p.size() != model.ansatz.param_count()) {
      throw std::invalid_argument("enqode model: wrong parameter count");
    }
  }
  for (const auto& p : model.params) model.jacobians.push_back(state_jacobian(model.ansatz, p));
  return model;
}

}  // namespace qrnn
