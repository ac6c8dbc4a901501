#ifndef RADLESION_PLS_HPP_
#define RADLESION_PLS_HPP_

// Multiclass PLS-DA: dummy coding, autoscaling, NIPALS PLS2, argmax
// prediction and VIP scores. Everything is templated on the scalar type;
// the rest of the library uses the double instantiation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "radlesion/errors.hpp"

namespace radlesion {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One-hot class membership; class k occupies column k - 1.
template <typename Scalar = double>
MatrixX<Scalar> encode_dummy(std::span<const int> y, int num_classes) {
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(static_cast<Eigen::Index>(y.size()), num_classes);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > num_classes) {
      throw InputError("class id " + std::to_string(y[i]) + " outside 1.." +
                       std::to_string(num_classes));
    }
    out(static_cast<Eigen::Index>(i), y[i] - 1) = Scalar(1);
  }
  return out;
}

template <typename Scalar>
struct Autoscaled {
  MatrixX<Scalar> x;
  VectorX<Scalar> mean;
  VectorX<Scalar> scale;
};

/// Centres every column and divides by its sample standard deviation;
/// constant columns keep scale 1.
template <typename Derived>
Autoscaled<typename Derived::Scalar> autoscale(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.rows();
  if (n < 2) throw InputError("autoscaling needs at least two rows");
  Autoscaled<Scalar> out;
  out.mean = x.colwise().mean().transpose();
  out.x = x.rowwise() - out.mean.transpose();
  out.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Scalar ss = out.x.col(j).squaredNorm();
    const Scalar sd = std::sqrt(ss / Scalar(n - 1));
    out.scale[j] = sd > Scalar(0) ? sd : Scalar(1);
    out.x.col(j) /= out.scale[j];
  }
  return out;
}

/// Applies stored centring/scaling to new rows.
template <typename Derived, typename Scalar = typename Derived::Scalar>
MatrixX<Scalar> apply_scaling(const Eigen::MatrixBase<Derived>& x,
                              const VectorX<Scalar>& mean,
                              const VectorX<Scalar>& scale) {
  if (x.cols() != mean.size()) {
    throw InputError("expected " + std::to_string(mean.size()) + " columns, got " +
                     std::to_string(x.cols()));
  }
  MatrixX<Scalar> out = x.rowwise() - mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

/// Fitted PLS-DA model. Rows of W, P and B follow `selected_features`.
template <typename Scalar>
struct PlsModel {
  std::vector<std::string> feature_names;      // columns considered
  std::vector<std::string> selected_features;  // columns the model consumes
  std::vector<int> class_labels;               // response column k <-> label
  VectorX<Scalar> mean, scale;                 // X pretreatment
  VectorX<Scalar> y_means;
  MatrixX<Scalar> W, P, Q, T, B;
  int components = 0;            // A actually extracted
  int requested_components = 0;  // A asked for; larger when NIPALS stopped early

  int num_classes() const { return static_cast<int>(class_labels.size()); }

  /// Regression coefficients built from the first `a` components.
  MatrixX<Scalar> coefficients(int a) const {
    if (a < 1 || a > components) throw InputError("component count out of range");
    const auto w = W.leftCols(a);
    const MatrixX<Scalar> ptw = P.leftCols(a).transpose() * w;
    return w * ptw.partialPivLu().solve(Q.leftCols(a).transpose());
  }
};

struct NipalsOptions {
  double tolerance = 1e-12;
  int max_iterations = 500;
};

/// NIPALS PLS2 on pre-scaled predictors. Y is centred internally; the
/// returned model has identity X pretreatment and no names attached.
///
/// Each weight vector has unit norm with its largest-magnitude entry
/// positive. Extraction stops early once X^T u vanishes (X deflated away)
/// or Y carries no variance left.
template <typename DerivedX, typename DerivedY>
PlsModel<typename DerivedX::Scalar> fit_pls(const Eigen::MatrixBase<DerivedX>& xs,
                                            const Eigen::MatrixBase<DerivedY>& y,
                                            int num_components,
                                            const NipalsOptions& opts = {}) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = xs.rows();
  const Eigen::Index p = xs.cols();
  const Eigen::Index m = y.cols();
  if (y.rows() != n) throw InputError("X and Y row counts differ");
  if (num_components < 1) throw InputError("need at least one component");
  if (num_components > std::min<Eigen::Index>(n - 1, p)) {
    throw InputError("component count " + std::to_string(num_components) +
                     " exceeds min(N - 1, p) = " +
                     std::to_string(std::min<Eigen::Index>(n - 1, p)));
  }

  PlsModel<Scalar> model;
  model.requested_components = num_components;
  model.mean = VectorX<Scalar>::Zero(p);
  model.scale = VectorX<Scalar>::Ones(p);
  model.y_means = y.colwise().mean().transpose();
  MatrixX<Scalar> x = xs;
  MatrixX<Scalar> yr = y.rowwise() - model.y_means.transpose();
  model.W.resize(p, num_components);
  model.P.resize(p, num_components);
  model.Q.resize(m, num_components);
  model.T.resize(n, num_components);

  const Scalar x_norm = x.norm();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar y_ss_initial = yr.colwise().squaredNorm().maxCoeff();
  int a = 0;
  for (; a < num_components; ++a) {
    Eigen::Index start_col = 0;
    const Scalar y_ss = yr.colwise().squaredNorm().maxCoeff(&start_col);
    if (!(y_ss > eps * eps * y_ss_initial)) break;
    VectorX<Scalar> u = yr.col(start_col);
    VectorX<Scalar> w, t, q;
    VectorX<Scalar> t_old;
    bool degenerate = false;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
      w = x.transpose() * u;
      const Scalar w_norm = w.norm();
      if (!(w_norm > Scalar(1e3) * eps * x_norm * u.norm())) {
        degenerate = true;
        break;
      }
      w /= w_norm;
      t = x * w;
      const Scalar tt = t.squaredNorm();
      q = yr.transpose() * t / tt;
      const Scalar qq = q.squaredNorm();
      if (!(qq > Scalar(0))) {
        degenerate = true;
        break;
      }
      u = yr * q / qq;
      if (iter > 0 && (t - t_old).norm() <= Scalar(opts.tolerance) * t.norm()) break;
      t_old = t;
    }
    if (degenerate) break;

    Eigen::Index pivot = 0;
    w.cwiseAbs().maxCoeff(&pivot);
    if (w[pivot] < Scalar(0)) {
      w = -w;
      t = -t;
      q = -q;
    }
    const Scalar tt = t.squaredNorm();
    const VectorX<Scalar> loading = x.transpose() * t / tt;
    x -= t * loading.transpose();
    yr -= t * q.transpose();
    model.W.col(a) = w;
    model.P.col(a) = loading;
    model.Q.col(a) = q;
    model.T.col(a) = t;
  }
  model.components = a;
  model.W.conservativeResize(p, a);
  model.P.conservativeResize(p, a);
  model.Q.conservativeResize(m, a);
  model.T.conservativeResize(n, a);
  if (a == 0) {
    model.B = MatrixX<Scalar>::Zero(p, m);
  } else {
    model.B = model.coefficients(a);
  }
  return model;
}

/// Argmax over response columns; ties go to the lowest column.
template <typename Derived>
std::vector<int> argmax_classes(const Eigen::MatrixBase<Derived>& yhat,
                                std::span<const int> class_labels) {
  std::vector<int> out(static_cast<std::size_t>(yhat.rows()));
  for (Eigen::Index i = 0; i < yhat.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < yhat.cols(); ++k) {
      if (yhat(i, k) > yhat(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = class_labels[static_cast<std::size_t>(best)];
  }
  return out;
}

template <typename Scalar>
struct Prediction {
  MatrixX<Scalar> responses;  // n x m
  std::vector<int> classes;
};

/// Predicts raw rows (columns = model.selected_features) using the first
/// `components` latent variables, or all of them when 0.
template <typename Scalar, typename Derived>
Prediction<Scalar> predict(const PlsModel<Scalar>& model,
                           const Eigen::MatrixBase<Derived>& x_new,
                           int components = 0) {
  const MatrixX<Scalar> xs = apply_scaling(x_new, model.mean, model.scale);
  Prediction<Scalar> out;
  if (components == 0 || components == model.components) {
    out.responses = xs * model.B;
  } else {
    out.responses = xs * model.coefficients(components);
  }
  out.responses.rowwise() += model.y_means.transpose();
  out.classes = argmax_classes(out.responses, model.class_labels);
  return out;
}

/// PLS-DA on raw features: autoscale, dummy-code classes 1..m, NIPALS.
template <typename Derived>
PlsModel<typename Derived::Scalar> fit_plsda(const Eigen::MatrixBase<Derived>& x,
                                             std::span<const int> y, int num_classes,
                                             int num_components,
                                             const std::vector<std::string>& names = {}) {
  using Scalar = typename Derived::Scalar;
  const Autoscaled<Scalar> scaled = autoscale(x);
  const MatrixX<Scalar> dummy = encode_dummy<Scalar>(y, num_classes);
  PlsModel<Scalar> model = fit_pls(scaled.x, dummy, num_components);
  model.mean = scaled.mean;
  model.scale = scaled.scale;
  model.class_labels.resize(static_cast<std::size_t>(num_classes));
  for (int k = 0; k < num_classes; ++k) model.class_labels[k] = k + 1;
  model.feature_names = names;
  model.selected_features = names;
  return model;
}

/// Variable importance in projection, SS-weighted:
/// VIP_j = sqrt(p * sum_a SS_a (w_ja / |w_a|)^2 / sum_a SS_a),
/// SS_a = |q_a|^2 |t_a|^2.
template <typename Scalar>
VectorX<Scalar> vip_scores(const PlsModel<Scalar>& model) {
  if (model.components < 1) throw UndefinedModelError("model has no components");
  const Eigen::Index p = model.W.rows();
  VectorX<Scalar> ss(model.components);
  for (int a = 0; a < model.components; ++a) {
    ss[a] = model.Q.col(a).squaredNorm() * model.T.col(a).squaredNorm();
  }
  const Scalar total = ss.sum();
  if (!(total > Scalar(0))) {
    throw UndefinedModelError("model explains no response variance; VIP undefined");
  }
  VectorX<Scalar> vip = VectorX<Scalar>::Zero(p);
  for (int a = 0; a < model.components; ++a) {
    const VectorX<Scalar> wn = model.W.col(a) / model.W.col(a).norm();
    vip += ss[a] * wn.cwiseAbs2();
  }
  return (vip * (Scalar(p) / total)).cwiseSqrt();
}

/// Indices with vip > threshold in column order. Throws SelectionError
/// when nothing survives.
template <typename Derived>
std::vector<int> select_features_vip(const Eigen::MatrixBase<Derived>& vip,
                                     double threshold = 1.0) {
  if (!(threshold > 0.0)) throw InputError("VIP threshold must be positive");
  std::vector<int> keep;
  for (Eigen::Index j = 0; j < vip.size(); ++j) {
    if (vip[j] > threshold) keep.push_back(static_cast<int>(j));
  }
  if (keep.empty()) {
    throw SelectionError("no feature has VIP above " + std::to_string(threshold) +
                         "; review the VIP threshold or the feature groups");
  }
  return keep;
}

using PlsModelD = PlsModel<double>;

}  // namespace radlesion

#endif  // RADLESION_PLS_HPP_
