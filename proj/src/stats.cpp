#include "radlesion/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

namespace radlesion {
namespace {

constexpr double kGammaEps = 1e-15;
constexpr int kGammaMaxIter = 1000;

// Series for the lower regularized gamma P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < kGammaMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction (modified Lentz) for Q(a, x), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kGammaEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double percentile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void check_groups(const GroupSamples& groups) {
  if (groups.size() < 2) throw InputError("need at least two groups");
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw InputError("every group needs at least one value");
    total += g.size();
  }
  if (total < 3) throw InputError("need at least three values in total");
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw InputError("gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double normal_two_tailed(double z) {
  return std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0);
}

PooledRanks pooled_ranks(const GroupSamples& groups) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return all[a] < all[b]; });
  PooledRanks out;
  out.ranks.resize(all.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && all[order[j + 1]] == all[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    out.tie_term += t * t * t - t;
    i = j + 1;
  }
  return out;
}

TestResult kruskal_wallis(const GroupSamples& groups) {
  check_groups(groups);
  const PooledRanks pr = pooled_ranks(groups);
  const double n = static_cast<double>(pr.ranks.size());
  const double correction = 1.0 - pr.tie_term / (n * n * n - n);
  if (!(correction > 0.0)) {
    throw DegenerateDataError("all values are identical; Kruskal-Wallis undefined");
  }
  double sum = 0.0;
  std::size_t at = 0;
  for (const auto& g : groups) {
    double r = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) r += pr.ranks[at++];
    sum += r * r / static_cast<double>(g.size());
  }
  const double h_raw = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
  TestResult out;
  out.statistic = std::max(0.0, h_raw / correction);
  out.p_value = chi_square_sf(out.statistic, static_cast<double>(groups.size() - 1));
  return out;
}

std::vector<PairwiseResult> dunn_test(const GroupSamples& groups) {
  check_groups(groups);
  const PooledRanks pr = pooled_ranks(groups);
  const double n = static_cast<double>(pr.ranks.size());
  const double variance = n * (n + 1.0) / 12.0 - pr.tie_term / (12.0 * (n - 1.0));
  if (!(variance > 0.0)) {
    throw DegenerateDataError("rank variance is zero; Dunn's test undefined");
  }
  std::vector<double> mean_rank;
  std::size_t at = 0;
  for (const auto& g : groups) {
    double r = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) r += pr.ranks[at++];
    mean_rank.push_back(r / static_cast<double>(g.size()));
  }
  std::vector<PairwiseResult> out;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      const double se = std::sqrt(variance * (1.0 / groups[a].size() + 1.0 / groups[b].size()));
      PairwiseResult r;
      r.group_a = static_cast<int>(a);
      r.group_b = static_cast<int>(b);
      r.z = (mean_rank[a] - mean_rank[b]) / se;
      r.p = normal_two_tailed(r.z);
      r.p_adjusted = r.p;
      out.push_back(r);
    }
  }
  return out;
}

BhResult benjamini_hochberg(std::span<const double> p, double q) {
  const std::size_t m = p.size();
  BhResult out;
  out.adjusted.assign(m, 1.0);
  out.rejected.assign(m, false);
  if (m == 0) return out;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("p values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  // largest rank i (1-based) with p_(i) <= i q / m
  std::size_t cutoff = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    if (p[order[i - 1]] <= static_cast<double>(i) * q / static_cast<double>(m)) cutoff = i;
  }
  double running = 1.0;
  for (std::size_t i = m; i >= 1; --i) {
    const double v = std::min(1.0, static_cast<double>(m) * p[order[i - 1]] / static_cast<double>(i));
    running = std::min(running, v);
    // m p / i can round below p when i == m
    out.adjusted[order[i - 1]] = std::max(running, p[order[i - 1]]);
    out.rejected[order[i - 1]] = i <= cutoff;
  }
  return out;
}

std::vector<FeatureTestRow> feature_group_report(const Dataset& data,
                                                 const std::vector<std::string>& features,
                                                 double alpha, BhFamily family) {
  const Dataset sub = select_columns(data, features);
  std::vector<int> classes = sub.y;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw InputError("need at least two classes for group tests");

  std::vector<FeatureTestRow> rows;
  for (Eigen::Index j = 0; j < sub.cols(); ++j) {
    FeatureTestRow row;
    row.feature = features[static_cast<std::size_t>(j)];
    GroupSamples groups(classes.size());
    for (Eigen::Index i = 0; i < sub.rows(); ++i) {
      const auto c = std::lower_bound(classes.begin(), classes.end(), sub.y[i]) - classes.begin();
      groups[static_cast<std::size_t>(c)].push_back(sub.X(i, j));
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::vector<double> v = groups[c];
      std::sort(v.begin(), v.end());
      row.classes.push_back({classes[c], static_cast<int>(v.size()), percentile_sorted(v, 0.5),
                             percentile_sorted(v, 0.25), percentile_sorted(v, 0.75)});
    }
    try {
      row.test = kruskal_wallis(groups);
      row.significant = row.test.p_value < alpha;
      if (row.significant) {
        row.test.pairwise = dunn_test(groups);
        for (auto& pr : row.test.pairwise) {
          pr.group_a = classes[static_cast<std::size_t>(pr.group_a)];
          pr.group_b = classes[static_cast<std::size_t>(pr.group_b)];
        }
      }
    } catch (const DegenerateDataError&) {
      row.degenerate = true;
    }
    rows.push_back(std::move(row));
  }

  auto apply = [alpha](std::vector<PairwiseResult*>& family_members) {
    std::vector<double> p;
    for (auto* r : family_members) p.push_back(r->p);
    const BhResult bh = benjamini_hochberg(p, alpha);
    for (std::size_t k = 0; k < family_members.size(); ++k) {
      family_members[k]->p_adjusted = bh.adjusted[k];
      family_members[k]->rejected = bh.rejected[k];
    }
  };
  if (family == BhFamily::kPerFeature) {
    for (auto& row : rows) {
      std::vector<PairwiseResult*> members;
      for (auto& pr : row.test.pairwise) members.push_back(&pr);
      apply(members);
    }
  } else {
    std::vector<PairwiseResult*> members;
    for (auto& row : rows) {
      for (auto& pr : row.test.pairwise) members.push_back(&pr);
    }
    apply(members);
  }
  return rows;
}

void write_stats_csv(std::ostream& os, const std::vector<FeatureTestRow>& rows) {
  // Columns are fixed by the class set of the first row.
  std::vector<int> classes;
  if (!rows.empty()) {
    for (const auto& c : rows.front().classes) classes.push_back(c.class_id);
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) pairs.emplace_back(classes[a], classes[b]);
  }
  os << "feature,status,H,p";
  for (const auto& [a, b] : pairs) {
    const std::string tag = std::to_string(a) + "v" + std::to_string(b);
    os << ",z_" << tag << ",p_" << tag << ",p_adj_" << tag << ",rejected_" << tag;
  }
  for (int c : classes) {
    os << ",median_c" << c << ",q1_c" << c << ",q3_c" << c << ",iqr_c" << c;
  }
  os << '\n';
  for (const auto& row : rows) {
    os << row.feature << ','
       << (row.degenerate ? "degenerate" : (row.significant ? "significant" : "ns"));
    if (row.degenerate) {
      os << ",,";
    } else {
      os << ',' << format_double(row.test.statistic) << ',' << format_double(row.test.p_value);
    }
    for (const auto& [a, b] : pairs) {
      const auto it = std::find_if(row.test.pairwise.begin(), row.test.pairwise.end(),
                                   [&](const PairwiseResult& r) {
                                     return r.group_a == a && r.group_b == b;
                                   });
      if (it == row.test.pairwise.end()) {
        os << ",,,,";
      } else {
        os << ',' << format_double(it->z) << ',' << format_double(it->p) << ','
           << format_double(it->p_adjusted) << ',' << (it->rejected ? 1 : 0);
      }
    }
    for (const auto& c : row.classes) {
      os << ',' << format_double(c.median) << ',' << format_double(c.q1) << ','
         << format_double(c.q3) << ',' << format_double(c.q3 - c.q1);
    }
    os << '\n';
  }
}

}  // namespace radlesion
