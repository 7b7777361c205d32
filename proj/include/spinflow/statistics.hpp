/*
 * Copyright 2026 The spinflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Estimators over trajectory and ensemble data: tails, small balls, occupation densities,
// the 2x2 diffusion matrix of (|<u>|^2, ||d_x u||^2) and the stationary balance.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinflow/error.hpp"
#include "spinflow/field.hpp"
#include "spinflow/integrator.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow {

// ---------------------------------------------------------------------------------------------
// Reductions

/// Pairwise (cascade) summation; the result depends only on the order of `v`.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

inline double mean(std::span<const double> v) {
    if (v.empty()) throw ArgumentError("mean: empty sample");
    return pairwise_sum(v) / static_cast<double>(v.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> v) {
    if (v.size() < 2) throw ArgumentError("variance: need at least two samples");
    const double m = mean(v);
    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - m) * (v[i] - m);
    return pairwise_sum(d) / static_cast<double>(v.size() - 1);
}

/// Normalized autocorrelation rho(0..max_lag) of a series.
inline std::vector<double> autocorrelation(std::span<const double> v, std::size_t max_lag) {
    if (v.size() < 2) throw ArgumentError("autocorrelation: need at least two samples");
    max_lag = std::min(max_lag, v.size() - 1);
    const double m = mean(v);
    std::vector<double> c(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i] - m;
    std::vector<double> rho(max_lag + 1, 0.0);
    std::vector<double> prod(v.size());
    double c0 = 0.0;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        const std::size_t n = v.size() - lag;
        for (std::size_t i = 0; i < n; ++i) prod[i] = c[i] * c[i + lag];
        const double s = pairwise_sum(std::span<const double>(prod).first(n)) / static_cast<double>(v.size());
        if (lag == 0) c0 = s;
        rho[lag] = c0 > 0.0 ? s / c0 : (lag == 0 ? 1.0 : 0.0);
    }
    return rho;
}

/// Integrated autocorrelation time in samples, tau = 1 + 2 sum_{t<=W} rho(t), with Sokal's
/// self-consistent window W >= c tau. A constant series has tau = 1.
inline double integrated_autocorrelation_time(std::span<const double> v, double window_factor = 5.0) {
    if (v.size() < 2) return 1.0;
    const double m = mean(v);
    std::vector<double> c(v.size()), prod(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i] - m;
    auto cov = [&](std::size_t lag) {
        const std::size_t n = v.size() - lag;
        for (std::size_t i = 0; i < n; ++i) prod[i] = c[i] * c[i + lag];
        return pairwise_sum(std::span<const double>(prod).first(n));
    };
    const double c0 = cov(0);
    if (!(c0 > 0.0)) return 1.0;
    double tau = 1.0;
    for (std::size_t w = 1; w <= v.size() / 2; ++w) {
        tau += 2.0 * cov(w) / c0;
        if (static_cast<double>(w) >= window_factor * tau) break;
    }
    return std::max(tau, 1.0);
}

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double tau = 1.0;
    std::size_t n = 0;
};

/// Sample mean with a standard error inflated by the integrated autocorrelation time.
inline MeanEstimate estimate_mean(std::span<const double> v, bool correlated = true) {
    MeanEstimate e;
    e.n = v.size();
    e.mean = mean(v);
    if (v.size() < 2) return e;
    e.tau = correlated ? integrated_autocorrelation_time(v) : 1.0;
    e.std_error = std::sqrt(variance(v) * e.tau / static_cast<double>(v.size()));
    return e;
}

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw ArgumentError("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// n points from hi down to lo, equally spaced in log.
inline std::vector<double> log_spaced(double hi, double lo, std::size_t n) {
    if (!(hi > 0.0 && lo > 0.0) || n < 2) throw ArgumentError("log_spaced: need positive bounds and n >= 2");
    std::vector<double> out(n);
    const double a = std::log(hi), b = std::log(lo);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = a + b x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("linear_fit: need two or more (x, y) pairs");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.n = x.size();
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r_squared = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : (syy == 0.0 ? 1.0 : 0.0);
    return f;
}

// ---------------------------------------------------------------------------------------------
// Empirical laws

/// Weighted empirical distribution of a scalar observable.
class EmpiricalLaw {
public:
    explicit EmpiricalLaw(std::vector<double> samples, std::vector<double> weights = {}) {
        if (!weights.empty() && weights.size() != samples.size())
            throw ArgumentError("EmpiricalLaw: weights and samples differ in length");
        if (weights.empty()) weights.assign(samples.size(), 1.0);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!std::isfinite(samples[i])) throw ArgumentError("EmpiricalLaw: non-finite sample " + std::to_string(i));
            if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw ArgumentError("EmpiricalLaw: weights must be finite and >= 0");
        }
        std::vector<std::size_t> order(samples.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
        sorted_.reserve(samples.size());
        cum_.reserve(samples.size() + 1);
        cum_.push_back(0.0);
        std::vector<double> w;
        w.reserve(samples.size());
        for (auto i : order) {
            sorted_.push_back(samples[i]);
            w.push_back(weights[i]);
        }
        for (double x : w) cum_.push_back(cum_.back() + x);
        total_ = pairwise_sum(w);
    }

    std::size_t size() const noexcept { return sorted_.size(); }
    bool empty() const noexcept { return sorted_.empty(); }
    std::span<const double> sorted_samples() const noexcept { return sorted_; }
    double total_weight() const noexcept { return total_; }

    /// P(X < x)
    double prob_below(double x) const {
        require_nonempty();
        const auto i = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
        return std::clamp(cum_[i] / cum_.back(), 0.0, 1.0);
    }
    /// P(X > x)
    double prob_above(double x) const {
        require_nonempty();
        const auto i = static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
        return std::clamp((cum_.back() - cum_[i]) / cum_.back(), 0.0, 1.0);
    }
    std::size_t count_below(double x) const {
        return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
    }
    std::size_t count_above(double x) const {
        return sorted_.size() - static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
    }

private:
    void require_nonempty() const {
        if (sorted_.empty() || !(cum_.back() > 0.0)) throw ArgumentError("EmpiricalLaw: empty sample set");
    }

    std::vector<double> sorted_;
    std::vector<double> cum_;
    double total_ = 0.0;
};

/// Empirical P(X > R) per threshold; thresholds must be increasing.
inline std::vector<double> tail_survival(const EmpiricalLaw& law, std::span<const double> thresholds) {
    if (law.empty()) throw ArgumentError("tail_survival: empty sample set");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1])) throw ArgumentError("tail_survival: thresholds must be increasing");
    std::vector<double> out;
    out.reserve(thresholds.size());
    for (double r : thresholds) out.push_back(law.prob_above(r));
    return out;
}

struct TailFit {
    std::vector<double> R;
    std::vector<double> neg_log_p;  // -log P(X > R)
    LinearFit fit;                  // neg_log_p against R^2
};

/// Thresholds spanning the populated tail: from the median up to the level that still leaves
/// `min_count` samples above it.
inline std::vector<double> populated_tail_thresholds(const EmpiricalLaw& law, std::size_t n_points = 20, std::size_t min_count = 20) {
    if (law.size() <= 2 * min_count) throw ArgumentError("populated_tail_thresholds: too few samples");
    const auto s = law.sorted_samples();
    const double lo = s[s.size() / 2];
    const double hi = s[s.size() - min_count - 1];
    std::vector<double> out;
    if (!(hi > lo)) return {lo};
    for (std::size_t i = 0; i < n_points; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1));
    return out;
}

/// Regresses -log P(X > R) on R^2 over thresholds with a non-empty tail.
inline TailFit fit_gaussian_tail(const EmpiricalLaw& law, std::span<const double> thresholds) {
    const auto p = tail_survival(law, thresholds);
    TailFit t;
    std::vector<double> r2;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (p[i] <= 0.0) continue;
        t.R.push_back(thresholds[i]);
        t.neg_log_p.push_back(-std::log(p[i]));
        r2.push_back(thresholds[i] * thresholds[i]);
    }
    if (r2.size() >= 2) t.fit = linear_fit(r2, t.neg_log_p);
    return t;
}

/// P(X < eps) / eps per eps.
inline std::vector<double> small_ball_ratio(const EmpiricalLaw& law, std::span<const double> epsilons) {
    std::vector<double> out;
    out.reserve(epsilons.size());
    for (double e : epsilons) {
        if (!(e > 0.0)) throw ArgumentError("small_ball_ratio: epsilons must be > 0");
        out.push_back(law.prob_below(e) / e);
    }
    return out;
}

struct SmallBallScaling {
    std::vector<double> eps;
    std::vector<double> ratio;
    std::vector<std::size_t> counts;
    /// max ratio over the eps grid: the empirical constant C in P(X < eps) <= C eps
    double bound = 0.0;
    /// slope of log P(X < eps) against log eps over points with >= min_count samples (NaN if < 3)
    double exponent = std::numeric_limits<double>::quiet_NaN();
    std::size_t populated = 0;
    /// false when the fitted exponent shows P(X < eps) decaying visibly slower than eps
    bool linear_bounded = true;
};

/// Small-ball ratios plus a scaling detector. A law with P(X < eps) ~ eps^a is flagged when the
/// fitted a falls below `min_exponent`; too few populated points leave the verdict "bounded".
inline SmallBallScaling small_ball_scaling(const EmpiricalLaw& law, std::span<const double> epsilons, std::size_t min_count = 20,
                                           double min_exponent = 0.75) {
    SmallBallScaling s;
    s.eps.assign(epsilons.begin(), epsilons.end());
    s.ratio = small_ball_ratio(law, epsilons);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        s.counts.push_back(law.count_below(epsilons[i]));
        s.bound = std::max(s.bound, s.ratio[i]);
        if (s.counts.back() >= min_count) {
            lx.push_back(std::log(epsilons[i]));
            ly.push_back(std::log(s.ratio[i] * epsilons[i]));
        }
    }
    s.populated = lx.size();
    if (lx.size() >= 3) {
        s.exponent = linear_fit(lx, ly).slope;
        s.linear_bounded = s.exponent >= min_exponent;
    }
    return s;
}

// ---------------------------------------------------------------------------------------------
// Occupation densities

struct Histogram {
    double origin = 0.0;
    double bin_width = 0.0;
    std::vector<std::size_t> counts;
    std::vector<double> density;  // per unit length

    std::size_t bins() const noexcept { return counts.size(); }
    double center(std::size_t i) const noexcept { return origin + (static_cast<double>(i) + 0.5) * bin_width; }
    double sup() const noexcept { return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end()); }
    double total_mass() const {
        std::vector<double> m(density.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = density[i] * bin_width;
        return pairwise_sum(m);
    }
};

/// Time-average histogram of equally spaced records: fraction of time per bin / bin width.
inline Histogram occupation_density(std::span<const double> values, double bin_width) {
    if (values.empty()) throw ArgumentError("occupation_density: empty series");
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ArgumentError("occupation_density: bin_width must be > 0");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    Histogram h;
    h.bin_width = bin_width;
    h.origin = std::floor(*lo / bin_width) * bin_width;
    const auto nb = static_cast<std::size_t>(std::floor((*hi - h.origin) / bin_width)) + 1;
    h.counts.assign(nb, 0);
    for (double v : values) {
        auto i = static_cast<std::size_t>(std::floor((v - h.origin) / bin_width));
        ++h.counts[std::min(i, nb - 1)];
    }
    const double norm = 1.0 / (static_cast<double>(values.size()) * bin_width);
    for (auto c : h.counts) h.density.push_back(static_cast<double>(c) * norm);
    return h;
}

/// Default bin width: sample standard deviation / 50 (1 for a constant series).
inline double default_bin_width(std::span<const double> values) {
    if (values.size() < 2) return 1.0;
    const double sd = std::sqrt(variance(values));
    return sd > 0.0 ? sd / 50.0 : 1.0;
}

/// Named scalar observables of a record. Derived names: centered_l2 = sqrt(centered_l2_sq),
/// h2_norm = sqrt(h2), avg_norm = sqrt(avg_sq).
inline std::function<double(const ObservableRecord&)> observable_by_name(const std::string& name) {
    if (name == "avg_sq") return [](const ObservableRecord& r) { return r.avg_sq; };
    if (name == "avg_norm") return [](const ObservableRecord& r) { return std::sqrt(r.avg_sq); };
    if (name == "energy") return [](const ObservableRecord& r) { return r.energy; };
    if (name == "centered_l2_sq") return [](const ObservableRecord& r) { return r.centered_l2_sq; };
    if (name == "centered_l2") return [](const ObservableRecord& r) { return std::sqrt(r.centered_l2_sq); };
    if (name == "dissipation") return [](const ObservableRecord& r) { return r.dissipation; };
    if (name == "h2") return [](const ObservableRecord& r) { return r.h2; };
    if (name == "h2_norm") return [](const ObservableRecord& r) { return std::sqrt(r.h2); };
    throw ArgumentError("unknown observable '" + name + "'");
}

/// bin_width <= 0 selects default_bin_width.
inline Histogram occupation_density(const ObservableSeries& series, const std::string& observable, double bin_width = 0.0) {
    const auto v = series.column(observable_by_name(observable));
    return occupation_density(v, bin_width > 0.0 ? bin_width : default_bin_width(v));
}

struct SupStability {
    double sup_coarse = 0.0;
    double sup_fine = 0.0;
    double relative_change = 0.0;  // |fine - coarse| / coarse
};

/// Sup density at bin_width and bin_width / 2.
inline SupStability sup_density_stability(std::span<const double> values, double bin_width) {
    SupStability s;
    s.sup_coarse = occupation_density(values, bin_width).sup();
    s.sup_fine = occupation_density(values, bin_width / 2.0).sup();
    s.relative_change = std::abs(s.sup_fine - s.sup_coarse) / s.sup_coarse;
    return s;
}

struct SmallSetFit {
    std::vector<double> lengths;
    std::vector<double> max_prob;  // sup_a P(X in [a, a + l])
    LinearFit fit;                 // log max_prob against log length
};

/// Largest empirical mass of an interval of each length; the log-log slope is the small-set
/// exponent (1 for a bounded density).
inline SmallSetFit small_set_exponent(std::span<const double> values, std::span<const double> lengths) {
    if (values.empty()) throw ArgumentError("small_set_exponent: empty sample");
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    SmallSetFit f;
    std::vector<double> lx, ly;
    for (double l : lengths) {
        if (!(l > 0.0)) throw ArgumentError("small_set_exponent: lengths must be > 0");
        std::size_t best = 0, j = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (j < i) j = i;
            while (j < s.size() && s[j] <= s[i] + l) ++j;
            best = std::max(best, j - i);
        }
        const double p = static_cast<double>(best) / static_cast<double>(s.size());
        f.lengths.push_back(l);
        f.max_prob.push_back(p);
        lx.push_back(std::log(l));
        ly.push_back(std::log(p));
    }
    if (lx.size() >= 2) f.fit = linear_fit(lx, ly);
    return f;
}

// ---------------------------------------------------------------------------------------------
// Diffusion matrix of F(u) = (|<u>|^2, ||d_x u||^2)

/// Per-mode vectors A_j = <e_j u> x <u> and B_j = int d_x e_j (u x d_x u) dx.
struct ModeVectors {
    int j = 0;
    double lambda = 0.0;
    Vec3 A;
    Vec3 B;
};

inline std::vector<ModeVectors> mode_vectors(const SphereField& u, const NoiseSpectrum& spectrum) {
    if (u.size() != spectrum.n_grid()) throw ArgumentError("diffusion_matrix: field size does not match the spectrum grid");
    const std::size_t n = u.size();
    const Vec3 avg = space_average(u);
    const auto du = first_derivative(u);
    std::vector<Vec3> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = cross(u[k], du[k]);
    std::vector<ModeVectors> out;
    for (int j : spectrum.active_modes()) {
        if (j == 0) continue;
        const auto e = spectrum.basis_row(j);
        const auto de = spectrum.dbasis_row(j);
        Vec3 eu{}, b{};
        for (std::size_t k = 0; k < n; ++k) {
            eu += e[k] * u[k];
            b += de[k] * w[k];
        }
        eu *= 1.0 / static_cast<double>(n);
        b *= u.spacing();
        out.push_back({j, spectrum.lambda(j), cross(eu, avg), b});
    }
    return out;
}

struct DiffusionMatrix2 {
    std::array<std::array<double, 2>, 2> entries{};
    double nu = 0.0;
    /// det by Cauchy-Binet: sum of squared 2x2 minors of the theta matrix (no cancellation).
    double determinant = 0.0;

    double det() const noexcept { return determinant; }
    double naive_det() const noexcept { return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]; }
    double min_eigenvalue() const noexcept {
        const double a = entries[0][0], b = entries[0][1], d = entries[1][1];
        return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    }
    bool is_psd(double tol = 1e-12) const noexcept {
        const double scale = std::max({1.0, std::abs(entries[0][0]), std::abs(entries[1][1])});
        return entries[0][1] == entries[1][0] && min_eigenvalue() >= -tol * scale && determinant >= 0.0;
    }
};

/// sigma_kl = sum_{j != 0} sum_i theta^{j,i,k} theta^{j,i,l} with theta^{j,.,1} = sqrt(nu) lambda_j A_j and
/// theta^{j,.,2} = sqrt(nu) lambda_j B_j.
inline DiffusionMatrix2 diffusion_matrix(const SphereField& u, const NoiseSpectrum& spectrum, double nu) {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw ArgumentError("diffusion_matrix: nu must be finite and >= 0");
    const auto modes = mode_vectors(u, spectrum);
    std::vector<double> t1, t2;
    for (const auto& m : modes) {
        const double c = std::sqrt(nu) * m.lambda;
        for (double a : {m.A.x, m.A.y, m.A.z}) t1.push_back(c * a);
        for (double b : {m.B.x, m.B.y, m.B.z}) t2.push_back(c * b);
    }
    std::vector<double> p11(t1.size()), p22(t1.size()), p12(t1.size());
    for (std::size_t p = 0; p < t1.size(); ++p) {
        p11[p] = t1[p] * t1[p];
        p22[p] = t2[p] * t2[p];
        p12[p] = t1[p] * t2[p];
    }
    DiffusionMatrix2 s;
    s.nu = nu;
    s.entries[0][0] = pairwise_sum(p11);
    s.entries[1][1] = pairwise_sum(p22);
    s.entries[0][1] = s.entries[1][0] = pairwise_sum(p12);
    std::vector<double> minors;
    minors.reserve(t1.size() * (t1.size() + 1) / 2);
    for (std::size_t p = 0; p < t1.size(); ++p)
        for (std::size_t q = p + 1; q < t1.size(); ++q) {
            const double m = t1[p] * t2[q] - t1[q] * t2[p];
            minors.push_back(m * m);
        }
    s.determinant = pairwise_sum(minors);
    return s;
}

/// nu^2 sum_j lambda_j^4 |A_j x B_j|^2: the same-mode minors of det sigma, hence <= det sigma.
inline double det_lower_bound(const SphereField& u, const NoiseSpectrum& spectrum, double nu) {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw ArgumentError("det_lower_bound: nu must be finite and >= 0");
    std::vector<double> terms;
    for (const auto& m : mode_vectors(u, spectrum)) {
        const double c = nu * m.lambda * m.lambda;
        const Vec3 x = cross(m.A, m.B);
        // minors of one mode, squared and summed coordinatewise as in the full determinant
        for (double v : {x.x, x.y, x.z}) terms.push_back((c * v) * (c * v));
    }
    return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------------------------
// Stationary balance

struct BalanceResult {
    double residual = 0.0;       // <||u x d2u||^2>_t / rate - 1
    double time_average = 0.0;
    double rate = 0.0;
    double t_stat = 0.0;
    /// segment shorter than 10 dissipation times 1 / (nu rate)
    bool short_segment = false;
};

/// Balance against an explicit rate. A zero rate means no injection: the residual is -1 by
/// convention (the stationary dissipation level is then 0).
inline BalanceResult balance_residual(const ObservableSeries& series, double rate, double nu) {
    if (series.empty()) throw ArgumentError("balance_residual: empty series");
    BalanceResult b;
    const auto d = series.column(&ObservableRecord::dissipation);
    b.time_average = mean(d);
    b.rate = rate;
    b.t_stat = series.records.back().t - series.records.front().t;
    b.residual = rate > 0.0 ? b.time_average / rate - 1.0 : -1.0;
    b.short_segment = !(nu > 0.0 && rate > 0.0) || b.t_stat < 10.0 / (nu * rate);
    return b;
}

/// Balance against L^2 = injection_rate(spectrum).
inline BalanceResult balance_residual(const ObservableSeries& series, const NoiseSpectrum& spectrum, double nu) {
    return balance_residual(series, injection_rate(spectrum), nu);
}

} // namespace spinflow
