#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hedgelab/errors.hpp"

namespace hedgelab {

enum class Convexity { convex, concave };

/// European payoff f with one-sided derivatives and convexity classification.
///
/// Piecewise-linear payoffs are the canonical representation (knot values plus
/// end slopes); calls and puts are tagged specializations of it so pricing can
/// dispatch to their classic closed forms. Smooth payoffs come from a small
/// named catalog with exact derivatives. Payoffs that are neither convex nor
/// concave are rejected at construction.
class Payoff {
public:
    enum class Kind { call, put, piecewise_linear, smooth };
    enum class SmoothForm { power, log_contract, entropy };

    static Payoff call(double strike) {
        require(strike > 0.0, "call: strike must be positive");
        Payoff p = from_knots({{strike, 0.0}}, 0.0, 1.0);
        p.kind_ = Kind::call;
        p.strike_ = strike;
        return p;
    }

    static Payoff put(double strike) {
        require(strike > 0.0, "put: strike must be positive");
        Payoff p = from_knots({{strike, 0.0}}, -1.0, 0.0);
        p.kind_ = Kind::put;
        p.strike_ = strike;
        return p;
    }

    /// knots: (s, f(s)) pairs with strictly increasing s > 0; slope_left /
    /// slope_right extend the first/last knot to 0 and infinity.
    static Payoff piecewise_linear(std::vector<std::pair<double, double>> knots,
                                   double slope_left, double slope_right,
                                   double growth_exponent = 1.0) {
        return from_knots(std::move(knots), slope_left, slope_right, growth_exponent);
    }

    /// power: f(s) = s^p (convex for p >= 1, concave for 0 < p <= 1);
    /// log_contract: f(s) = -log(s); entropy: f(s) = s*log(s).
    static Payoff smooth(SmoothForm form, double exponent = 2.0) {
        Payoff p;
        p.kind_ = Kind::smooth;
        p.form_ = form;
        p.exponent_ = exponent;
        switch (form) {
            case SmoothForm::power:
                require(exponent > 0.0, "power payoff: exponent must be positive");
                p.convexity_ = exponent >= 1.0 ? Convexity::convex : Convexity::concave;
                p.growth_ = std::max(std::fabs(exponent - 1.0), 1.0);
                break;
            case SmoothForm::log_contract:
                p.convexity_ = Convexity::convex;
                p.growth_ = 1.0;
                break;
            case SmoothForm::entropy:
                p.convexity_ = Convexity::convex;
                p.growth_ = 1.0;
                break;
        }
        return p;
    }

    /// Mirror image -f; turns the catalog's convex members into concave tests.
    Payoff negated() const {
        Payoff p = *this;
        p.negate_ = !p.negate_;
        p.convexity_ = (convexity_ == Convexity::convex) ? Convexity::concave : Convexity::convex;
        if (p.kind_ == Kind::call || p.kind_ == Kind::put) p.kind_ = Kind::piecewise_linear;
        for (auto& c : p.slopes_) c = -c;
        for (auto& d : p.intercepts_) d = -d;
        for (auto& kf : p.knot_values_) kf = -kf;
        return p;
    }

    double operator()(double s) const { return eval(s); }

    double eval(double s) const {
        require(s > 0.0, "payoff eval: spot must be positive");
        if (kind_ == Kind::smooth) return sign() * smooth_eval(s);
        const std::size_t k = segment_index(s);
        return slopes_[k] * s + intercepts_[k];
    }

    /// (left derivative, right derivative) at s; equal away from kinks.
    std::pair<double, double> one_sided_derivatives(double s) const {
        require(s > 0.0, "one_sided_derivatives: spot must be positive");
        if (kind_ == Kind::smooth) {
            const double d = sign() * smooth_derivative(s);
            return {d, d};
        }
        const std::size_t k = segment_index(s);
        // At an interior knot the left segment governs the left derivative.
        if (k > 0 && s == knots_[k - 1]) return {slopes_[k - 1], slopes_[k]};
        return {slopes_[k], slopes_[k]};
    }

    /// Single-valued derivative (midpoint of the subdifferential at kinks).
    double derivative_mid(double s) const {
        const auto [dm, dp] = one_sided_derivatives(s);
        return 0.5 * (dm + dp);
    }

    /// Buy-and-hold pair (a, b): a = midpoint of the one-sided derivatives,
    /// b = f(s) - a*s, so a*x + b is the tangent/support line through (s, f(s)).
    std::pair<double, double> kink_selection(double s) const {
        const double a = derivative_mid(s);
        return {a, eval(s) - a * s};
    }

    Kind kind() const { return kind_; }
    Convexity convexity() const { return convexity_; }
    double growth_exponent() const { return growth_; }
    bool is_vanilla() const { return kind_ == Kind::call || kind_ == Kind::put; }
    double strike() const {
        require(is_vanilla(), "strike: payoff is not a vanilla option");
        return strike_;
    }
    SmoothForm smooth_form() const {
        require(kind_ == Kind::smooth, "smooth_form: payoff is not smooth");
        return form_;
    }
    double smooth_exponent() const { return exponent_; }
    bool smooth_negated() const { return negate_; }

    /// Spots where the slope genuinely changes; quadrature splits there.
    const std::vector<double>& kink_points() const { return kink_points_; }

    /// Knot list of the piecewise-linear representation (empty for smooth).
    const std::vector<double>& knot_spots() const { return knots_; }
    const std::vector<double>& segment_slopes() const { return slopes_; }
    const std::vector<double>& segment_intercepts() const { return intercepts_; }

    /// True unless the discounted gamma can vanish identically (affine payoff
    /// or pure power p in {1}); hitting-time triggers require this.
    bool has_nonvanishing_gamma() const {
        if (kind_ == Kind::smooth) {
            if (form_ == SmoothForm::power) return exponent_ != 1.0;
            return true;
        }
        return !kink_points_.empty();
    }

private:
    static void require(bool ok, const char* msg) {
        if (!ok) throw invalid_input(msg);
    }

    static Payoff from_knots(std::vector<std::pair<double, double>> knots, double slope_left,
                             double slope_right, double growth_exponent = 1.0) {
        require(!knots.empty(), "piecewise_linear: at least one knot required");
        require(growth_exponent > 0.0, "piecewise_linear: growth exponent must be positive");
        std::sort(knots.begin(), knots.end());
        Payoff p;
        p.kind_ = Kind::piecewise_linear;
        p.growth_ = growth_exponent;
        const std::size_t m = knots.size();
        p.knots_.reserve(m);
        p.knot_values_.reserve(m);
        for (std::size_t j = 0; j < m; ++j) {
            require(knots[j].first > 0.0, "piecewise_linear: knot spots must be positive");
            if (j > 0) require(knots[j].first > knots[j - 1].first,
                               "piecewise_linear: knot spots must be strictly increasing");
            p.knots_.push_back(knots[j].first);
            p.knot_values_.push_back(knots[j].second);
        }
        p.slopes_.resize(m + 1);
        p.intercepts_.resize(m + 1);
        p.slopes_[0] = slope_left;
        for (std::size_t j = 1; j < m; ++j)
            p.slopes_[j] = (p.knot_values_[j] - p.knot_values_[j - 1]) /
                           (p.knots_[j] - p.knots_[j - 1]);
        p.slopes_[m] = slope_right;
        for (std::size_t k = 0; k <= m; ++k) {
            const std::size_t anchor = (k == 0) ? 0 : k - 1;
            p.intercepts_[k] = p.knot_values_[anchor] - p.slopes_[k] * p.knots_[anchor];
        }
        bool nondecreasing = true, nonincreasing = true;
        for (std::size_t k = 0; k + 1 <= m; ++k) {
            if (p.slopes_[k + 1] < p.slopes_[k]) nondecreasing = false;
            if (p.slopes_[k + 1] > p.slopes_[k]) nonincreasing = false;
            if (p.slopes_[k + 1] != p.slopes_[k]) p.kink_points_.push_back(p.knots_[k]);
        }
        require(nondecreasing || nonincreasing,
                "piecewise_linear: slopes must be monotone (convex or concave payoff)");
        p.convexity_ = nondecreasing ? Convexity::convex : Convexity::concave;
        return p;
    }

    std::size_t segment_index(double s) const {
        // Segment k covers [knot_{k-1}, knot_k); s below the first knot is 0.
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
        return static_cast<std::size_t>(it - knots_.begin());
    }

    double sign() const { return negate_ ? -1.0 : 1.0; }

    double smooth_eval(double s) const {
        switch (form_) {
            case SmoothForm::power: return std::pow(s, exponent_);
            case SmoothForm::log_contract: return -std::log(s);
            case SmoothForm::entropy: return s * std::log(s);
        }
        return 0.0;
    }

    double smooth_derivative(double s) const {
        switch (form_) {
            case SmoothForm::power: return exponent_ * std::pow(s, exponent_ - 1.0);
            case SmoothForm::log_contract: return -1.0 / s;
            case SmoothForm::entropy: return std::log(s) + 1.0;
        }
        return 0.0;
    }

    Kind kind_ = Kind::piecewise_linear;
    Convexity convexity_ = Convexity::convex;
    double growth_ = 1.0;
    double strike_ = 0.0;
    SmoothForm form_ = SmoothForm::power;
    double exponent_ = 2.0;
    bool negate_ = false;
    std::vector<double> knots_;
    std::vector<double> knot_values_;
    std::vector<double> slopes_;      // slopes_[k] on segment k
    std::vector<double> intercepts_;  // f(s) = slopes_[k]*s + intercepts_[k]
    std::vector<double> kink_points_;
};

} // namespace hedgelab
