// Copyright 2026 The cabench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef CABENCH_NELDER_MEAD_HPP
#define CABENCH_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cabench/errors.hpp"

namespace cabench {

struct NelderMeadOptions {
    double alpha = 1.0;   // reflection
    double gamma = 2.0;   // expansion
    double rho = 0.5;     // contraction
    double sigma = 0.5;   // shrink
    /// Initial simplex: x0 and x0 + step_i e_i. One entry, or one per dimension.
    std::vector<double> initial_step{0.1};
    /// Stop once every vertex lies within `tol` of the best one.
    double tol = 1e-8;
    size_t max_iterations = 1000;
    size_t max_evaluations = 0;  // 0 = unlimited
    /// Re-measure the best vertex every k iterations (0 = never). For noisy
    /// objectives, so that one lucky evaluation cannot pin the simplex.
    size_t reevaluate_every = 0;

    void validate(size_t dim) const {
        if (dim == 0) throw DomainError("nelder_mead: dimension must be >= 1");
        if (!(alpha > 0) || !(gamma > 1) || !(rho > 0 && rho < 1) || !(sigma > 0 && sigma < 1))
            throw DomainError("nelder_mead: coefficients need alpha > 0, gamma > 1, 0 < rho, sigma < 1");
        if (initial_step.size() != 1 && initial_step.size() != dim)
            throw DimensionError("nelder_mead: initial_step needs 1 or dim entries");
        for (double s : initial_step)
            if (!(s != 0.0) || !std::isfinite(s)) throw DomainError("nelder_mead: initial steps must be finite and nonzero");
        if (!(tol >= 0)) throw DomainError("nelder_mead: tol must be >= 0");
    }
};

enum class NmStop { running, converged, max_iterations, max_evaluations, non_finite };

inline const char *to_string(NmStop s) {
    switch (s) {
        case NmStop::running: return "running";
        case NmStop::converged: return "converged";
        case NmStop::max_iterations: return "max_iterations";
        case NmStop::max_evaluations: return "max_evaluations";
        case NmStop::non_finite: return "non_finite";
    }
    return "?";
}

struct NmEvaluation {
    std::vector<double> x;
    double f = 0;
    size_t iteration = 0;  // simplex iteration during which it was evaluated
    std::string step;      // init, reflect, expand, contract, shrink, reevaluate
};

/// Nelder-Mead in ask/tell form, so several optimizers can share one
/// expensive measurement per round.
class NelderMead {
   public:
    NelderMead(std::vector<double> x0, NelderMeadOptions opt) : opt_(std::move(opt)), n_(x0.size()) {
        opt_.validate(n_);
        for (double v : x0)
            if (!std::isfinite(v)) throw DomainError("nelder_mead: x0 must be finite");
        verts_.push_back(x0);
        for (size_t i = 0; i < n_; ++i) {
            auto v = x0;
            v[i] += opt_.initial_step.size() == 1 ? opt_.initial_step[0] : opt_.initial_step[i];
            verts_.push_back(v);
        }
        fvals_.assign(n_ + 1, 0.0);
        pending_ = verts_[0];
    }

    bool done() const { return stop_ != NmStop::running; }
    NmStop stop_reason() const { return stop_; }
    size_t dim() const { return n_; }
    size_t iterations() const { return iter_; }
    size_t evaluations() const { return history_.size(); }
    size_t reevaluations() const { return reevals_; }
    const std::vector<NmEvaluation> &history() const { return history_; }
    const std::vector<std::vector<double>> &simplex() const { return verts_; }

    /// Best vertex of the current simplex (x0 before the first round completes).
    const std::vector<double> &best_x() const { return verts_[best_index()]; }
    double best_f() const { return fvals_[best_index()]; }

    /// Point whose objective value the next tell() expects.
    const std::vector<double> &ask() const {
        if (done()) throw ContractViolation("NelderMead::ask after termination");
        return pending_;
    }

    /// Throws NonFiniteObjectiveError on NaN/inf; the history up to that
    /// point stays available and the optimizer is marked stopped.
    void tell(double f) {
        if (done()) throw ContractViolation("NelderMead::tell after termination");
        history_.push_back({pending_, f, iter_, phase_name()});
        if (!std::isfinite(f)) {
            stop_ = NmStop::non_finite;
            throw NonFiniteObjectiveError("nelder_mead: objective returned a non-finite value at evaluation " +
                                          std::to_string(history_.size()));
        }
        switch (phase_) {
            case Phase::init:
                fvals_[index_] = f;
                if (++index_ <= n_) {
                    pending_ = verts_[index_];
                    return;
                }
                has_simplex_ = true;
                break;
            case Phase::reevaluate:
                fvals_[index_] = f;
                break;
            case Phase::reflect: on_reflect(f); return;
            case Phase::expand:
                replace_worst(f < fr_ ? pending_ : xr_, std::min(f, fr_));
                break;
            case Phase::contract_out:
            case Phase::contract_in: {
                double bound = phase_ == Phase::contract_out ? fr_ : fvals_[order_.back()];
                bool ok = phase_ == Phase::contract_out ? f <= bound : f < bound;
                if (ok) {
                    replace_worst(pending_, f);
                    break;
                }
                start_shrink();
                return;
            }
            case Phase::shrink:
                fvals_[order_[index_]] = f;
                if (++index_ <= n_) {
                    pending_ = verts_[order_[index_]];
                    return;
                }
                break;
        }
        finish_round();
    }

   private:
    enum class Phase { init, reflect, expand, contract_out, contract_in, shrink, reevaluate };

    std::string phase_name() const {
        switch (phase_) {
            case Phase::init: return "init";
            case Phase::reflect: return "reflect";
            case Phase::expand: return "expand";
            case Phase::contract_out:
            case Phase::contract_in: return "contract";
            case Phase::shrink: return "shrink";
            case Phase::reevaluate: return "reevaluate";
        }
        return "?";
    }

    size_t best_index() const {
        if (!has_simplex_) return 0;
        return size_t(std::min_element(fvals_.begin(), fvals_.end()) - fvals_.begin());
    }

    void sort_order() {
        order_.resize(n_ + 1);
        std::iota(order_.begin(), order_.end(), size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](size_t a, size_t b) { return fvals_[a] < fvals_[b]; });
    }

    std::vector<double> affine(const std::vector<double> &base, const std::vector<double> &toward, double t) const {
        std::vector<double> r(n_);
        for (size_t i = 0; i < n_; ++i) r[i] = base[i] + t * (toward[i] - base[i]);
        return r;
    }

    void begin_round() {
        sort_order();
        centroid_.assign(n_, 0.0);
        for (size_t k = 0; k < n_; ++k)
            for (size_t i = 0; i < n_; ++i) centroid_[i] += verts_[order_[k]][i] / double(n_);
        // x_r = c + alpha (c - x_worst)
        xr_ = affine(centroid_, verts_[order_.back()], -opt_.alpha);
        phase_ = Phase::reflect;
        pending_ = xr_;
    }

    void on_reflect(double f) {
        fr_ = f;
        double f_best = fvals_[order_.front()], f_second = fvals_[order_[n_ - 1]], f_worst = fvals_[order_.back()];
        if (f < f_best) {
            phase_ = Phase::expand;
            pending_ = affine(centroid_, xr_, opt_.gamma);
        } else if (f < f_second) {
            replace_worst(xr_, f);
            finish_round();
        } else if (f < f_worst) {
            phase_ = Phase::contract_out;
            pending_ = affine(centroid_, xr_, opt_.rho);
        } else {
            phase_ = Phase::contract_in;
            pending_ = affine(centroid_, verts_[order_.back()], opt_.rho);
        }
    }

    void replace_worst(const std::vector<double> &x, double f) {
        verts_[order_.back()] = x;
        fvals_[order_.back()] = f;
    }

    void start_shrink() {
        const auto &best = verts_[order_.front()];
        for (size_t k = 1; k <= n_; ++k) verts_[order_[k]] = affine(best, verts_[order_[k]], opt_.sigma);
        phase_ = Phase::shrink;
        index_ = 1;
        pending_ = verts_[order_[1]];
    }

    void finish_round() {
        if (phase_ != Phase::init && phase_ != Phase::reevaluate) ++iter_;
        if (check_stop()) return;
        if (phase_ != Phase::reevaluate && phase_ != Phase::init && opt_.reevaluate_every > 0 &&
            iter_ % opt_.reevaluate_every == 0) {
            phase_ = Phase::reevaluate;
            index_ = best_index();
            pending_ = verts_[index_];
            ++reevals_;
            return;
        }
        begin_round();
    }

    bool check_stop() {
        double diam = 0;
        const auto &b = verts_[best_index()];
        for (const auto &v : verts_)
            for (size_t i = 0; i < n_; ++i) diam = std::max(diam, std::abs(v[i] - b[i]));
        if (diam < opt_.tol)
            stop_ = NmStop::converged;
        else if (iter_ >= opt_.max_iterations)
            stop_ = NmStop::max_iterations;
        else if (opt_.max_evaluations > 0 && history_.size() >= opt_.max_evaluations)
            stop_ = NmStop::max_evaluations;
        return done();
    }

    NelderMeadOptions opt_;
    size_t n_;
    std::vector<std::vector<double>> verts_;
    std::vector<double> fvals_;
    std::vector<size_t> order_;
    std::vector<double> centroid_, xr_, pending_;
    double fr_ = 0;
    Phase phase_ = Phase::init;
    size_t index_ = 0;
    size_t iter_ = 0;
    size_t reevals_ = 0;
    bool has_simplex_ = false;
    NmStop stop_ = NmStop::running;
    std::vector<NmEvaluation> history_;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0;
    size_t iterations = 0;
    size_t evaluations = 0;
    size_t reevaluations = 0;
    NmStop stop = NmStop::running;
    bool converged() const { return stop == NmStop::converged; }
    std::vector<NmEvaluation> history;
};

/// Minimizes `objective` from x0. A non-finite objective value stops the
/// search; the result then has stop == non_finite and the history so far.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double> &)> &objective,
                                    std::vector<double> x0, const NelderMeadOptions &opt = {}) {
    NelderMead nm(std::move(x0), opt);
    while (!nm.done()) {
        try {
            nm.tell(objective(nm.ask()));
        } catch (const NonFiniteObjectiveError &) {
            break;
        }
    }
    NelderMeadResult r;
    r.x = nm.best_x();
    r.f = nm.best_f();
    r.iterations = nm.iterations();
    r.evaluations = nm.evaluations();
    r.reevaluations = nm.reevaluations();
    r.stop = nm.stop_reason();
    r.history = nm.history();
    return r;
}

}  // namespace cabench

#endif
