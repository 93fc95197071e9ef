#include "svgap/selection.hpp"

#include "svgap/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace svgap {

void validate(const CandidateSet& set) {
    if (set.candidates.empty()) {
        throw Error("invalid_candidate", "prompt '" + set.prompt_id + "' has no candidates", set.prompt_id);
    }
    for (const auto& c : set.candidates) {
        if (!std::isfinite(c.nll) || c.nll < 0.0) {
            throw Error("invalid_candidate", "prompt '" + set.prompt_id + "': nll must be finite and >= 0",
                        set.prompt_id);
        }
        if (c.length < 1) {
            throw Error("invalid_candidate", "prompt '" + set.prompt_id + "': length must be >= 1", set.prompt_id);
        }
        if (!(c.score >= 0.0 && c.score <= 1.0)) {
            throw Error("invalid_candidate", "prompt '" + set.prompt_id + "': score must lie in [0, 1]",
                        set.prompt_id);
        }
    }
}

std::size_t select_bon(const CandidateSet& set, double sigma) {
    validate(set);
    std::size_t best = set.candidates.size();
    double best_value = 0.0;
    for (std::size_t i = 0; i < set.candidates.size(); ++i) {
        const Candidate& c = set.candidates[i];
        if (c.score < sigma) continue;
        const double v = c.normalized_nll();
        if (best == set.candidates.size() || v < best_value) {
            best = i;
            best_value = v;
        }
    }
    if (best == set.candidates.size()) {
        throw Error("all_below_threshold", "no candidate of prompt '" + set.prompt_id + "' reaches the score threshold",
                    set.prompt_id);
    }
    return best;
}

double solver_uncertainty(std::span<const double> nlls) {
    if (nlls.empty()) {
        throw Error("empty_input", "solver uncertainty needs at least one response");
    }
    for (double v : nlls) {
        if (!std::isfinite(v)) throw Error("invalid_candidate", "solver nll must be finite");
    }
    return std::accumulate(nlls.begin(), nlls.end(), 0.0) / static_cast<double>(nlls.size());
}

double verifier_uncertainty(std::span<const CandidateSet> sets, double sigma) {
    if (sets.empty()) {
        throw Error("empty_input", "verifier uncertainty needs at least one prompt");
    }
    double sum = 0.0;
    for (const auto& set : sets) sum += set.candidates[select_bon(set, sigma)].nll;
    return sum / static_cast<double>(sets.size());
}

double capability_gap(std::span<const double> solver_nlls, std::span<const CandidateSet> sets, double sigma) {
    if (solver_nlls.size() != sets.size()) {
        throw Error("prompt_count_mismatch", "solver responses and candidate sets cover different prompt counts");
    }
    return solver_uncertainty(solver_nlls) - verifier_uncertainty(sets, sigma);
}

CorrectnessMatrix::CorrectnessMatrix(std::vector<std::vector<bool>> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw Error("invalid_matrix", "correctness matrix has no rows");
    }
    const std::size_t n = rows_.front().size();
    if (n == 0) {
        throw Error("invalid_matrix", "correctness matrix has no columns");
    }
    for (const auto& r : rows_) {
        if (r.size() != n) throw Error("invalid_matrix", "correctness matrix is not rectangular");
    }
}

double pass_at_k(const CorrectnessMatrix& matrix, std::size_t k) {
    if (k == 0 || k > matrix.samples()) {
        throw Error("invalid_k", "k must lie in [1, N]", "k");
    }
    std::size_t hits = 0;
    for (const auto& row : matrix.rows()) {
        if (std::any_of(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), [](bool b) { return b; })) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(matrix.prompts());
}

}  // namespace svgap
