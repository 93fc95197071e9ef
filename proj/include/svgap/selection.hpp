#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace svgap {

/// One sampled response, reduced to what selection needs.
struct Candidate {
    double nll = 0.0;       // -log pi(y | x), nats
    long long length = 1;   // token count
    double score = 0.0;     // verifier score in [0, 1]

    double normalized_nll() const { return nll / static_cast<double>(length); }
};

struct CandidateSet {
    std::string prompt_id;
    std::vector<Candidate> candidates;
};

/// Throws Error("invalid_candidate") for an empty set or an out-of-range field.
void validate(const CandidateSet& set);

/// Best-of-N: among candidates with score >= sigma, the index minimising
/// nll / length. Ties go to the lowest index. Throws
/// Error("all_below_threshold") when nothing passes the filter.
std::size_t select_bon(const CandidateSet& set, double sigma);

/// Mean per-prompt nll of the solver's own responses.
double solver_uncertainty(std::span<const double> nlls);

/// Mean over prompts of the total (not length-normalised) nll of each BoN pick.
double verifier_uncertainty(std::span<const CandidateSet> sets, double sigma);

double capability_gap(std::span<const double> solver_nlls, std::span<const CandidateSet> sets, double sigma);

/// Rectangular boolean matrix, one row of response correctness per prompt.
class CorrectnessMatrix {
public:
    explicit CorrectnessMatrix(std::vector<std::vector<bool>> rows);

    std::size_t prompts() const { return rows_.size(); }
    std::size_t samples() const { return rows_.empty() ? 0 : rows_.front().size(); }
    const std::vector<std::vector<bool>>& rows() const { return rows_; }

private:
    std::vector<std::vector<bool>> rows_;
};

/// Share of prompts with at least one correct answer among their first k samples.
double pass_at_k(const CorrectnessMatrix& matrix, std::size_t k);

}  // namespace svgap
