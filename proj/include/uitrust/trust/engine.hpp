#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uitrust::trust {

// Missing opinions are carried as NaN inside dense rows.
inline constexpr double kNull = std::numeric_limits<double>::quiet_NaN();
inline bool is_null(double v) { return std::isnan(v); }

struct TrustParams {
    double gamma = 0.5;
    double theta = 0.5;
    double lambda = 0.5;
    double quorum_cut = 0.3;
    // Credibility compares u's opinion of j against BR_j (default) or BR_u.
    bool credibility_uses_br_u = false;

    void validate() const;
};

enum class Verdict { Honest, Malicious };
const char* to_string(Verdict v);

// Counts the multiply/compare steps of an evaluation, for complexity checks.
struct OpCounter {
    std::uint64_t ops = 0;
    void add(std::uint64_t n) { ops += n; }
};

// LTO matrix, observers x subjects. Observers are the reporting nodes;
// subjects are claimed identities. An observer may also appear as a subject
// (its own identity), which links its GR to its credibility.
class TrustMatrix {
public:
    TrustMatrix(std::size_t observers, std::size_t subjects);

    std::size_t observers() const { return observers_; }
    std::size_t subjects() const { return subjects_; }

    void set(std::size_t w, std::size_t u, std::optional<double> lto);
    std::optional<double> get(std::size_t w, std::size_t u) const;
    double raw(std::size_t w, std::size_t u) const { return lto_[w * subjects_ + u]; }
    std::span<const double> row(std::size_t w) const { return {lto_.data() + w * subjects_, subjects_}; }

    // HR_j > 0 per observer; defaults to 1.
    void set_hr(std::size_t w, double hr);
    double hr(std::size_t w) const { return hr_[w]; }
    std::span<const double> hr() const { return hr_; }

    void set_observer_subject(std::size_t w, std::optional<std::size_t> u);
    std::optional<std::size_t> observer_subject(std::size_t w) const { return obs_subject_[w]; }
    std::optional<std::size_t> subject_observer(std::size_t u) const { return subject_obs_[u]; }

    // S_u: observers holding a non-null LTO about u, ascending.
    std::vector<std::size_t> s_u(std::size_t u) const;

private:
    std::size_t observers_;
    std::size_t subjects_;
    std::vector<double> lto_;
    std::vector<double> hr_;
    std::vector<std::optional<std::size_t>> obs_subject_;
    std::vector<std::optional<std::size_t>> subject_obs_;
};

// HR_j from DODAG hop count; the root sits at depth 1.
double hierarchical_rank(unsigned hops_to_root);

// Cosine over subjects both rows rate, clamped at 0. Neutral 1 with fewer
// than two common subjects or a zero-norm sub-vector.
double similarity(std::span<const double> row_w, std::span<const double> row_j, OpCounter* ops = nullptr);

struct SrValue {
    double value = kNull;
    bool unweighted_fallback = false;
};

// Weighted mean of LTO_{j,u} over the observers in `raters` with weights
// HR_j * Sim_{w,j}. Falls back to the plain mean when every weight is 0.
// Throws when `raters` is empty.
SrValue subjective_reputation(const TrustMatrix& m, std::span<const double> sim_row_w, std::size_t u,
                              std::span<const std::size_t> raters, OpCounter* ops = nullptr);

// Agglomerative average-linkage clustering of the observers' SR vectors
// (Euclidean, nulls imputed by column mean), cut at `cut`. Returns the
// largest cluster, ties going to the higher mean `prev_gr` (if given) and
// then to the lower first member. Sorted ascending.
std::vector<std::size_t> trusted_quorum(const std::vector<std::vector<double>>& sr_vectors,
                                        std::span<const double> prev_gr, double cut, OpCounter* ops = nullptr);

// Mean SR over the quorum members holding an opinion; kNull if none.
double behavioral_reputation(std::span<const double> sr_column_u, std::span<const std::size_t> quorum);

// 1 - RMS(LTO_{u,j} - reference_j) over u's non-null opinions, clamped to
// [0,1]; 0.5 when u has no opinions. `reference` is either BR per subject or
// BR_u broadcast (see TrustParams). Null references count as 0.5.
double credibility_reputation(std::span<const double> lto_row_u, std::span<const double> reference);

double global_reputation(double br, double cr, double gamma);
Verdict classify(double gr, double theta);

// Gaussian closeness of x to the column mean, in [0,1]; 1 when sigma is 0.
double directional_weight(double sr_d_wu, std::span<const double> sr_d_column_u);

struct DirectionalTrust {
    double t_d = 0.0;
    double t_dg = 0.0;
    double link_cost = 1.0;
};
DirectionalTrust directional_global_trust(double sr_d_wu, double w_wu, double gr_w);

// lambda * R^P + (1 - lambda) * ETX * l; infinite ETX propagates.
double trust_rank(double r_parent, double etx, double link_cost, double lambda);

enum class ParentDecision { Keep, Switch };
ParentDecision maybe_switch_parent(double r_existing, double r_candidate);

struct SubjectTrust {
    std::size_t subject = 0;
    std::vector<std::size_t> raters;  // S_u
    double br = kNull;                // null when S_u is empty
    double cr = 0.5;
    double gr = kNull;
    Verdict verdict = Verdict::Honest;
    bool sr_fallback = false;
};

// One full root-side evaluation epoch.
class TrustEvaluation {
public:
    TrustEvaluation(const TrustMatrix& m, const TrustParams& params, std::span<const double> prev_gr = {});

    const TrustMatrix& matrix() const { return m_; }
    const TrustParams& params() const { return params_; }

    double sim(std::size_t w, std::size_t j) const { return sim_[w * m_.observers() + j]; }
    double sr(std::size_t w, std::size_t u) const { return sr_[w * m_.subjects() + u]; }
    const std::vector<std::size_t>& quorum() const { return quorum_; }
    const std::vector<SubjectTrust>& subjects() const { return subjects_; }
    const SubjectTrust& subject(std::size_t u) const { return subjects_[u]; }

    // GR of observer w through its own identity; neutral BR 0.5 when nobody
    // has rated it.
    double observer_gr(std::size_t w) const { return observer_gr_[w]; }
    const std::vector<double>& observer_grs() const { return observer_gr_; }

    // SR^D restricted to observers that heard u (defaults to S_u).
    void set_hears(std::size_t u, std::vector<std::size_t> observers);
    double sr_directional(std::size_t w, std::size_t u) const;
    // T^D, T^DG and link cost for the pair, computed on demand.
    DirectionalTrust pair(std::size_t w, std::size_t u) const;

    std::uint64_t operations() const { return ops_.ops; }

    // Full report as JSON (all per-subject values plus every observer/subject
    // pair with a defined SR).
    std::string to_json() const;

private:
    const std::vector<double>& directional_column(std::size_t u) const;

    TrustMatrix m_;
    TrustParams params_;
    std::vector<double> sim_;
    std::vector<double> sr_;
    std::vector<std::size_t> quorum_;
    std::vector<SubjectTrust> subjects_;
    std::vector<double> observer_gr_;
    std::vector<std::optional<std::vector<std::size_t>>> hears_;
    mutable std::vector<std::optional<std::vector<double>>> sr_d_cache_;
    mutable OpCounter ops_;
};

// Single-source shortest paths (binary-heap Dijkstra) over link costs,
// with an edge-relaxation counter.
struct WeightedEdge {
    std::size_t to = 0;
    double cost = 0.0;
};
struct PathResult {
    std::vector<double> dist;
    std::vector<std::optional<std::size_t>> prev;
    std::uint64_t operations = 0;
};
PathResult trust_paths(const std::vector<std::vector<WeightedEdge>>& graph, std::size_t source);

}  // namespace uitrust::trust
