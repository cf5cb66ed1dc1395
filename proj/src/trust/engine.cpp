#include "uitrust/trust/engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

namespace uitrust::trust {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

nlohmann::json num(double v) { return is_null(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

}  // namespace

void TrustParams::validate() const {
    if (!in_unit(gamma) || !in_unit(theta) || !in_unit(lambda)) {
        throw std::invalid_argument("trust parameters gamma, theta, lambda must lie in [0,1]");
    }
    if (!(quorum_cut >= 0.0)) {
        throw std::invalid_argument("quorum cut must be >= 0");
    }
}

const char* to_string(Verdict v) { return v == Verdict::Honest ? "honest" : "malicious"; }

TrustMatrix::TrustMatrix(std::size_t observers, std::size_t subjects)
    : observers_(observers),
      subjects_(subjects),
      lto_(observers * subjects, kNull),
      hr_(observers, 1.0),
      obs_subject_(observers),
      subject_obs_(subjects) {}

void TrustMatrix::set(std::size_t w, std::size_t u, std::optional<double> lto) {
    if (w >= observers_ || u >= subjects_) {
        throw std::out_of_range("TrustMatrix::set");
    }
    if (lto && !in_unit(*lto)) {
        throw std::invalid_argument("LTO must lie in [0,1]");
    }
    lto_[w * subjects_ + u] = lto ? *lto : kNull;
}

std::optional<double> TrustMatrix::get(std::size_t w, std::size_t u) const {
    const double v = lto_.at(w * subjects_ + u);
    if (is_null(v)) {
        return std::nullopt;
    }
    return v;
}

void TrustMatrix::set_hr(std::size_t w, double hr) {
    if (!(hr > 0.0)) {
        throw std::invalid_argument("HR must be > 0");
    }
    hr_.at(w) = hr;
}

void TrustMatrix::set_observer_subject(std::size_t w, std::optional<std::size_t> u) {
    if (w >= observers_ || (u && *u >= subjects_)) {
        throw std::out_of_range("TrustMatrix::set_observer_subject");
    }
    if (auto old = obs_subject_[w]) {
        subject_obs_[*old].reset();
    }
    obs_subject_[w] = u;
    if (u) {
        if (subject_obs_[*u]) {
            throw std::invalid_argument("subject already mapped to another observer");
        }
        subject_obs_[*u] = w;
    }
}

std::vector<std::size_t> TrustMatrix::s_u(std::size_t u) const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < observers_; ++w) {
        if (!is_null(raw(w, u))) {
            out.push_back(w);
        }
    }
    return out;
}

double hierarchical_rank(unsigned hops_to_root) { return 1.0 / static_cast<double>(hops_to_root + 1); }

double similarity(std::span<const double> row_w, std::span<const double> row_j, OpCounter* ops) {
    if (row_w.size() != row_j.size()) {
        throw std::invalid_argument("similarity: row length mismatch");
    }
    double dot = 0.0, nw = 0.0, nj = 0.0;
    std::size_t common = 0;
    for (std::size_t i = 0; i < row_w.size(); ++i) {
        const double a = row_w[i], b = row_j[i];
        if (is_null(a) || is_null(b)) {
            continue;
        }
        ++common;
        dot += a * b;
        nw += a * a;
        nj += b * b;
    }
    if (ops) {
        ops->add(row_w.size());
    }
    if (common < 2 || nw == 0.0 || nj == 0.0) {
        return 1.0;
    }
    return std::clamp(dot / (std::sqrt(nw) * std::sqrt(nj)), 0.0, 1.0);
}

SrValue subjective_reputation(const TrustMatrix& m, std::span<const double> sim_row_w, std::size_t u,
                              std::span<const std::size_t> raters, OpCounter* ops) {
    if (raters.empty()) {
        throw std::invalid_argument("subjective_reputation: S_u is empty");
    }
    double num_ = 0.0, den = 0.0, plain = 0.0;
    for (std::size_t j : raters) {
        const double lto = m.raw(j, u);
        const double wgt = m.hr(j) * sim_row_w[j];
        num_ += lto * wgt;
        den += wgt;
        plain += lto;
    }
    if (ops) {
        ops->add(raters.size());
    }
    if (den == 0.0) {
        return SrValue{plain / static_cast<double>(raters.size()), true};
    }
    return SrValue{std::clamp(num_ / den, 0.0, 1.0), false};
}

std::vector<std::size_t> trusted_quorum(const std::vector<std::vector<double>>& sr_vectors,
                                        std::span<const double> prev_gr, double cut, OpCounter* ops) {
    const std::size_t n = sr_vectors.size();
    if (n == 0) {
        return {};
    }
    if (n == 1) {
        return {0};
    }
    const std::size_t dims = sr_vectors.front().size();

    // Impute nulls by column mean; constant columns carry no distance.
    std::vector<std::vector<double>> cols;
    for (std::size_t d = 0; d < dims; ++d) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (const auto& v : sr_vectors) {
            if (!is_null(v[d])) {
                sum += v[d];
                ++cnt;
            }
        }
        if (cnt == 0) {
            continue;
        }
        const double mean = sum / static_cast<double>(cnt);
        std::vector<double> col(n);
        bool constant = true;
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = is_null(sr_vectors[i][d]) ? mean : sr_vectors[i][d];
            constant = constant && col[i] == col[0];
        }
        if (ops) {
            ops->add(n);
        }
        if (!constant) {
            cols.push_back(std::move(col));
        }
    }

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (const auto& col : cols) {
                const double diff = col[i] - col[j];
                s += diff * diff;
            }
            dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
        }
    }
    if (ops) {
        ops->add(n * (n - 1) / 2 * cols.size());
    }

    std::vector<std::vector<std::size_t>> members(n);
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
    }
    for (std::size_t round = 0; round + 1 < n; ++round) {
        std::size_t bi = n, bj = n;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) {
                continue;
            }
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && (bi == n || dist[i * n + j] < best)) {
                    bi = i;
                    bj = j;
                    best = dist[i * n + j];
                }
            }
        }
        if (ops) {
            ops->add(n * n / 2);
        }
        if (bi == n || best > cut) {
            break;
        }
        const double si = static_cast<double>(members[bi].size());
        const double sj = static_cast<double>(members[bj].size());
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) {
                continue;
            }
            const double d = (si * dist[k * n + bi] + sj * dist[k * n + bj]) / (si + sj);
            dist[k * n + bi] = dist[bi * n + k] = d;
        }
        if (ops) {
            ops->add(n);
        }
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        members[bj].clear();
        active[bj] = false;
    }

    const auto mean_prev = [&](const std::vector<std::size_t>& c) {
        if (prev_gr.size() != n) {
            return 0.0;
        }
        double s = 0.0;
        for (std::size_t i : c) {
            s += is_null(prev_gr[i]) ? 0.5 : prev_gr[i];
        }
        return s / static_cast<double>(c.size());
    };
    const std::vector<std::size_t>* winner = nullptr;
    double winner_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) {
            continue;
        }
        auto& c = members[i];
        std::sort(c.begin(), c.end());
        const double p = mean_prev(c);
        // clusters are visited in ascending first-member order, so a strict
        // comparison keeps the lower index on a full tie
        if (winner == nullptr || c.size() > winner->size() || (c.size() == winner->size() && p > winner_prev)) {
            winner = &c;
            winner_prev = p;
        }
    }
    return *winner;
}

double behavioral_reputation(std::span<const double> sr_column_u, std::span<const std::size_t> quorum) {
    double s = 0.0;
    std::size_t cnt = 0;
    for (std::size_t w : quorum) {
        if (!is_null(sr_column_u[w])) {
            s += sr_column_u[w];
            ++cnt;
        }
    }
    return cnt == 0 ? kNull : s / static_cast<double>(cnt);
}

double credibility_reputation(std::span<const double> lto_row_u, std::span<const double> reference) {
    if (lto_row_u.size() != reference.size()) {
        throw std::invalid_argument("credibility_reputation: length mismatch");
    }
    double s = 0.0;
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < lto_row_u.size(); ++j) {
        if (is_null(lto_row_u[j])) {
            continue;
        }
        const double ref = is_null(reference[j]) ? 0.5 : reference[j];
        const double d = lto_row_u[j] - ref;
        s += d * d;
        ++cnt;
    }
    if (cnt == 0) {
        return 0.5;
    }
    return std::clamp(1.0 - std::sqrt(s / static_cast<double>(cnt)), 0.0, 1.0);
}

double global_reputation(double br, double cr, double gamma) { return gamma * br + (1.0 - gamma) * cr; }

Verdict classify(double gr, double theta) { return gr < theta ? Verdict::Malicious : Verdict::Honest; }

double directional_weight(double sr_d_wu, std::span<const double> sr_d_column_u) {
    double s = 0.0;
    std::size_t cnt = 0;
    for (double v : sr_d_column_u) {
        if (!is_null(v)) {
            s += v;
            ++cnt;
        }
    }
    if (cnt == 0) {
        throw std::invalid_argument("directional_weight: empty column");
    }
    const double mu = s / static_cast<double>(cnt);
    double var = 0.0;
    for (double v : sr_d_column_u) {
        if (!is_null(v)) {
            var += (v - mu) * (v - mu);
        }
    }
    var /= static_cast<double>(cnt);
    if (var == 0.0) {
        return 1.0;
    }
    const double d = sr_d_wu - mu;
    return std::exp(-(d * d) / (2.0 * var));
}

DirectionalTrust directional_global_trust(double sr_d_wu, double w_wu, double gr_w) {
    DirectionalTrust t;
    t.t_d = std::clamp(sr_d_wu * w_wu, 0.0, 1.0);
    t.t_dg = std::clamp(t.t_d * gr_w, 0.0, 1.0);
    t.link_cost = 1.0 - t.t_dg;
    return t;
}

double trust_rank(double r_parent, double etx, double link_cost, double lambda) {
    if (std::isinf(etx) || std::isinf(r_parent)) {
        return std::numeric_limits<double>::infinity();
    }
    return lambda * r_parent + (1.0 - lambda) * (etx * link_cost);
}

ParentDecision maybe_switch_parent(double r_existing, double r_candidate) {
    return r_existing > r_candidate ? ParentDecision::Switch : ParentDecision::Keep;
}

TrustEvaluation::TrustEvaluation(const TrustMatrix& m, const TrustParams& params, std::span<const double> prev_gr)
    : m_(m), params_(params) {
    params_.validate();
    const std::size_t W = m_.observers();
    const std::size_t S = m_.subjects();

    sim_.assign(W * W, 1.0);
    for (std::size_t w = 0; w < W; ++w) {
        for (std::size_t j = w + 1; j < W; ++j) {
            const double s = similarity(m_.row(w), m_.row(j), &ops_);
            sim_[w * W + j] = sim_[j * W + w] = s;
        }
    }

    subjects_.resize(S);
    for (std::size_t u = 0; u < S; ++u) {
        subjects_[u].subject = u;
        subjects_[u].raters = m_.s_u(u);
    }
    ops_.add(W * S);

    sr_.assign(W * S, kNull);
    for (std::size_t w = 0; w < W; ++w) {
        const std::span<const double> sim_row(sim_.data() + w * W, W);
        for (std::size_t u = 0; u < S; ++u) {
            const auto& raters = subjects_[u].raters;
            if (raters.empty()) {
                continue;
            }
            const auto v = subjective_reputation(m_, sim_row, u, raters, &ops_);
            sr_[w * S + u] = v.value;
            subjects_[u].sr_fallback = subjects_[u].sr_fallback || v.unweighted_fallback;
        }
    }

    std::vector<std::vector<double>> vectors(W);
    for (std::size_t w = 0; w < W; ++w) {
        vectors[w].assign(sr_.begin() + static_cast<std::ptrdiff_t>(w * S),
                          sr_.begin() + static_cast<std::ptrdiff_t>((w + 1) * S));
    }
    quorum_ = trusted_quorum(vectors, prev_gr, params_.quorum_cut, &ops_);

    std::vector<double> br(S, kNull);
    std::vector<double> column(W);
    for (std::size_t u = 0; u < S; ++u) {
        if (subjects_[u].raters.empty()) {
            continue;
        }
        for (std::size_t w = 0; w < W; ++w) {
            column[w] = sr_[w * S + u];
        }
        br[u] = behavioral_reputation(column, quorum_);
        subjects_[u].br = br[u];
    }
    ops_.add(quorum_.size() * S);

    const auto credibility_of = [&](std::size_t w, double br_self) {
        if (params_.credibility_uses_br_u) {
            std::vector<double> ref(S, is_null(br_self) ? 0.5 : br_self);
            return credibility_reputation(m_.row(w), ref);
        }
        return credibility_reputation(m_.row(w), br);
    };

    observer_gr_.assign(W, 0.5);
    for (std::size_t w = 0; w < W; ++w) {
        const auto self = m_.observer_subject(w);
        const double br_self = self ? br[*self] : kNull;
        const double cr = credibility_of(w, br_self);
        observer_gr_[w] = global_reputation(is_null(br_self) ? 0.5 : br_self, cr, params_.gamma);
        if (self) {
            subjects_[*self].cr = cr;
        }
    }
    ops_.add(W * S);

    for (auto& st : subjects_) {
        if (is_null(st.br)) {
            st.verdict = Verdict::Honest;
            continue;
        }
        st.gr = global_reputation(st.br, st.cr, params_.gamma);
        st.verdict = classify(st.gr, params_.theta);
    }

    hears_.resize(S);
    sr_d_cache_.resize(S);
}

void TrustEvaluation::set_hears(std::size_t u, std::vector<std::size_t> observers) {
    std::sort(observers.begin(), observers.end());
    hears_.at(u) = std::move(observers);
    sr_d_cache_[u].reset();
}

const std::vector<double>& TrustEvaluation::directional_column(std::size_t u) const {
    auto& slot = sr_d_cache_.at(u);
    if (slot) {
        return *slot;
    }
    const std::size_t W = m_.observers();
    std::vector<double> col(W, kNull);
    std::vector<std::size_t> raters;
    if (hears_[u]) {
        std::set_intersection(hears_[u]->begin(), hears_[u]->end(), subjects_[u].raters.begin(),
                              subjects_[u].raters.end(), std::back_inserter(raters));
    } else {
        raters = subjects_[u].raters;
    }
    if (!raters.empty()) {
        for (std::size_t w = 0; w < W; ++w) {
            const std::span<const double> sim_row(sim_.data() + w * W, W);
            col[w] = subjective_reputation(m_, sim_row, u, raters, &ops_).value;
        }
    }
    slot = std::move(col);
    return *slot;
}

double TrustEvaluation::sr_directional(std::size_t w, std::size_t u) const { return directional_column(u).at(w); }

DirectionalTrust TrustEvaluation::pair(std::size_t w, std::size_t u) const {
    const auto& col = directional_column(u);
    const double x = col.at(w);
    if (is_null(x)) {
        return DirectionalTrust{};
    }
    return directional_global_trust(x, directional_weight(x, col), observer_gr_[w]);
}

std::string TrustEvaluation::to_json() const {
    using nlohmann::json;
    const std::size_t W = m_.observers();
    const std::size_t S = m_.subjects();
    json j;
    j["params"] = {{"gamma", params_.gamma},
                   {"theta", params_.theta},
                   {"lambda", params_.lambda},
                   {"quorum_cut", params_.quorum_cut},
                   {"credibility_reference", params_.credibility_uses_br_u ? "br_u" : "br_j"}};
    j["quorum"] = quorum_;
    json observers = json::array();
    for (std::size_t w = 0; w < W; ++w) {
        json row = json::array();
        for (std::size_t u = 0; u < S; ++u) {
            row.push_back(num(sr(w, u)));
        }
        json o = {{"observer", w}, {"hr", m_.hr(w)}, {"gr", observer_gr_[w]}, {"sr_row", std::move(row)}};
        if (auto s = m_.observer_subject(w)) {
            o["subject"] = *s;
        }
        observers.push_back(std::move(o));
    }
    j["observers"] = std::move(observers);
    json subjects = json::array();
    for (const auto& st : subjects_) {
        subjects.push_back({{"subject", st.subject},
                            {"br", num(st.br)},
                            {"cr", st.cr},
                            {"gr", num(st.gr)},
                            {"verdict", to_string(st.verdict)},
                            {"sr_fallback", st.sr_fallback}});
    }
    j["subjects"] = std::move(subjects);
    json pairs = json::array();
    for (std::size_t w = 0; w < W; ++w) {
        for (std::size_t u = 0; u < S; ++u) {
            if (is_null(sr_directional(w, u))) {
                continue;
            }
            const auto t = pair(w, u);
            pairs.push_back({{"observer", w}, {"subject", u}, {"t_d", t.t_d}, {"t_dg", t.t_dg}, {"link_cost", t.link_cost}});
        }
    }
    j["pairs"] = std::move(pairs);
    return j.dump();
}

PathResult trust_paths(const std::vector<std::vector<WeightedEdge>>& graph, std::size_t source) {
    const std::size_t n = graph.size();
    if (source >= n) {
        throw std::out_of_range("trust_paths: source");
    }
    PathResult r;
    r.dist.assign(n, std::numeric_limits<double>::infinity());
    r.prev.assign(n, std::nullopt);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const auto heap_cost = [&]() {
        std::uint64_t c = 1;
        for (std::size_t s = heap.size(); s > 1; s >>= 1) {
            ++c;
        }
        return c;
    };
    r.dist[source] = 0.0;
    heap.emplace(0.0, source);
    r.operations += 1;
    while (!heap.empty()) {
        r.operations += heap_cost();
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > r.dist[v]) {
            continue;
        }
        for (const auto& e : graph[v]) {
            if (e.cost < 0.0) {
                throw std::invalid_argument("trust_paths: negative cost");
            }
            ++r.operations;
            const double nd = d + e.cost;
            if (nd < r.dist[e.to] || (nd == r.dist[e.to] && r.prev[e.to] && v < *r.prev[e.to])) {
                const bool improved = nd < r.dist[e.to];
                r.dist[e.to] = nd;
                r.prev[e.to] = v;
                if (improved) {
                    heap.emplace(nd, e.to);
                    r.operations += heap_cost();
                }
            }
        }
    }
    return r;
}

}  // namespace uitrust::trust
