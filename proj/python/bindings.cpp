#include "uitrust/harness/config.hpp"
#include "uitrust/harness/metrics.hpp"
#include "uitrust/harness/simulation.hpp"
#include "uitrust/harness/sweep.hpp"
#include "uitrust/trust/engine.hpp"
#include "uitrust/wire.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace uitrust;

namespace {

py::bytes to_bytes(std::span<const std::uint8_t> b) {
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

wire::UidType uid_type(unsigned t) {
    if (t >= wire::kUidTypeCount) {
        throw py::value_error("uid_type must be 0, 1 or 2");
    }
    return static_cast<wire::UidType>(t);
}

harness::ScenarioConfig config_with(const std::string& text, std::optional<std::uint64_t> seed) {
    auto cfg = harness::parse_config(text);
    if (seed) {
        cfg.seed = *seed;
    }
    cfg.validate();
    return cfg;
}

std::string run_json(const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::string> trace) {
    const auto cfg = config_with(text, seed);
    harness::RunOptions opts;
    std::ofstream out;
    if (trace) {
        out.open(*trace, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::ios_base::failure("cannot write '" + *trace + "'");
        }
        opts.trace = &out;
    }
    py::gil_scoped_release release;
    return harness::to_json(harness::run_scenario(cfg, opts));
}

py::dict run_detailed(const std::string& text, std::optional<std::uint64_t> seed) {
    const auto cfg = config_with(text, seed);
    harness::RunDetails d;
    {
        py::gil_scoped_release release;
        harness::RunOptions opts;
        opts.keep_last_trust_report = true;
        d = harness::run_scenario_detailed(cfg, opts);
    }
    py::list devices;
    for (const auto& dv : d.devices) {
        py::dict x;
        x["attacker"] = dv.attacker;
        x["verdict_malicious"] = dv.verdict_malicious;
        x["identities_observed"] = dv.identities_observed;
        x["identities_flagged"] = dv.identities_flagged;
        py::list uids;
        for (const auto& s : dv.observed_uids) {
            uids.append(py::list(py::cast(std::vector<wire::UidValue>(s.begin(), s.end()))));
        }
        x["observed_uids"] = uids;
        devices.append(x);
    }
    py::dict out;
    out["report"] = harness::to_json(d.report);
    out["devices"] = devices;
    out["last_trust_report"] = d.last_trust_report ? py::cast(*d.last_trust_report) : py::none();
    out["forced_collision_attacker"] =
        d.forced_collision_attacker == SIZE_MAX ? py::none() : py::cast(d.forced_collision_attacker);
    return out;
}

std::vector<std::string> sweep_json(const std::string& text, std::uint32_t seeds, const std::vector<double>& ratios,
                                    const std::vector<std::string>& defenses) {
    harness::SweepPlan plan;
    plan.base = config_with(text, std::nullopt);
    plan.seeds = seeds;
    plan.ratios = ratios;
    for (const auto& d : defenses) {
        plan.defenses.push_back(harness::parse_defense(d));
    }
    std::vector<harness::MetricsReport> reports;
    {
        py::gil_scoped_release release;
        reports = harness::run_sweep(plan);
    }
    std::vector<std::string> out;
    for (const auto& r : reports) {
        out.push_back(harness::to_json(r));
    }
    return out;
}

std::string reports_csv(const std::vector<std::string>& lines) {
    std::vector<harness::MetricsReport> reports;
    for (const auto& l : lines) {
        reports.push_back(harness::report_from_json(l));
    }
    std::ostringstream ss;
    harness::write_csv(ss, reports);
    return ss.str();
}

std::string evaluate_trust(const std::vector<std::vector<std::optional<double>>>& lto, std::vector<unsigned> hops,
                           std::vector<std::optional<std::size_t>> observer_subject, double gamma, double theta,
                           double lambda, double quorum_cut, bool credibility_uses_br_u,
                           std::vector<double> prev_gr) {
    if (lto.empty()) {
        throw py::value_error("lto needs at least one observer row");
    }
    const std::size_t W = lto.size();
    const std::size_t S = lto.front().size();
    trust::TrustMatrix m(W, S);
    for (std::size_t w = 0; w < W; ++w) {
        if (lto[w].size() != S) {
            throw py::value_error("lto rows must have equal length");
        }
        for (std::size_t u = 0; u < S; ++u) {
            m.set(w, u, lto[w][u]);
        }
    }
    if (!hops.empty()) {
        if (hops.size() != W) {
            throw py::value_error("hops needs one entry per observer");
        }
        for (std::size_t w = 0; w < W; ++w) {
            m.set_hr(w, trust::hierarchical_rank(hops[w]));
        }
    }
    if (!observer_subject.empty()) {
        if (observer_subject.size() != W) {
            throw py::value_error("observer_subject needs one entry per observer");
        }
        for (std::size_t w = 0; w < W; ++w) {
            m.set_observer_subject(w, observer_subject[w]);
        }
    }
    trust::TrustParams p;
    p.gamma = gamma;
    p.theta = theta;
    p.lambda = lambda;
    p.quorum_cut = quorum_cut;
    p.credibility_uses_br_u = credibility_uses_br_u;
    for (double& g : prev_gr) {
        g = std::isnan(g) ? trust::kNull : g;
    }
    trust::TrustEvaluation eval(m, p, prev_gr);
    return eval.to_json();
}

}  // namespace

PYBIND11_MODULE(_uitrust, m) {
    m.doc() = "Bindings for the uitrust simulator core";

    py::register_exception<harness::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<harness::TopologyError>(m, "TopologyError", PyExc_RuntimeError);
    py::register_exception<wire::WireError>(m, "WireError", PyExc_ValueError);

    m.def("normalize_config", [](const std::string& text) { return harness::to_text(harness::parse_config(text)); },
          py::arg("text"), "Parse and validate a config, returning its canonical text form.");
    m.def("run_json", &run_json, py::arg("config"), py::arg("seed") = py::none(), py::arg("trace") = py::none());
    m.def("run_detailed", &run_detailed, py::arg("config"), py::arg("seed") = py::none());
    m.def("sweep_json", &sweep_json, py::arg("config"), py::arg("seeds"), py::arg("ratios"), py::arg("defenses"));
    m.def("reports_csv", &reports_csv, py::arg("reports"));
    m.def("csv_header", &harness::csv_header);
    m.def("evaluate_trust_json", &evaluate_trust, py::arg("lto"), py::arg("hops"), py::arg("observer_subject"),
          py::arg("gamma"), py::arg("theta"), py::arg("lambda_"), py::arg("quorum_cut"),
          py::arg("credibility_uses_br_u"), py::arg("prev_gr"));

    m.def("encode_query", [](unsigned t, std::uint16_t nonce) {
        return to_bytes(wire::QueryField{uid_type(t), nonce}.encode());
    });
    m.def("decode_query", [](const py::bytes& b) {
        const auto f = wire::QueryField::decode(from_bytes(b));
        return py::make_tuple(static_cast<unsigned>(f.uid_type), f.nonce);
    });
    m.def("encode_response", [](unsigned t, wire::UidValue uid, std::uint16_t nonce) {
        return to_bytes(wire::ResponseField{uid_type(t), uid, nonce}.encode());
    });
    m.def("decode_response", [](const py::bytes& b) {
        const auto f = wire::ResponseField::decode(from_bytes(b));
        return py::make_tuple(static_cast<unsigned>(f.uid_type), f.uid, f.nonce);
    });
    m.def("encode_lto", [](wire::Mac mac, std::uint16_t p, std::uint16_t n) {
        return to_bytes(wire::LtoEntry{mac, p, n}.encode());
    });
    m.def("decode_lto", [](const py::bytes& b) {
        const auto e = wire::LtoEntry::decode(from_bytes(b));
        return py::make_tuple(e.mac, e.p, e.n);
    });
}
