// Python bindings: sites driven by REPL lines, the simulator and the property checker.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccr/errors.hpp"
#include "ccr/message.hpp"
#include "ccr/props.hpp"
#include "ccr/protocol.hpp"
#include "ccr/repl.hpp"
#include "ccr/sim.hpp"

namespace py = pybind11;
using namespace ccr;

namespace {

using Sends = std::vector<std::pair<SiteId, std::string>>;

Sends encode_all(const std::vector<Outgoing>& out)
{
    Sends s;
    for (const auto& o : out) s.emplace_back(o.to, encode_message(o.msg));
    return s;
}

py::object loads(const std::string& json) { return py::module_::import("json").attr("loads")(json); }

}  // namespace

PYBIND11_MODULE(ccr, m)
{
    m.doc() = "Operational-transformation replicas with incremental peer sync";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", error);
    py::register_exception<DecodeError>(m, "DecodeError", error);
    py::register_exception<KindError>(m, "KindError", error);
    py::register_exception<ProtocolError>(m, "ProtocolError", error);

    py::class_<Kind>(m, "Kind")
        .def_static("parse", &Kind::parse, py::arg("name"))
        .def_property_readonly("name", &Kind::name)
        .def("__str__", &Kind::name)
        .def("__repr__", [](const Kind& k) { return "Kind('" + k.name() + "')"; })
        .def("__eq__", [](const Kind& a, const Kind& b) { return a == b; });

    py::class_<Site>(m, "Site")
        .def(py::init([](SiteId id, const std::string& kind) { return Site(id, Kind::parse(kind)); }),
             py::arg("site"), py::arg("kind"))
        .def_property_readonly("id", &Site::id)
        .def_property_readonly("kind", &Site::kind)
        .def_property_readonly("faulted", &Site::faulted)
        .def("__len__", [](const Site& s) { return s.history().size(); })
        .def("show", &Site::digest, "Canonical digest of the current state.")
        .def("history", &render_history)
        .def(
            "update",
            [](Site& s, const std::string& line) {
                const ReplCommand cmd = parse_repl(s.kind(), line);
                if (cmd.verb != ReplCommand::Verb::update) throw py::value_error("not an update: " + line);
                std::vector<Outgoing> out;
                std::string reply = eval_update(s, cmd.intent, out);
                return std::make_pair(std::move(reply), encode_all(out));
            },
            py::arg("line"), "Returns the REPL reply and the (peer, line) messages to send.")
        .def(
            "connect", [](Site& s, SiteId peer) { return encode_message(s.connect(peer)); }, py::arg("peer"))
        .def("disconnect", &Site::disconnect, py::arg("peer"))
        .def(
            "receive",
            [](Site& s, SiteId from, const std::string& line) {
                return encode_all(s.handle_message(from, decode_message(s.kind(), line)));
            },
            py::arg("sender"), py::arg("line"), "Handles one wire line; returns the replies to send.");

    m.def(
        "normalize_message",
        [](const std::string& kind, const std::string& line) {
            return encode_message(decode_message(Kind::parse(kind), line));
        },
        py::arg("kind"), py::arg("line"), "Decodes and re-encodes one wire line.");

    m.def(
        "run_trial",
        [](const std::string& kind, std::size_t sites, std::size_t ops_per_site, std::uint64_t seed,
           const std::string& topology, bool reorder, bool duplicate) {
            SimConfig cfg;
            cfg.kind = Kind::parse(kind);
            cfg.sites = sites;
            cfg.ops_per_site = ops_per_site;
            cfg.seed = seed;
            cfg.topology = parse_topology(topology);
            cfg.reorder = reorder;
            cfg.duplicate = duplicate;
            const TrialReport r = [&] {
                py::gil_scoped_release nogil;
                return run_trial(cfg);
            }();
            py::dict d;
            d["seed"] = r.seed;
            d["converged"] = r.converged;
            d["terminated"] = r.terminated;
            d["failure"] = r.failure;
            d["final_digest"] = r.final_digest;
            d["updates"] = r.updates;
            d["messages_sent"] = r.messages_sent;
            d["resyncs"] = r.resyncs;
            d["duplicates"] = r.duplicates;
            d["site_digests"] = r.site_digests;
            return d;
        },
        py::arg("kind"), py::arg("sites") = 3, py::arg("ops_per_site") = 5, py::arg("seed") = 0,
        py::arg("topology") = "full", py::arg("reorder") = false, py::arg("duplicate") = false);

    m.def(
        "check_properties",
        [](const std::string& kind, std::size_t trials, std::uint64_t seed, const std::string& checks) {
            PropertyOptions opts;
            opts.checks = parse_checks(checks);
            std::string json;
            {
                py::gil_scoped_release nogil;
                json = check_properties(Kind::parse(kind), trials, seed, opts).to_json();
            }
            return loads(json);
        },
        py::arg("kind"), py::arg("trials") = 100, py::arg("seed") = 0, py::arg("checks") = "all");
}
