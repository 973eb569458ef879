#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpanet/automaton.hpp"
#include "tpanet/builtins.hpp"
#include "tpanet/cli.hpp"
#include "tpanet/composition.hpp"
#include "tpanet/denotational.hpp"
#include "tpanet/generators.hpp"
#include "tpanet/history.hpp"
#include "tpanet/network.hpp"

namespace py = pybind11;
using namespace tpanet;

namespace {

ChannelSet channels(const std::vector<std::string>& names) { return ChannelSet(names); }

py::dict signature_dict(const PortSignature& s) {
  py::dict d;
  d["alphabet"] = s.alphabet.symbols();
  d["inputs"] = s.inputs.names();
  d["outputs"] = s.outputs.names();
  d["hidden"] = s.hidden.names();
  return d;
}

py::object witness(const PulseVerdict& v) {
  if (v.ok) return py::none();
  return py::make_tuple(render(v.witness->iota), render(v.witness->kappa), v.witness->n);
}

ComposeOptions compose_options(std::size_t horizon, std::optional<std::size_t> joint_bound,
                               bool joint_search) {
  ComposeOptions o;
  o.horizon = horizon;
  o.joint_bound = joint_bound;
  o.force_joint_search = joint_search;
  return o;
}

}  // namespace

PYBIND11_MODULE(_tpanet, m) {
  m.doc() = "Timed port automata and their history semantics";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<History>(m, "History")
      .def(py::init([](const std::string& text) { return parse_history(text); }))
      .def_property_readonly("domain", [](const History& h) { return h.domain().names(); })
      .def("__len__", &History::size)
      .def("__str__", [](const History& h) { return render(h); })
      .def("__repr__", [](const History& h) { return "History(" + py::repr(py::str(render(h))).cast<std::string>() + ")"; })
      .def("__eq__", [](const History& a, const History& b) { return a == b; })
      .def("__lt__", [](const History& a, const History& b) { return a < b; })
      .def("__hash__", [](const History& h) { return py::hash(py::str(render(h))); })
      .def("__add__", [](const History& a, const History& b) { return sum(a, b); })
      .def("project", [](const History& h, const std::vector<std::string>& keep) {
        return project(h, channels(keep));
      })
      .def("prefix", [](const History& h, std::size_t j) { return prefix(h, j); });

  m.def("distance", [](const History& a, const History& b) { return baire_distance(a, b).to_string(); },
        "Baire distance, rendered as 'exact 2^-k' or 'upper-bound 2^-k'.");

  py::class_<Automaton>(m, "Automaton")
      .def_property_readonly("name", &Automaton::name)
      .def_property_readonly("signature", [](const Automaton& a) { return signature_dict(a.signature()); })
      .def("behaviors", [](const Automaton& a, std::size_t horizon) {
        const auto b = behaviors(a, horizon);
        return std::vector<History>(b.begin(), b.end());
      }, py::arg("horizon"))
      .def("behaviors_for_input", [](const Automaton& a, const History& in) {
        const auto b = behaviors_for_input(a, in);
        return std::vector<History>(b.begin(), b.end());
      })
      .def("is_reactive", [](const Automaton& a, std::optional<std::size_t> horizon) {
        return check_reactive(a, horizon).ok;
      }, py::arg("horizon") = py::none())
      .def("weak_pulse_witness", [](const Automaton& a, std::size_t horizon) {
        return witness(check_weak_pulse(a, horizon));
      }, py::arg("horizon"))
      .def("strong_pulse_witness", [](const Automaton& a, std::size_t horizon) {
        return witness(check_strong_pulse(a, horizon));
      }, py::arg("horizon"))
      .def("__repr__", [](const Automaton& a) { return "<Automaton " + a.name() + " " + render(a.signature()) + ">"; });

  m.def("fair_merge", [](const std::vector<std::string>& d) { return builtins::fair_merge(Alphabet(d)); });
  m.def("buffer", [](const std::vector<std::string>& d, std::size_t capacity) {
    return builtins::buffer(Alphabet(d), capacity);
  }, py::arg("alphabet"), py::arg("capacity") = 8);
  m.def("blocking_pair", [](const std::vector<std::string>& d) { return builtins::blocking_pair(Alphabet(d)); });
  m.def("random_automaton", [](std::uint64_t seed, const std::vector<std::string>& d,
                               const std::vector<std::string>& inputs,
                               const std::vector<std::string>& outputs, bool strong) {
    std::mt19937_64 rng(seed);
    gen::AutomatonShape shape;
    shape.strong = strong;
    return gen::random_automaton(rng, "R", {Alphabet(d), channels(inputs), channels(outputs), {}}, shape);
  }, py::arg("seed"), py::arg("alphabet"), py::arg("inputs"), py::arg("outputs"),
     py::arg("strong") = false);
  m.def("load", [](const std::string& text, const std::string& name) {
    const auto net = parse_network(text);
    if (const NetDecl* n = net.find_net(name)) return elaborate(net, n->expr);
    return resolve_automaton(net, name);
  }, py::arg("text"), py::arg("name"), "An automaton or net of a network description.");

  m.def("compose", [](const Automaton& a, const Automaton& b, std::size_t horizon,
                      std::optional<std::size_t> joint_bound, bool joint_search) {
    return compose(a, b, compose_options(horizon, joint_bound, joint_search));
  }, py::arg("a"), py::arg("b"), py::arg("horizon") = 3, py::arg("joint_bound") = py::none(),
     py::arg("joint_search") = false);
  m.def("hide", [](const Automaton& a, const std::vector<std::string>& p) { return hide(a, channels(p)); });
  m.def("rename", [](const Automaton& a, const std::map<std::string, std::string>& m) { return rename(a, m); });
  m.def("decomposition_oracle", [](const Automaton& a, const Automaton& b, std::size_t horizon) {
    auto r = decomposition_oracle(a, b, horizon);
    return py::make_tuple(r.ok, r.to_string());
  });
  m.def("check_equivalence", [](const Automaton& a, const Automaton& b, std::size_t horizon) {
    auto r = check_equivalence(a, b, horizon);
    return py::make_tuple(r.ok(), r.to_string());
  });

  py::class_<StepFun>(m, "StepFun")
      .def_property_readonly("inputs", [](const StepFun& f) { return f.inputs().names(); })
      .def_property_readonly("outputs", [](const StepFun& f) { return f.outputs().names(); })
      .def_property_readonly("mode", [](const StepFun& f) { return f.mode().to_string(); })
      .def("__call__", &StepFun::apply);
  m.def("copy", [](const std::map<std::string, std::string>& w) { return stepfuns::copy(w); });
  m.def("unit_delay", [](const std::map<std::string, std::string>& w) { return stepfuns::unit_delay(w); });
  m.def("random_loop_transformer", [](std::uint64_t seed, const std::vector<std::string>& d) {
    return gen::random_loop_transformer(seed, Alphabet(d));
  });
  m.def("classify_pulse", [](const StepFun& f, std::size_t horizon, const std::vector<std::string>& d,
                             std::size_t bound) {
    return to_string(classify_pulse(f, horizon, Alphabet(d), bound).cls);
  }, py::arg("f"), py::arg("horizon"), py::arg("alphabet"), py::arg("bound") = 1);
  m.def("banach_fix", [](const StepFun& f, std::size_t horizon, std::optional<History> seed,
                         std::optional<History> params) {
    auto r = banach_fix(f, {horizon, seed, {}}, params.value_or(History{}));
    return py::make_tuple(r.value, r.iterations, r.residual.to_string());
  }, py::arg("f"), py::arg("horizon"), py::arg("seed") = py::none(), py::arg("params") = py::none());
  m.def("fixpoint_function", &fixpoint_function);

  m.def("run_command", [](const std::string& command, const std::vector<std::string>& texts,
                          std::optional<std::size_t> horizon, std::optional<std::size_t> bound,
                          std::optional<std::uint64_t> seed, std::optional<std::size_t> budget,
                          std::optional<std::string> net, bool machine) {
    auto v = run_command_on_text(command, texts, {horizon, bound, seed, budget, net});
    return py::make_tuple(v.exit_code, v.render(machine));
  }, py::arg("command"), py::arg("texts"), py::arg("horizon") = py::none(),
     py::arg("bound") = py::none(), py::arg("seed") = py::none(), py::arg("budget") = py::none(),
     py::arg("net") = py::none(), py::arg("machine") = false,
     "Runs a tpanet subcommand on network texts; returns (exit code, output).");
}
