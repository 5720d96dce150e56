#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swfb/capacity.hpp"
#include "swfb/channel.hpp"
#include "swfb/errors.hpp"
#include "swfb/info.hpp"
#include "swfb/regions.hpp"
#include "swfb/sim.hpp"

namespace py = pybind11;
using namespace swfb;

namespace {

RegionOptions region_options(int angles, int restarts, int u_size, std::uint64_t seed, int threads) {
  RegionOptions o;
  o.angles = angles;
  o.restarts = restarts;
  o.u_size = u_size;
  o.seed = seed;
  o.threads = threads;
  return o;
}

py::list frontier_list(const RateRegion& r) {
  py::list out;
  for (const auto& p : r.frontier) out.append(py::make_tuple(p.r1, p.r2));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rate regions and block-Markov simulation for two-way channels with switched feedforward";

  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", PyExc_RuntimeError);
  static py::exception<ResourceError> resource(m, "ResourceError", PyExc_MemoryError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const ConvergenceError& e) {
      py::object err = convergence;
      PyErr_SetObject(err.ptr(), py::make_tuple(e.what(), e.best_value(), e.gap()).ptr());
    } catch (const ResourceError& e) {
      py::set_error(resource, e.what());
    }
  });

  py::class_<MacChannel>(m, "MacChannel")
      .def(py::init<int, int, int, std::vector<double>>(), py::arg("x1_size"), py::arg("x2_size"),
           py::arg("y_size"), py::arg("transition"))
      .def_property_readonly("x1_size", &MacChannel::x1_size)
      .def_property_readonly("x2_size", &MacChannel::x2_size)
      .def_property_readonly("y_size", &MacChannel::y_size)
      .def_property_readonly("table", &MacChannel::table)
      .def("__call__", [](const MacChannel& c, int x1, int x2, int y) { return c(x1, x2, y); })
      .def("to_json", [](const MacChannel& c) { return channel_to_json(c).dump(); })
      .def_static("from_json", [](const std::string& s) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(s);
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError(e.what());
        }
        return load_channel(doc);
      })
      .def(py::self == py::self);

  m.def("binary_adder", &make_binary_adder);
  m.def("binary_xor", &make_binary_xor);
  m.def("first_input_identity", &make_first_input_identity, py::arg("size") = 2);
  m.def("example2", &build_example2, py::arg("alpha"));

  py::class_<FeedforwardProfile>(m, "FeedforwardProfile")
      .def_static("constant", &FeedforwardProfile::constant, py::arg("p"))
      .def_static("step", &FeedforwardProfile::step, py::arg("p_avg"))
      .def_static("from_blocks",
                  [](const std::vector<double>& v) { return FeedforwardProfile::from_blocks(v); },
                  py::arg("values"))
      .def("average", &FeedforwardProfile::average)
      .def("integral", &FeedforwardProfile::integral)
      .def_property_readonly("segments", [](const FeedforwardProfile& f) {
        py::list out;
        for (const auto& s : f.segments()) out.append(py::make_tuple(s.t_start, s.t_end, s.p));
        return out;
      });

  py::class_<JointOptResult>(m, "JointOptResult")
      .def_readonly("value", &JointOptResult::value)
      .def_readonly("argmax", &JointOptResult::argmax)
      .def_readonly("iterations", &JointOptResult::iterations)
      .def_readonly("gap_bound", &JointOptResult::gap_bound);
  m.def("max_joint_mi", &max_joint_mi, py::arg("channel"), py::arg("tol") = 1e-9,
        py::arg("max_iterations") = 100000);

  py::class_<TwoWayBounds>(m, "TwoWayBounds")
      .def_readonly("sum_inner", &TwoWayBounds::sum_inner)
      .def_readonly("sum_outer", &TwoWayBounds::sum_outer)
      .def_readonly("s1_inner", &TwoWayBounds::s1_inner)
      .def_readonly("s2_inner", &TwoWayBounds::s2_inner)
      .def_readonly("s1_outer", &TwoWayBounds::s1_outer)
      .def_readonly("s2_outer", &TwoWayBounds::s2_outer);
  m.def(
      "two_way_sum_bounds",
      [](const MacChannel& c, int restarts, std::uint64_t seed) {
        StructuredOptions o;
        o.restarts = restarts;
        o.seed = seed;
        return two_way_sum_bounds(c, o);
      },
      py::arg("channel"), py::arg("restarts") = 32, py::arg("seed") = 0x5EEDULL);

  m.def("class_check", [](const MacChannel& c) {
    const auto r = theorem1_class_check(c);
    return py::make_tuple(r.holds, r.holds ? std::string() : r.describe());
  });

  py::class_<RateRegion>(m, "RateRegion")
      .def_property_readonly("kind", [](const RateRegion& r) { return to_string(r.kind); })
      .def_property_readonly("frontier", &frontier_list)
      .def("contains", [](const RateRegion& r, double r1, double r2, double slack) {
             return r.contains({r1, r2}, slack);
           }, py::arg("r1"), py::arg("r2"), py::arg("slack") = 1e-9)
      .def("support", &RateRegion::support, py::arg("w1"), py::arg("w2"))
      .def("sum_rate", &RateRegion::sum_rate);

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("holds", &ConditionReport::holds)
      .def_readonly("capacity", &ConditionReport::capacity)
      .def_readonly("p_capacity", &ConditionReport::p_capacity)
      .def_readonly("h_star", &ConditionReport::h_star)
      .def_readonly("threshold", &ConditionReport::threshold)
      .def_readonly("a1", &ConditionReport::a1)
      .def_readonly("a2", &ConditionReport::a2);

  m.def("theorem1_region", [](const MacChannel& c, double p) {
    auto r = theorem1_region(c, p);
    return py::make_tuple(r.region, r.report);
  }, py::arg("channel"), py::arg("p"));
  m.def("theorem1_threshold", &theorem1_threshold, py::arg("channel"));
  m.def("prop1_outer", &prop1_outer, py::arg("channel"), py::arg("profile"));
  m.def(
      "prop2_inner",
      [](const MacChannel& c, const FeedforwardProfile& f, int angles, int restarts, int u_size,
         std::uint64_t seed, int threads) {
        return prop2_inner(c, f, region_options(angles, restarts, u_size, seed, threads));
      },
      py::arg("channel"), py::arg("profile"), py::arg("angles") = 64, py::arg("restarts") = 32,
      py::arg("u_size") = 0, py::arg("seed") = 0x5EEDULL, py::arg("threads") = 1);
  m.def(
      "corollary_region",
      [](const MacChannel& c, double p, int angles, int restarts, int u_size, std::uint64_t seed,
         int threads) {
        auto r = corollary_region(c, p, region_options(angles, restarts, u_size, seed, threads));
        return py::make_tuple(r.inner, r.outer);
      },
      py::arg("channel"), py::arg("p"), py::arg("angles") = 64, py::arg("restarts") = 32,
      py::arg("u_size") = 0, py::arg("seed") = 0x5EEDULL, py::arg("threads") = 1);
  m.def(
      "ksp_sum_capacity",
      [](const MacChannel& c, const FeedforwardProfile& f, int B, int angles, int restarts,
         int u_size, std::uint64_t seed, int threads) {
        KspOptions o;
        o.region = region_options(angles, restarts, u_size, seed, threads);
        const auto r = ksp_sum_capacity(c, f, B, o);
        py::dict d;
        d["inner"] = r.sum_value_inner;
        d["outer"] = r.sum_value_outer;
        d["tau_star"] = r.tau_star;
        std::vector<double> p_bar;
        for (const auto& b : r.per_block) p_bar.push_back(b.p_bar);
        d["p_bar"] = p_bar;
        return d;
      },
      py::arg("channel"), py::arg("profile"), py::arg("B"), py::arg("angles") = 64,
      py::arg("restarts") = 32, py::arg("u_size") = 0, py::arg("seed") = 0x5EEDULL,
      py::arg("threads") = 1);

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init<>())
      .def_readwrite("channel", &SchemeConfig::channel)
      .def_readwrite("p", &SchemeConfig::p)
      .def_readwrite("n", &SchemeConfig::n)
      .def_readwrite("B", &SchemeConfig::B)
      .def_readwrite("R1", &SchemeConfig::R1)
      .def_readwrite("R0", &SchemeConfig::R0)
      .def_readwrite("R2", &SchemeConfig::R2)
      .def_readwrite("input_dist", &SchemeConfig::input_dist)
      .def_readwrite("epsilon", &SchemeConfig::epsilon)
      .def_readwrite("seed", &SchemeConfig::seed)
      .def_readwrite("tail_fraction_x1", &SchemeConfig::tail_fraction_x1)
      .def_readwrite("tail_fraction_x2", &SchemeConfig::tail_fraction_x2)
      .def_readwrite("node_budget", &SchemeConfig::node_budget)
      .def_readwrite("threads", &SchemeConfig::threads);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("trials", &SimReport::trials)
      .def_readonly("errors", &SimReport::errors)
      .def_readonly("stage1_errors", &SimReport::stage1_errors)
      .def_readonly("stage2_errors", &SimReport::stage2_errors)
      .def_readonly("search_overflows", &SimReport::search_overflows)
      .def_readonly("atypical_truth", &SimReport::atypical_truth)
      .def_readonly("error_rate", &SimReport::error_rate)
      .def_readonly("ci_low", &SimReport::ci_low)
      .def_readonly("ci_high", &SimReport::ci_high)
      .def_readonly("effective_rate", &SimReport::effective_rate)
      .def_readonly("r0_used", &SimReport::r0_used);

  m.def("run_block_markov", &run_block_markov, py::arg("config"), py::arg("trials"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_no_feedback_baseline", &run_no_feedback_baseline, py::arg("config"), py::arg("trials"),
        py::call_guard<py::gil_scoped_release>());
  m.def("clopper_pearson", [](std::uint64_t k, std::uint64_t n, double conf) {
    const auto [lo, hi] = clopper_pearson(k, n, conf);
    return py::make_tuple(lo, hi);
  }, py::arg("errors"), py::arg("trials"), py::arg("confidence") = 0.95);
  m.def("dsbs", &dsbs, py::arg("q"));
}
