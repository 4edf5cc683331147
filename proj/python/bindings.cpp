#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "verdant/dendrometry.hpp"
#include "verdant/ecoservices.hpp"
#include "verdant/engine.hpp"
#include "verdant/error.hpp"
#include "verdant/greening.hpp"
#include "verdant/json_io.hpp"
#include "verdant/routing.hpp"
#include "verdant/stats.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json from_py(const py::handle& obj) {
  const auto dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict camera_dict(const verdant::dendrometry::CameraProfile& p) {
  py::dict d;
  d["camera_constant"] = p.camera_constant;
  d["source"] = verdant::dendrometry::to_string(p.source);
  d["sensor_width_mm"] = p.sensor_width_mm;
  d["focal_length_mm"] = p.focal_length_mm;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Urban tree analytics and eco-routing engine";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&m]() { return py::object(py::exception<verdant::Error>(m, "VerdantError", PyExc_ValueError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const verdant::Error& e) {
      const py::object& type = error_type.get_stored();
      py::object inst = type(e.what());
      inst.attr("code") = std::string(verdant::code_name(e.code()));
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  py::class_<verdant::Snapshot>(m, "Snapshot")
      .def_property_readonly("n_trees", [](const verdant::Snapshot& s) { return s.trees.size(); })
      .def_property_readonly("n_segments", [](const verdant::Snapshot& s) { return s.roads.segments.size(); })
      .def_property_readonly("report", [](const verdant::Snapshot& s) { return to_py(json(s.report)); })
      .def("to_dict", [](const verdant::Snapshot& s) { return to_py(json(s)); })
      .def("__eq__", [](const verdant::Snapshot& a, const verdant::Snapshot& b) { return a == b; });

  m.def(
      "ingest",
      [](const std::filesystem::path& census, const std::filesystem::path& species, const std::filesystem::path& lst,
         const std::filesystem::path& nv, const std::filesystem::path& roads, bool nv_from_ndvi, std::string date) {
        verdant::RasterOptions opt;
        opt.nv_from_ndvi = nv_from_ndvi;
        opt.timestamp = std::move(date);
        return verdant::ingest({census, species, lst, nv, roads}, opt);
      },
      py::arg("census"), py::arg("species"), py::arg("lst"), py::arg("nv"), py::arg("roads"),
      py::arg("nv_from_ndvi") = false, py::arg("date") = "");
  m.def("load_snapshot", &verdant::load_snapshot, py::arg("path"));
  m.def("save_snapshot", &verdant::save_snapshot, py::arg("snapshot"), py::arg("path"));

  py::class_<verdant::Engine>(m, "Engine")
      .def(py::init([](const verdant::Snapshot& s) { return std::make_unique<verdant::Engine>(s); }),
           py::arg("snapshot"))
      .def("route", [](const verdant::Engine& e, py::dict req) { return to_py(e.route(from_py(req))); })
      .def("loop", [](const verdant::Engine& e, py::dict req) { return to_py(e.loop(from_py(req))); })
      .def("simulate", [](const verdant::Engine& e, py::dict req) { return to_py(e.simulate(from_py(req))); })
      .def("segment", [](const verdant::Engine& e, const std::string& id) { return to_py(e.segment(id)); })
      .def("archetypes", [](const verdant::Engine& e) { return to_py(e.archetypes()); })
      .def("replace_snapshot", &verdant::Engine::replace_snapshot, py::arg("snapshot"))
      .def("write_metrics_csv",
           [](const verdant::Engine& e, const std::filesystem::path& p) { verdant::write_metrics_csv(*e.model(), p); })
      .def("write_scores_csv",
           [](const verdant::Engine& e, const std::filesystem::path& p) { verdant::write_scores_csv(*e.model(), p); });

  m.def("measure", [](py::dict req) { return to_py(verdant::measure(from_py(req))); }, py::arg("request"));

  m.def(
      "camera_constant_from_exif",
      [](std::optional<double> f, std::optional<double> f35, std::optional<double> ws) {
        return camera_dict(verdant::dendrometry::camera_constant_from_exif(f, f35, ws));
      },
      py::arg("focal_length_mm") = py::none(), py::arg("focal_35mm_equiv") = py::none(),
      py::arg("sensor_width_mm") = py::none());
  m.def(
      "camera_constant_from_calibration",
      [](double w, double d, double span, int image_w) {
        return camera_dict(verdant::dendrometry::camera_constant_from_calibration(w, d, span, image_w));
      },
      py::arg("ref_width_m"), py::arg("ref_distance_m"), py::arg("ref_span_px"), py::arg("image_width_px"));
  m.def(
      "scale_factor",
      [](double c, double d, int w) {
        verdant::dendrometry::MeasurementContext ctx;
        ctx.profile.camera_constant = c;
        ctx.distance_to_object_m = d;
        ctx.image_width_px = w;
        return verdant::dendrometry::scale_factor(ctx);
      },
      py::arg("camera_constant"), py::arg("distance_m"), py::arg("image_width_px"));

  m.def(
      "compute_agb",
      [](double girth_cm, double height_m, double wood_density) {
        verdant::TreeRecord t;
        t.girth_cm = girth_cm;
        t.height_m = height_m;
        return verdant::eco::compute_agb(t, {"", wood_density});
      },
      py::arg("girth_cm"), py::arg("height_m"), py::arg("wood_density"));
  m.def(
      "agb_to_co2e",
      [](double agb) {
        const auto r = verdant::eco::agb_to_co2e(agb);
        py::dict d;
        d["agb_kg"] = r.agb_kg;
        d["total_biomass_kg"] = r.total_biomass_kg;
        d["carbon_kg"] = r.carbon_kg;
        d["co2e_kg"] = r.co2e_kg;
        return d;
      },
      py::arg("agb_kg"));

  m.def(
      "percentile", [](std::vector<double> v, double p) { return verdant::stats::percentile(v, p); },
      py::arg("values"), py::arg("p"));
  m.def(
      "quantile_transform", [](std::vector<double> v) { return verdant::stats::quantile_transform(v); },
      py::arg("values"));

  m.def(
      "emissions_factor",
      [](double v, double k1, double k2, double k3) { return verdant::routing::emissions_factor({k1, k2, k3}, v); },
      py::arg("speed_kmh"), py::arg("k1") = 120.0, py::arg("k2") = 600.0, py::arg("k3") = 0.005);
  m.def(
      "optimal_speed",
      [](double k1, double k2, double k3) { return verdant::routing::optimal_speed({k1, k2, k3}); },
      py::arg("k1") = 120.0, py::arg("k2") = 600.0, py::arg("k3") = 0.005);

  m.def(
      "hex_pack",
      [](const std::vector<std::pair<double, double>>& polygon, double spacing) {
        verdant::Ring ring;
        for (const auto& [x, y] : polygon) ring.push_back({x, y});
        std::vector<std::pair<double, double>> out;
        for (const auto& p : verdant::greening::hex_pack(ring, spacing)) out.emplace_back(p.x, p.y);
        return out;
      },
      py::arg("polygon"), py::arg("spacing_m"));
}
