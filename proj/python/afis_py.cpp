#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "afis/enrollstore.hpp"
#include "afis/error.hpp"
#include "afis/evalkit.hpp"
#include "afis/matcher.hpp"
#include "afis/minutiae.hpp"
#include "afis/preprocess.hpp"
#include "afis/raster.hpp"
#include "afis/template.hpp"

namespace py = pybind11;
using namespace afis;

PYBIND11_MODULE(_afis, m) {
    m.doc() = "Minutiae extraction, compact templates and matching.";

    py::register_exception<Error>(m, "AfisError", PyExc_RuntimeError);

    py::class_<RasterImage>(m, "RasterImage")
        .def_property_readonly("width", &RasterImage::width)
        .def_property_readonly("height", &RasterImage::height)
        .def("pixel", [](const RasterImage& img, int x, int y) {
            const Pixel& p = img.at(x, y);
            return py::make_tuple(p.r, p.g, p.b);
        })
        .def("to_bytes", [](const RasterImage& img, bool color) {
            return py::bytes(save_image(img, color ? ImageFormat::P3 : ImageFormat::P2FromLuma));
        }, py::arg("color") = true)
        .def(py::self == py::self);

    m.def("load_image", [](py::bytes data) { return load_image(std::string(data)); }, "Decode P2/P3/P5/P6 bytes.");
    m.def("read_image", &read_image_file, py::arg("path"));

    py::class_<PreprocessConfig>(m, "PreprocessConfig")
        .def(py::init<>())
        .def_readwrite("threshold", &PreprocessConfig::threshold)
        .def_readwrite("ridge_thickness", &PreprocessConfig::ridge_thickness)
        .def_readwrite("shape_radius", &PreprocessConfig::shape_radius);

    m.def("stage_densities", [](const RasterImage& img, const PreprocessConfig& cfg) {
        StageImages st = run_pipeline(img, cfg);
        return intensity_profile(std::vector<BinaryImage>(st.begin(), st.end()), img);
    }, py::arg("image"), py::arg("config") = PreprocessConfig{},
       "Dark-pixel fraction of the input, then black density of each stage.");

    py::enum_<MinutiaKind>(m, "MinutiaKind")
        .value("Ending", MinutiaKind::Ending)
        .value("Bifurcation", MinutiaKind::Bifurcation);

    py::class_<Minutia>(m, "Minutia")
        .def(py::init([](int x, int y, MinutiaKind k) { return Minutia{x, y, k}; }), py::arg("x"), py::arg("y"),
             py::arg("kind") = MinutiaKind::Ending)
        .def_readwrite("x", &Minutia::x)
        .def_readwrite("y", &Minutia::y)
        .def_readwrite("kind", &Minutia::kind)
        .def(py::self == py::self)
        .def("__repr__", [](const Minutia& p) {
            return "Minutia(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", '" + kind_code(p.kind) + "')";
        });

    py::class_<Region>(m, "Region")
        .def(py::init([](int x0, int y0, int x1, int y1) { return Region{x0, y0, x1, y1}; }))
        .def_readonly("x0", &Region::x0)
        .def_readonly("y0", &Region::y0)
        .def_readonly("x1", &Region::x1)
        .def_readonly("y1", &Region::y1);

    py::enum_<DistanceMode>(m, "DistanceMode")
        .value("PaperFaithful", DistanceMode::PaperFaithful)
        .value("Canonical", DistanceMode::Canonical);

    m.def("raster_distance", &raster_distance, py::arg("a"), py::arg("b"), py::arg("width"),
          py::arg("mode") = DistanceMode::PaperFaithful);

    py::class_<Template>(m, "Template")
        .def_readonly("width", &Template::width)
        .def_readonly("height", &Template::height)
        .def_readonly("region", &Template::region)
        .def_readonly("mode", &Template::mode)
        .def_readonly("minutiae", &Template::minutiae)
        .def_property_readonly("distances", [](const Template& t) {
            std::vector<std::tuple<std::uint32_t, std::uint32_t, std::int64_t>> out;
            for (const auto& c : t.correlations)
                out.emplace_back(c.i, c.j, c.distance);
            return out;
        })
        .def("__len__", &Template::size)
        .def(py::self == py::self);

    m.def("build_template", &build_template, py::arg("points"), py::arg("width"), py::arg("height"), py::arg("region"),
          py::arg("mode") = DistanceMode::PaperFaithful);
    m.def("serialize", [](const Template& t) { return py::bytes(serialize(t)); });
    m.def("parse", [](py::bytes data) { return parse(std::string(data)); });

    py::class_<EnrollConfig>(m, "EnrollConfig")
        .def(py::init<>())
        .def_readwrite("preprocess", &EnrollConfig::preprocess)
        .def_readwrite("region_fraction", &EnrollConfig::region_fraction)
        .def_readwrite("mode", &EnrollConfig::mode);

    m.def("make_template", &make_template, py::arg("image"), py::arg("config") = EnrollConfig{});

    py::class_<MatchConfig>(m, "MatchConfig")
        .def(py::init<>())
        .def_readwrite("distance_tolerance", &MatchConfig::distance_tolerance)
        .def_readwrite("signature_fraction", &MatchConfig::signature_fraction)
        .def_readwrite("decision_threshold", &MatchConfig::decision_threshold);

    py::class_<MatchResult>(m, "MatchResult")
        .def_readonly("matched", &MatchResult::matched)
        .def_readonly("n_a", &MatchResult::n_a)
        .def_readonly("n_b", &MatchResult::n_b)
        .def_readonly("eq", &MatchResult::eq)
        .def_readonly("pairs", &MatchResult::pairs)
        .def_readonly("width_mismatch", &MatchResult::width_mismatch)
        .def_property_readonly("accepted", [](const MatchResult& r) { return r.decision == Decision::Accept; })
        .def("__repr__", [](const MatchResult& r) { return "MatchResult(" + match_csv_row(r) + ")"; });

    m.def("match", &match_templates, py::arg("a"), py::arg("b"), py::arg("config") = MatchConfig{});

    py::class_<EnrollmentRecord>(m, "EnrollmentRecord")
        .def_readonly("subject", &EnrollmentRecord::subject)
        .def_readonly("template_path", &EnrollmentRecord::template_path)
        .def_readonly("created", &EnrollmentRecord::created)
        .def_readonly("source_image_bytes", &EnrollmentRecord::source_image_bytes)
        .def_readonly("template_bytes", &EnrollmentRecord::template_bytes);

    py::class_<EnrollStore>(m, "EnrollStore")
        .def(py::init<std::filesystem::path>(), py::arg("directory"))
        .def("enroll", [](EnrollStore& s, const std::string& id, const RasterImage& img, const EnrollConfig& cfg,
                          bool overwrite) { return s.enroll(SubjectId(id), img, cfg, overwrite); },
             py::arg("subject"), py::arg("image"), py::arg("config") = EnrollConfig{}, py::arg("overwrite") = false)
        .def("verify", [](const EnrollStore& s, const std::string& id, const RasterImage& probe,
                          const MatchConfig& cfg) { return s.verify(SubjectId(id), probe, cfg); },
             py::arg("subject"), py::arg("probe"), py::arg("config") = MatchConfig{})
        .def("subjects", &EnrollStore::list_subjects)
        .def("delete", [](EnrollStore& s, const std::string& id) { return s.delete_subject(SubjectId(id)); });

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_readonly("image_id", &GroundTruth::image_id)
        .def_readonly("points", &GroundTruth::points);

    py::class_<EvalRow>(m, "EvalRow")
        .def(py::init([](std::int64_t contained, std::int64_t false_pos, std::int64_t dropped, std::int64_t correct) {
                 return EvalRow{contained, correct + false_pos, dropped, false_pos, correct};
             }),
             py::arg("contained"), py::arg("false_pos"), py::arg("dropped"), py::arg("correct"))
        .def_readonly("contained", &EvalRow::contained)
        .def_readonly("selected", &EvalRow::selected)
        .def_readonly("dropped", &EvalRow::dropped)
        .def_readonly("false_pos", &EvalRow::false_pos)
        .def_readonly("correct", &EvalRow::correct);

    m.def("score_detection", [](const std::vector<Minutia>& detected, const std::vector<Minutia>& truth, double radius) {
        return score_detection(detected, GroundTruth{"", truth}, radius);
    }, py::arg("detected"), py::arg("truth"), py::arg("match_radius") = kDefaultMatchRadius);

    m.def("percentages", [](const EvalRow& row) {
        const PercentRow p = percentages(row);
        return py::make_tuple(p.false_pct.str(), p.drop_pct.str(), p.correct_pct.str());
    }, "(false, drop, correct) as two-decimal strings");

    m.def("synth_fingerprint", [](std::uint64_t seed, int width, int height, int ridge_period, int n_endings,
                                  int n_bifurcations, double noise_rate) {
        SynthParams p{seed, width, height, ridge_period, n_endings, n_bifurcations, noise_rate};
        SynthFingerprint f = synth_fingerprint(p);
        return py::make_tuple(std::move(f.image), std::move(f.truth));
    }, py::arg("seed") = 1, py::arg("width") = 300, py::arg("height") = 300, py::arg("ridge_period") = 8,
       py::arg("n_endings") = 6, py::arg("n_bifurcations") = 4, py::arg("noise_rate") = 0.0);

    m.def("second_impression", &second_impression, py::arg("image"), py::arg("dx"), py::arg("dy"),
          py::arg("noise_rate") = 0.0, py::arg("seed") = 1);
}
