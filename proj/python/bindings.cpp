#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "aglbp/classify.hpp"
#include "aglbp/codes.hpp"
#include "aglbp/descriptor.hpp"
#include "aglbp/error.hpp"
#include "aglbp/gradient.hpp"
#include "aglbp/image.hpp"
#include "aglbp/image_io.hpp"
#include "aglbp/mapping.hpp"
#include "aglbp/protocol.hpp"
#include "aglbp/selection.hpp"
#include "aglbp/synthetic.hpp"

namespace py = pybind11;
using namespace aglbp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("image must be a 2-D array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return GrayImage(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(std::span<const double> data, int width, int height) {
  Array out({height, width});
  std::copy(data.begin(), data.end(), out.mutable_data());
  return out;
}

Array to_array(const GrayImage& img) { return to_array(img.data(), img.width(), img.height()); }

// Margin pixels are NaN so callers cannot mistake them for measurements.
Array to_array(const ScalarField& f) {
  Array out({f.height(), f.width()});
  auto m = out.mutable_unchecked<2>();
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) m(y, x) = f.valid(x, y) ? f.at(x, y) : std::nan("");
  return out;
}

Array vec(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> from_array(const Array& a) {
  if (a.ndim() != 1) throw ShapeError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

MappingKind resolve_mapping(const std::string& mapping, DescriptorName name) {
  return mapping == "auto" ? default_mapping(name) : parse_mapping_kind(mapping);
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["accuracy"] = r.accuracy;
  d["class_labels"] = r.class_labels;
  d["per_class_accuracy"] = r.per_class_accuracy;
  d["confusion"] = r.confusion;
  d["dimension"] = r.dimension;
  d["train_count"] = r.train_count;
  d["test_count"] = r.test_count;
  d["config"] = r.config;
  py::list folds;
  for (const auto& f : r.folds) folds.append(report_dict(f));
  d["folds"] = folds;
  d["fold_mean_accuracy"] = r.fold_mean_accuracy;
  d["fold_accuracy_std"] = r.fold_accuracy_std;
  return d;
}

PipelineConfig make_config(const std::string& descriptor, double radius, int points, const std::string& mapping,
                           const std::string& normalization, const std::string& selection, double parameter,
                           const std::string& aggregation, double smoothing_sigma, std::uint64_t seed,
                           int threads) {
  PipelineConfig c;
  c.descriptor = parse_descriptor_name(descriptor);
  c.radius = radius;
  c.points = points;
  c.mapping = resolve_mapping(mapping, c.descriptor);
  c.normalization = parse_normalization(normalization);
  c.selection = parse_selection_method(selection);
  c.parameter = parameter;
  c.aggregation = parse_variance_aggregation(aggregation);
  c.extract.smoothing_sigma = smoothing_sigma;
  c.seed = seed;
  c.threads = threads;
  return c;
}

TrainingSet training_set(const std::vector<Descriptor>& descriptors, const std::vector<int>& labels) {
  return TrainingSet{descriptors, labels};
}

}  // namespace

PYBIND11_MODULE(aglbp, m) {
  m.doc() = "Affine-gradient local binary pattern texture descriptors";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<OutOfBoundsError>(m, "OutOfBoundsError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

  // Images.
  m.def("load_gray", [](const std::filesystem::path& p) { return to_array(load_gray(p)); }, py::arg("path"),
        "Load a PNG or PNM file as a float64 grayscale array of shape (height, width).");
  m.def("write_pgm", [](const std::filesystem::path& p, const Array& img) { write_pgm(p, to_image(img)); },
        py::arg("path"), py::arg("image"));
  m.def("rotate90", [](const Array& img) { return to_array(rotate90(to_image(img))); }, py::arg("image"));
  m.def("gaussian_smooth", [](const Array& img, double sigma) { return to_array(gaussian_smooth(to_image(img), sigma)); },
        py::arg("image"), py::arg("sigma"));

  py::class_<NeighborhoodSpec>(m, "NeighborhoodSpec")
      .def(py::init<double, int>(), py::arg("radius"), py::arg("points"))
      .def_property_readonly("radius", &NeighborhoodSpec::radius)
      .def_property_readonly("points", &NeighborhoodSpec::points)
      .def_property_readonly("reach", &NeighborhoodSpec::reach)
      .def_property_readonly("pipeline_margin", &NeighborhoodSpec::pipeline_margin);

  m.def("sample_circle",
        [](const Array& img, int x, int y, const NeighborhoodSpec& spec) {
          return vec(sample_circle(to_image(img), x, y, spec));
        },
        py::arg("image"), py::arg("x"), py::arg("y"), py::arg("spec"));

  // Gradient fields.
  m.def("derivatives",
        [](const Array& img, double sigma) {
          const auto d = derivatives(to_image(img), sigma);
          py::dict out;
          out["ix"] = to_array(d.ix);
          out["iy"] = to_array(d.iy);
          out["ixx"] = to_array(d.ixx);
          out["iyy"] = to_array(d.iyy);
          out["ixy"] = to_array(d.ixy);
          return out;
        },
        py::arg("image"), py::arg("smoothing_sigma") = 0.0);
  m.def("gradient_fields",
        [](const Array& img, double sigma) {
          const auto g = gradient_fields(to_image(img), sigma);
          py::dict out;
          out["eg"] = to_array(g.eg);
          out["h"] = to_array(g.h);
          out["j"] = to_array(g.j);
          out["affg_prime"] = to_array(g.affg_prime);
          return out;
        },
        py::arg("image"), py::arg("smoothing_sigma") = 0.0,
        "Euclidean gradient, H, J and the affine gradient magnitude; margin pixels are NaN.");

  // Codes and mappings.
  m.def("lbp_code", [](double c, const std::vector<double>& n) { return lbp_code(c, n).value; }, py::arg("center"),
        py::arg("neighbors"));
  m.def("reference_direction", [](double c, const std::vector<double>& n) { return reference_direction(c, n); },
        py::arg("center"), py::arg("neighbors"));
  m.def("ro_code",
        [](double c, const std::vector<double>& n, double cc, const std::vector<double>& cn) {
          return ro_code(c, n, cc, cn).value;
        },
        py::arg("center"), py::arg("neighbors"), py::arg("comparator_center"), py::arg("comparator"));
  m.def("mapping_table",
        [](const std::string& kind, int points) {
          const auto map = build_mapping(parse_mapping_kind(kind), points);
          py::array_t<std::uint32_t> table(static_cast<py::ssize_t>(map.table.size()));
          std::copy(map.table.begin(), map.table.end(), table.mutable_data());
          return py::make_tuple(table, map.bin_count);
        },
        py::arg("kind"), py::arg("points"), "Return (table, bin_count) for a code mapping.");

  // Descriptors.
  py::class_<Descriptor>(m, "Descriptor")
      .def_property_readonly("name", [](const Descriptor& d) { return to_string(d.name); })
      .def_readonly("radius", &Descriptor::radius)
      .def_readonly("points", &Descriptor::points)
      .def_property_readonly("mapping", [](const Descriptor& d) { return to_string(d.mapping); })
      .def_property_readonly("normalization", [](const Descriptor& d) { return to_string(d.normalization); })
      .def_property_readonly("blocks",
                             [](const Descriptor& d) {
                               py::list out;
                               for (const auto& b : d.blocks) out.append(vec(b.bins));
                               return out;
                             })
      .def_property_readonly("dimension", &Descriptor::dimension)
      .def("flattened", [](const Descriptor& d) { return vec(d.flattened()); })
      .def("to_csv",
           [](const Descriptor& d) {
             std::ostringstream s;
             write_descriptor_csv(s, d);
             return s.str();
           })
      .def_static("from_csv",
                  [](const std::string& text) {
                    std::istringstream s(text);
                    return read_descriptor_csv(s);
                  })
      .def("__repr__", [](const Descriptor& d) {
        return "<Descriptor " + to_string(d.name) + " dimension=" + std::to_string(d.dimension()) + ">";
      });

  m.def("extract",
        [](const Array& img, double radius, int points, const std::string& descriptor, const std::string& mapping,
           const std::string& normalization, double sigma, bool direction_from_comparator) {
          const auto name = parse_descriptor_name(descriptor);
          const NeighborhoodSpec spec(radius, points);
          const auto gray = to_image(img);
          ExtractOptions options;
          options.smoothing_sigma = sigma;
          options.direction_from_comparator = direction_from_comparator;
          py::gil_scoped_release release;
          return extract(gray, spec, name, resolve_mapping(mapping, name), parse_normalization(normalization),
                         options);
        },
        py::arg("image"), py::arg("radius") = 1.0, py::arg("points") = 8, py::arg("descriptor") = "aglbp",
        py::arg("mapping") = "auto", py::arg("normalization") = "percent", py::arg("smoothing_sigma") = 0.0,
        py::arg("direction_from_comparator") = false);

  // Feature selection.
  py::class_<FeatureMask>(m, "FeatureMask")
      .def_property_readonly("method", [](const FeatureMask& f) { return to_string(f.method); })
      .def_readonly("parameter", &FeatureMask::parameter)
      .def_readonly("kept", &FeatureMask::kept)
      .def_readonly("block_bin_counts", &FeatureMask::block_bin_counts)
      .def_property_readonly("dimension", &FeatureMask::dimension)
      .def("to_csv",
           [](const FeatureMask& f) {
             std::ostringstream s;
             write_mask_csv(s, f);
             return s.str();
           })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream s(text);
        return read_mask_csv(s);
      });

  m.def("intraclass_variance",
        [](const std::vector<Descriptor>& d, const std::vector<int>& labels, const std::string& aggregation) {
          py::list out;
          for (const auto& b : intraclass_variance(training_set(d, labels), parse_variance_aggregation(aggregation)))
            out.append(vec(b));
          return out;
        },
        py::arg("descriptors"), py::arg("labels"), py::arg("aggregation") = "mean");
  m.def("select_by_variance",
        [](const std::vector<Descriptor>& d, const std::vector<int>& labels, double phi,
           const std::string& aggregation) {
          return select_by_variance(training_set(d, labels), phi, parse_variance_aggregation(aggregation));
        },
        py::arg("descriptors"), py::arg("labels"), py::arg("phi") = 2.0, py::arg("aggregation") = "mean");
  m.def("select_top_n",
        [](const std::vector<Descriptor>& d, const std::vector<int>& labels, int n) {
          return select_top_n(training_set(d, labels), n);
        },
        py::arg("descriptors"), py::arg("labels"), py::arg("n"));
  m.def("apply_mask", &apply_mask, py::arg("descriptor"), py::arg("mask"));

  // Classification.
  m.def("chi_square", [](const Array& a, const Array& b) { return chi_square(from_array(a), from_array(b)); },
        py::arg("a"), py::arg("b"));
  m.def("nn_classify",
        [](const Descriptor& q, const std::vector<Descriptor>& gallery, const std::vector<int>& labels) {
          if (gallery.size() != labels.size()) throw ShapeError("gallery and labels differ in length");
          std::vector<LabeledDescriptor> g;
          for (std::size_t i = 0; i < gallery.size(); ++i) g.push_back({gallery[i], labels[i]});
          return nn_classify(q, g);
        },
        py::arg("query"), py::arg("gallery"), py::arg("labels"));

  m.def("run_protocol",
        [](const std::filesystem::path& train, const std::filesystem::path& test, const std::string& descriptor,
           double radius, int points, const std::string& mapping, const std::string& normalization,
           const std::string& selection, double parameter, const std::string& aggregation, double sigma,
           std::uint64_t seed, int threads) {
          const auto config = make_config(descriptor, radius, points, mapping, normalization, selection, parameter,
                                          aggregation, sigma, seed, threads);
          const auto tr = load_manifest(train);
          const auto te = load_manifest(test);
          EvalReport r;
          {
            py::gil_scoped_release release;
            r = run_protocol(tr, te, config);
          }
          return report_dict(r);
        },
        py::arg("train_manifest"), py::arg("test_manifest"), py::arg("descriptor") = "aglbp",
        py::arg("radius") = 1.0, py::arg("points") = 8, py::arg("mapping") = "auto",
        py::arg("normalization") = "percent", py::arg("selection") = "var", py::arg("parameter") = 2.0,
        py::arg("aggregation") = "mean", py::arg("smoothing_sigma") = 0.0, py::arg("seed") = 0,
        py::arg("threads") = 0, "Train on one manifest, classify another, and return the report as a dict.");

  // Synthetic images.
  auto syn = m.def_submodule("synthetic", "Deterministic test images");
  syn.def("toroidal_texture", [](int size, std::uint64_t seed) { return to_array(synthetic::toroidal_texture(size, seed)); },
          py::arg("size"), py::arg("seed"));
  syn.def("grating", [](int size, std::uint64_t seed) { return to_array(synthetic::grating(size, seed)); },
          py::arg("size"), py::arg("seed"));
  syn.def("blurred_checkerboard",
          [](int size, std::uint64_t seed) { return to_array(synthetic::blurred_checkerboard(size, seed)); },
          py::arg("size"), py::arg("seed"));
}
