// SPDX-License-Identifier: Apache-2.0
//
// fapt - fluid antenna port prediction toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fapt/channel.hpp"
#include "fapt/checkpoint.hpp"
#include "fapt/config.hpp"
#include "fapt/dataset_io.hpp"
#include "fapt/miso.hpp"
#include "fapt/neural_predictor.hpp"
#include "fapt/port_select.hpp"
#include "fapt/prony.hpp"
#include "fapt/train.hpp"

namespace py = pybind11;
using namespace fapt;

namespace
{
    using CArr = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

    CxTable table_from_numpy(const CArr& arr)
    {
        if (arr.ndim() != 2)
            throw std::invalid_argument("expected a 2-D complex array");
        CxTable t(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
        std::copy_n(arr.data(), t.size(), t.a.begin());
        return t;
    }

    CxSeries series_from_numpy(const CArr& arr)
    {
        if (arr.ndim() != 3)
            throw std::invalid_argument("expected a 3-D complex array");
        CxSeries s(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                   static_cast<int>(arr.shape(2)));
        std::copy_n(arr.data(), s.a.size(), s.a.begin());
        return s;
    }

    py::array series_to_numpy(const CxSeries& s)
    {
        py::array_t<std::complex<double>> out({s.steps, s.rows, s.cols});
        std::copy(s.a.begin(), s.a.end(), out.mutable_data());
        return out;
    }

    py::array table_to_numpy(const CxTable& t)
    {
        py::array_t<std::complex<double>> out({t.rows, t.cols});
        std::copy(t.a.begin(), t.a.end(), out.mutable_data());
        return out;
    }

    std::vector<CxTable> stack_from_numpy(const CArr& arr)
    {
        if (arr.ndim() != 3)
            throw std::invalid_argument("expected a 3-D complex array");
        std::vector<CxTable> stack;
        int n = static_cast<int>(arr.shape(0));
        int rows = static_cast<int>(arr.shape(1));
        int cols = static_cast<int>(arr.shape(2));
        for (int i = 0; i < n; ++i)
        {
            CxTable t(rows, cols);
            std::copy_n(arr.data() + static_cast<std::size_t>(i) * t.size(), t.size(),
                        t.a.begin());
            stack.push_back(std::move(t));
        }
        return stack;
    }
} // namespace

PYBIND11_MODULE(_fapt, m)
{
    m.doc() = "fluid antenna port prediction toolkit";
    m.attr("__version__") = "0.1.0";

    py::class_<ArrayGeometry>(m, "ArrayGeometry")
        .def(py::init<>())
        .def(py::init([](int n_y, int n_z, double d_ty, double d_tz) {
                 ArrayGeometry g{n_y, n_z, d_ty, d_tz};
                 g.validate();
                 return g;
             }),
             py::arg("n_y"), py::arg("n_z"), py::arg("d_ty") = 0.5, py::arg("d_tz") = 0.5)
        .def_readwrite("n_y", &ArrayGeometry::n_y)
        .def_readwrite("n_z", &ArrayGeometry::n_z)
        .def_readwrite("d_ty", &ArrayGeometry::d_ty)
        .def_readwrite("d_tz", &ArrayGeometry::d_tz)
        .def("n_elements", &ArrayGeometry::n_elements);

    py::class_<PortGrid>(m, "PortGrid")
        .def(py::init<>())
        .def(py::init([](int n, int ml, double wy, double wz) {
                 PortGrid g{n, ml, wy, wz};
                 g.validate();
                 return g;
             }),
             py::arg("n_ports_z"), py::arg("n_ports_y"), py::arg("w_y"), py::arg("w_z"))
        .def_readwrite("n_ports_z", &PortGrid::n_ports_z)
        .def_readwrite("n_ports_y", &PortGrid::n_ports_y)
        .def_readwrite("w_y", &PortGrid::w_y)
        .def_readwrite("w_z", &PortGrid::w_z)
        .def("spacing_y_m", &PortGrid::spacing_y_m)
        .def("spacing_z_m", &PortGrid::spacing_z_m);

    py::class_<PortIndex>(m, "PortIndex")
        .def_readonly("n", &PortIndex::n)
        .def_readonly("m", &PortIndex::m)
        .def_readonly("flat", &PortIndex::flat)
        .def("__repr__", [](const PortIndex& p) {
            return "PortIndex(n=" + std::to_string(p.n) + ", m=" + std::to_string(p.m) +
                   ", flat=" + std::to_string(p.flat) + ")";
        });

    m.def("flat_to_port", &flat_to_port, py::arg("p"), py::arg("n_rows"), py::arg("n_cols"));

    m.def(
        "select_port",
        [](const CArr& pred, const CArr& ref) {
            return select_port_single(table_from_numpy(pred), table_from_numpy(ref));
        },
        py::arg("pred"), py::arg("ref"));

    m.def(
        "select_port_miso",
        [](const CArr& pred, const CArr& ref) {
            return select_port_miso(stack_from_numpy(pred), stack_from_numpy(ref));
        },
        py::arg("pred_stack"), py::arg("ref_stack"));

    m.def(
        "validation_nmse",
        [](const std::vector<std::complex<double>>& h,
           const std::vector<std::complex<double>>& h_ref) { return validation_nmse(h, h_ref); },
        py::arg("h"), py::arg("h_ref"));

    m.def(
        "table_accuracy",
        [](const CArr& pred, const CArr& truth) {
            return table_accuracy(series_from_numpy(pred), series_from_numpy(truth));
        },
        py::arg("pred"), py::arg("truth"));

    m.def(
        "nmse_loss",
        [](const CArr& pred, const CArr& truth) {
            return nmse_loss(series_from_numpy(pred), series_from_numpy(truth));
        },
        py::arg("pred"), py::arg("truth"));

    m.def(
        "lr_at_epoch",
        [](int t, double alpha_min, double alpha_max, int warmup, int total) {
            TrainConfig cfg;
            cfg.alpha_min = alpha_min;
            cfg.alpha_max = alpha_max;
            cfg.warmup_epochs = warmup;
            cfg.total_epochs = total;
            return lr_at_epoch(t, cfg);
        },
        py::arg("t"), py::arg("alpha_min") = 4e-6, py::arg("alpha_max") = 1e-3,
        py::arg("warmup_epochs") = 100, py::arg("total_epochs") = 600);

    m.def(
        "channel_table",
        [](int i, double t, double carrier_ghz, double ricean_k,
           const std::vector<std::array<double, 4>>& paths_deg,
           const std::vector<double>& delays, const ArrayGeometry& geom, const PortGrid& grid) {
            // paths_deg rows: [phi_aod, theta_eod, phi_aoa, theta_eoa] degrees,
            // first row the LoS path.
            PathSet ps;
            ps.ricean_k = ricean_k;
            ps.carrier_lambda = kSpeedOfLight / (carrier_ghz * 1e9);
            if (paths_deg.empty() || paths_deg.size() != delays.size())
                throw std::invalid_argument("paths and delays must align and be non-empty");
            double total = 0.0;
            for (double d : delays)
                total += std::exp(-d / 616e-9);
            for (std::size_t p = 0; p < paths_deg.size(); ++p)
            {
                Path path;
                path.phi_aod = paths_deg[p][0] * kPi / 180.0;
                path.theta_eod = paths_deg[p][1] * kPi / 180.0;
                path.phi_aoa = paths_deg[p][2] * kPi / 180.0;
                path.theta_eoa = paths_deg[p][3] * kPi / 180.0;
                canonicalize_angles(path.theta_eod, path.phi_aod);
                canonicalize_angles(path.theta_eoa, path.phi_aoa);
                path.tau = delays[p];
                path.is_los = p == 0;
                path.beta = std::sqrt(std::exp(-delays[p] / 616e-9) / total);
                ps.paths.push_back(path);
            }
            return table_to_numpy(channel_table(i, t, ps, geom, grid));
        },
        py::arg("antenna"), py::arg("t"), py::arg("carrier_ghz"), py::arg("ricean_k"),
        py::arg("paths_deg"), py::arg("delays"), py::arg("geom"), py::arg("grid"));

    m.def(
        "gen_dataset",
        [](const std::string& config_text, int samples, const std::string& out_path) {
            KvConfig kv = KvConfig::from_string(config_text);
            ScenarioConfig sc = scenario_from_config(kv);
            Dataset ds = generate_samples(sc, samples);
            write_dataset(out_path, ds);
            return ds.samples.size();
        },
        py::arg("config_text"), py::arg("samples"), py::arg("out_path"));

    m.def(
        "read_dataset",
        [](const std::string& path) {
            Dataset ds = read_dataset(path);
            py::list samples;
            for (const SampleRecord& rec : ds.samples)
            {
                py::dict d;
                d["past"] = series_to_numpy(rec.past);
                d["future"] = series_to_numpy(rec.future);
                d["reference"] = series_to_numpy(rec.reference);
                d["ue_id"] = rec.meta.ue_id;
                d["speed_mps"] = rec.meta.speed_mps;
                d["t0_slot"] = rec.meta.t0_slot;
                d["seed"] = rec.meta.seed;
                samples.append(d);
            }
            py::dict out;
            out["t_past"] = ds.t_past;
            out["f_future"] = ds.f_future;
            out["n_rows"] = ds.n_rows;
            out["m_cols"] = ds.m_cols;
            out["samples"] = samples;
            return out;
        },
        py::arg("path"));

    m.def(
        "vec_prony_predict",
        [](const CArr& history, int order, int steps) {
            if (history.ndim() != 2)
                throw std::invalid_argument("expected a 2-D (time x components) array");
            std::vector<std::vector<cxd>> hist(static_cast<std::size_t>(history.shape(0)));
            std::size_t d = static_cast<std::size_t>(history.shape(1));
            for (py::ssize_t t = 0; t < history.shape(0); ++t)
                hist[static_cast<std::size_t>(t)].assign(
                    history.data() + static_cast<std::size_t>(t) * d,
                    history.data() + static_cast<std::size_t>(t + 1) * d);
            PronyModel model = vec_prony_fit(hist, order);
            auto pred = vec_prony_predict(model, hist, steps);
            py::array_t<std::complex<double>> out(
                {static_cast<py::ssize_t>(steps), static_cast<py::ssize_t>(d)});
            for (int s = 0; s < steps; ++s)
                std::copy(pred[static_cast<std::size_t>(s)].begin(),
                          pred[static_cast<std::size_t>(s)].end(),
                          out.mutable_data() + static_cast<std::size_t>(s) * d);
            return out;
        },
        py::arg("history"), py::arg("order") = 2, py::arg("steps") = 8);

    m.def(
        "hold_last_predict",
        [](const CArr& history, int steps) {
            return series_to_numpy(hold_last_predict(series_from_numpy(history), steps));
        },
        py::arg("history"), py::arg("steps"));

    m.def(
        "ezf_precoder",
        [](const CArr& h_rows) {
            if (h_rows.ndim() != 2)
                throw std::invalid_argument("expected a 2-D (users x antennas) array");
            std::vector<std::vector<cxd>> h(static_cast<std::size_t>(h_rows.shape(0)));
            std::size_t n_t = static_cast<std::size_t>(h_rows.shape(1));
            for (py::ssize_t u = 0; u < h_rows.shape(0); ++u)
                h[static_cast<std::size_t>(u)].assign(
                    h_rows.data() + static_cast<std::size_t>(u) * n_t,
                    h_rows.data() + static_cast<std::size_t>(u + 1) * n_t);
            auto w = ezf_precoder(h);
            py::array_t<std::complex<double>> out({h_rows.shape(0), h_rows.shape(1)});
            for (std::size_t u = 0; u < w.size(); ++u)
                std::copy(w[u].begin(), w[u].end(), out.mutable_data() + u * n_t);
            return out;
        },
        py::arg("h_rows"));

    m.def(
        "sinr_and_se",
        [](const CArr& h_rows, const CArr& w_rows, double snr_db) {
            std::vector<std::vector<cxd>> h(static_cast<std::size_t>(h_rows.shape(0)));
            std::vector<std::vector<cxd>> w(static_cast<std::size_t>(w_rows.shape(0)));
            std::size_t n_t = static_cast<std::size_t>(h_rows.shape(1));
            for (py::ssize_t u = 0; u < h_rows.shape(0); ++u)
            {
                h[static_cast<std::size_t>(u)].assign(
                    h_rows.data() + static_cast<std::size_t>(u) * n_t,
                    h_rows.data() + static_cast<std::size_t>(u + 1) * n_t);
                w[static_cast<std::size_t>(u)].assign(
                    w_rows.data() + static_cast<std::size_t>(u) * n_t,
                    w_rows.data() + static_cast<std::size_t>(u + 1) * n_t);
            }
            return sinr_and_se(h, w, snr_db);
        },
        py::arg("h_rows"), py::arg("w_rows"), py::arg("snr_db"));

    py::class_<PortLLM>(m, "Model")
        .def_static("load", &load_checkpoint, py::arg("path"))
        .def(
            "predict",
            [](PortLLM& self, const CArr& past) {
                return series_to_numpy(self.forward(series_from_numpy(past), false).pred);
            },
            py::arg("past"))
        .def_property_readonly("trainable_params", &PortLLM::trainable_param_count)
        .def_property_readonly("total_params", &PortLLM::total_param_count)
        .def_property_readonly("horizon", [](const PortLLM& m) { return m.config().f_out; })
        .def_property_readonly("prompt_enabled",
                               [](const PortLLM& m) { return m.config().prompt_enabled; });
}
