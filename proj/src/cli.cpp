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

#include "fapt/cli.hpp"

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "fapt/checkpoint.hpp"
#include "fapt/config.hpp"
#include "fapt/dataset_io.hpp"
#include "fapt/neural_predictor.hpp"
#include "fapt/report_io.hpp"
#include "fapt/train.hpp"

namespace fapt
{

    namespace
    {
        constexpr const char* kVersion = "0.1.0";

        using Clock = std::chrono::steady_clock;

        double seconds_since(Clock::time_point t0)
        {
            return std::chrono::duration<double>(Clock::now() - t0).count();
        }

        struct GenDataArgs
        {
            std::string config_path;
            std::string out_path;
            int samples = 2000;
            std::uint64_t seed = 0;
            bool seed_set = false;
        };

        int cmd_gen_data(const GenDataArgs& args)
        {
            auto t0 = Clock::now();
            KvConfig kv = KvConfig::from_file(args.config_path);
            ScenarioConfig sc = scenario_from_config(kv);
            if (args.seed_set)
                sc.seed = args.seed;
            if (args.samples < 2)
                throw ConfigError("gen-data: need at least 2 samples");

            Dataset ds = generate_samples(sc, args.samples);
            write_dataset(args.out_path, ds);

            std::cout << "wrote " << ds.samples.size() << " samples (T=" << ds.t_past
                      << " F=" << ds.f_future << " N=" << ds.n_rows << " M=" << ds.m_cols
                      << ") to " << args.out_path << "\n";

            RunManifest mf;
            mf.command = "gen-data";
            mf.tool_version = kVersion;
            mf.seed = sc.seed;
            mf.config_hash = config_hash(canonical_config_dump(kv) +
                                         "samples=" + std::to_string(args.samples) + "\n" +
                                         "seed=" + std::to_string(sc.seed) + "\n");
            mf.outputs = {args.out_path};
            mf.duration_seconds = seconds_since(t0);
            write_manifest(args.out_path + ".manifest.json", mf);
            return 0;
        }

        struct TrainArgs
        {
            std::string config_path;
            std::string data_path;
            std::string out_path;
            std::string report_path;
            int epochs = 0; // 0 keeps the config value
            int rank = 0;
            bool prompt = false;
            std::uint64_t seed = 0;
            bool seed_set = false;
            double split = 0.75;
            int log_every = 10;
        };

        int cmd_train(const TrainArgs& args)
        {
            auto t0 = Clock::now();
            KvConfig kv =
                args.config_path.empty() ? KvConfig::from_string("")
                                         : KvConfig::from_file(args.config_path);
            ModelConfig mc = model_from_config(kv);
            TrainConfig tc = train_from_config(kv);
            if (args.epochs > 0)
            {
                tc.total_epochs = args.epochs;
                if (tc.warmup_epochs >= tc.total_epochs)
                    tc.warmup_epochs = std::max(1, tc.total_epochs / 6);
            }
            if (args.rank > 0)
                mc.lora_rank = args.rank;
            if (args.prompt)
                mc.prompt_enabled = true;
            if (args.seed_set)
            {
                tc.seed = args.seed;
                mc.init_seed = mix_seed(args.seed, 0x6d6f64ull);
            }

            Dataset all = read_dataset(args.data_path);
            if (all.samples.size() < 2)
                throw ConfigError("train: dataset has fewer than 2 samples");
            mc.t_in = static_cast<int>(all.t_past);
            mc.f_out = static_cast<int>(all.f_future);
            mc.n_rows = static_cast<int>(all.n_rows);
            mc.m_cols = static_cast<int>(all.m_cols);
            try
            {
                mc.validate();
            }
            catch (const std::invalid_argument& e)
            {
                throw ConfigError(std::string("train: dataset/model shapes disagree: ") +
                                  e.what());
            }

            auto [train_set, test_set] = split_dataset(std::move(all), args.split, tc.seed);

            PortLLM model(mc);
            std::cout << "model: d_model=" << mc.d_model << " layers=" << mc.n_layers
                      << " heads=" << mc.n_heads << " rank=" << mc.lora_rank
                      << " prompt=" << (mc.prompt_enabled ? "on" : "off") << "\n";
            std::cout << "parameters: trainable=" << model.trainable_param_count()
                      << " total=" << model.total_param_count() << "\n";
            std::cout << "samples: train=" << train_set.samples.size()
                      << " test=" << test_set.samples.size() << "\n";

            TrainReport report =
                train(model, train_set, test_set, tc, [&](const EpochRow& row) {
                    if (args.log_every > 0 &&
                        (row.epoch % args.log_every == 0 || row.epoch + 1 == tc.total_epochs))
                        std::cout << "epoch " << row.epoch << " lr=" << row.lr
                                  << " train=" << row.train_nmse_db << " dB"
                                  << " test=" << row.test_nmse_db << " dB"
                                  << " acc=" << row.accuracy_pct << "%"
                                  << " nmse_v=" << row.validation_nmse_db << " dB\n";
                });

            save_checkpoint(args.out_path, model);
            std::string report_path =
                args.report_path.empty() ? args.out_path + ".train.csv" : args.report_path;
            write_train_report_csv(report_path, report);
            std::cout << "checkpoint: " << args.out_path << "\nreport: " << report_path << "\n";

            RunManifest mf;
            mf.command = "train";
            mf.tool_version = kVersion;
            mf.seed = tc.seed;
            mf.config_hash = config_hash(canonical_config_dump(kv) +
                                         "epochs=" + std::to_string(tc.total_epochs) + "\n" +
                                         "rank=" + std::to_string(mc.lora_rank) + "\n" +
                                         "prompt=" + std::to_string(mc.prompt_enabled) + "\n");
            mf.outputs = {args.out_path, report_path};
            mf.duration_seconds = seconds_since(t0);
            write_manifest(args.out_path + ".manifest.json", mf);
            return 0;
        }

        struct EvalArgs
        {
            std::string ckpt_path;
            std::string data_path;
            std::string out_path;
        };

        int cmd_eval(const EvalArgs& args)
        {
            auto t0 = Clock::now();
            PortLLM model = load_checkpoint(args.ckpt_path);
            Dataset ds = read_dataset(args.data_path);
            if (ds.samples.empty())
                throw ConfigError("eval: dataset is empty");
            if (static_cast<int>(ds.t_past) != model.config().t_in ||
                static_cast<int>(ds.f_future) != model.config().f_out ||
                static_cast<int>(ds.n_rows) != model.config().n_rows ||
                static_cast<int>(ds.m_cols) != model.config().m_cols)
                throw ConfigError(
                    "eval: checkpoint and dataset shapes disagree (ckpt " +
                    std::to_string(model.config().t_in) + "x" +
                    std::to_string(model.config().n_rows) + "x" +
                    std::to_string(model.config().m_cols) + ", data " +
                    std::to_string(ds.t_past) + "x" + std::to_string(ds.n_rows) + "x" +
                    std::to_string(ds.m_cols) + ")");

            std::vector<EvalRow> rows;
            rows.reserve(ds.samples.size());
            double sum_acc = 0.0, sum_nmse = 0.0, sum_val = 0.0;
            for (std::size_t i = 0; i < ds.samples.size(); ++i)
            {
                EvalMetrics m = evaluate_sample(model, ds.samples[i]);
                EvalRow row;
                row.sample = static_cast<int>(i);
                row.accuracy_pct = m.accuracy_pct;
                row.nmse_db = m.nmse > 0 ? 10.0 * std::log10(m.nmse)
                                         : -std::numeric_limits<double>::infinity();
                row.validation_nmse_db = m.validation_ratio > 0
                                             ? 10.0 * std::log10(m.validation_ratio)
                                             : -std::numeric_limits<double>::infinity();
                rows.push_back(row);
                sum_acc += m.accuracy_pct;
                sum_nmse += m.nmse;
                sum_val += m.validation_ratio;
            }

            // Wall-clock latency of a single forward, averaged over a bounded
            // number of repeats.
            std::size_t reps = std::min<std::size_t>(ds.samples.size(), 32);
            auto lat0 = Clock::now();
            for (std::size_t i = 0; i < reps; ++i)
                model.forward(ds.samples[i].past, false);
            double latency_ms = seconds_since(lat0) * 1000.0 / static_cast<double>(reps);

            double n = static_cast<double>(ds.samples.size());
            double mean_nmse_db = 10.0 * std::log10(sum_nmse / n);
            double mean_val_db = 10.0 * std::log10(sum_val / n);
            write_eval_csv(args.out_path, rows, sum_acc / n, mean_nmse_db, mean_val_db,
                           latency_ms);

            std::cout << "accuracy=" << sum_acc / n << "% nmse=" << mean_nmse_db
                      << " dB nmse_v=" << mean_val_db << " dB latency=" << latency_ms << " ms\n";

            RunManifest mf;
            mf.command = "eval";
            mf.tool_version = kVersion;
            mf.config_hash = 0;
            mf.outputs = {args.out_path};
            mf.duration_seconds = seconds_since(t0);
            write_manifest(args.out_path + ".manifest.json", mf);
            return 0;
        }

        struct BenchArgs
        {
            std::string config_path;
            std::vector<std::string> ckpt_paths;
            std::string out_dir;
            std::vector<double> speeds;
            std::string bs_arrays;
            std::vector<double> snr_grid;
            std::uint64_t seed = 0;
            bool seed_set = false;
        };

        int cmd_bench(const BenchArgs& args)
        {
            auto t0 = Clock::now();
            KvConfig kv =
                args.config_path.empty() ? KvConfig::from_string("")
                                         : KvConfig::from_file(args.config_path);
            ScenarioConfig sc = scenario_from_config(kv);
            BenchConfig bc = bench_from_config(kv);
            if (!args.speeds.empty())
                bc.speeds_kmh = args.speeds;
            if (!args.snr_grid.empty())
                bc.snr_grid_db = args.snr_grid;
            if (!args.bs_arrays.empty())
            {
                bc.bs_arrays.clear();
                std::stringstream ss(args.bs_arrays);
                std::string tok;
                while (std::getline(ss, tok, ','))
                {
                    std::size_t x = tok.find('x');
                    if (x == std::string::npos)
                        throw ConfigError("bench: bs array must look like 2x8: " + tok);
                    bc.bs_arrays.emplace_back(std::stoi(tok.substr(0, x)),
                                              std::stoi(tok.substr(x + 1)));
                }
            }
            if (args.seed_set)
                sc.seed = args.seed;

            // Load the neural checkpoints; a missing file is skipped loudly.
            std::vector<PortLLM> models;
            std::vector<std::string> model_names;
            for (const std::string& path : args.ckpt_paths)
            {
                try
                {
                    PortLLM m = load_checkpoint(path);
                    if (m.config().t_in != sc.t_past || m.config().f_out != sc.f_future ||
                        m.config().n_rows != sc.grid.n_ports_z ||
                        m.config().m_cols != sc.grid.n_ports_y)
                        throw ConfigError("checkpoint grid/horizon mismatch");
                    std::string label =
                        models.empty() ? "port-llm" : "port-llm-" + std::to_string(models.size());
                    model_names.push_back(label);
                    models.push_back(std::move(m));
                }
                catch (const std::exception& e)
                {
                    std::cerr << "warning: skipping checkpoint " << path << ": " << e.what()
                              << "\n";
                }
            }
            if (!args.ckpt_paths.empty() && models.empty())
            {
                std::cerr << "error: no usable checkpoint among the " << args.ckpt_paths.size()
                          << " given\n";
                return 1;
            }

            auto factory = [&]() {
                std::vector<std::unique_ptr<Predictor>> preds;
                for (std::size_t i = 0; i < models.size(); ++i)
                    preds.push_back(std::make_unique<NeuralPredictor>(models[i], model_names[i]));
                preds.push_back(std::make_unique<VecPronyPredictor>(2));
                preds.push_back(std::make_unique<HoldLastPredictor>());
                return preds;
            };

            std::filesystem::create_directories(args.out_dir);

            // Per-horizon NMSE over the speed and BS-array grids.
            std::vector<HorizonRow> horizon;
            for (double speed_kmh : bc.speeds_kmh)
                for (auto [ny, nz] : bc.bs_arrays)
                {
                    MisoScenario ms;
                    ms.n_ue = bc.n_ue;
                    ms.base = sc;
                    ms.base.geom = ArrayGeometry{ny, nz, sc.geom.d_ty, sc.geom.d_tz};
                    ms.speed_mps = speed_kmh / 3.6;
                    ms.snr_db = bc.snr_grid_db;
                    ms.n_trials = bc.trials_nmse;
                    ms.seed = sc.seed;
                    auto rows = nmse_horizon_bench(ms, factory);
                    horizon.insert(horizon.end(), rows.begin(), rows.end());
                }
            std::string horizon_path = args.out_dir + "/nmse_horizon.csv";
            write_horizon_csv(horizon_path, horizon);

            // Spectral efficiency at the first BS array per speed.
            SEReport se_all;
            for (double speed_kmh : bc.speeds_kmh)
            {
                MisoScenario ms;
                ms.n_ue = bc.n_ue;
                ms.base = sc;
                ms.base.geom = ArrayGeometry{bc.bs_arrays.front().first,
                                             bc.bs_arrays.front().second, sc.geom.d_ty,
                                             sc.geom.d_tz};
                ms.speed_mps = speed_kmh / 3.6;
                ms.snr_db = bc.snr_grid_db;
                ms.n_trials = bc.trials_se;
                ms.seed = sc.seed;
                SEReport rep = run_benchmark(ms, factory);
                for (SERow& r : rep.rows)
                {
                    r.condition = r.condition + "@" + std::to_string(static_cast<int>(speed_kmh)) +
                                  "kmh";
                    se_all.rows.push_back(r);
                }
            }
            std::string se_path = args.out_dir + "/se.csv";
            write_se_csv(se_path, se_all);

            std::cout << "horizon NMSE: " << horizon_path << "\nspectral efficiency: " << se_path
                      << "\n";

            RunManifest mf;
            mf.command = "bench";
            mf.tool_version = kVersion;
            mf.seed = sc.seed;
            mf.config_hash = config_hash(canonical_config_dump(kv));
            mf.outputs = {horizon_path, se_path};
            mf.duration_seconds = seconds_since(t0);
            write_manifest(args.out_dir + "/bench.manifest.json", mf);
            return 0;
        }
    } // namespace

    int cli_run(const std::vector<std::string>& args)
    {
        CLI::App app{"fluid antenna port prediction toolkit"};
        app.set_version_flag("--version", kVersion);
        app.require_subcommand(1);

        GenDataArgs gen;
        CLI::App* gen_cmd = app.add_subcommand(
            "gen-data", "Synthesize a channel-table dataset (key=value config; keys include "
                        "carrier_freq_ghz, ports_z, ports_y, aperture_y, aperture_z, n_paths, "
                        "ricean_k, delay_spread_ns, slot_ms, group_len, sampling_slot_max, "
                        "speed_min_kmh, speed_max_kmh, cluster_spread_deg, t_past, f_future, "
                        "csi_delay_slots, seed, angle_tuples)");
        gen_cmd->add_option("--config", gen.config_path, "key=value scenario config")->required();
        gen_cmd->add_option("--out", gen.out_path, "output dataset path")->required();
        gen_cmd->add_option("--samples", gen.samples, "number of samples (default 2000)");
        gen_cmd->add_option("--seed", gen.seed, "override the config seed")
            ->each([&](const std::string&) { gen.seed_set = true; });

        TrainArgs tr;
        CLI::App* train_cmd = app.add_subcommand(
            "train", "Train the port prediction model (config keys: d_model, n_heads, n_layers, "
                     "d_hidden, lora_rank, prompt_enabled, prompt_len, dtype, model_seed, "
                     "alpha_min, alpha_max, warmup_epochs, total_epochs, batch_train, batch_test, "
                     "beta1, beta2, adam_eps, grad_clip, train_seed, split)");
        train_cmd->add_option("--config", tr.config_path, "key=value model/train config");
        train_cmd->add_option("--data", tr.data_path, "input dataset")->required();
        train_cmd->add_option("--out", tr.out_path, "output checkpoint path")->required();
        train_cmd->add_option("--report", tr.report_path,
                              "training report CSV (default <out>.train.csv)");
        train_cmd->add_option("--epochs", tr.epochs, "override total epochs");
        train_cmd->add_option("--rank", tr.rank, "override the adapter rank");
        train_cmd->add_flag("--prompt", tr.prompt, "enable the prompt-conditioned variant");
        train_cmd->add_option("--seed", tr.seed, "override the training seed")
            ->each([&](const std::string&) { tr.seed_set = true; });
        train_cmd->add_option("--split", tr.split, "train fraction (default 0.75)");
        train_cmd->add_option("--log-every", tr.log_every, "epoch logging stride");

        EvalArgs ev;
        CLI::App* eval_cmd =
            app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
        eval_cmd->add_option("--ckpt", ev.ckpt_path, "model checkpoint")->required();
        eval_cmd->add_option("--data", ev.data_path, "dataset to evaluate")->required();
        eval_cmd->add_option("--out", ev.out_path, "metrics CSV path")->required();

        BenchArgs be;
        CLI::App* bench_cmd = app.add_subcommand(
            "bench", "Benchmark predictors over speeds and BS arrays (config keys: bench_n_ue, "
                     "bench_trials_se, bench_trials_nmse, bench_speeds_kmh, bench_bs_arrays, "
                     "snr_grid plus the scenario keys)");
        bench_cmd->add_option("--config", be.config_path, "key=value scenario/bench config");
        bench_cmd->add_option("--ckpt", be.ckpt_paths, "model checkpoint (repeatable)");
        bench_cmd->add_option("--out-dir", be.out_dir, "output directory")->required();
        bench_cmd->add_option("--speed", be.speeds, "speed grid in km/h (repeatable)");
        bench_cmd->add_option("--bs-array", be.bs_arrays, "BS arrays, e.g. 2x8,8x8");
        bench_cmd->add_option("--snr-grid", be.snr_grid, "SNR grid in dB (repeatable)");
        bench_cmd->add_option("--seed", be.seed, "override the scenario seed")
            ->each([&](const std::string&) { be.seed_set = true; });

        std::vector<std::string> rargs(args.rbegin(), args.rend());
        try
        {
            app.parse(rargs);
        }
        catch (const CLI::ParseError& e)
        {
            int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        try
        {
            if (gen_cmd->parsed())
                return cmd_gen_data(gen);
            if (train_cmd->parsed())
                return cmd_train(tr);
            if (eval_cmd->parsed())
                return cmd_eval(ev);
            if (bench_cmd->parsed())
                return cmd_bench(be);
        }
        catch (const ConfigError& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        catch (const std::invalid_argument& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        catch (const std::exception& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        return 2;
    }

    int cli_main(int argc, char** argv)
    {
        std::vector<std::string> args;
        for (int i = 1; i < argc; ++i)
            args.emplace_back(argv[i]);
        return cli_run(args);
    }

} // namespace fapt
