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

#include "fapt/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fapt
{

    namespace
    {
        // The full key vocabulary. Commands ignore sections they do not use but
        // every key in a file must be spelled from this list.
        const std::set<std::string>& known_keys()
        {
            static const std::set<std::string> keys = {
                // scenario
                "carrier_freq_ghz", "ports_z", "ports_y", "aperture_y", "aperture_z", "bs_ny",
                "bs_nz", "bs_spacing_y", "bs_spacing_z", "n_paths", "ricean_k", "delay_spread_ns",
                "slot_ms", "group_len", "sampling_slot_max", "speed_min_kmh", "speed_max_kmh",
                "cluster_spread_deg", "t_past", "f_future", "csi_delay_slots", "freq_offset_hz",
                "seed", "angle_tuples",
                // model
                "d_model", "n_heads", "n_layers", "d_hidden", "lora_rank", "prompt_enabled",
                "prompt_len", "dtype", "model_seed",
                // training
                "alpha_min", "alpha_max", "warmup_epochs", "total_epochs", "batch_train",
                "batch_test", "beta1", "beta2", "adam_eps", "grad_clip", "train_seed", "split",
                // benchmark
                "bench_n_ue", "bench_trials_se", "bench_trials_nmse", "bench_speeds_kmh",
                "bench_bs_arrays", "snr_grid"};
            return keys;
        }

        std::string trim(const std::string& s)
        {
            std::size_t b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return "";
            std::size_t e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split_on(const std::string& s, char sep)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, sep))
                out.push_back(trim(item));
            return out;
        }

        std::vector<double> parse_double_list(const std::string& s, const std::string& key)
        {
            std::vector<double> out;
            for (const std::string& tok : split_on(s, ','))
            {
                if (tok.empty())
                    continue;
                try
                {
                    std::size_t pos = 0;
                    out.push_back(std::stod(tok, &pos));
                    if (pos != tok.size())
                        throw std::invalid_argument(tok);
                }
                catch (const std::exception&)
                {
                    throw ConfigError("config: bad number '" + tok + "' in " + key);
                }
            }
            return out;
        }
    } // namespace

    KvConfig KvConfig::from_string(const std::string& text)
    {
        KvConfig cfg;
        std::stringstream ss(text);
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line))
        {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#')
                continue;
            std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config: line " + std::to_string(lineno) +
                                  " is not key=value: " + t);
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (!known_keys().count(key))
                throw ConfigError("config: unknown key '" + key + "'");
            cfg.kv_[key] = value;
        }
        return cfg;
    }

    KvConfig KvConfig::from_file(const std::string& path)
    {
        std::ifstream is(path);
        if (!is)
            throw ConfigError("config: cannot open " + path);
        std::stringstream ss;
        ss << is.rdbuf();
        return from_string(ss.str());
    }

    double KvConfig::get_double(const std::string& key, double dflt) const
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        try
        {
            std::size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size())
                throw std::invalid_argument(it->second);
            return v;
        }
        catch (const std::exception&)
        {
            throw ConfigError("config: bad number for " + key + ": " + it->second);
        }
    }

    int KvConfig::get_int(const std::string& key, int dflt) const
    {
        double v = get_double(key, static_cast<double>(dflt));
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ConfigError("config: expected integer for " + key);
        return i;
    }

    std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t dflt) const
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        try
        {
            return std::stoull(it->second);
        }
        catch (const std::exception&)
        {
            throw ConfigError("config: bad unsigned integer for " + key + ": " + it->second);
        }
    }

    bool KvConfig::get_bool(const std::string& key, bool dflt) const
    {
        auto it = kv_.find(key);
        if (it == kv_.end())
            return dflt;
        const std::string& v = it->second;
        if (v == "1" || v == "true" || v == "yes" || v == "on")
            return true;
        if (v == "0" || v == "false" || v == "no" || v == "off")
            return false;
        throw ConfigError("config: bad boolean for " + key + ": " + v);
    }

    std::string KvConfig::get_string(const std::string& key, const std::string& dflt) const
    {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }

    ScenarioConfig scenario_from_config(const KvConfig& cfg)
    {
        ScenarioConfig sc;
        sc.carrier_freq_hz = cfg.get_double("carrier_freq_ghz", 39.0) * 1e9;
        sc.grid.n_ports_z = cfg.get_int("ports_z", 20);
        sc.grid.n_ports_y = cfg.get_int("ports_y", 10);
        sc.grid.w_y = cfg.get_double("aperture_y", 1.8);
        sc.grid.w_z = cfg.get_double("aperture_z", 3.8);
        sc.geom.n_y = cfg.get_int("bs_ny", 1);
        sc.geom.n_z = cfg.get_int("bs_nz", 1);
        sc.geom.d_ty = cfg.get_double("bs_spacing_y", 0.5);
        sc.geom.d_tz = cfg.get_double("bs_spacing_z", 0.5);
        sc.n_paths = cfg.get_int("n_paths", 4);
        sc.ricean_k = cfg.get_double("ricean_k", 10.0);
        sc.rms_delay_spread_s = cfg.get_double("delay_spread_ns", 616.0) * 1e-9;
        sc.slot_duration_s = cfg.get_double("slot_ms", 1.0) * 1e-3;
        sc.group_len_slots = cfg.get_int("group_len", 50);
        sc.sampling_slot_max = cfg.get_int("sampling_slot_max", 10);
        sc.speed_min_mps = cfg.get_double("speed_min_kmh", 90.0) / 3.6;
        sc.speed_max_mps = cfg.get_double("speed_max_kmh", 150.0) / 3.6;
        sc.cluster_spread_deg = cfg.get_double("cluster_spread_deg", 5.0);
        sc.t_past = cfg.get_int("t_past", 8);
        sc.f_future = cfg.get_int("f_future", 8);
        sc.csi_delay_slots = cfg.get_int("csi_delay_slots", 4);
        sc.freq_offset_hz = cfg.get_double("freq_offset_hz", 0.0);
        sc.seed = cfg.get_u64("seed", 1);

        if (cfg.has("angle_tuples"))
        {
            sc.angle_tuples_deg.clear();
            for (const std::string& tuple : split_on(cfg.get_string("angle_tuples", ""), ';'))
            {
                if (tuple.empty())
                    continue;
                std::vector<double> vals = parse_double_list(tuple, "angle_tuples");
                if (vals.size() != 4)
                    throw ConfigError("config: each angle tuple needs 4 values");
                sc.angle_tuples_deg.push_back({vals[0], vals[1], vals[2], vals[3]});
            }
            if (sc.angle_tuples_deg.empty())
                throw ConfigError("config: angle_tuples is empty");
        }

        try
        {
            sc.validate();
        }
        catch (const std::invalid_argument& e)
        {
            throw ConfigError(e.what());
        }
        return sc;
    }

    ModelConfig model_from_config(const KvConfig& cfg)
    {
        ModelConfig mc;
        mc.d_model = cfg.get_int("d_model", 64);
        mc.n_heads = cfg.get_int("n_heads", 4);
        mc.n_layers = cfg.get_int("n_layers", 2);
        mc.d_hidden = cfg.get_int("d_hidden", 256);
        mc.lora_rank = cfg.get_int("lora_rank", 4);
        mc.prompt_enabled = cfg.get_bool("prompt_enabled", false);
        mc.prompt_len = cfg.get_int("prompt_len", 32);
        std::string dt = cfg.get_string("dtype", "f64");
        if (dt == "f32")
            mc.dtype = Dtype::f32;
        else if (dt == "f64")
            mc.dtype = Dtype::f64;
        else
            throw ConfigError("config: dtype must be f32 or f64");
        mc.init_seed = cfg.get_u64("model_seed", 42);
        return mc;
    }

    TrainConfig train_from_config(const KvConfig& cfg)
    {
        TrainConfig tc;
        tc.alpha_min = cfg.get_double("alpha_min", 4e-6);
        tc.alpha_max = cfg.get_double("alpha_max", 1e-3);
        tc.warmup_epochs = cfg.get_int("warmup_epochs", 100);
        tc.total_epochs = cfg.get_int("total_epochs", 600);
        tc.batch_train = cfg.get_int("batch_train", 200);
        tc.batch_test = cfg.get_int("batch_test", 200);
        tc.beta1 = cfg.get_double("beta1", 0.9);
        tc.beta2 = cfg.get_double("beta2", 0.99);
        tc.adam_eps = cfg.get_double("adam_eps", 1e-8);
        tc.grad_clip = cfg.get_double("grad_clip", 0.0);
        tc.seed = cfg.get_u64("train_seed", 1);
        return tc;
    }

    BenchConfig bench_from_config(const KvConfig& cfg)
    {
        BenchConfig bc;
        bc.n_ue = cfg.get_int("bench_n_ue", 10);
        bc.trials_se = cfg.get_int("bench_trials_se", 200);
        bc.trials_nmse = cfg.get_int("bench_trials_nmse", 8);
        if (cfg.has("bench_speeds_kmh"))
            bc.speeds_kmh = parse_double_list(cfg.get_string("bench_speeds_kmh", ""),
                                              "bench_speeds_kmh");
        if (cfg.has("snr_grid"))
            bc.snr_grid_db = parse_double_list(cfg.get_string("snr_grid", ""), "snr_grid");
        if (cfg.has("bench_bs_arrays"))
        {
            bc.bs_arrays.clear();
            for (const std::string& tok :
                 split_on(cfg.get_string("bench_bs_arrays", ""), ','))
            {
                if (tok.empty())
                    continue;
                std::size_t x = tok.find('x');
                if (x == std::string::npos)
                    throw ConfigError("config: bs array must look like 2x8: " + tok);
                bc.bs_arrays.emplace_back(std::stoi(tok.substr(0, x)),
                                          std::stoi(tok.substr(x + 1)));
            }
        }
        if (bc.speeds_kmh.empty() || bc.snr_grid_db.empty() || bc.bs_arrays.empty())
            throw ConfigError("config: empty benchmark grid");
        return bc;
    }

    std::string canonical_config_dump(const KvConfig& cfg)
    {
        std::string out;
        for (const auto& [k, v] : cfg.entries()) // std::map iterates sorted
            out += k + "=" + v + "\n";
        return out;
    }

    std::uint64_t config_hash(const std::string& canonical_dump)
    {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : canonical_dump)
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

} // namespace fapt
