#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hpstl/error.hpp"
#include "hpstl/logic/region_compiler.hpp"
#include "hpstl/models/ctmc.hpp"
#include "hpstl/models/hybrid.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/models/queue.hpp"
#include "hpstl/stats/region.hpp"

namespace hpstl::io {

/// A loaded model configuration file.
struct ModelConfig {
    models::ModelPtr model;
    std::string kind;
    std::optional<double> horizon; // suggested sampling horizon
    logic::RegionTable regions;
    std::string hash; // FNV-1a of the file bytes, 16 hex digits
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace detail {

inline std::string where(const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.line < 0) return "";
    return " (line " + std::to_string(m.line + 1) + ")";
}

template <class T>
T get(const YAML::Node& n, const std::string& what) {
    if (!n) throw ConfigError("missing '" + what + "'");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("'" + what + "' has the wrong type" + where(n));
    }
}

template <class T>
T get_or(const YAML::Node& n, const std::string& what, T fallback) {
    return n ? get<T>(n, what) : fallback;
}

inline void check_keys(const YAML::Node& n, const std::string& what, std::initializer_list<const char*> allowed) {
    if (!n.IsMap()) throw ConfigError("'" + what + "' must be a mapping" + where(n));
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + what + where(kv.first));
    }
}

inline models::Distribution distribution(const YAML::Node& n, const std::string& what) {
    if (n.IsScalar()) return models::Constant{get<double>(n, what)};
    const auto d = get<std::string>(n["dist"], what + ".dist");
    if (d == "gaussian" || d == "normal") {
        check_keys(n, what, {"dist", "mean", "std"});
        const double sd = get<double>(n["std"], what + ".std");
        if (!(sd >= 0.0)) throw ConfigError(what + ": std must be non-negative");
        return models::Gaussian{get_or<double>(n["mean"], what + ".mean", 0.0), sd};
    }
    if (d == "uniform") {
        check_keys(n, what, {"dist", "lo", "hi"});
        const double lo = get<double>(n["lo"], what + ".lo");
        const double hi = get<double>(n["hi"], what + ".hi");
        if (!(lo <= hi)) throw ConfigError(what + ": uniform needs lo <= hi");
        return models::Uniform{lo, hi};
    }
    if (d == "constant") {
        check_keys(n, what, {"dist", "value"});
        return models::Constant{get<double>(n["value"], what + ".value")};
    }
    throw ConfigError(what + ": unknown distribution '" + d + "'");
}

inline std::size_t state_ref(const YAML::Node& n, const std::vector<std::string>& names, const std::string& what) {
    if (!n) return 0;
    std::size_t idx = 0;
    if (YAML::convert<std::size_t>::decode(n, idx)) {
        if (idx >= names.size()) throw ConfigError(what + ": state index out of range");
        return idx;
    }
    const auto s = get<std::string>(n, what);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == s) return i;
    }
    throw ConfigError(what + ": unknown state '" + s + "'");
}

inline models::ModelPtr ctmc(const YAML::Node& root) {
    check_keys(root, "ctmc config", {"kind", "states", "rates", "initial", "labels", "horizon", "regions"});
    models::CtmcConfig c;
    c.rates = get<std::vector<std::vector<double>>>(root["rates"], "rates");
    const std::size_t n = c.rates.size();
    if (root["states"]) {
        c.state_names = get<std::vector<std::string>>(root["states"], "states");
        if (c.state_names.size() != n) throw ConfigError("'states' must name every row of 'rates'");
    } else {
        for (std::size_t i = 0; i < n; ++i) c.state_names.push_back("s" + std::to_string(i));
    }
    c.initial = state_ref(root["initial"], c.state_names, "initial");
    if (const auto l = root["labels"]) {
        if (!l.IsMap()) throw ConfigError("'labels' must map state names to label lists" + where(l));
        c.labels.assign(n, {});
        for (const auto& kv : l) {
            const auto s = state_ref(kv.first, c.state_names, "labels");
            c.labels[s] = get<std::vector<std::string>>(kv.second, "labels." + kv.first.as<std::string>());
        }
    }
    return std::make_shared<models::CtmcModel>(std::move(c));
}

inline models::ModelPtr hybrid(const YAML::Node& root) {
    check_keys(root, "hybrid config", {"kind", "template", "dt", "constants", "params", "horizon", "regions"});
    const auto tmpl = get<std::string>(root["template"], "template");
    if (tmpl != "thermostat") throw ConfigError("unknown hybrid template '" + tmpl + "' (available: thermostat)");
    models::ThermostatParams tp;
    tp.dt = get_or<double>(root["dt"], "dt", tp.dt);
    if (!(tp.dt > 0.0)) throw ConfigError("dt must be positive");
    if (const auto c = root["constants"]) {
        check_keys(c, "constants", {"t_low", "t_high", "c1", "c2", "initial_temperature"});
        tp.t_low = get_or<double>(c["t_low"], "t_low", tp.t_low);
        tp.t_high = get_or<double>(c["t_high"], "t_high", tp.t_high);
        tp.c1 = get_or<double>(c["c1"], "c1", tp.c1);
        tp.c2 = get_or<double>(c["c2"], "c2", tp.c2);
        tp.initial_temperature = get_or<double>(c["initial_temperature"], "initial_temperature", tp.initial_temperature);
        if (!(tp.t_low < tp.t_high)) throw ConfigError("thermostat needs t_low < t_high");
    }
    if (const auto p = root["params"]) {
        check_keys(p, "params", {"n1", "n2"});
        if (p["n1"]) tp.n1 = distribution(p["n1"], "params.n1");
        if (p["n2"]) tp.n2 = distribution(p["n2"], "params.n2");
    }
    return std::make_shared<models::HybridModel>(models::thermostat(tp));
}

inline models::ArrivalProcess arrival(const YAML::Node& n, const std::string& what) {
    models::ArrivalProcess a;
    if (n.IsScalar()) {
        a.rates = {get<double>(n, what)};
        return a;
    }
    const auto d = get<std::string>(n["dist"], what + ".dist");
    if (d == "exponential" || d == "poisson") {
        check_keys(n, what, {"dist", "rate"});
        a.rates = {get<double>(n["rate"], what + ".rate")};
    } else if (d == "mmpp") {
        check_keys(n, what, {"dist", "rates", "switching", "initial"});
        a.rates = get<std::vector<double>>(n["rates"], what + ".rates");
        a.switching = get_or<std::vector<std::vector<double>>>(n["switching"], what + ".switching", {});
        a.initial_mode = get_or<std::size_t>(n["initial"], what + ".initial", 0);
    } else {
        throw ConfigError(what + ": unknown arrival process '" + d + "'");
    }
    return a;
}

inline models::ModelPtr queue(const YAML::Node& root) {
    check_keys(root, "queue config", {"kind", "front", "back", "horizon", "regions"});
    models::QueueConfig q;
    const auto front = root["front"];
    const auto back = root["back"];
    if (!front || !front.IsSequence() || front.size() == 0) throw ConfigError("'front' must list at least one server");
    if (!back || !back.IsSequence() || back.size() == 0) throw ConfigError("'back' must list at least one server");
    for (std::size_t i = 0; i < front.size(); ++i) {
        const auto w = "front[" + std::to_string(i) + "]";
        check_keys(front[i], w, {"arrival", "service", "buffer", "initial"});
        q.arrivals.push_back(arrival(front[i]["arrival"], w + ".arrival"));
        q.front_service.push_back(get<double>(front[i]["service"], w + ".service"));
        q.front_buffer.push_back(get<std::size_t>(front[i]["buffer"], w + ".buffer"));
        q.initial_front.push_back(get_or<std::size_t>(front[i]["initial"], w + ".initial", 0));
    }
    for (std::size_t j = 0; j < back.size(); ++j) {
        const auto w = "back[" + std::to_string(j) + "]";
        check_keys(back[j], w, {"service", "buffer", "initial"});
        q.back_service.push_back(get<double>(back[j]["service"], w + ".service"));
        q.back_buffer.push_back(get<std::size_t>(back[j]["buffer"], w + ".buffer"));
        q.initial_back.push_back(get_or<std::size_t>(back[j]["initial"], w + ".initial", 0));
    }
    return std::make_shared<models::QueueModel>(std::move(q));
}

inline std::size_t one_based(const YAML::Node& n, const std::string& what) {
    const auto v = get<std::size_t>(n, what);
    if (v < 1) throw ConfigError(what + " is 1-based");
    return v - 1;
}

inline stats::Region region(const YAML::Node& n, const std::string& name) {
    const auto what = "regions." + name;
    const auto kind = get<std::string>(n["kind"], what + ".kind");
    if (kind == "absdiff_le" || kind == "absdiff_ge") {
        check_keys(n, what, {"kind", "i", "j", "delta", "dim"});
        const auto i = one_based(n["i"], what + ".i");
        const auto j = one_based(n["j"], what + ".j");
        const auto dim = get_or<std::size_t>(n["dim"], what + ".dim", std::max(i, j) + 1);
        const auto delta = get<double>(n["delta"], what + ".delta");
        return kind == "absdiff_le" ? stats::Region::abs_diff_le(dim, i, j, delta)
                                    : stats::Region::abs_diff_ge(dim, i, j, delta);
    }
    if (kind == "box") {
        check_keys(n, what, {"kind", "intervals"});
        stats::Box box;
        for (const auto& iv : get<std::vector<std::vector<double>>>(n["intervals"], what + ".intervals")) {
            if (iv.size() != 2) throw ConfigError(what + ": each interval needs two endpoints");
            box.push_back({iv[0], iv[1]});
        }
        return stats::Region::box_product(box);
    }
    if (kind == "lower" || kind == "upper") {
        check_keys(n, what, {"kind", "p"});
        const auto p = get<double>(n["p"], what + ".p");
        return kind == "lower" ? stats::Region::lower_half_line(p) : stats::Region::upper_half_line(p);
    }
    if (kind == "halfspaces" || kind == "halfspace_union") {
        check_keys(n, what, {"kind", "dim", "constraints"});
        const auto dim = get<std::size_t>(n["dim"], what + ".dim");
        std::vector<stats::Halfspace> hs;
        const auto cs = n["constraints"];
        if (!cs || !cs.IsSequence()) throw ConfigError(what + ".constraints must be a list");
        for (const auto& c : cs) {
            check_keys(c, what + ".constraints", {"coeffs", "bound"});
            hs.push_back({get<std::vector<double>>(c["coeffs"], "coeffs"), get<double>(c["bound"], "bound")});
        }
        return kind == "halfspaces" ? stats::Region::halfspace_conj(dim, std::move(hs))
                                    : stats::Region::halfspace_union(dim, std::move(hs));
    }
    throw ConfigError(what + ": unknown region kind '" + kind + "'");
}

} // namespace detail

/// Parses a model configuration from YAML text.
inline ModelConfig load_model_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed model config: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("model config must be a mapping");
    ModelConfig mc;
    mc.hash = hex64(fnv1a(text));
    mc.kind = detail::get<std::string>(root["kind"], "kind");
    try {
        if (mc.kind == "ctmc") {
            mc.model = detail::ctmc(root);
        } else if (mc.kind == "hybrid") {
            mc.model = detail::hybrid(root);
        } else if (mc.kind == "queue") {
            mc.model = detail::queue(root);
        } else {
            throw ConfigError("unknown model kind '" + mc.kind + "' (expected ctmc, hybrid or queue)");
        }
    } catch (const ModelError& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }
    if (root["horizon"]) {
        mc.horizon = detail::get<double>(root["horizon"], "horizon");
        if (!(*mc.horizon > 0.0)) throw ConfigError("horizon must be positive");
    }
    if (const auto r = root["regions"]) {
        if (!r.IsMap()) throw ConfigError("'regions' must be a mapping");
        for (const auto& kv : r) {
            const auto name = kv.first.as<std::string>();
            try {
                mc.regions.emplace(name, detail::region(kv.second, name));
            } catch (const DomainError& e) {
                throw ConfigError("regions." + name + ": " + e.what());
            }
        }
    }
    return mc;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ModelConfig load_model(const std::string& path) { return load_model_text(read_file(path)); }

} // namespace hpstl::io
