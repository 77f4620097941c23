#include "agile_afdm/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace agile_afdm::harness {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// Reads fields out of one JSON object and remembers which keys were used.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
    }

    [[noreturn]] static void fail(const std::string& field, const std::string& what) {
        throw ConfigError("config error at '" + field + "': " + what);
    }

    std::string at(const std::string& key) const { return join(path_, key); }

    const json* find(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void get(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) fail(at(key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out)) fail(at(key), "must be finite");
        }
    }

    void get(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0)) {
                fail(at(key), "expected a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void get(const std::string& key, std::uint64_t& out, bool) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) fail(at(key), "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void get(const std::string& key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) fail(at(key), "expected an integer");
            out = v->get<int>();
        }
    }

    void get(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) fail(at(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void get(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) fail(at(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void get(const std::string& key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) fail(at(key), "expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                const json& e = (*v)[i];
                if (!e.is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back(e.get<double>());
            }
        }
    }

    // nullptr when the section is absent
    const json* section(const std::string& key) { return find(key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) fail(at(it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) Reader::fail(field, what);
}

// Runs a library validate() and re-labels its error with the section path.
template <class F>
void validated(const std::string& path, F&& f) {
    try {
        f();
    } catch (const InvalidArgument& e) {
        Reader::fail(path, e.what());
    }
}

void read_modulation(const json& j, Modulation& m) {
    Reader r(j, "modulation");
    r.get("kind", m.kind);
    r.get("qam_order", m.qam_order);
    r.finish();
    require(m.kind == "gaussian" || m.kind == "qam", "modulation.kind", "must be 'gaussian' or 'qam'");
    if (m.kind == "qam") {
        const int side = static_cast<int>(std::lround(std::sqrt(double(m.qam_order))));
        require(m.qam_order >= 4 && side * side == m.qam_order, "modulation.qam_order",
                "must be a square number >= 4");
    }
}

void check_subcarriers(std::size_t n, const std::string& field) {
    require(n >= 2 && n % 2 == 0, field, "must be a positive even integer");
}

void read_papr(const json& j, PaprSection& s) {
    Reader r(j, "papr");
    r.get("subcarriers", s.subcarriers);
    r.get("users", s.users);
    r.get("oversample", s.oversample);
    r.get("blocks", s.blocks);
    r.get("coarse_step", s.coarse_step);
    r.get("fine_step", s.fine_step);
    r.get("eval_budget", s.eval_budget);
    r.get("static_c2", s.static_c2);
    r.get("clipping_ratio", s.clipping_ratio);
    r.get("slm_candidates", s.slm_candidates);
    r.get("pts_subblocks", s.pts_subblocks);
    r.get("pts_alphabet", s.pts_alphabet);
    r.get("ccdf_step_db", s.ccdf_step_db);
    r.finish();
    check_subcarriers(s.subcarriers, "papr.subcarriers");
    require(s.users >= 1 && s.subcarriers % s.users == 0, "papr.users", "must divide papr.subcarriers");
    check_subcarriers(s.subcarriers / s.users, "papr.users");
    require(s.oversample >= 1, "papr.oversample", "must be >= 1");
    require(s.blocks >= 1, "papr.blocks", "must be >= 1");
    require(s.eval_budget >= s.users, "papr.eval_budget", "must allow at least one evaluation per user");
    require(s.pts_alphabet == "bpsk" || s.pts_alphabet == "qpsk", "papr.pts_alphabet",
            "must be 'bpsk' or 'qpsk'");
    require(s.ccdf_step_db > 0.0, "papr.ccdf_step_db", "must be > 0");
    require(s.clipping_ratio > 1.0, "papr.clipping_ratio", "must be > 1");
    require(s.slm_candidates >= 1, "papr.slm_candidates", "must be >= 1");
    require(s.pts_subblocks >= 1 && (s.subcarriers / s.users) % s.pts_subblocks == 0,
            "papr.pts_subblocks", "must divide the per-user block length");
    validated("papr", [&] {
        PaprSearchConfig pc{s.coarse_step, s.fine_step, s.eval_budget / s.users};
        pc.validate();
    });
}

void read_adam(const json& j, AdamConfig& a) {
    Reader r(j, "sir.optimizer.adam");
    r.get("alpha", a.alpha);
    r.get("beta1", a.beta1);
    r.get("beta2", a.beta2);
    r.get("eps", a.eps);
    r.finish();
}

void read_channel(const json& j, ChannelSection& c) {
    Reader r(j, "sir.channel");
    r.get("delays", c.delays);
    r.get("dopplers", c.dopplers);
    r.get("tap_values", c.tap_values);
    r.get("tap_law", c.tap_law);
    r.get("prefix", c.prefix);
    r.finish();
    require(!c.delays.empty(), "sir.channel.delays", "at least one path required");
    require(c.dopplers.size() == c.delays.size(), "sir.channel.dopplers", "length must match delays");
    require(c.tap_values.size() == c.delays.size(), "sir.channel.tap_values", "length must match delays");
    for (std::size_t i = 0; i < c.delays.size(); ++i) {
        const std::string f = "sir.channel.delays[" + std::to_string(i) + "]";
        require(c.delays[i] >= 0.0 && c.delays[i] == std::floor(c.delays[i]), f,
                "must be a non-negative integer");
        require(c.delays[i] < double(c.prefix), f, "must be below sir.channel.prefix");
        require(c.tap_values[i] >= 0.0, "sir.channel.tap_values[" + std::to_string(i) + "]", "must be >= 0");
    }
    require(c.tap_law == "power" || c.tap_law == "amplitude", "sir.channel.tap_law",
            "must be 'power' or 'amplitude'");
}

void read_sir(const json& j, SirSection& s) {
    Reader r(j, "sir");
    r.get("subcarriers", s.subcarriers);
    if (const json* c = r.section("channel")) read_channel(*c, s.channel);
    r.get("blocks", s.blocks);
    r.get("realizations", s.realizations);
    r.get("grid", s.grid);
    r.get("delta", s.delta);
    if (const json* o = r.section("optimizer")) {
        Reader ro(*o, "sir.optimizer");
        auto& oc = s.optimizer;
        ro.get("blocks_c1", oc.blocks_c1);
        ro.get("blocks_c2", oc.blocks_c2);
        ro.get("eps_con", oc.eps_con);
        ro.get("max_iters", oc.max_iters);
        ro.get("grad_step", oc.grad_step);
        ro.get("keep_best_iterate", oc.keep_best_iterate);
        ro.get("track_best_visited", oc.track_best_visited);
        if (const json* a = ro.section("adam")) read_adam(*a, oc.adam);
        ro.finish();
    }
    r.finish();
    check_subcarriers(s.subcarriers, "sir.subcarriers");
    require(s.blocks >= 1, "sir.blocks", "must be >= 1");
    require(s.realizations >= 1, "sir.realizations", "must be >= 1");
    require(s.grid >= 1, "sir.grid", "must be >= 1");
    require(s.delta > 0.0, "sir.delta", "must be > 0");
    validated("sir.optimizer", [&] { s.optimizer.validate(); });
}

void read_pso(const json& j, PsoConfig& p) {
    Reader r(j, "crlb.pso");
    r.get("particles", p.particles);
    r.get("max_iters", p.max_iters);
    r.get("w0", p.w0);
    r.get("wf", p.wf);
    r.get("phi_c", p.phi_c);
    r.get("phi_s", p.phi_s);
    r.get("eps_con", p.eps_con);
    r.get("lo", p.lo);
    r.get("hi", p.hi);
    r.get("patience", p.patience);
    r.finish();
}

void read_crlb(const json& j, CrlbSection& s) {
    Reader r(j, "crlb");
    r.get("subcarriers", s.subcarriers);
    r.get("snr_db", s.snr_db);
    r.get("delays", s.delays);
    r.get("dopplers", s.dopplers);
    r.get("realizations", s.realizations);
    r.get("grid", s.grid);
    if (const json* p = r.section("pso")) read_pso(*p, s.pso);
    r.finish();
    check_subcarriers(s.subcarriers, "crlb.subcarriers");
    require(!s.delays.empty(), "crlb.delays", "must not be empty");
    require(!s.dopplers.empty(), "crlb.dopplers", "must not be empty");
    for (std::size_t i = 0; i < s.delays.size(); ++i) {
        require(std::isfinite(s.delays[i]), "crlb.delays[" + std::to_string(i) + "]", "must be finite");
    }
    require(s.realizations >= 1, "crlb.realizations", "must be >= 1");
    require(s.grid >= 1, "crlb.grid", "must be >= 1");
    validated("crlb.pso", [&] { s.pso.validate(); });
}

void read_sensitivity(const json& j, SensitivitySection& s) {
    Reader r(j, "sensitivity");
    r.get("subcarriers", s.subcarriers);
    r.get("snr_db", s.snr_db);
    r.get("delay", s.delay);
    r.get("doppler", s.doppler);
    r.get("trials", s.trials);
    r.get("grid", s.grid);
    r.finish();
    check_subcarriers(s.subcarriers, "sensitivity.subcarriers");
    require(s.trials >= 1, "sensitivity.trials", "must be >= 1");
    require(s.grid >= 2, "sensitivity.grid", "must be >= 2");
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::Papr: return "papr";
    case ExperimentKind::Sir: return "sir";
    case ExperimentKind::Crlb: return "crlb";
    case ExperimentKind::Sensitivity: return "sensitivity";
    }
    return "?";
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "papr") return ExperimentKind::Papr;
    if (s == "sir") return ExperimentKind::Sir;
    if (s == "crlb") return ExperimentKind::Crlb;
    if (s == "sensitivity") return ExperimentKind::Sensitivity;
    throw ConfigError("unknown experiment kind '" + s + "' (papr | sir | crlb | sensitivity)");
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    Reader r(j, "");
    std::string kind;
    r.get("experiment", kind);
    if (kind.empty()) Reader::fail("experiment", "required (papr | sir | crlb | sensitivity)");
    try {
        cfg.kind = parse_kind(kind);
    } catch (const ConfigError& e) {
        Reader::fail("experiment", e.what());
    }
    r.get("seed", cfg.seed, true);
    r.get("output", cfg.output);
    if (const json* m = r.section("modulation")) read_modulation(*m, cfg.modulation);
    if (const json* s = r.section("papr")) read_papr(*s, cfg.papr);
    if (const json* s = r.section("sir")) read_sir(*s, cfg.sir);
    if (const json* s = r.section("crlb")) read_crlb(*s, cfg.crlb);
    if (const json* s = r.section("sensitivity")) read_sensitivity(*s, cfg.sensitivity);
    r.finish();
    // defaults of sections that were not given are valid by construction
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.kind);
    j["seed"] = cfg.seed;
    j["output"] = cfg.output;
    j["modulation"] = {{"kind", cfg.modulation.kind}, {"qam_order", cfg.modulation.qam_order}};
    switch (cfg.kind) {
    case ExperimentKind::Papr: {
        const auto& s = cfg.papr;
        j["papr"] = {{"subcarriers", s.subcarriers},     {"users", s.users},
                     {"oversample", s.oversample},       {"blocks", s.blocks},
                     {"coarse_step", s.coarse_step},     {"fine_step", s.fine_step},
                     {"eval_budget", s.eval_budget},     {"static_c2", s.static_c2},
                     {"clipping_ratio", s.clipping_ratio}, {"slm_candidates", s.slm_candidates},
                     {"pts_subblocks", s.pts_subblocks}, {"pts_alphabet", s.pts_alphabet},
                     {"ccdf_step_db", s.ccdf_step_db}};
        break;
    }
    case ExperimentKind::Sir: {
        const auto& s = cfg.sir;
        const auto& o = s.optimizer;
        j["sir"] = {
            {"subcarriers", s.subcarriers},
            {"channel",
             {{"delays", s.channel.delays},
              {"dopplers", s.channel.dopplers},
              {"tap_values", s.channel.tap_values},
              {"tap_law", s.channel.tap_law},
              {"prefix", s.channel.prefix}}},
            {"blocks", s.blocks},
            {"realizations", s.realizations},
            {"grid", s.grid},
            {"delta", s.delta},
            {"optimizer",
             {{"blocks_c1", o.blocks_c1},
              {"blocks_c2", o.blocks_c2},
              {"eps_con", o.eps_con},
              {"max_iters", o.max_iters},
              {"grad_step", o.grad_step},
              {"keep_best_iterate", o.keep_best_iterate},
              {"track_best_visited", o.track_best_visited},
              {"adam",
               {{"alpha", o.adam.alpha}, {"beta1", o.adam.beta1}, {"beta2", o.adam.beta2}, {"eps", o.adam.eps}}}}}};
        break;
    }
    case ExperimentKind::Crlb: {
        const auto& s = cfg.crlb;
        const auto& p = s.pso;
        j["crlb"] = {{"subcarriers", s.subcarriers},
                     {"snr_db", s.snr_db},
                     {"delays", s.delays},
                     {"dopplers", s.dopplers},
                     {"realizations", s.realizations},
                     {"grid", s.grid},
                     {"pso",
                      {{"particles", p.particles},
                       {"max_iters", p.max_iters},
                       {"w0", p.w0},
                       {"wf", p.wf},
                       {"phi_c", p.phi_c},
                       {"phi_s", p.phi_s},
                       {"eps_con", p.eps_con},
                       {"lo", p.lo},
                       {"hi", p.hi},
                       {"patience", p.patience}}}};
        break;
    }
    case ExperimentKind::Sensitivity: {
        const auto& s = cfg.sensitivity;
        j["sensitivity"] = {{"subcarriers", s.subcarriers}, {"snr_db", s.snr_db}, {"delay", s.delay},
                            {"doppler", s.doppler},         {"trials", s.trials}, {"grid", s.grid}};
        break;
    }
    }
    return j;
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.output = "results/" + to_string(kind);
    return cfg;
}

}  // namespace agile_afdm::harness
