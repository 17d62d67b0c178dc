#include "causalts/runconfig.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "causalts/csv.hpp"
#include "causalts/errors.hpp"

namespace causalts {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0' || v < -2147483647L || v > 2147483647L) {
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    }
    return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    if (value.empty() || value[0] == '-') {
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    }
    const char* begin = value.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0') {
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    }
    return static_cast<std::uint64_t>(v);
}

}  // namespace

void RunConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "data.path") data_path = value;
    else if (key == "split.train") split.train = parse_double(key, value);
    else if (key == "split.val") split.val = parse_double(key, value);
    else if (key == "split.test") split.test = parse_double(key, value);
    else if (key == "window.lookback") lookback = parse_int(key, value);
    else if (key == "window.horizon") horizon = parse_int(key, value);
    else if (key == "window.stride") stride = parse_int(key, value);
    else if (key == "pc.alpha") pc_alpha = parse_double(key, value);
    else if (key == "granger.lag") granger_lag = parse_int(key, value);
    else if (key == "adapter.alpha") adapter_alpha = parse_double(key, value);
    else if (key == "adapter.beta") adapter_beta = parse_double(key, value);
    else if (key == "train.lr") lr = parse_double(key, value);
    else if (key == "train.batch") batch = parse_int(key, value);
    else if (key == "train.epochs") epochs = parse_int(key, value);
    else if (key == "train.patience") patience = parse_int(key, value);
    else if (key == "train.lambda") lambda = parse_double(key, value);
    else if (key == "train.seed") seed = parse_u64(key, value);
    else if (key == "train.backbone") backbone = value;
    else if (key == "out.dir") out_dir = value;
    else if (key == "model.dim") model_dim = parse_int(key, value);
    else if (key == "model.enc_width") enc_width = parse_int(key, value);
    else if (key == "model.layers") layers = parse_int(key, value);
    else if (key == "model.heads") heads = parse_int(key, value);
    else if (key == "exp.seeds") exp_seeds = parse_int(key, value);
    else if (key == "exp.rows") exp_rows = parse_int(key, value);
    else if (key == "exp.obs_noise") exp_obs_noise = parse_double(key, value);
    else throw ConfigError("unknown config key: " + key);
}

void RunConfig::validate() const {
    split.validate();
    if (lookback < 1) throw ConfigError("window.lookback must be >= 1");
    if (horizon < 1) throw ConfigError("window.horizon must be >= 1");
    if (stride < 1) throw ConfigError("window.stride must be >= 1");
    if (!(pc_alpha > 0.0) || !(pc_alpha < 1.0)) {
        throw ConfigError("pc.alpha must lie in (0, 1)");
    }
    if (granger_lag < 1) throw ConfigError("granger.lag must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
    if (batch < 1) throw ConfigError("train.batch must be >= 1");
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
    if (patience < 1) throw ConfigError("train.patience must be >= 1");
    if (lambda < 0.0) throw ConfigError("train.lambda must be >= 0");
    if (backbone != "transformer" && backbone != "mlp") {
        throw ConfigError("train.backbone must be 'transformer' or 'mlp'");
    }
    if (out_dir.empty()) throw ConfigError("out.dir must not be empty");
    if (model_dim < 1) throw ConfigError("model.dim must be >= 1");
    if (enc_width < 1) throw ConfigError("model.enc_width must be >= 1");
    if (layers < 1) throw ConfigError("model.layers must be >= 1");
    if (heads < 1 || model_dim % heads != 0) {
        throw ConfigError("model.heads must divide model.dim");
    }
    if (exp_seeds < 1) throw ConfigError("exp.seeds must be >= 1");
    if (exp_rows < lookback + horizon + 10) {
        throw ConfigError("exp.rows is too small for the window shape");
    }
    if (exp_obs_noise < 0.0) throw ConfigError("exp.obs_noise must be >= 0");
}

std::string RunConfig::to_text() const {
    std::ostringstream out;
    out << "adapter.alpha = " << format_double(adapter_alpha) << "\n";
    out << "adapter.beta = " << format_double(adapter_beta) << "\n";
    out << "data.path = " << data_path << "\n";
    out << "exp.obs_noise = " << format_double(exp_obs_noise) << "\n";
    out << "exp.rows = " << exp_rows << "\n";
    out << "exp.seeds = " << exp_seeds << "\n";
    out << "granger.lag = " << granger_lag << "\n";
    out << "model.dim = " << model_dim << "\n";
    out << "model.enc_width = " << enc_width << "\n";
    out << "model.heads = " << heads << "\n";
    out << "model.layers = " << layers << "\n";
    out << "out.dir = " << out_dir << "\n";
    out << "pc.alpha = " << format_double(pc_alpha) << "\n";
    out << "split.test = " << format_double(split.test) << "\n";
    out << "split.train = " << format_double(split.train) << "\n";
    out << "split.val = " << format_double(split.val) << "\n";
    out << "train.backbone = " << backbone << "\n";
    out << "train.batch = " << batch << "\n";
    out << "train.epochs = " << epochs << "\n";
    out << "train.lambda = " << format_double(lambda) << "\n";
    out << "train.lr = " << format_double(lr) << "\n";
    out << "train.patience = " << patience << "\n";
    out << "train.seed = " << seed << "\n";
    out << "window.horizon = " << horizon << "\n";
    out << "window.lookback = " << lookback << "\n";
    out << "window.stride = " << stride << "\n";
    return out.str();
}

void RunConfig::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write resolved config to " + path);
    out << to_text();
    if (!out) throw ConfigError("write failed for " + path);
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value': " + stripped);
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + " has no key");
        }
        cfg.set_key(key, value);
    }
    return cfg;
}

}  // namespace causalts
