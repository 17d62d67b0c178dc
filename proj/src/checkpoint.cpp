#include "causalts/checkpoint.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "causalts/csv.hpp"
#include "causalts/errors.hpp"

namespace causalts {

namespace {

constexpr const char* kMagic = "causalts-checkpoint v1";

nlohmann::json mask_to_json(const Eigen::MatrixXi& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXi mask_from_json(const nlohmann::json& j) {
    const Eigen::Index r = static_cast<Eigen::Index>(j.size());
    if (r == 0) throw DataError("checkpoint: empty prior mask");
    const Eigen::Index c = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXi m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(j.at(static_cast<std::size_t>(i)).size()) != c) {
            throw DataError("checkpoint: ragged prior mask");
        }
        for (Eigen::Index k = 0; k < c; ++k) {
            m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<int>();
        }
    }
    return m;
}

double parse_value(const std::string& tok, const std::string& where) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw DataError("checkpoint: bad number '" + tok + "' in " + where);
    }
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ForecastModel& model,
                     const std::vector<std::string>& names,
                     const Eigen::VectorXd& norm_mean,
                     const Eigen::VectorXd& norm_std) {
    const ModelConfig& c = model.config();
    if (static_cast<int>(names.size()) != c.n_vars ||
        norm_mean.size() != c.n_vars || norm_std.size() != c.n_vars) {
        throw DataError("checkpoint: names/normalizer do not match n_vars");
    }

    nlohmann::json meta;
    meta["n_vars"] = c.n_vars;
    meta["lookback"] = c.lookback;
    meta["horizon"] = c.horizon;
    meta["dim"] = c.dim;
    meta["enc_width"] = c.enc_width;
    meta["layers"] = c.layers;
    meta["heads"] = c.heads;
    meta["ffn_mult"] = c.ffn_mult;
    meta["backbone"] = c.backbone;
    meta["pe_restart"] = c.pe_restart;
    meta["readout_mean"] = c.readout_mean;
    meta["alpha"] = c.alpha;
    meta["beta"] = c.beta;
    meta["learn_logits"] = c.learn_logits;
    meta["use_prior"] = c.use_prior;
    meta["use_dcs"] = c.use_dcs;
    meta["use_ccs"] = c.use_ccs;
    meta["segment_mask"] = c.segment_mask;
    meta["use_spouse_projection"] = c.use_spouse_projection;
    meta["names"] = names;
    std::vector<double> mean_v(norm_mean.data(), norm_mean.data() + norm_mean.size());
    std::vector<double> std_v(norm_std.data(), norm_std.data() + norm_std.size());
    meta["norm_mean"] = mean_v;
    meta["norm_std"] = std_v;
    meta["prior_dcs"] = mask_to_json(model.priors().dcs);
    meta["prior_ccs"] = mask_to_json(model.priors().ccs);
    meta["prior_sp"] = mask_to_json(model.priors().sp);

    std::ofstream out(path);
    if (!out) throw DataError("checkpoint: cannot write " + path);
    out << kMagic << "\n" << meta.dump() << "\n";
    for (const ParamTensor& p : model.params()) {
        out << "param " << p.name << " " << p.value.rows() << " " << p.value.cols()
            << "\n";
        for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
            for (Eigen::Index col = 0; col < p.value.cols(); ++col) {
                if (col > 0) out << " ";
                out << format_double(p.value(r, col));
            }
            out << "\n";
        }
    }
    out << "end\n";
    if (!out) throw DataError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifactError("checkpoint not found: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw DataError("checkpoint: bad header in " + path);
    }
    if (!std::getline(in, line)) throw DataError("checkpoint: missing metadata line");

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint: metadata parse failure: ") + e.what());
    }

    Checkpoint ckpt;
    try {
        ModelConfig& c = ckpt.config;
        c.n_vars = meta.at("n_vars").get<int>();
        c.lookback = meta.at("lookback").get<int>();
        c.horizon = meta.at("horizon").get<int>();
        c.dim = meta.at("dim").get<int>();
        c.enc_width = meta.at("enc_width").get<int>();
        c.layers = meta.at("layers").get<int>();
        c.heads = meta.at("heads").get<int>();
        c.ffn_mult = meta.at("ffn_mult").get<int>();
        c.backbone = meta.at("backbone").get<std::string>();
        c.pe_restart = meta.at("pe_restart").get<bool>();
        c.readout_mean = meta.at("readout_mean").get<bool>();
        c.alpha = meta.at("alpha").get<double>();
        c.beta = meta.at("beta").get<double>();
        c.learn_logits = meta.at("learn_logits").get<bool>();
        c.use_prior = meta.at("use_prior").get<bool>();
        c.use_dcs = meta.at("use_dcs").get<bool>();
        c.use_ccs = meta.at("use_ccs").get<bool>();
        c.segment_mask = meta.at("segment_mask").get<bool>();
        c.use_spouse_projection = meta.at("use_spouse_projection").get<bool>();
        ckpt.names = meta.at("names").get<std::vector<std::string>>();
        std::vector<double> mean_v = meta.at("norm_mean").get<std::vector<double>>();
        std::vector<double> std_v = meta.at("norm_std").get<std::vector<double>>();
        ckpt.norm_mean =
            Eigen::Map<Eigen::VectorXd>(mean_v.data(), static_cast<Eigen::Index>(mean_v.size()));
        ckpt.norm_std =
            Eigen::Map<Eigen::VectorXd>(std_v.data(), static_cast<Eigen::Index>(std_v.size()));
        ckpt.priors.dcs = mask_from_json(meta.at("prior_dcs"));
        ckpt.priors.ccs = mask_from_json(meta.at("prior_ccs"));
        ckpt.priors.sp = mask_from_json(meta.at("prior_sp"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint: metadata field failure: ") + e.what());
    }

    while (std::getline(in, line)) {
        if (line == "end") return ckpt;
        std::istringstream head(line);
        std::string tag, name;
        Eigen::Index rows = 0, cols = 0;
        head >> tag >> name >> rows >> cols;
        if (tag != "param" || name.empty() || rows < 1 || cols < 1 || !head.eof()) {
            throw DataError("checkpoint: bad tensor header '" + line + "'");
        }
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (!std::getline(in, line)) {
                throw DataError("checkpoint: truncated tensor " + name);
            }
            std::istringstream row(line);
            std::string tok;
            for (Eigen::Index col = 0; col < cols; ++col) {
                if (!(row >> tok)) throw DataError("checkpoint: short row in " + name);
                m(r, col) = parse_value(tok, name);
            }
            if (row >> tok) throw DataError("checkpoint: long row in " + name);
        }
        ckpt.tensors.emplace_back(name, std::move(m));
    }
    throw DataError("checkpoint: missing end marker in " + path);
}

ForecastModel model_from_checkpoint(const Checkpoint& ckpt) {
    ForecastModel model(ckpt.config, ckpt.priors, 0);
    std::vector<ParamTensor>& params = model.params();
    if (params.size() != ckpt.tensors.size()) {
        throw DataError("checkpoint: tensor count does not match the model");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& [name, value] = ckpt.tensors[k];
        if (params[k].name != name) {
            throw DataError("checkpoint: tensor order mismatch at '" + name + "'");
        }
        if (params[k].value.rows() != value.rows() ||
            params[k].value.cols() != value.cols()) {
            throw DataError("checkpoint: tensor shape mismatch at '" + name + "'");
        }
        params[k].value = value;
    }
    return model;
}

}  // namespace causalts
