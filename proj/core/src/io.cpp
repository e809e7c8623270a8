#include "slsreal/io.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sls::io {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::runtime_error("expected a matrix as a list of rows");
    Matrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != j[0].size()) throw std::runtime_error("ragged matrix rows");
        for (std::size_t c = 0; c < j[i].size(); ++c)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
    return M;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

}  // namespace

void save_model(const std::string& path, const SlsModel& model) {
    json j;
    j["n"] = model.n();
    j["m"] = model.m();
    j["p"] = model.p();
    j["N"] = model.N();
    j["sigma"] = model.sigma();
    j["states"] = json::array();
    for (const auto& s : model.states) {
        json js;
        js["label"] = s.label;
        js["A"] = matrix_to_json(s.A);
        js["B"] = matrix_to_json(s.B);
        js["C"] = matrix_to_json(s.C);
        js["D"] = matrix_to_json(s.D);
        j["states"].push_back(js);
    }
    j["phi"] = model.switching.labels();
    open_out(path) << j.dump(1) << "\n";
}

SlsModel load_model(const std::string& path) {
    json j;
    try {
        open_in(path) >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": malformed JSON: " + e.what());
    }
    SlsModel model;
    for (const auto& js : j.at("states")) {
        DiscreteState s;
        s.label = js.at("label").get<int>();
        s.A = matrix_from_json(js.at("A"));
        s.B = matrix_from_json(js.at("B"));
        s.C = matrix_from_json(js.at("C"));
        s.D = matrix_from_json(js.at("D"));
        model.states.push_back(std::move(s));
    }
    model.switching = SwitchingSequence(j.at("phi").get<std::vector<int>>());
    model.validate();
    return model;
}

void save_markov(const std::string& path, const MarkovSequence& markov, int n) {
    auto out = open_out(path);
    json header;
    header["N"] = markov.N();
    header["p"] = markov.p();
    header["m"] = markov.m();
    header["n"] = n;
    if (markov.band() < 0)
        header["band"] = "full";
    else
        header["band"] = markov.band();
    header["noise_bound"] = markov.noise_bound();
    out << header.dump() << "\n";
    for (const auto& [key, block] : markov.blocks()) {
        out << key.first << "," << key.second;
        for (Eigen::Index i = 0; i < block.rows(); ++i)
            for (Eigen::Index j = 0; j < block.cols(); ++j) out << "," << block(i, j);
        out << "\n";
    }
}

MarkovSequence load_markov(const std::string& path, int& n) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": malformed header line: " + e.what());
    }
    int band = -1;
    if (header.at("band").is_number_integer()) band = header.at("band").get<int>();
    MarkovSequence markov(header.at("N").get<int>(), header.at("p").get<int>(),
                          header.at("m").get<int>(), band);
    markov.set_noise_bound(header.value("noise_bound", 0.0));
    n = header.at("n").get<int>();

    const int p = markov.p(), m = markov.m();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        auto next = [&](double& v) {
            if (!std::getline(ss, field, ','))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing field");
            v = std::stod(field);
        };
        double kd = 0, ld = 0;
        next(kd);
        next(ld);
        Matrix block(p, m);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < m; ++j) {
                double v = 0;
                next(v);
                block(i, j) = v;
            }
        markov.set(static_cast<int>(kd), static_cast<int>(ld), block);
    }
    return markov;
}

void save_report(const std::string& path, const EstimationReport& report) {
    json j;
    j["config"] = {{"n", report.config.n},
                   {"epsilon_Z", report.config.epsilon_Z},
                   {"auto_epsilon", report.config.auto_epsilon},
                   {"nu", report.config.nu},
                   {"radius", report.config.radius},
                   {"noisy", report.config.noisy},
                   {"align", report.config.align},
                   {"seed", report.config.seed}};
    j["window"] = {report.real.k_lo, report.real.k_hi};
    j["sigma_hat"] = report.clusters.sigma_hat;
    j["tolerances"] = {{"correction", report.tolerances.correction}, {"match", report.tolerances.match}};
    j["submodels"] = json::array();
    for (const auto& s : report.submodels) {
        json js;
        js["label"] = s.label;
        js["A"] = matrix_to_json(s.A);
        js["B"] = matrix_to_json(s.B);
        js["C"] = matrix_to_json(s.C);
        js["D"] = matrix_to_json(s.D);
        j["submodels"].push_back(js);
    }
    j["transforms"] = json::object();
    for (const auto& [label, Pi] : report.transforms.pi)
        j["transforms"][std::to_string(label)] = matrix_to_json(Pi);
    j["phi_hat"] = report.phi_hat.phi_hat;
    json sw = json::array();
    for (const auto& s : report.phi_hat.switches)
        sw.push_back({{"k", s.k},
                      {"label_before", s.label_before},
                      {"label_after", s.label_after},
                      {"provenance", static_cast<int>(s.prov)},
                      {"forward", s.forward},
                      {"steps", s.steps}});
    j["switches"] = sw;
    json metrics = json::object();
    if (report.fit) metrics["fit_phi"] = *report.fit;
    if (report.delta) metrics["delta_P"] = *report.delta;
    if (!report.vaf_values.empty()) metrics["vaf"] = report.vaf_values;
    if (!report.hankel_errors.empty()) metrics["hankel_mismatch"] = report.hankel_errors;
    j["metrics"] = metrics;
    open_out(path) << j.dump(1) << "\n";
}

void write_stationary_csv(const std::string& path, const StationarySet& ss) {
    auto out = open_out(path);
    out << "k,diff_norm,member\n";
    for (std::size_t i = 0; i < ss.diff_norms.size(); ++i) {
        int k = ss.k_lo + static_cast<int>(i);
        out << k << "," << ss.diff_norms[i] << "," << (ss.is_member(k) ? 1 : 0) << "\n";
    }
}

void write_clusters_csv(const std::string& path, const StationarySet& ss, const ClusterResult& clusters) {
    auto out = open_out(path);
    out << "interval,alpha,beta,gamma,feature,label\n";
    for (std::size_t i = 0; i < ss.qualifying.size(); ++i) {
        const auto& iv = ss.intervals[static_cast<std::size_t>(ss.qualifying[i])];
        out << ss.qualifying[i] << "," << iv.alpha << "," << iv.beta << "," << iv.gamma() << ","
            << clusters.features[i] << "," << clusters.assignments[i] << "\n";
    }
}

void write_phi_csv(const std::string& path, const SwitchEstimate& est, const std::vector<int>* phi_true) {
    auto out = open_out(path);
    out << "k,phi" << (phi_true ? "" : "_unknown") << ",phi_hat,provenance\n";
    for (int k = est.k_lo; k <= est.k_hi; ++k) {
        out << k << ",";
        if (phi_true) out << phi_true->at(static_cast<std::size_t>(k - 1));
        out << "," << est.at(k) << "," << static_cast<int>(est.prov_at(k)) << "\n";
    }
}

void write_montecarlo_csv(const std::string& path, const pipeline::MonteCarloResult& result) {
    auto out = open_out(path);
    out << "snr_db,successes,failures,fit_phi_avg,delta_P_avg,rms_hankel_avg\n";
    for (const auto& row : result.rows)
        out << row.snr_db << "," << row.successes << "," << row.failures << "," << row.fit_avg << ","
            << row.delta_avg << "," << row.rms_hankel_avg << "\n";
}

}  // namespace sls::io
