#include "ratebound/io.hpp"

#include <fstream>
#include <sstream>

namespace ratebound {

Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix: expected a non-empty array of rows");
    const size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw ConfigError("matrix: rows must be non-empty arrays");
    const size_t cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw ConfigError("matrix: ragged rows");
        for (size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
    return m;
}

Json vector_to_json(const Vec& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vec vector_from_json(const Json& j) {
    if (!j.is_array()) throw ConfigError("vector: expected an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

namespace {

Json layout_to_json(const BlockLayout& layout) {
    Json blocks = Json::array();
    for (const Block& b : layout.blocks) {
        Json jb;
        jb["kind"] = b.kind == BlockKind::Oscillator ? "oscillator" : "integrator";
        if (b.kind == BlockKind::Oscillator) jb["omega"] = b.omega;
        blocks.push_back(std::move(jb));
    }
    return blocks;
}

BlockLayout layout_from_json(const Json& j) {
    SpectralProfile profile;
    for (const Json& jb : j) {
        const std::string kind = jb.at("kind").get<std::string>();
        if (kind == "oscillator") {
            ++profile.s;
            profile.omegas.push_back(jb.at("omega").get<double>());
        } else if (kind == "integrator") {
            ++profile.z;
        } else {
            throw ConfigError("layout: unknown block kind " + kind);
        }
    }
    return BlockLayout::from_profile(profile);
}

std::string sigma_name(SaturationKind kind) {
    return kind == SaturationKind::Tanh ? "tanh" : "atan";
}

SaturationKind sigma_from_name(const std::string& name) {
    if (name == "tanh") return SaturationKind::Tanh;
    if (name == "atan") return SaturationKind::Atan;
    throw ConfigError("unknown saturation kind " + name);
}

}  // namespace

Json feedback_to_json(const FeedbackDescriptor& fd) {
    Json j;
    switch (fd.kind) {
        case FeedbackKind::Zero:
            j["kind"] = "zero";
            j["n"] = fd.zero_dim;
            break;
        case FeedbackKind::CanonicalSingle:
            j["kind"] = "canonical-single";
            j["gains"] = fd.gains.values();
            j["layout"] = layout_to_json(fd.layout);
            break;
        case FeedbackKind::OriginalSingle:
            j["kind"] = "original-single";
            j["gains"] = fd.gains.values();
            j["layout"] = layout_to_json(fd.layout);
            j["T"] = matrix_to_json(fd.T);
            break;
        case FeedbackKind::MultiInput: {
            j["kind"] = "multi-input";
            j["exponent"] = fd.exponent;
            j["lead_skip"] = fd.lead_skip;
            Json subs = Json::array();
            for (const auto& sub : fd.subs) subs.push_back(feedback_to_json(sub));
            j["blocks"] = std::move(subs);
            break;
        }
        case FeedbackKind::SaturatedLinear:
            j["kind"] = "saturated-linear";
            j["k"] = std::vector<double>{fd.sat_k[0], fd.sat_k[1]};
            j["sigma"] = sigma_name(fd.sigma);
            break;
    }
    return j;
}

FeedbackDescriptor feedback_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return make_zero_feedback(j.at("n").get<int>());
    if (kind == "canonical-single") {
        return make_canonical_feedback(GainSchedule(j.at("gains").get<std::vector<double>>()),
                                       layout_from_json(j.at("layout")));
    }
    if (kind == "original-single") {
        return make_original_feedback(GainSchedule(j.at("gains").get<std::vector<double>>()),
                                      layout_from_json(j.at("layout")),
                                      matrix_from_json(j.at("T")));
    }
    if (kind == "multi-input") {
        std::vector<FeedbackDescriptor> subs;
        std::vector<int> dims;
        for (const Json& js : j.at("blocks")) {
            subs.push_back(feedback_from_json(js));
            dims.push_back(subs.back().state_dim());
        }
        return make_multi_feedback(std::move(subs), std::move(dims), j.at("exponent").get<int>(),
                                   j.value("lead_skip", 0));
    }
    if (kind == "saturated-linear") {
        const auto k = j.at("k").get<std::vector<double>>();
        if (k.size() != 2) throw ConfigError("saturated-linear: k must have two entries");
        return make_saturated_feedback(Eigen::Vector2d(k[0], k[1]),
                                       sigma_from_name(j.at("sigma").get<std::string>()));
    }
    throw ConfigError("unknown feedback kind " + kind);
}

Json reduced_form_to_json(const ReducedForm& rf) {
    Json j;
    j["schema"] = "ratebound-reduced-form-v1";
    j["q"] = rf.q;
    if (rf.n0() > 0) {
        j["A00"] = matrix_to_json(rf.A00);
        Json head_a = Json::array();
        Json head_b = Json::array();
        for (const Mat& m : rf.head_A) head_a.push_back(m.size() > 0 ? matrix_to_json(m) : Json());
        for (const Vec& v : rf.head_b) head_b.push_back(v.size() > 0 ? vector_to_json(v) : Json());
        j["head_A"] = std::move(head_a);
        j["head_b"] = std::move(head_b);
    }
    Json blocks = Json::array();
    for (const ReducedBlock& blk : rf.blocks) {
        Json jb;
        jb["A"] = matrix_to_json(blk.A);
        jb["b"] = vector_to_json(blk.b);
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    Json couplings_a = Json::array();
    for (const auto& [key, m] : rf.coupling_A) {
        Json jc;
        jc["i"] = key.first;
        jc["j"] = key.second;
        jc["value"] = matrix_to_json(m);
        couplings_a.push_back(std::move(jc));
    }
    j["coupling_A"] = std::move(couplings_a);
    Json couplings_b = Json::array();
    for (const auto& [key, v] : rf.coupling_b) {
        Json jc;
        jc["i"] = key.first;
        jc["j"] = key.second;
        jc["value"] = vector_to_json(v);
        couplings_b.push_back(std::move(jc));
    }
    j["coupling_b"] = std::move(couplings_b);
    return j;
}

ReducedForm reduced_form_from_json(const Json& j) {
    ReducedForm rf;
    rf.q = j.at("q").get<int>();
    if (j.contains("A00")) {
        rf.A00 = matrix_from_json(j.at("A00"));
        if (j.contains("head_A")) {
            for (const Json& m : j.at("head_A")) {
                rf.head_A.push_back(m.is_null() ? Mat() : matrix_from_json(m));
            }
        }
        if (j.contains("head_b")) {
            for (const Json& v : j.at("head_b")) {
                rf.head_b.push_back(v.is_null() ? Vec() : vector_from_json(v));
            }
        }
    } else {
        rf.A00 = Mat(0, 0);
    }
    for (const Json& jb : j.at("blocks")) {
        rf.blocks.push_back({matrix_from_json(jb.at("A")), vector_from_json(jb.at("b"))});
    }
    if (j.contains("coupling_A")) {
        for (const Json& jc : j.at("coupling_A")) {
            rf.coupling_A[{jc.at("i").get<int>(), jc.at("j").get<int>()}] =
                matrix_from_json(jc.at("value"));
        }
    }
    if (j.contains("coupling_b")) {
        for (const Json& jc : j.at("coupling_b")) {
            rf.coupling_b[{jc.at("i").get<int>(), jc.at("j").get<int>()}] =
                vector_from_json(jc.at("value"));
        }
    }
    return rf;
}

Json canonical_to_json(const CanonicalForm& cf) {
    Json j;
    j["schema"] = "ratebound-canonical-v1";
    j["J"] = matrix_to_json(cf.J);
    j["bhat"] = vector_to_json(cf.bhat);
    j["T"] = matrix_to_json(cf.T);
    j["layout"] = layout_to_json(cf.layout);
    j["residual_A"] = cf.residual_A;
    j["residual_b"] = cf.residual_b;
    Json theta = Json::array();
    for (int i = 1; i <= cf.theta.mu(); ++i) {
        for (int k = i + 1; k <= cf.theta.mu() + 1; ++k) {
            Json entry;
            entry["i"] = i;
            entry["k"] = k;
            entry["value"] = cf.theta(i, k);
            theta.push_back(std::move(entry));
        }
    }
    j["theta"] = std::move(theta);
    return j;
}

Json bounds_to_json(const BoundSpec& bounds) {
    Json j;
    j["p"] = bounds.p;
    j["R"] = bounds.R;
    return j;
}

BoundSpec bounds_from_json(const Json& j) {
    return BoundSpec(j.at("p").get<int>(), j.at("R").get<std::vector<double>>());
}

Json certificate_to_json(const BoundCertificate& cert) {
    Json j;
    j["pass"] = cert.pass;
    j["bounds_ok"] = cert.bounds_ok;
    j["all_converged"] = cert.all_converged;
    j["certified_global"] = cert.certified_global;
    j["sup"] = cert.sup;
    j["sup_time"] = cert.sup_time;
    j["sup_trajectory"] = cert.sup_traj;
    j["bounds"] = cert.bounds;
    j["worst_trailing"] = cert.worst_trailing;
    j["convergence_threshold"] = cert.convergence_threshold;
    j["trajectories"] = cert.trajectory_count;
    j["violations"] = cert.violations;
    return j;
}

Json tuning_report_to_json(const TuningReport& report) {
    Json j;
    j["gains"] = report.gains.values();
    j["bounds"] = bounds_to_json(report.bounds);
    j["certified"] = report.certified;
    j["repair_rounds"] = report.repair_rounds;
    j["per_stage_budget"] = report.per_stage_budget;
    j["battery_size"] = report.battery_size;
    j["static_bound"] = report.gains.mu() > 0 ? report.gains.static_bound() : 0.0;
    Json stages = Json::array();
    for (const StageRecord& s : report.stages) {
        Json js;
        js["stage"] = s.stage;
        js["gain"] = s.gain;
        js["halvings"] = s.halvings;
        js["term_derivative_sup"] = s.term_derivative_sup;
        js["static_bound"] = s.static_bound;
        js["converged"] = s.converged;
        stages.push_back(std::move(js));
    }
    j["stages"] = std::move(stages);
    j["battery_certificate"] = certificate_to_json(report.battery_certificate);
    return j;
}

namespace {

std::string family_name(DisturbanceSignal::Kind kind) {
    switch (kind) {
        case DisturbanceSignal::Kind::Zero:
            return "zero";
        case DisturbanceSignal::Kind::Constant:
            return "constant";
        case DisturbanceSignal::Kind::Sinusoid:
            return "sinusoid";
        case DisturbanceSignal::Kind::PiecewiseRandom:
            return "piecewise-random";
    }
    return "unknown";
}

}  // namespace

Json siss_report_to_json(const SissReport& report) {
    Json j;
    j["pass"] = report.pass;
    j["worst_ratio"] = report.worst_ratio;
    Json rows = Json::array();
    for (const SissOutcome& row : report.rows) {
        Json jr;
        jr["family"] = family_name(row.family);
        jr["delta"] = row.delta_prime;
        jr["worst_trailing"] = row.worst_trailing;
        jr["ratio"] = row.ratio;
        jr["pass"] = row.pass;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json lyapunov_report_to_json(const LyapunovSuiteReport& report) {
    Json j;
    j["pass"] = report.pass;
    j["worst_residual"] = report.worst_residual;
    j["worst_vdot"] = report.worst_vdot;
    Json rows = Json::array();
    for (const LyapunovSuiteRow& row : report.rows) {
        Json jr;
        jr["omega"] = row.omega;
        jr["beta"] = row.beta;
        jr["residual"] = row.residual;
        jr["min_v"] = row.min_v;
        jr["max_vdot"] = row.max_vdot;
        jr["fd_mismatch"] = row.worst_fd_mismatch;
        jr["pass"] = row.pass;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json growth_report_to_json(const GrowthReport& report) {
    Json j;
    j["pass"] = report.pass;
    j["l"] = report.l_values;
    j["simulated"] = report.simulated;
    j["closed_form"] = report.closed_form;
    j["max_rel_err"] = report.max_rel_err;
    j["slope"] = report.slope;
    j["expected_slope"] = report.expected_slope;
    j["contrast_ran"] = report.contrast_ran;
    j["contrast_sup_rate"] = report.contrast_sup_rate;
    j["contrast_bound"] = report.contrast_bound;
    return j;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream os;
    os.precision(17);
    const int n = traj.state_dim();
    const int m = traj.input_dim();
    os << "t";
    for (int i = 0; i < n; ++i) os << ",x" << i;
    for (int c = 0; c < m; ++c) os << ",u" << c;
    const bool jets = !traj.control_jets.empty();
    if (jets) {
        for (int c = 0; c < m; ++c) {
            for (int k = 1; k <= traj.jet_order; ++k) os << ",u" << c << "_d" << k;
        }
    }
    os << "\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        os << traj.times[i];
        for (int c = 0; c < n; ++c) os << "," << traj.states[i][c];
        for (int c = 0; c < m; ++c) os << "," << traj.controls[i][c];
        if (jets) {
            for (int c = 0; c < m; ++c) {
                for (int k = 1; k <= traj.jet_order; ++k) {
                    os << "," << traj.control_jets[i][static_cast<size_t>(c)].derivative(k);
                }
            }
        }
        os << "\n";
    }
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open for reading: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
    return Json::parse(read_text_file(path));
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ratebound
