#include "wavecls/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace wavecls {

namespace {

using nlohmann::json;

json vec_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vec_from_json(const json& a) {
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

json ivec_to_json(const Eigen::VectorXi& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXi ivec_from_json(const json& a) {
    Eigen::VectorXi v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<int>();
    return v;
}

json mat_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i).transpose()));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix mat_from_json(const json& j) {
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    Matrix m(r, c);
    const auto& data = j.at("data");
    for (Eigen::Index i = 0; i < r; ++i) m.row(i) = vec_from_json(data.at(i)).transpose();
    return m;
}

json kernel_to_json(const KernelSpec& k) {
    return {{"kind", k.name()}, {"sigma", k.sigma}};
}

KernelSpec kernel_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") return KernelSpec::linear();
    if (kind == "gaussian") return KernelSpec::gaussian(j.at("sigma").get<double>());
    throw data_error("model file: unknown kernel kind '" + kind + "'");
}

}  // namespace

Eigen::VectorXi SavedModel::predict(const Matrix& X) const {
    Matrix Xs = X;
    if (scaler) {
        if (X.cols() != scaler->min.size()) throw usage_error("predict: dimension mismatch");
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            if (scaler->range(j) == 0.0)
                Xs.col(j).setZero();
            else
                Xs.col(j) = (X.col(j).array() - scaler->min(j)) / scaler->range(j);
        }
    }
    switch (family) {
        case ModelFamily::WaveSvmLinear: return predict_linear(*linear, Xs);
        case ModelFamily::WaveSvmKernel: return predict_kernel(*kernel, Xs);
        case ModelFamily::WaveTsvmLinear:
        case ModelFamily::WaveTsvmKernel: return predict_twin(*twin, Xs);
    }
    throw usage_error("model: unknown family");
}

void save_model(const std::string& path, const SavedModel& model) {
    json j;
    j["family"] = family_name(model.family);
    if (model.scaler)
        j["scaler"] = {{"min", vec_to_json(model.scaler->min)},
                       {"range", vec_to_json(model.scaler->range)}};
    switch (model.family) {
        case ModelFamily::WaveSvmLinear:
            j["w"] = vec_to_json(model.linear->w);
            j["iterations"] = model.linear->iterations_run;
            j["converged"] = model.linear->converged;
            j["seed"] = model.linear->seed;
            break;
        case ModelFamily::WaveSvmKernel:
            j["support"] = mat_to_json(model.kernel->support);
            j["support_labels"] = ivec_to_json(model.kernel->support_labels);
            j["gamma"] = vec_to_json(model.kernel->gamma);
            j["kernel"] = kernel_to_json(model.kernel->kernel);
            j["iterations"] = model.kernel->iterations_run;
            j["converged"] = model.kernel->converged;
            j["seed"] = model.kernel->seed;
            break;
        case ModelFamily::WaveTsvmLinear:
        case ModelFamily::WaveTsvmKernel:
            j["positive_plane"] = vec_to_json(model.twin->positive_plane);
            j["negative_plane"] = vec_to_json(model.twin->negative_plane);
            j["iterations"] = {model.twin->iterations_pos, model.twin->iterations_neg};
            j["converged"] = {model.twin->converged_pos, model.twin->converged_neg};
            if (model.twin->is_kernel()) {
                j["kernel"] = kernel_to_json(*model.twin->kernel);
                j["train_X"] = mat_to_json(model.twin->train_X);
            }
            break;
    }
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw data_error(path + ": invalid model JSON (" + e.what() + ")");
    }
    SavedModel m;
    try {
        m.family = parse_model_family(j.at("family").get<std::string>());
        if (j.contains("scaler")) {
            MinMaxScaler s;
            s.min = vec_from_json(j["scaler"].at("min"));
            s.range = vec_from_json(j["scaler"].at("range"));
            m.scaler = s;
        }
        switch (m.family) {
            case ModelFamily::WaveSvmLinear: {
                LinearModel lm;
                lm.w = vec_from_json(j.at("w"));
                lm.iterations_run = j.value("iterations", 0);
                lm.converged = j.value("converged", false);
                lm.seed = j.value("seed", std::uint64_t{0});
                m.linear = std::move(lm);
                break;
            }
            case ModelFamily::WaveSvmKernel: {
                KernelModel km;
                km.support = mat_from_json(j.at("support"));
                km.support_labels = ivec_from_json(j.at("support_labels"));
                km.gamma = vec_from_json(j.at("gamma"));
                km.kernel = kernel_from_json(j.at("kernel"));
                km.iterations_run = j.value("iterations", 0);
                km.converged = j.value("converged", false);
                km.seed = j.value("seed", std::uint64_t{0});
                m.kernel = std::move(km);
                break;
            }
            case ModelFamily::WaveTsvmLinear:
            case ModelFamily::WaveTsvmKernel: {
                TwinModel tm;
                tm.positive_plane = vec_from_json(j.at("positive_plane"));
                tm.negative_plane = vec_from_json(j.at("negative_plane"));
                if (j.contains("iterations")) {
                    tm.iterations_pos = j["iterations"].at(0).get<int>();
                    tm.iterations_neg = j["iterations"].at(1).get<int>();
                }
                if (j.contains("converged")) {
                    tm.converged_pos = j["converged"].at(0).get<bool>();
                    tm.converged_neg = j["converged"].at(1).get<bool>();
                }
                if (m.family == ModelFamily::WaveTsvmKernel) {
                    tm.kernel = kernel_from_json(j.at("kernel"));
                    tm.train_X = mat_from_json(j.at("train_X"));
                }
                m.twin = std::move(tm);
                break;
            }
        }
    } catch (const json::exception& e) {
        throw data_error(path + ": malformed model file (" + std::string(e.what()) + ")");
    }
    return m;
}

}  // namespace wavecls
