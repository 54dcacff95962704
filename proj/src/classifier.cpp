#include "driftadapt/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace driftadapt {

namespace {

constexpr int kModelVersion = 1;

void require_dim(const GnbModel& model, std::size_t dim) {
    if (dim != model.dim) {
        throw Error(ErrorKind::DimensionMismatch,
                    "model dimension " + std::to_string(model.dim) + " vs data dimension " + std::to_string(dim));
    }
}

std::vector<std::string> default_class_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < n; ++c) names.push_back(std::to_string(c));
    return names;
}

}  // namespace

void GnbModel::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, "invalid model: " + what); };
    if (n_classes == 0 || dim == 0) fail("n_classes and dim must be positive");
    if (priors.size() != n_classes || means.size() != n_classes || variances.size() != n_classes) {
        fail("per-class arrays must have n_classes entries");
    }
    if (!class_names.empty() && class_names.size() != n_classes) fail("class_names length");
    double total = 0.0;
    for (double p : priors) {
        if (!(p > 0.0) || !std::isfinite(p)) fail("priors must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) fail("priors must sum to 1");
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (means[c].size() != dim || variances[c].size() != dim) fail("per-feature arrays must have dim entries");
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::isfinite(means[c][j])) fail("means must be finite");
            if (!(variances[c][j] > 0.0) || !std::isfinite(variances[c][j])) fail("variances must be positive");
        }
    }
}

GnbModel fit(const LabeledBatch& data, double variance_floor, std::optional<std::size_t> n_classes) {
    if (!(variance_floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "variance floor must be positive");
    const std::size_t classes = n_classes.value_or(data.class_count());
    const std::size_t dim = data.dim();
    if (classes == 0) throw Error(ErrorKind::InvalidArgument, "no classes to fit");

    std::vector<std::size_t> counts(classes, 0);
    std::vector<std::vector<double>> sums(classes, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const ClassIndex y = data.labels[i];
        if (y >= classes) throw Error(ErrorKind::InvalidArgument, "label " + std::to_string(y) + " out of range");
        ++counts[y];
        auto x = data.batch.point(i);
        for (std::size_t j = 0; j < dim; ++j) sums[y][j] += x[j];
    }
    for (std::size_t c = 0; c < classes; ++c) {
        if (counts[c] < 2) {
            throw Error(ErrorKind::ClassUnderpopulated,
                        "class " + std::to_string(c) + " has " + std::to_string(counts[c]) + " points (need 2)");
        }
    }

    GnbModel model;
    model.n_classes = classes;
    model.dim = dim;
    model.class_names = default_class_names(classes);
    model.priors.resize(classes);
    model.means.assign(classes, std::vector<double>(dim, 0.0));
    model.variances.assign(classes, std::vector<double>(dim, 0.0));
    for (std::size_t c = 0; c < classes; ++c) {
        model.priors[c] = static_cast<double>(counts[c]) / static_cast<double>(data.size());
        for (std::size_t j = 0; j < dim; ++j) model.means[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
    // Second pass for the variance; centred sums avoid cancellation.
    for (std::size_t i = 0; i < data.size(); ++i) {
        const ClassIndex y = data.labels[i];
        auto x = data.batch.point(i);
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = x[j] - model.means[y][j];
            model.variances[y][j] += d * d;
        }
    }
    for (std::size_t c = 0; c < classes; ++c) {
        for (double& v : model.variances[c]) v = std::max(v / static_cast<double>(counts[c]), variance_floor);
    }
    return model;
}

double log_class_conditional_density(const GnbModel& model, FeatureVector x, ClassIndex y) {
    require_dim(model, x.size());
    constexpr double log_two_pi = 1.8378770664093454835606594728112;  // ln(2*pi)
    double log_density = 0.0;
    for (std::size_t j = 0; j < model.dim; ++j) {
        const double var = model.variances[y][j];
        const double d = x[j] - model.means[y][j];
        log_density -= 0.5 * (log_two_pi + std::log(var) + d * d / var);
    }
    return log_density;
}

double class_conditional_density(const GnbModel& model, FeatureVector x, ClassIndex y) {
    return std::exp(log_class_conditional_density(model, x, y));
}

namespace {

void log_joint(const GnbModel& model, FeatureVector x, std::vector<double>& out) {
    out.resize(model.n_classes);
    for (std::size_t c = 0; c < model.n_classes; ++c) {
        out[c] = std::log(model.priors[c]) + log_class_conditional_density(model, x, c);
    }
}

}  // namespace

double log_feature_density(const GnbModel& model, FeatureVector x) {
    std::vector<double> joint;
    log_joint(model, x, joint);
    return log_sum_exp(joint);
}

double feature_density(const GnbModel& model, FeatureVector x) { return std::exp(log_feature_density(model, x)); }

std::vector<double> log_feature_densities(const GnbModel& model, const Batch& batch) {
    require_dim(model, batch.dim());
    std::vector<double> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) out[i] = log_feature_density(model, batch.point(i));
    return out;
}

PosteriorTable posterior(const GnbModel& model, const Batch& batch, double floor) {
    require_dim(model, batch.dim());
    Matrix probs(batch.size(), model.n_classes);
    std::vector<double> joint;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        log_joint(model, batch.point(i), joint);
        const double norm = log_sum_exp(joint);
        for (std::size_t c = 0; c < model.n_classes; ++c) probs(i, c) = std::exp(joint[c] - norm);
    }
    return normalize_rows(probs, floor);
}

Labels predict(const GnbModel& model, const Batch& batch) { return argmax_rows(posterior(model, batch)); }

double error_rate(const Labels& predicted, const Labels& truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw Error(ErrorKind::ShapeMismatch, "label sequences differ in length or are empty");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i] ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

std::string model_to_json(const GnbModel& model) {
    model.validate();
    nlohmann::ordered_json doc;
    doc["version"] = kModelVersion;
    doc["n_classes"] = model.n_classes;
    doc["dim"] = model.dim;
    doc["priors"] = model.priors;
    doc["means"] = model.means;
    doc["variances"] = model.variances;
    doc["class_names"] = model.class_names.empty() ? default_class_names(model.n_classes) : model.class_names;
    return doc.dump(2) + "\n";
}

GnbModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("model document: ") + e.what());
    }
    if (!doc.contains("version") || !doc["version"].is_number_integer()) {
        throw Error(ErrorKind::ParseError, "model document has no integer version");
    }
    if (doc["version"].get<int>() != kModelVersion) {
        throw Error(ErrorKind::UnsupportedVersion, "model version " + doc["version"].dump());
    }
    GnbModel model;
    try {
        model.n_classes = doc.at("n_classes").get<std::size_t>();
        model.dim = doc.at("dim").get<std::size_t>();
        model.priors = doc.at("priors").get<std::vector<double>>();
        model.means = doc.at("means").get<std::vector<std::vector<double>>>();
        model.variances = doc.at("variances").get<std::vector<std::vector<double>>>();
        if (doc.contains("class_names")) model.class_names = doc["class_names"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("model document: ") + e.what());
    }
    if (model.class_names.empty()) model.class_names = default_class_names(model.n_classes);
    model.validate();
    return model;
}

void save_model(const GnbModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << model_to_json(model);
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

GnbModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace driftadapt
