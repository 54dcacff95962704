#include "driftadapt/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "driftadapt/random.hpp"

namespace driftadapt {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

void validate_priors(const std::vector<double>& priors) {
    require(!priors.empty(), "priors must be non-empty");
    double total = 0.0;
    for (double p : priors) {
        require(p >= 0.0 && std::isfinite(p), "priors must be nonnegative");
        total += p;
    }
    require(std::abs(total - 1.0) <= 1e-9, "priors must sum to 1");
}

void validate_class_matrix(const ClassMatrix& m, std::size_t classes, std::size_t dim, bool positive,
                           const std::string& name) {
    require(m.size() == classes, name + " must have one row per class");
    for (const auto& row : m) {
        require(row.size() == dim, name + " rows must share the feature dimension");
        for (double v : row) {
            require(std::isfinite(v), name + " entries must be finite");
            if (positive) require(v > 0.0, name + " entries must be positive");
        }
    }
}

LabeledBatch draw_gaussian_batch(Rng& rng, const std::vector<double>& priors, const ClassMatrix& means,
                                 const ClassMatrix& variances, std::size_t n) {
    const std::size_t dim = means.front().size();
    std::vector<double> flat;
    flat.reserve(n * dim);
    Labels labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ClassIndex y = rng.categorical(priors);
        labels.push_back(y);
        for (std::size_t j = 0; j < dim; ++j) flat.push_back(rng.normal(means[y][j], std::sqrt(variances[y][j])));
    }
    return LabeledBatch(Batch(Matrix(n, dim, std::move(flat))), std::move(labels));
}

}  // namespace

void GaussianDriftSpec::validate() const {
    validate_priors(priors);
    require(!sizes.empty(), "at least one time step");
    require(means.size() == sizes.size() && variances.size() == sizes.size(), "one mean/variance set per time step");
    require(!means.front().empty() && !means.front().front().empty(), "means must be non-empty");
    const std::size_t dim = means.front().front().size();
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        require(sizes[s] >= 1, "batch sizes must be >= 1");
        validate_class_matrix(means[s], priors.size(), dim, false, "means");
        validate_class_matrix(variances[s], priors.size(), dim, true, "variances");
    }
}

GaussianDriftSpec GaussianDriftSpec::two_gaussian_defaults(std::uint64_t seed) {
    GaussianDriftSpec spec;
    spec.priors = {0.3, 0.7};
    spec.means = {{{1.0, 1.0}, {-1.0, -1.0}}, {{1.0, 1.0}, {-2.0, -2.0}}};
    spec.variances = {{{1.0, 1.0}, {1.0, 1.0}}, {{1.0, 1.0}, {1.0, 1.0}}};
    spec.sizes = {10000, 1000};
    spec.seed = seed;
    return spec;
}

std::vector<LabeledBatch> gen_gaussian_steps(const GaussianDriftSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<LabeledBatch> out;
    for (std::size_t s = 0; s < spec.n_steps(); ++s) {
        out.push_back(draw_gaussian_batch(rng, spec.priors, spec.means[s], spec.variances[s], spec.sizes[s]));
    }
    return out;
}

std::pair<LabeledBatch, LabeledBatch> gen_two_gaussian(const GaussianDriftSpec& spec) {
    require(spec.n_steps() >= 2, "two-gaussian generation needs two time steps");
    auto steps = gen_gaussian_steps(spec);
    return {std::move(steps[0]), std::move(steps[1])};
}

void SeaSpec::validate() const {
    require(n_init >= 1 && n_drift >= 1, "SEA sizes must be >= 1");
    require(band_half_width >= 0.0 && band_half_width < 5.0, "band half width out of range");
    require(std::isfinite(theta_init) && std::isfinite(theta_drift), "thresholds must be finite");
}

ClassIndex sea_label(double f1, double f2, double theta) { return f1 + f2 <= theta ? 1 : 0; }

namespace {

LabeledBatch draw_sea_batch(Rng& rng, std::size_t n, double theta, double half_width) {
    std::vector<double> flat;
    flat.reserve(n * 3);
    Labels labels;
    labels.reserve(n);
    while (labels.size() < n) {
        const double f1 = rng.uniform(0.0, 10.0);
        const double f2 = rng.uniform(0.0, 10.0);
        const double f3 = rng.uniform(0.0, 10.0);
        if (std::abs(f1 + f2 - theta) < half_width) continue;
        flat.insert(flat.end(), {f1, f2, f3});
        labels.push_back(sea_label(f1, f2, theta));
    }
    return LabeledBatch(Batch(Matrix(n, 3, std::move(flat))), std::move(labels));
}

}  // namespace

std::pair<LabeledBatch, LabeledBatch> gen_modified_sea(const SeaSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    auto init = draw_sea_batch(rng, spec.n_init, spec.theta_init, spec.band_half_width);
    auto drift = draw_sea_batch(rng, spec.n_drift, spec.theta_drift, spec.band_half_width);
    return {std::move(init), std::move(drift)};
}

std::pair<LabeledBatch, LabeledBatch> gen_modified_sea(std::uint64_t seed, std::size_t n_init, std::size_t n_drift) {
    SeaSpec spec;
    spec.seed = seed;
    spec.n_init = n_init;
    spec.n_drift = n_drift;
    return gen_modified_sea(spec);
}

void StreamSpec::validate() const {
    require(n_steps >= 2, "a stream needs at least two steps");
    require(batch_size >= 1, "batch size must be >= 1");
    validate_priors(priors);
    require(!start_means.empty() && !start_means.front().empty(), "start means must be non-empty");
    const std::size_t dim = start_means.front().size();
    validate_class_matrix(start_means, priors.size(), dim, false, "start_means");
    validate_class_matrix(end_means, priors.size(), dim, false, "end_means");
    validate_class_matrix(variances, priors.size(), dim, true, "variances");
}

ClassMatrix StreamSpec::means_at(std::size_t step) const {
    const double frac = static_cast<double>(step) / static_cast<double>(n_steps - 1);
    ClassMatrix out = start_means;
    for (std::size_t c = 0; c < out.size(); ++c) {
        for (std::size_t j = 0; j < out[c].size(); ++j) {
            out[c][j] = start_means[c][j] + (end_means[c][j] - start_means[c][j]) * frac;
        }
    }
    return out;
}

StreamSpec StreamSpec::linear_drift_defaults(std::uint64_t seed) {
    StreamSpec spec;
    spec.n_steps = 20;
    spec.start_means = {{1.0, 1.0}, {-1.0, -1.0}};
    spec.end_means = {{1.0, 1.0}, {-4.0, -4.0}};
    spec.variances = {{1.0, 1.0}, {1.0, 1.0}};
    spec.priors = {0.3, 0.7};
    spec.batch_size = 1000;
    spec.seed = seed;
    return spec;
}

std::vector<LabeledBatch> gen_drifting_stream(const StreamSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<LabeledBatch> out;
    out.reserve(spec.n_steps);
    for (std::size_t s = 0; s < spec.n_steps; ++s) {
        out.push_back(draw_gaussian_batch(rng, spec.priors, spec.means_at(s), spec.variances, spec.batch_size));
    }
    return out;
}

// ---------------------------------------------------------------- spec documents

namespace {

nlohmann::json parse_json(const std::string& text, const char* what) {
    try {
        auto doc = nlohmann::json::parse(text);
        if (!doc.is_object()) throw Error(ErrorKind::ParseError, std::string(what) + " must be a JSON object");
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
    }
}

template <typename T>
void read_key(const nlohmann::json& doc, const char* key, T& out) {
    if (!doc.contains(key)) return;
    try {
        out = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("key '") + key + "': " + e.what());
    }
}

}  // namespace

GaussianDriftSpec gaussian_spec_from_json(const std::string& text) {
    const auto doc = parse_json(text, "gaussian spec");
    GaussianDriftSpec spec = GaussianDriftSpec::two_gaussian_defaults(0);
    read_key(doc, "priors", spec.priors);
    read_key(doc, "means", spec.means);
    read_key(doc, "variances", spec.variances);
    read_key(doc, "sizes", spec.sizes);
    read_key(doc, "seed", spec.seed);
    spec.validate();
    return spec;
}

SeaSpec sea_spec_from_json(const std::string& text) {
    const auto doc = parse_json(text, "sea spec");
    SeaSpec spec;
    read_key(doc, "n_init", spec.n_init);
    read_key(doc, "n_drift", spec.n_drift);
    read_key(doc, "theta_init", spec.theta_init);
    read_key(doc, "theta_drift", spec.theta_drift);
    read_key(doc, "band_half_width", spec.band_half_width);
    read_key(doc, "seed", spec.seed);
    spec.validate();
    return spec;
}

StreamSpec stream_spec_from_json(const std::string& text) {
    const auto doc = parse_json(text, "stream spec");
    StreamSpec spec = StreamSpec::linear_drift_defaults(0);
    read_key(doc, "n_steps", spec.n_steps);
    read_key(doc, "start_means", spec.start_means);
    read_key(doc, "end_means", spec.end_means);
    read_key(doc, "variances", spec.variances);
    read_key(doc, "priors", spec.priors);
    read_key(doc, "batch_size", spec.batch_size);
    read_key(doc, "seed", spec.seed);
    spec.validate();
    return spec;
}

std::string stream_spec_to_json(const StreamSpec& spec) {
    nlohmann::ordered_json doc;
    doc["n_steps"] = spec.n_steps;
    doc["start_means"] = spec.start_means;
    doc["end_means"] = spec.end_means;
    doc["variances"] = spec.variances;
    doc["priors"] = spec.priors;
    doc["batch_size"] = spec.batch_size;
    doc["seed"] = spec.seed;
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---------------------------------------------------------------- CSV

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_number(std::string_view s) {
    try {
        parse_double(s);
        return true;
    } catch (const Error&) {
        return false;
    }
}

bool is_nonnegative_integer(std::string_view s) {
    s = trim(s);
    if (s.empty() || s.size() > 18) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

}  // namespace

namespace {

struct RawCsv {
    Matrix features;
    std::vector<std::string> label_tokens;
    bool had_header = false;
};

RawCsv parse_raw_csv(const std::string& text, std::optional<std::size_t> label_column) {
    RawCsv raw_csv;
    std::vector<double> flat;
    std::size_t columns = 0;
    std::size_t label_index = 0;
    std::size_t rows = 0;

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    bool first_content = true;
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) in.ignore(3);  // UTF-8 BOM
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (first_content) {
            first_content = false;
            columns = fields.size();
            if (label_column) {
                label_index = *label_column == kLastColumn ? columns - 1 : *label_column;
                if (label_index >= columns) {
                    throw Error(ErrorKind::DimensionError, "label column " + std::to_string(label_index) +
                                                               " outside " + std::to_string(columns) + " columns");
                }
                if (columns < 2) throw Error(ErrorKind::DimensionError, "labelled CSV needs a feature column");
            }
            bool numeric = true;
            for (std::size_t j = 0; j < fields.size(); ++j) {
                if (label_column && j == label_index) continue;
                numeric = numeric && is_number(fields[j]);
            }
            if (!numeric) {
                raw_csv.had_header = true;
                continue;
            }
        }
        if (fields.size() != columns) {
            throw Error(ErrorKind::DimensionError, "line " + std::to_string(line_no) + ": expected " +
                                                       std::to_string(columns) + " fields, found " +
                                                       std::to_string(fields.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (label_column && j == label_index) {
                const auto token = trim(fields[j]);
                if (token.empty()) throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": empty label");
                raw_csv.label_tokens.emplace_back(token);
                continue;
            }
            double v = 0.0;
            try {
                v = parse_double(fields[j]);
            } catch (const Error& e) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
            }
            if (!std::isfinite(v)) throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": non-finite value");
            flat.push_back(v);
        }
        ++rows;
    }
    const std::size_t dim = label_column ? columns - 1 : columns;
    raw_csv.features = Matrix(rows, dim, std::move(flat));
    return raw_csv;
}

/// Integer tokens map to themselves; any other vocabulary maps to indices in
/// sorted token order.
std::pair<Labels, std::vector<std::string>> map_labels(const std::vector<std::string>& tokens) {
    Labels labels;
    labels.reserve(tokens.size());
    std::vector<std::string> names;
    const bool integral = std::all_of(tokens.begin(), tokens.end(), [](const std::string& t) { return is_nonnegative_integer(t); });
    if (integral) {
        std::size_t max_label = 0;
        for (const auto& t : tokens) {
            labels.push_back(std::stoull(t));
            max_label = std::max(max_label, labels.back());
        }
        for (std::size_t c = 0; !labels.empty() && c <= max_label; ++c) names.push_back(std::to_string(c));
    } else {
        names = tokens;
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        for (const auto& t : tokens) {
            labels.push_back(static_cast<ClassIndex>(std::lower_bound(names.begin(), names.end(), t) - names.begin()));
        }
    }
    return {std::move(labels), std::move(names)};
}

}  // namespace

CsvTable parse_csv(const std::string& text, std::optional<std::size_t> label_column) {
    RawCsv raw = parse_raw_csv(text, label_column);
    CsvTable table;
    table.features = std::move(raw.features);
    table.had_header = raw.had_header;
    if (label_column) {
        auto [labels, names] = map_labels(raw.label_tokens);
        table.labels = std::move(labels);
        table.class_names = std::move(names);
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path, std::optional<std::size_t> label_column) {
    return parse_csv(read_text_file(path), label_column);
}

void write_csv(const std::filesystem::path& path, const Matrix& features, const Labels* labels) {
    if (labels && labels->size() != features.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "label count differs from row count");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    for (std::size_t j = 0; j < features.cols(); ++j) out << (j ? "," : "") << 'f' << j;
    if (labels) out << ",y";
    out << '\n';
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j) out << (j ? "," : "") << format_double(features(i, j));
        if (labels) out << ',' << (*labels)[i];
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const LabeledBatch& data) {
    write_csv(path, data.batch.points(), &data.labels);
}

std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t rows, std::size_t batch_size,
                                                              std::size_t min_tail) {
    if (batch_size == 0) throw Error(ErrorKind::InvalidArgument, "batch size must be positive");
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t begin = 0; begin < rows; begin += batch_size) {
        ranges.emplace_back(begin, std::min(begin + batch_size, rows));
    }
    if (ranges.size() >= 2) {
        auto& tail = ranges.back();
        if (tail.second - tail.first < batch_size && tail.second - tail.first < min_tail) {
            const std::size_t end = tail.second;
            ranges.pop_back();
            ranges.back().second = end;
        }
    }
    return ranges;
}

std::vector<LabeledBatch> load_csv_stream(const std::filesystem::path& path, std::size_t batch_size,
                                          std::size_t label_column) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw Error(ErrorKind::IoError, "no .csv files in " + path.string());
    } else {
        files.push_back(path);
    }

    std::vector<double> flat;
    std::vector<std::string> tokens;
    std::size_t dim = 0;
    for (const auto& file : files) {
        RawCsv raw = parse_raw_csv(read_text_file(file), label_column);
        if (raw.features.rows() == 0) continue;
        if (dim == 0) {
            dim = raw.features.cols();
        } else if (raw.features.cols() != dim) {
            throw Error(ErrorKind::DimensionError, file.string() + " has a different column count");
        }
        flat.insert(flat.end(), raw.features.values().begin(), raw.features.values().end());
        tokens.insert(tokens.end(), raw.label_tokens.begin(), raw.label_tokens.end());
    }
    if (tokens.empty()) throw Error(ErrorKind::ParseError, "no data rows in " + path.string());
    const Labels labels = map_labels(tokens).first;

    const std::size_t rows = labels.size();
    const Matrix all(rows, dim, std::move(flat));
    const std::size_t classes = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<LabeledBatch> batches;
    for (auto [begin, end] : batch_ranges(rows, batch_size, 2 * classes)) {
        std::vector<double> part(all.values().begin() + static_cast<std::ptrdiff_t>(begin * dim),
                                 all.values().begin() + static_cast<std::ptrdiff_t>(end * dim));
        batches.emplace_back(Batch(Matrix(end - begin, dim, std::move(part))),
                             Labels(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                                    labels.begin() + static_cast<std::ptrdiff_t>(end)));
    }
    return batches;
}

}  // namespace driftadapt
