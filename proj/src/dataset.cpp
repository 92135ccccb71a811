#include "toponet/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace toponet {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<Eigen::Index> LabeledPointSet::class_indices(int label) const {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < count(); ++i)
        if (labels[static_cast<std::size_t>(i)] == label) idx.push_back(i);
    return idx;
}

Eigen::MatrixXd LabeledPointSet::class_points(int label) const {
    const auto idx = class_indices(label);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), dim());
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = points.row(idx[r]);
    return out;
}

double LabeledPointSet::min_interclass_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < count(); ++i)
        for (Eigen::Index j = i + 1; j < count(); ++j) {
            if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) continue;
            best = std::min(best, (points.row(i) - points.row(j)).norm());
        }
    return best;
}

void LabeledPointSet::validate() const {
    if (dim() < 1) throw std::invalid_argument("LabeledPointSet: dimension must be >= 1");
    if (num_classes < 2) throw std::invalid_argument("LabeledPointSet: num_classes must be >= 2");
    if (static_cast<Eigen::Index>(labels.size()) != count())
        throw std::invalid_argument("LabeledPointSet: labels/points length mismatch");
    std::vector<long> seen(static_cast<std::size_t>(num_classes), 0);
    for (int l : labels) {
        if (l < 0 || l >= num_classes)
            throw std::invalid_argument("LabeledPointSet: label " + std::to_string(l) + " out of range");
        ++seen[static_cast<std::size_t>(l)];
    }
    for (int c = 0; c < num_classes; ++c)
        if (seen[static_cast<std::size_t>(c)] == 0)
            throw std::invalid_argument("LabeledPointSet: class " + std::to_string(c) + " is empty");
    if (!points.allFinite()) throw std::invalid_argument("LabeledPointSet: non-finite coordinates");
    const double gap = min_interclass_distance();
    if (!(gap > 0.0))
        throw std::invalid_argument("LabeledPointSet: classes are not disjoint (min inter-class distance " +
                                    format_double(gap) + ")");
}

void save_dataset_csv(const LabeledPointSet& data, const std::string& path,
                      const std::vector<std::string>& provenance) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    for (const auto& line : provenance) out << "# " << line << "\n";
    out << data.dim() << "," << data.num_classes << "," << data.count() << "\n";
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        for (Eigen::Index j = 0; j < data.dim(); ++j) out << format_double(data.points(i, j)) << ",";
        out << data.labels[static_cast<std::size_t>(i)] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) fields.push_back(cur);
    return fields;
}

}  // namespace

LabeledPointSet load_dataset_csv(const std::string& path, bool validate) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::string line;
    auto next_data_line = [&](std::string& dst) {
        while (std::getline(in, dst))
            if (!dst.empty() && dst[0] != '#') return true;
        return false;
    };
    if (!next_data_line(line)) throw std::runtime_error("empty dataset file: " + path);
    const auto header = split_csv(line);
    if (header.size() != 3) throw std::runtime_error("bad dataset header in " + path);
    const long dim = std::stol(header[0]);
    const int n_classes = std::stoi(header[1]);
    const long count = std::stol(header[2]);
    if (dim < 1 || n_classes < 2 || count < 1) throw std::runtime_error("bad dataset header values in " + path);

    LabeledPointSet data;
    data.points.resize(count, dim);
    data.labels.reserve(static_cast<std::size_t>(count));
    data.num_classes = n_classes;
    for (long i = 0; i < count; ++i) {
        if (!next_data_line(line)) throw std::runtime_error("truncated dataset file: " + path);
        const auto fields = split_csv(line);
        if (static_cast<long>(fields.size()) != dim + 1)
            throw std::runtime_error("bad row " + std::to_string(i) + " in " + path);
        for (long j = 0; j < dim; ++j) data.points(i, j) = std::stod(fields[static_cast<std::size_t>(j)]);
        data.labels.push_back(std::stoi(fields[static_cast<std::size_t>(dim)]));
    }
    if (validate) data.validate();
    return data;
}

}  // namespace toponet
