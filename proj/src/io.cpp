#include "netinf/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace netinf::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot open for writing: " + path.string());
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

[[noreturn]] void malformed(const std::filesystem::path& path, long line_no,
                            const std::string& what) {
    std::ostringstream msg;
    msg << "io: malformed input " << path.string() << ":" << line_no << ": " << what;
    throw std::runtime_error(msg.str());
}

double parse_double(const std::string& s, const std::filesystem::path& path, long line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        malformed(path, line_no, "expected a number, got '" + s + "'");
    }
}

}  // namespace

void write_time_series(const std::filesystem::path& path, const dyn::TimeSeries& series) {
    std::ofstream out = open_out(path);
    out << "segment,t";
    for (int i = 0; i < series.nodes; ++i) out << ",x_" << i;
    out << "\n";
    for (std::size_t s = 0; s < series.segments.size(); ++s) {
        const Mat& seg = series.segments[s];
        for (Eigen::Index t = 0; t < seg.cols(); ++t) {
            out << s << "," << t;
            for (Eigen::Index i = 0; i < seg.rows(); ++i) out << "," << seg(i, t);
            out << "\n";
        }
    }
}

dyn::TimeSeries read_time_series(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) malformed(path, 1, "empty file");
    ++line_no;
    const auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "segment" || header[1] != "t")
        malformed(path, 1, "expected header 'segment,t,x_0,...'");
    const int n = static_cast<int>(header.size()) - 2;

    dyn::TimeSeries series;
    series.nodes = n;
    std::vector<std::vector<Eigen::VectorXd>> columns;  // per segment
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) != n + 2)
            malformed(path, line_no, "wrong number of columns");
        const auto seg = static_cast<std::size_t>(parse_double(fields[0], path, line_no));
        if (seg >= columns.size()) columns.resize(seg + 1);
        Eigen::VectorXd state(n);
        for (int i = 0; i < n; ++i)
            state(i) = parse_double(fields[static_cast<std::size_t>(i) + 2], path, line_no);
        columns[seg].push_back(std::move(state));
    }
    for (const auto& states : columns) {
        Mat seg(n, static_cast<Eigen::Index>(states.size()));
        for (std::size_t t = 0; t < states.size(); ++t)
            seg.col(static_cast<Eigen::Index>(t)) = states[t];
        series.segments.push_back(std::move(seg));
    }
    return series;
}

void write_edge_list(const std::filesystem::path& path, const Mat& a) {
    std::ofstream out = open_out(path);
    out << "i,j,weight\n";
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a.cols(); ++j)
            if (a(i, j) != 0.0) out << i << "," << j << "," << a(i, j) << "\n";
}

Mat read_edge_list(const std::filesystem::path& path, int n_nodes) {
    std::ifstream in = open_in(path);
    std::string line;
    long line_no = 1;
    if (!std::getline(in, line)) malformed(path, 1, "empty file");
    Mat a = Mat::Zero(n_nodes, n_nodes);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3) malformed(path, line_no, "expected 'i,j,weight'");
        const int i = static_cast<int>(parse_double(fields[0], path, line_no));
        const int j = static_cast<int>(parse_double(fields[1], path, line_no));
        if (i < 0 || j < 0 || i >= n_nodes || j >= n_nodes)
            malformed(path, line_no, "node index out of range");
        const double w = parse_double(fields[2], path, line_no);
        a(i, j) = w;
        a(j, i) = w;
    }
    return a;
}

void write_dense_matrix(const std::filesystem::path& path, const Mat& m) {
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j > 0 ? "," : "") << m(i, j);
        out << "\n";
    }
}

Mat read_dense_matrix(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    long line_no = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, path, line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            malformed(path, line_no, "ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) malformed(path, 1, "empty matrix");
    Mat m(static_cast<Eigen::Index>(rows.size()),
          static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void write_ensemble(const std::filesystem::path& path,
                    const infer::SampleEnsemble& ensemble, std::uint64_t seed) {
    std::ofstream out = open_out(path);
    nlohmann::json header;
    header["seed"] = seed;
    header["burn_in_fraction"] = ensemble.burn_in_fraction;
    header["loss_exponent_power"] = ensemble.loss_exponent_power;
    header["samples"] = ensemble.samples.size();
    if (!ensemble.samples.empty()) {
        header["rows"] = ensemble.samples.front().network.rows();
        header["cols"] = ensemble.samples.front().network.cols();
    }
    out << "#" << header.dump() << "\n";
    out << "iteration,loss";
    if (!ensemble.samples.empty()) {
        const Mat& a = ensemble.samples.front().network;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) out << ",a_" << i << j;
    }
    out << "\n";
    for (const auto& s : ensemble.samples) {
        out << s.iteration << "," << s.data_loss;
        for (Eigen::Index i = 0; i < s.network.rows(); ++i)
            for (Eigen::Index j = 0; j < s.network.cols(); ++j) out << "," << s.network(i, j);
        out << "\n";
    }
}

infer::SampleEnsemble read_ensemble(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#')
        malformed(path, 1, "missing JSON header line");
    const nlohmann::json header = nlohmann::json::parse(line.substr(1));
    infer::SampleEnsemble ensemble;
    ensemble.burn_in_fraction = header.value("burn_in_fraction", 0.1);
    ensemble.loss_exponent_power = header.value("loss_exponent_power", 1.0);
    const Eigen::Index rows = header.value("rows", 0);
    const Eigen::Index cols = header.value("cols", 0);
    long line_no = 2;
    std::getline(in, line);  // CSV column header
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (static_cast<Eigen::Index>(fields.size()) != rows * cols + 2)
            malformed(path, line_no, "wrong number of columns");
        infer::Sample s;
        s.iteration = static_cast<long>(parse_double(fields[0], path, line_no));
        s.data_loss = parse_double(fields[1], path, line_no);
        s.network.resize(rows, cols);
        std::size_t k = 2;
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                s.network(i, j) = parse_double(fields[k++], path, line_no);
        ensemble.samples.push_back(std::move(s));
    }
    return ensemble;
}

void write_marginal(const std::filesystem::path& path, const infer::Marginal& marginal) {
    std::ofstream out = open_out(path);
    out << "grid_value,density\n";
    for (Eigen::Index g = 0; g < marginal.grid.size(); ++g)
        out << marginal.grid(g) << "," << marginal.density(g) << "\n";
}

void write_distribution(const std::filesystem::path& path,
                        const analysis::DistributionEstimate& est) {
    std::ofstream out = open_out(path);
    out << "grid_value,density,band\n";
    for (Eigen::Index g = 0; g < est.grid.size(); ++g) {
        out << est.grid(g) << "," << est.density(g) << ","
            << (est.band.size() > 0 ? est.band(g) : 0.0) << "\n";
    }
}

void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i > 0 ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i > 0 ? "," : "") << row[i];
        out << "\n";
    }
}

}  // namespace netinf::io
