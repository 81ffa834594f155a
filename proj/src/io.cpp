#include "stlgcp/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stlgcp {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line_no, const char* name) {
    try {
        std::size_t used = 0;
        const double v = std::stod(trim(field), &used);
        if (used != trim(field).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse " + name +
                                 " value '" + trim(field) + "'");
    }
}

}  // namespace

PointPattern read_pattern_csv(const std::string& path, const SpaceTimeWindow& window) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pattern file: " + path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    ++line_no;
    {
        const auto cols = split_csv(line);
        if (cols.size() != 3 || trim(cols[0]) != "x" || trim(cols[1]) != "y" ||
            trim(cols[2]) != "t")
            throw std::runtime_error(path + ": expected header 'x,y,t'");
    }
    std::vector<Point> pts;
    std::vector<std::size_t> outside;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != 3)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 3 fields, got " + std::to_string(cols.size()));
        const Point p{parse_number(cols[0], line_no, "x"), parse_number(cols[1], line_no, "y"),
                      parse_number(cols[2], line_no, "t")};
        if (!window.contains(p.x, p.y, p.t)) outside.push_back(line_no);
        pts.push_back(p);
    }
    if (!outside.empty()) {
        std::ostringstream msg;
        msg << path << ": " << outside.size() << " point(s) outside the window (lines";
        for (std::size_t k = 0; k < outside.size() && k < 10; ++k) msg << ' ' << outside[k];
        if (outside.size() > 10) msg << " ...";
        msg << ")";
        throw std::runtime_error(msg.str());
    }
    return PointPattern(std::move(pts), window);
}

void write_pattern_csv(const PointPattern& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "x,y,t\n";
    for (const auto& pt : p.points()) out << pt.x << ',' << pt.y << ',' << pt.t << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<CovarianceModel> read_local_fit_csv(const std::string& path,
                                                const std::string& family) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open local fit file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const auto header = split_csv(line);
    const bool gneiting = family == "gneiting";
    const std::size_t expect = gneiting ? 10 : 9;
    if (header.size() != expect)
        throw std::runtime_error(path + ": header does not match a '" + family +
                                 "' local fit file");
    std::vector<CovarianceModel> models;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != expect)
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(expect) + " fields");
        const double sigma2 = parse_number(cols[4], line_no, "sigma2");
        const double alpha = parse_number(cols[5], line_no, "alpha");
        const double beta = parse_number(cols[6], line_no, "beta");
        if (gneiting) {
            const double delta = parse_number(cols[7], line_no, "delta");
            models.push_back(CovarianceModel(GneitingParams{sigma2, alpha, beta, 1.0, 1.0, delta}));
        } else {
            models.push_back(CovarianceModel(SeparableExponentialParams{sigma2, alpha, beta}));
        }
    }
    return models;
}

}  // namespace stlgcp
