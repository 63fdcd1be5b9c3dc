#include "tpds/json_io.hpp"

#include <fstream>
#include <sstream>

#include "tpds/errors.hpp"
#include "tpds/lmi.hpp"

namespace tpds::io {

namespace {

std::size_t positive_dim(const json& v, const char* what) {
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw FormatError(std::string("dims: ") + what + " must be a positive integer");
    return v.get<std::size_t>();
}

json pair(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace

json tensor_to_json(const Tensor3& t) {
    json slices = json::array();
    for (std::size_t k = 0; k < t.depth(); ++k) {
        json rows = json::array();
        for (std::size_t i = 0; i < t.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < t.cols(); ++j) row.push_back(t(i, j, k));
            rows.push_back(std::move(row));
        }
        slices.push_back(std::move(rows));
    }
    return {{"dims", {t.rows(), t.cols(), t.depth()}}, {"slices", std::move(slices)}};
}

Tensor3 tensor_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("slices"))
        throw FormatError("tensor must be an object with \"dims\" and \"slices\"");
    const json& dims = j.at("dims");
    if (!dims.is_array() || dims.size() != 3) throw FormatError("dims must be [n, m, r]");
    const std::size_t n = positive_dim(dims[0], "n"), m = positive_dim(dims[1], "m"), r = positive_dim(dims[2], "r");
    const json& slices = j.at("slices");
    if (!slices.is_array() || slices.size() != r)
        throw FormatError("expected " + std::to_string(r) + " slices");
    Tensor3 t(n, m, r);
    for (std::size_t k = 0; k < r; ++k) {
        const json& rows = slices[k];
        if (!rows.is_array() || rows.size() != n)
            throw FormatError("slice " + std::to_string(k + 1) + " must have " + std::to_string(n) + " rows");
        for (std::size_t i = 0; i < n; ++i) {
            const json& row = rows[i];
            if (!row.is_array() || row.size() != m)
                throw FormatError("slice " + std::to_string(k + 1) + ", row " + std::to_string(i + 1) + " must have " +
                                  std::to_string(m) + " entries");
            for (std::size_t c = 0; c < m; ++c) {
                if (!row[c].is_number()) throw FormatError("tensor entries must be numbers");
                t(i, c, k) = row[c].get<double>();
            }
        }
    }
    return t;
}

json data_to_json(const ExperimentData& d) {
    return {{"v", tensor_to_json(d.v)}, {"y", tensor_to_json(d.y)}, {"z", tensor_to_json(d.z)}, {"l", d.l}, {"h", d.h}};
}

ExperimentData data_from_json(const json& j) {
    if (!j.is_object() || !j.contains("v") || !j.contains("y") || !j.contains("z"))
        throw FormatError("experiment data must be an object with \"v\", \"y\" and \"z\"");
    std::size_t l = 0, h = 0;
    if (j.contains("l")) l = positive_dim(j.at("l"), "l");
    if (j.contains("h")) h = positive_dim(j.at("h"), "h");
    try {
        return ExperimentData(tensor_from_json(j.at("v")), tensor_from_json(j.at("y")), tensor_from_json(j.at("z")),
                              l, h);
    } catch (const DimensionError& e) {
        throw FormatError(e.what());
    }
}

json complex_matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(pair(m(i, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json spectrum_to_json(const TupleSpectrum& s) {
    json out = json::array();
    for (const auto& tuple : s.tuples) {
        json t = json::array();
        for (const auto& z : tuple) t.push_back(pair(z));
        out.push_back(std::move(t));
    }
    return out;
}

json report_to_json(const InformativityReport& r) {
    json blocks = json::array();
    for (const auto& b : r.blocks) {
        json jb = {{"j", b.j + 1}, {"success", b.success}, {"mirrored", b.mirrored}};
        if (b.rank >= 0) jb["rank"] = b.rank;
        if (b.required_rank >= 0) jb["required_rank"] = b.required_rank;
        if (!b.condition.empty()) jb["condition"] = b.condition;
        if (b.sdp_status) {
            jb["sdp_status"] = to_string(*b.sdp_status);
            jb["margin"] = b.margin;
        }
        if (b.certificate.size() > 0) jb["certificate"] = complex_matrix_to_json(b.certificate);
        blocks.push_back(std::move(jb));
    }
    json out = {{"task", to_string(r.task)}, {"verdict", r.verdict}, {"blocks", std::move(blocks)}};
    if (r.gain) out["gain"] = tensor_to_json(*r.gain);
    return out;
}

json trajectory_to_json(const Trajectory& t) {
    json states = json::array(), inputs = json::array();
    for (const auto& x : t.states) states.push_back(tensor_to_json(x));
    for (const auto& u : t.inputs) inputs.push_back(tensor_to_json(u));
    return {{"states", std::move(states)}, {"inputs", std::move(inputs)}, {"diverged", t.diverged}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << j.dump(2) << '\n';
}

Tensor3 read_tensor_file(const std::string& path) {
    try {
        return tensor_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace tpds::io
