#pragma once

#include <string>

#include <json.hpp>

#include "tpds/informativity.hpp"
#include "tpds/sim.hpp"
#include "tpds/spectral.hpp"
#include "tpds/tensor.hpp"

namespace tpds::io {

using nlohmann::json;

/// {"dims": [n, m, r], "slices": [S_1, ..., S_r]}, each slice a list of rows.
json tensor_to_json(const Tensor3& t);
/// Throws FormatError on any mismatch between dims and slices.
Tensor3 tensor_from_json(const json& j);

/// {"v": tensor, "y": tensor, "z": tensor} with optional "l" and "h".
json data_to_json(const ExperimentData& d);
ExperimentData data_from_json(const json& j);

/// Complex values are [re, im] pairs.
json complex_matrix_to_json(const ComplexMatrix& m);
json spectrum_to_json(const TupleSpectrum& s);
json report_to_json(const InformativityReport& r);
json trajectory_to_json(const Trajectory& t);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
Tensor3 read_tensor_file(const std::string& path);

}  // namespace tpds::io
