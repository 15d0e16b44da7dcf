#pragma once

#include <filesystem>
#include <vector>

#include "odstain/image.hpp"

namespace odstain {

// NPY v1.0 transport: magic \x93NUMPY, version 01 00, header dict with
// 'descr': '<f4', 'fortran_order': False and an explicit shape tuple,
// followed by little-endian float32 payload in C order. 2-D and 3-D
// arrays only; everything else is rejected with a typed error.
struct NpyArray {
    std::vector<int> shape;      // 2 or 3 entries
    std::vector<double> values;  // row-major (C order)

    int ndim() const { return static_cast<int>(shape.size()); }
};

NpyArray load_npy(const std::filesystem::path& path);

void save_npy(const ScalarField& field, const std::filesystem::path& path);
void save_npy(const Tensor3& tensor, const std::filesystem::path& path);

ScalarField to_scalar_field(const NpyArray& arr);  // requires ndim == 2
Tensor3 to_tensor3(const NpyArray& arr);           // requires ndim == 3

}  // namespace odstain
