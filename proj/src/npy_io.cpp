#include "odstain/npy_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "NPY payload handling assumes a little-endian host");

namespace odstain {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

// Minimal parser for the Python dict literal in an NPY v1.0 header. Only
// the three mandated keys are understood.
struct HeaderFields {
    std::string descr;
    bool fortran_order = false;
    std::vector<int> shape;
};

HeaderFields parse_header(const std::string& header, const std::string& file) {
    auto bad = [&](const std::string& why) -> void {
        fail(Errc::MalformedHeader, "bad NPY header (" + why + "): " + file);
    };

    std::size_t open = header.find('{');
    std::size_t close = header.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close <= open) {
        bad("no dict literal");
    }
    std::string body = header.substr(open + 1, close - open - 1);

    // Split on top-level commas (parentheses may nest inside the shape tuple).
    std::vector<std::string> items;
    int depth = 0;
    std::string cur;
    for (char ch : body) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            items.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    items.push_back(cur);

    HeaderFields f;
    bool saw_descr = false, saw_order = false, saw_shape = false;
    for (const std::string& raw : items) {
        std::string item = trimmed(raw);
        if (item.empty()) continue;
        std::size_t colon = item.find(':');
        if (colon == std::string::npos) bad("entry without ':'");
        std::string key = trimmed(item.substr(0, colon));
        std::string value = trimmed(item.substr(colon + 1));
        if (key.size() < 2 || (key.front() != '\'' && key.front() != '"')) bad("unquoted key");
        key = key.substr(1, key.size() - 2);

        if (key == "descr") {
            if (value.size() < 2) bad("descr literal");
            f.descr = value.substr(1, value.size() - 2);
            saw_descr = true;
        } else if (key == "fortran_order") {
            if (value == "True") {
                f.fortran_order = true;
            } else if (value == "False") {
                f.fortran_order = false;
            } else {
                bad("fortran_order not a bool");
            }
            saw_order = true;
        } else if (key == "shape") {
            if (value.size() < 2 || value.front() != '(' || value.back() != ')') {
                bad("shape not a tuple");
            }
            std::stringstream ss(value.substr(1, value.size() - 2));
            std::string dim;
            while (std::getline(ss, dim, ',')) {
                dim = trimmed(dim);
                if (dim.empty()) continue;  // trailing comma of 1-tuples
                try {
                    std::size_t used = 0;
                    long v = std::stol(dim, &used);
                    if (used != dim.size() || v < 1) bad("non-positive dimension");
                    f.shape.push_back(static_cast<int>(v));
                } catch (const std::exception&) {
                    bad("unparsable dimension");
                }
            }
            saw_shape = true;
        } else {
            bad("unknown key '" + key + "'");
        }
    }
    if (!saw_descr || !saw_order || !saw_shape) bad("missing required key");
    return f;
}

void write_npy(const std::vector<int>& shape, const std::vector<double>& values,
               const std::filesystem::path& path) {
    std::string shape_str = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        shape_str += std::to_string(shape[i]);
        if (i + 1 < shape.size()) shape_str += ", ";
    }
    shape_str += ")";
    std::string dict =
        "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape_str + ", }";
    // Pad with spaces so magic + version + length + header is a multiple of 64,
    // with a terminating newline.
    std::size_t unpadded = 10 + dict.size() + 1;
    std::size_t padded = (unpadded + 63) / 64 * 64;
    dict.append(padded - unpadded, ' ');
    dict.push_back('\n');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot write " + path.string());
    out.write(kMagic, 6);
    out.put('\x01');
    out.put('\x00');
    const std::uint16_t hlen = static_cast<std::uint16_t>(dict.size());
    out.put(static_cast<char>(hlen & 0xff));
    out.put(static_cast<char>(hlen >> 8));
    out.write(dict.data(), static_cast<std::streamsize>(dict.size()));

    std::vector<float> payload(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) payload[i] = static_cast<float>(values[i]);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out) fail(Errc::IoFailure, "write failed: " + path.string());
}

}  // namespace

NpyArray load_npy(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec) {
        fail(Errc::MissingFile, "no such file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::MissingFile, "cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const std::string file = path.string();
    if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0) {
        fail(Errc::MalformedHeader, "not an NPY file: " + file);
    }
    if (bytes[6] != '\x01' || bytes[7] != '\x00') {
        fail(Errc::MalformedHeader, "unsupported NPY version: " + file);
    }
    const std::size_t hlen = static_cast<std::uint8_t>(bytes[8]) |
                             (static_cast<std::size_t>(static_cast<std::uint8_t>(bytes[9])) << 8);
    if (bytes.size() < 10 + hlen) fail(Errc::MalformedHeader, "truncated NPY header: " + file);

    HeaderFields f = parse_header(std::string(bytes.data() + 10, hlen), file);
    if (f.descr != "<f4") {
        fail(Errc::UnsupportedDtype, "dtype '" + f.descr + "' is not '<f4': " + file);
    }
    if (f.fortran_order) {
        fail(Errc::UnsupportedOrder, "Fortran-order arrays are not supported: " + file);
    }
    if (f.shape.size() != 2 && f.shape.size() != 3) {
        fail(Errc::MalformedHeader,
             "expected a 2-D or 3-D array, got " + std::to_string(f.shape.size()) + "-D: " + file);
    }

    std::size_t count = 1;
    for (int d : f.shape) count *= static_cast<std::size_t>(d);
    if (bytes.size() != 10 + hlen + count * sizeof(float)) {
        fail(Errc::MalformedHeader, "payload size does not match shape: " + file);
    }

    NpyArray arr;
    arr.shape = f.shape;
    arr.values.resize(count);
    const char* payload = bytes.data() + 10 + hlen;
    for (std::size_t i = 0; i < count; ++i) {
        float v;
        std::memcpy(&v, payload + i * sizeof(float), sizeof(float));
        if (!std::isfinite(v)) fail(Errc::InvalidTensor, "non-finite value in " + file);
        arr.values[i] = static_cast<double>(v);
    }
    return arr;
}

void save_npy(const ScalarField& field, const std::filesystem::path& path) {
    write_npy({field.height, field.width}, field.values, path);
}

void save_npy(const Tensor3& tensor, const std::filesystem::path& path) {
    write_npy({tensor.height, tensor.width, tensor.depth}, tensor.values, path);
}

ScalarField to_scalar_field(const NpyArray& arr) {
    if (arr.ndim() != 2) {
        fail(Errc::ShapeMismatch, "expected a 2-D array, got " + std::to_string(arr.ndim()) + "-D");
    }
    ScalarField f(arr.shape[0], arr.shape[1]);
    f.values = arr.values;
    return f;
}

Tensor3 to_tensor3(const NpyArray& arr) {
    if (arr.ndim() != 3) {
        fail(Errc::ShapeMismatch, "expected a 3-D array, got " + std::to_string(arr.ndim()) + "-D");
    }
    Tensor3 t(arr.shape[0], arr.shape[1], arr.shape[2]);
    t.values = arr.values;
    return t;
}

}  // namespace odstain
