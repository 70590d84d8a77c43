#include "hoqc/field_io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "hoqc/errors.hpp"

namespace hoqc {

namespace {

constexpr std::array<char, 8> kMagic{'H', 'O', 'Q', 'C', 'F', 'L', 'D', '\0'};
constexpr std::int32_t kVersion = 1;

struct Header {
    std::int32_t version, dim, n, kind, components;
};

const char* kind_name(int kind) {
    switch (kind) {
    case 0: return "scalar";
    case 1: return "vector";
    default: return "matrix";
    }
}

} // namespace

void save_field(const std::string& path, const AnyField& field, const std::string& note) {
    const auto [grid, values, kind] = std::visit(
        [](const auto& f) -> std::tuple<PeriodicGrid, Eigen::ArrayXXd, int> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ScalarField>)
                return {f.grid(), Eigen::ArrayXXd(f.values()), 0};
            else if constexpr (std::is_same_v<T, VectorField>)
                return {f.grid(), f.values(), 1};
            else
                return {f.grid(), f.values(), 2};
        },
        field);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParameterError("cannot write field file " + path);
    const Header h{kVersion, grid.dim(), grid.n(), kind, static_cast<std::int32_t>(values.cols())};
    out.write(kMagic.data(), kMagic.size());
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    // Node-major order: transpose so each node's components are contiguous.
    const Eigen::ArrayXXd node_major = values.transpose();
    out.write(reinterpret_cast<const char*>(node_major.data()),
              static_cast<std::streamsize>(node_major.size() * sizeof(double)));
    if (!out)
        throw ParameterError("failed writing field file " + path);

    nlohmann::json meta{{"format", "hoqc-field"},
                        {"version", kVersion},
                        {"dim", grid.dim()},
                        {"points_per_axis", grid.n()},
                        {"kind", kind_name(kind)},
                        {"components", values.cols()},
                        {"dtype", "float64"},
                        {"order", "row-major nodes, components interleaved"}};
    if (!note.empty())
        meta["note"] = note;
    std::ofstream(path + ".json") << meta.dump(2) << '\n';
}

AnyField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParameterError("cannot read field file " + path);
    std::array<char, 8> magic{};
    Header h{};
    in.read(magic.data(), magic.size());
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || magic != kMagic)
        throw ParameterError("not a field file: " + path);
    if (h.version != kVersion)
        throw ParameterError("unsupported field file version");
    const PeriodicGrid grid(h.dim, h.n);
    const int expected = h.kind == 0 ? 1 : h.kind == 1 ? h.dim : h.dim * h.dim;
    if (h.kind < 0 || h.kind > 2 || h.components != expected)
        throw ParameterError("inconsistent field file header");
    Eigen::ArrayXXd node_major(h.components, grid.nodes());
    in.read(reinterpret_cast<char*>(node_major.data()),
            static_cast<std::streamsize>(node_major.size() * sizeof(double)));
    if (!in)
        throw ParameterError("truncated field file " + path);
    Eigen::ArrayXXd values = node_major.transpose();
    switch (h.kind) {
    case 0: return ScalarField(grid, values.col(0));
    case 1: return VectorField(grid, std::move(values));
    default: return MatrixField(grid, std::move(values));
    }
}

} // namespace hoqc
