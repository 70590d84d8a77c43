#pragma once

// Flat binary field files with a JSON sidecar (path + ".json").
//
// Layout: 8-byte magic "HOQCFLD\0", then int32 version, dim, N, kind,
// components, then components * N^dim little-endian doubles in row-major node
// order with the components of one node stored together.

#include <string>
#include <variant>

#include "hoqc/fields.hpp"

namespace hoqc {

using AnyField = std::variant<ScalarField, VectorField, MatrixField>;

/// Writes the binary file and its sidecar. `note` lands in the sidecar.
void save_field(const std::string& path, const AnyField& field, const std::string& note = "");
AnyField load_field(const std::string& path);

} // namespace hoqc
