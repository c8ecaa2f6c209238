#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "moduli/moduli.hpp"

namespace moduli {

/// CSV with header `eps,value,grid_n,refine_tol` (plus `,hilbert` when
/// requested), 17 significant digits, one row per sample.
std::string curve_to_csv(const ModulusCurve& curve, bool with_hilbert = false);

/// Reads the CSV written by curve_to_csv. The kind and norm are not part of
/// the CSV and must be supplied; witnesses are not stored and come back empty.
/// A hilbert column, if present, is ignored.
ModulusCurve curve_from_csv(std::string_view text, const ModulusKind& kind, const Norm& norm);

/// True if the CSV header carries a hilbert column.
bool csv_has_hilbert(std::string_view text);

nlohmann::json curve_to_json(const ModulusCurve& curve, bool with_hilbert = false);
ModulusCurve curve_from_json(const nlohmann::json& j);

/// Whole-file helpers; throw IoError.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace moduli
