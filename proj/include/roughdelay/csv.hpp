#pragma once

#include <string>

#include "roughdelay/analysis.hpp"

namespace roughdelay {

/// CSV writers. Doubles are printed with %.17g so outputs round-trip and
/// are byte-stable across runs. Files are written to "<path>.tmp" and
/// renamed, so failed runs leave no partial output behind.
std::string path_to_csv(const GridPath& p);
std::string tensor_to_csv(const TwoParamTensor& t);
std::string study_to_csv(const std::vector<StudyRow>& rows);

void write_file_atomic(const std::string& path, const std::string& content);

/// Reads a path CSV produced by path_to_csv.
GridPath path_from_csv(const std::string& content);

std::string format_double(double v);

} // namespace roughdelay
